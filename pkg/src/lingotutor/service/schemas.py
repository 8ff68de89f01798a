"""Request bodies for the HTTP API.

Response payloads are plain JSON documents described in docs/api.md;
they are assembled by the domain layer and returned as-is.
"""

from __future__ import annotations

from pydantic import BaseModel, Field


class RegisterRequest(BaseModel):
    name: str = Field(min_length=1, max_length=120)
    role: str = Field(pattern="^(learner|teacher)$")


class LevelRequest(BaseModel):
    level: str = Field(pattern="^(A1|A2|B1|B2|C1|C2)$")


class StoryCreate(BaseModel):
    language: str = Field(min_length=2, max_length=16)
    title: str = Field(min_length=1, max_length=200)
    text: str = Field(min_length=1)


class ShareRequest(BaseModel):
    group: str | None = None
    public: bool = False


class SessionCreate(BaseModel):
    story: str


class AnswerRequest(BaseModel):
    given: str = Field(max_length=500)


class PlacementStart(BaseModel):
    language: str


class GroupCreate(BaseModel):
    name: str = Field(min_length=1, max_length=120)


class InviteRequest(BaseModel):
    learner: str
