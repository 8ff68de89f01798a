"""FastAPI application exposing the tutoring engine under /api/v1.

Bearer tokens from registration authenticate every other route. Domain
errors map onto HTTP statuses in one place, so handlers stay thin
wrappers around TutorService calls.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import Depends, FastAPI, Header, HTTPException, Query
from fastapi.responses import JSONResponse

from .. import default_packs_dir, load_packs
from ..errors import (EmptyBank, EmptyInput, EmptyPool, ExhaustedAttempts,
                      Forbidden, NoCandidates, NoLevel, NotFound,
                      OutOfOrderAttempt, TutorError, UnknownExercise,
                      UnsupportedLanguage)
from .core import TutorService, User
from .schemas import (AnswerRequest, GroupCreate, InviteRequest, LevelRequest,
                      PlacementStart, RegisterRequest, SessionCreate,
                      ShareRequest, StoryCreate)

STATUS_BY_ERROR = {
    Forbidden: 403,
    NotFound: 404,
    UnknownExercise: 404,
    UnsupportedLanguage: 400,
    EmptyInput: 400,
    NoLevel: 400,
    NoCandidates: 409,
    ExhaustedAttempts: 409,
    EmptyPool: 409,
    EmptyBank: 409,
    OutOfOrderAttempt: 409,
}


def _status_for(error: TutorError) -> int:
    for kind, status in STATUS_BY_ERROR.items():
        if isinstance(error, kind):
            return status
    return 400


def create_app(packs_dir: str | Path | None = None,
               data_dir: str | Path = "data") -> FastAPI:
    """Build the service app around freshly loaded language packs."""
    packs = load_packs(packs_dir or default_packs_dir())
    service = TutorService(packs, data_dir)
    app = FastAPI(title="lingotutor", version="0.1.0", docs_url="/api/docs")
    app.state.service = service

    @app.exception_handler(TutorError)
    async def tutor_error_handler(_request, error: TutorError):
        return JSONResponse(status_code=_status_for(error),
                            content={"error": type(error).__name__,
                                     "detail": str(error)})

    def current_user(authorization: str = Header(default="")) -> User:
        token = authorization.removeprefix("Bearer ").strip()
        if not token or token not in service.tokens:
            raise HTTPException(status_code=401, detail="missing or invalid token")
        return service.users[service.tokens[token]]

    # --- accounts ---------------------------------------------------------

    @app.post("/api/v1/auth/register", status_code=201)
    def register(body: RegisterRequest):
        user = service.register(body.name, body.role)
        return user.to_dict()

    @app.get("/api/v1/me")
    def me(user: User = Depends(current_user)):
        return user.to_dict()

    @app.put("/api/v1/me/level")
    def set_level(body: LevelRequest, user: User = Depends(current_user)):
        return service.set_level(user, body.level).to_dict()

    @app.get("/api/v1/languages")
    def languages(user: User = Depends(current_user)):
        return service.languages()

    # --- stories ----------------------------------------------------------

    @app.post("/api/v1/stories", status_code=201)
    def upload_story(body: StoryCreate, user: User = Depends(current_user)):
        return service.upload_story(user, body.language, body.title, body.text)

    @app.get("/api/v1/stories")
    def list_stories(user: User = Depends(current_user)):
        return service.list_stories(user)

    @app.get("/api/v1/stories/{story_id}")
    def story_meta(story_id: str, user: User = Depends(current_user)):
        return service.story_meta(user, story_id)

    @app.post("/api/v1/stories/{story_id}/share")
    def share_story(story_id: str, body: ShareRequest,
                    user: User = Depends(current_user)):
        return service.share_story(user, story_id, body.group, body.public)

    @app.get("/api/v1/stories/{story_id}/preview")
    def preview(story_id: str, user: User = Depends(current_user)):
        return service.preview(user, story_id)

    @app.get("/api/v1/stories/{story_id}/tokens/{index}/translation")
    def translation(story_id: str, index: int, user: User = Depends(current_user)):
        return service.translation(user, story_id, index)

    # --- sessions -----------------------------------------------------------

    @app.post("/api/v1/sessions", status_code=201)
    def start_session(body: SessionCreate,
                      density: int = Query(default=3, ge=1, le=20),
                      seed: int = Query(default=0),
                      user: User = Depends(current_user)):
        return service.start_session(user, body.story, density, seed)

    @app.get("/api/v1/sessions/{session_id}")
    def session_view(session_id: str, user: User = Depends(current_user)):
        return service.session_view(user, session_id)

    @app.post("/api/v1/sessions/{session_id}/exercises/{exercise_id}/answer")
    def submit_answer(session_id: str, exercise_id: str, body: AnswerRequest,
                      user: User = Depends(current_user)):
        return service.submit_answer(user, session_id, exercise_id, body.given)

    @app.post("/api/v1/sessions/{session_id}/exercises/{exercise_id}/hint")
    def request_hint(session_id: str, exercise_id: str,
                     user: User = Depends(current_user)):
        return service.request_hint(user, session_id, exercise_id)

    # --- placement ----------------------------------------------------------

    @app.post("/api/v1/placement", status_code=201)
    def placement_start(body: PlacementStart, user: User = Depends(current_user)):
        return service.placement_start(user, body.language)

    @app.post("/api/v1/placement/{placement_id}/answer")
    def placement_answer(placement_id: str, body: AnswerRequest,
                         user: User = Depends(current_user)):
        return service.placement_answer(user, placement_id, body.given)

    # --- progress and groups --------------------------------------------------

    @app.get("/api/v1/progress")
    def progress(user: User = Depends(current_user)):
        return service.progress(user)

    @app.get("/api/v1/learners/{learner_id}/progress")
    def learner_progress(learner_id: str, user: User = Depends(current_user)):
        return service.learner_progress(user, learner_id)

    @app.post("/api/v1/groups", status_code=201)
    def create_group(body: GroupCreate, user: User = Depends(current_user)):
        return service.create_group(user, body.name)

    @app.get("/api/v1/groups/{group_id}")
    def group_info(group_id: str, user: User = Depends(current_user)):
        return service.group_info(user, group_id)

    @app.post("/api/v1/groups/{group_id}/invite")
    def invite(group_id: str, body: InviteRequest,
               user: User = Depends(current_user)):
        return service.invite(user, group_id, body.learner)

    @app.post("/api/v1/groups/{group_id}/accept")
    def accept(group_id: str, user: User = Depends(current_user)):
        return service.accept(user, group_id)

    @app.get("/api/v1/groups/{group_id}/progress")
    def group_progress(group_id: str, user: User = Depends(current_user)):
        return service.group_progress(user, group_id)

    return app
