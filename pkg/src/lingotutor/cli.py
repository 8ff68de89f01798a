"""Operator command line: pack validation, annotation, simulation, serving.

Machine-readable JSON goes to stdout; progress and error diagnostics go
to stderr. All commands are deterministic under fixed seeds.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import default_packs_dir
from .detect import detect_constructs, story_json
from .errors import TutorError
from .learner import simulate
from .pack import LanguagePack, load_pack, load_packs
from .pipeline import annotate as annotate_text


def _emit(payload: dict) -> None:
    click.echo(json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True))


def _diag(message: str) -> None:
    click.echo(message, err=True)


class _TutorGroup(click.Group):
    """Group that turns domain errors into clean one-line exits."""

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except TutorError as exc:
            _diag(f"{type(exc).__name__}: {exc}")
            sys.exit(1)


@click.group(cls=_TutorGroup)
@click.version_option(package_name="lingotutor")
def main() -> None:
    """Construct-based language tutoring toolkit."""


@main.group("pack")
def pack_group() -> None:
    """Language pack maintenance."""


@pack_group.command("validate")
@click.argument("paths", nargs=-1, required=True,
                type=click.Path(exists=False, path_type=Path))
def pack_validate(paths: tuple[Path, ...]) -> None:
    """Validate pack directories, exiting nonzero on any violation."""
    report = []
    for path in paths:
        try:
            pack = load_pack(path)
        except TutorError as exc:
            _diag(f"{path}: {type(exc).__name__}: {exc}")
            report.append({"path": str(path), "ok": False,
                           "violations": [str(exc)]})
        else:
            _diag(f"{path}: ok ({pack.language}, "
                  f"{len(pack.morphology.lexemes)} lexemes, "
                  f"{len(pack.constructs)} constructs)")
            report.append({"path": str(path), "ok": True, "violations": []})
    _emit({"packs": report, "ok": all(entry["ok"] for entry in report)})
    if not all(entry["ok"] for entry in report):
        sys.exit(1)


def _resolve_pack(pack_dir: Path | None, language: str | None,
                  packs_dir: Path) -> LanguagePack:
    if pack_dir is not None:
        return load_pack(pack_dir)
    if language is not None:
        packs = load_packs(packs_dir)
        if language not in packs:
            raise click.UsageError(
                f"no pack for language '{language}' under {packs_dir}")
        return packs[language]
    raise click.UsageError("pass --pack or --language")


@main.command("annotate")
@click.argument("textfile", required=False,
                type=click.Path(path_type=Path, allow_dash=True))
@click.option("--pack", "pack_dir", type=click.Path(path_type=Path),
              help="Pack directory to annotate with.")
@click.option("--language", help="Language code resolved against --packs-dir.")
@click.option("--packs-dir", type=click.Path(path_type=Path),
              default=None, help="Directory of installed packs.")
@click.option("--story-id", default="story", show_default=True)
@click.option("--compare", "gold_file", type=click.Path(path_type=Path),
              help="Gold corpus JSON to check detection against.")
def annotate_cmd(textfile: Path | None, pack_dir: Path | None,
                 language: str | None, packs_dir: Path | None,
                 story_id: str, gold_file: Path | None) -> None:
    """Annotate text and print the story with detected constructs as JSON."""
    pack = _resolve_pack(pack_dir, language, packs_dir or default_packs_dir())
    if gold_file is not None:
        _compare_gold(pack, gold_file)
        return
    if textfile is None:
        raise click.UsageError("pass a text file (or -) unless using --compare")
    if str(textfile) == "-":
        text = sys.stdin.read()
    else:
        text = Path(textfile).read_text(encoding="utf-8")
    story = annotate_text(pack, text, story_id)
    instances = detect_constructs(story, pack)
    _emit(story_json(story, instances))


def _instance_key(story, instance) -> tuple:
    return (instance.construct, instance.sentence,
            tuple(story.tokens[i].surface for i in instance.matched),
            tuple(story.tokens[i].surface for i in instance.candidates))


def _compare_gold(pack: LanguagePack, gold_file: Path) -> None:
    # structure-sensitive: surfaces and order matter, bytes and indices do not
    gold = json.loads(Path(gold_file).read_text(encoding="utf-8"))
    failures = []
    for index, entry in enumerate(gold["stories"]):
        story = annotate_text(pack, entry["text"], f"gold-{index:03d}")
        instances = detect_constructs(story, pack)
        got = sorted(_instance_key(story, inst) for inst in instances)
        want = sorted((i["construct"], i["sentence"],
                       tuple(i["matched"]), tuple(i["candidates"]))
                      for i in entry["instances"])
        if got == want:
            continue
        failures.append(index)
        _diag(f"story {index}: {entry['text']}")
        for item in want:
            if item not in got:
                _diag(f"  missing {item}")
        for item in got:
            if item not in want:
                _diag(f"  extra   {item}")
    _emit({"stories": len(gold["stories"]), "failed": failures,
           "ok": not failures})
    if failures:
        sys.exit(1)


@main.command("simulate")
@click.option("--learners", default=200, show_default=True)
@click.option("--constructs", default=100, show_default=True)
@click.option("--answers", default=100, show_default=True,
              help="Answers per learner.")
@click.option("--seed", default=7, show_default=True)
@click.option("--theta-sigma", default=1.0, show_default=True,
              help="Spread of planted abilities.")
@click.option("--b-sigma", default=1.0, show_default=True,
              help="Spread of planted difficulties.")
@click.option("--events-out", type=click.Path(path_type=Path),
              help="Write the simulated event log here as NDJSON.")
def simulate_cmd(learners: int, constructs: int, answers: int, seed: int,
                 theta_sigma: float, b_sigma: float,
                 events_out: Path | None) -> None:
    """Plant abilities and difficulties, recover them, report correlations."""
    events, report = simulate(learners=learners, constructs=constructs,
                              answers=answers, seed=seed,
                              theta_sigma=theta_sigma, b_sigma=b_sigma)
    if events_out is not None:
        with open(events_out, "w", encoding="utf-8") as handle:
            for event in events:
                handle.write(json.dumps(event.to_dict(), ensure_ascii=False,
                                        sort_keys=True) + "\n")
        _diag(f"wrote {len(events)} events to {events_out}")
    _emit(report)


@main.command("serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
@click.option("--packs-dir", type=click.Path(path_type=Path), default=None,
              help="Directory of installed packs.")
@click.option("--data-dir", default="data", show_default=True,
              help="Where user and event data is stored.")
def serve_cmd(host: str, port: int, packs_dir: Path | None,
              data_dir: str) -> None:
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    app = create_app(packs_dir=packs_dir, data_dir=data_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
