"""``veristep`` command line.

Exit codes: 0 success, 1 domain failure (e.g. a trace that is not Full),
2 usage or I/O error.
"""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path

import click

from . import pipeline
from .config import AppConfig, ConfigError, load_config
from .dtv import simulate_soundness
from .gateway import GatewayError
from .metrics import matrix_to_csv
from .policy import GroupTooSmall, RolloutGroup, group_advantages, grpo_objective
from .problem import MODES, DatasetError, Problem, Skipped, build_problem, load_problems, load_proverqa
from .prover.fuzz import run_fuzz
from .reward import Tier, score

log = logging.getLogger("veristep")


class IOFailure(click.ClickException):
    exit_code = 2


def _fail_io(message: str) -> None:
    raise IOFailure(message)


def _emit(obj) -> None:
    click.echo(pipeline.canonical_json(obj))


def _load(ctx) -> AppConfig:
    return ctx.obj["config"]


def _dataset(cfg: AppConfig, path: str | None, mode: str) -> dict[str, Problem]:
    path = path or cfg.dataset
    if path is None:
        raise click.UsageError("a dataset file is required (argument or config 'dataset')")
    try:
        problems, skipped = load_problems(path, mode)
    except DatasetError as exc:
        _fail_io(str(exc))
    if skipped:
        log.info("skipped %d record(s) not answerable in %s mode", len(skipped), mode)
    return problems


def _candidate_lines(cfg: AppConfig, path: str | None) -> list[str]:
    path = path or cfg.candidates
    if path is None:
        raise click.UsageError("a candidates file is required (argument or config 'candidates')")
    try:
        return Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        _fail_io(f"cannot read {path}: {exc}")


mode_option = click.option("--mode", type=click.Choice(MODES), default=None, help="Overrides the config mode.")


@click.group()
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None, help="JSON config file.")
@click.option("-v", "--verbose", is_flag=True)
@click.pass_context
def main(ctx, config_path, verbose):
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(config_path)
    except ConfigError as exc:
        _fail_io(str(exc))
    ctx.obj = {"config": cfg}


@main.command()
@click.argument("problem_file", type=click.Path())
@click.argument("trace_file", type=click.Path())
@click.option("--problem-id", default=None, help="Record to use when the file holds several.")
@mode_option
@click.pass_context
def verify(ctx, problem_file, trace_file, problem_id, mode):
    """Verify one response against one problem; exit 0 iff the tier is Full."""
    cfg = _load(ctx)
    mode = mode or cfg.mode
    try:
        records = load_proverqa(problem_file)
        response = Path(trace_file).read_text(encoding="utf-8")
    except (DatasetError, OSError) as exc:
        _fail_io(str(exc))
    if problem_id is not None:
        records = [r for r in records if str(r.id) == problem_id]
    if not records:
        _fail_io("no matching problem record")
    problem = build_problem(records[0], mode)
    if isinstance(problem, Skipped):
        click.echo(f"problem {problem.record_id} skipped: {problem.reason}", err=True)
        sys.exit(1)
    b = score(response, problem, cfg.reward, mode)
    for v in b.step_verdicts:
        line = f"{v.step_id}: {v.status.value}"
        if v.countermodel:
            line += "  countermodel " + ", ".join(f"{k}={'T' if t else 'F'}" for k, t in v.countermodel.items())
        click.echo(line)
    for d in b.diagnostics:
        where = "" if d.location is None else f" [step {d.location}]"
        click.echo(f"{d.kind.value}{where}: {d.detail}")
    click.echo(f"tier {b.tier.value} reward {b.value} answer {b.answer_label}")
    sys.exit(0 if b.tier is Tier.FULL else 1)


@main.command("score")
@click.argument("dataset", required=False)
@click.argument("candidates", required=False)
@mode_option
@click.option("--server", default=None, help="Score through a running `veristep serve --transport http`.")
@click.pass_context
def score_cmd(ctx, dataset, candidates, mode, server):
    """Write one reward record per candidate as JSON lines."""
    cfg = _load(ctx)
    mode = mode or cfg.mode
    lines = _candidate_lines(cfg, candidates)
    if server is not None:
        sys.exit(_score_remote(server, lines))
    problems = _dataset(cfg, dataset, mode)
    failed = 0
    for item, breakdowns in pipeline.iter_scored(problems, lines, cfg.reward, mode):
        if breakdowns is None:
            failed += 1
            _emit(item.record())
            continue
        for b in breakdowns:
            _emit(pipeline.score_record(item.problem_id, b))
    sys.exit(1 if failed else 0)


def _score_remote(server: str, lines: list[str]) -> int:
    import httpx

    failed = 0
    with httpx.Client(base_url=server.rstrip("/"), timeout=300) as client:
        for item in pipeline.read_candidate_lines(lines):
            if isinstance(item, pipeline.BadLine):
                failed += 1
                _emit(item.record())
                continue
            for text in item.candidates:
                try:
                    resp = client.post("/score", json={"problem_id": item.problem_id, "response": text})
                except httpx.HTTPError as exc:
                    _fail_io(f"server unreachable: {exc}")
                if resp.status_code != 200:
                    failed += 1
                click.echo(resp.text)
    return 1 if failed else 0


@main.command()
@click.argument("dataset", required=False)
@click.argument("candidates", required=False)
@mode_option
@click.option("--judge", type=click.Choice(["on", "off"]), default="off", show_default=True)
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False), default=None, help="Write the correlation matrix.")
@click.pass_context
def evaluate(ctx, dataset, candidates, mode, judge, csv_path):
    """Answer-correct, reward-hit and soundness rates as one JSON document."""
    cfg = _load(ctx)
    mode = mode or cfg.mode
    problems = _dataset(cfg, dataset, mode)
    lines = _candidate_lines(cfg, candidates)
    gateway_cfg = cfg.gateway if judge == "on" else None
    try:
        report = pipeline.evaluate(problems, lines, cfg.reward, mode, gateway_cfg)
    except GatewayError as exc:
        click.echo(f"judge failed: {exc}", err=True)
        sys.exit(1)
    if csv_path and report.get("correlation") and report["correlation"].get("per_sample"):
        Path(csv_path).write_text(matrix_to_csv(report["correlation"]["per_sample"]), encoding="utf-8")
    click.echo(json.dumps(report, indent=2, ensure_ascii=False))
    sys.exit(1 if report["errors"] else 0)


def _sizes(text: str) -> list[int]:
    try:
        sizes = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise click.BadParameter("expected comma-separated integers") from None
    if not sizes or min(sizes) < 1:
        raise click.BadParameter("pool sizes must be positive")
    return sizes


@main.command()
@click.argument("dataset", required=False)
@click.argument("candidates", required=False)
@mode_option
@click.option("--pool-sizes", default="1,2,4,8,16", show_default=True)
@click.option("--simulate", is_flag=True, help="Use the synthetic pool model instead of data.")
@click.option("--trials", default=10_000, show_default=True)
@click.option("--seed", type=int, default=None)
@click.pass_context
def dtv(ctx, dataset, candidates, mode, pool_sizes, simulate, trials, seed):
    """Verifier-first selection per problem plus a per-pool-size table."""
    cfg = _load(ctx)
    sizes = _sizes(pool_sizes)
    if simulate:
        curve = simulate_soundness(sizes, trials=trials, seed=cfg.seed if seed is None else seed)
        _emit({"table": [{"pool_size": n, "soundness": s} for n, s in curve.items()]})
        return
    mode = mode or cfg.mode
    problems = _dataset(cfg, dataset, mode)
    lines = _candidate_lines(cfg, candidates)
    try:
        selections, rows, errors = pipeline.dtv_table(problems, lines, cfg.reward, sizes, mode)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None
    for rec in [*selections, *errors]:
        _emit(rec)
    _emit({"table": rows})
    sys.exit(1 if errors else 0)


@main.command()
@click.option("--dataset", default=None, help="ProverQA file to preload.")
@click.option("--transport", type=click.Choice(["stdio", "http"]), default="stdio", show_default=True)
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@click.option("--workers", type=int, default=None)
@mode_option
@click.pass_context
def serve(ctx, dataset, transport, host, port, workers, mode):
    """Long-running reward service."""
    cfg = _load(ctx)
    mode = mode or cfg.mode
    problems = _dataset(cfg, dataset, mode)
    workers = workers or cfg.serve.workers
    if transport == "stdio":
        from .service import serve_stdio

        serve_stdio(problems, cfg.reward, mode, workers=workers)
        return
    import uvicorn

    from .service import create_app

    app = create_app(problems, cfg.reward, mode, workers)
    uvicorn.run(app, host=host or cfg.serve.host, port=port or cfg.serve.port, log_level="warning")


@main.command()
@click.option("--count", default=1000, show_default=True)
@click.option("--atoms", default=10, show_default=True, help="Maximum ground atoms per query.")
@click.option("--seed", type=int, default=None)
@click.option("--corpus", type=click.Path(dir_okay=False), default=None, help="Write queries as JSON lines.")
@click.pass_context
def fuzz(ctx, count, atoms, seed, corpus):
    """Compare the solver against truth-table enumeration on random queries."""
    cfg = _load(ctx)
    if count < 0 or atoms < 1:
        raise click.BadParameter("count must be >= 0 and atoms >= 1")
    if atoms > cfg.prover.enumeration_threshold:
        raise click.UsageError(
            f"--atoms {atoms} is above the enumeration threshold {cfg.prover.enumeration_threshold}"
        )
    queries, report = run_fuzz(count, atoms, cfg.seed if seed is None else seed, cfg.prover)
    if corpus:
        Path(corpus).write_text("".join(pipeline.canonical_json(q) + "\n" for q in queries), encoding="utf-8")
    click.echo(json.dumps(report.to_dict(), indent=2, ensure_ascii=False))
    ok = report.agreements == report.count and report.countermodel_failures == 0
    sys.exit(0 if ok else 1)


@main.command()
@click.argument("groups_file", type=click.Path())
@click.pass_context
def advantage(ctx, groups_file):
    """Group advantages (and the objective when token stats are given) per JSON line."""
    cfg = _load(ctx)
    try:
        lines = Path(groups_file).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        _fail_io(f"cannot read {groups_file}: {exc}")
    failed = 0
    for no, raw in enumerate(lines, 1):
        if not raw.strip():
            continue
        try:
            data = json.loads(raw)
            out = {"advantages": group_advantages(data["rewards"], cfg.clip.std_epsilon)}
            if data.get("tokens") is not None:
                out.update(grpo_objective(RolloutGroup.from_lists(data["rewards"], data["tokens"]), cfg.clip))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError, GroupTooSmall) as exc:
            failed += 1
            out = {"line": no, "error": f"{type(exc).__name__}: {exc}"}
        _emit(out)
    sys.exit(1 if failed else 0)


if __name__ == "__main__":
    main()
