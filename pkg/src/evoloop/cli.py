"""Command-line surface.

Subcommands: ``run`` (drive the loop), ``score`` (validate and score a
payload file), ``seed-cognition`` (load the shipped knowledge items),
``dump-archive`` (inspect a run's MAP-Elites state), ``export-curve``.
Exit codes: 0 success, 1 candidate-level failure budget exceeded,
2 infrastructure error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from evoloop.agents.analyzer import RemoteAnalyzer, StubAnalyzer
from evoloop.agents.judge import RemoteJudge
from evoloop.agents.prompts import TemplateSet
from evoloop.agents.researcher import RemoteResearcher, StubResearcher
from evoloop.benchmarks import BENCHMARKS, make_benchmark
from evoloop.chat import ChatClient
from evoloop.cognition import CognitionStore, load_packaged_seed, packaged_seed_path
from evoloop.config import RunConfig, load_config
from evoloop.curve import export_aggregate, export_curve
from evoloop.errors import EvoloopError, InfrastructureError
from evoloop.orchestrator import EvolutionRun, rebuild_database, resumable_config
from evoloop.trace import read_trace

EXIT_OK = 0
EXIT_FAILURE_BUDGET = 1
EXIT_INFRASTRUCTURE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="evoloop", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the evolution loop")
    run.add_argument("--config", type=Path, default=None, help="key=value config file")
    run.add_argument("--rounds", type=int, default=10)
    run.add_argument("--seed", type=int, default=None, help="override the config seed")
    run.add_argument("--benchmark", choices=BENCHMARKS, default="circle_packing")
    run.add_argument("--agents", choices=("remote", "stub"), default="stub")
    run.add_argument("--no-analyzer", action="store_true", help="store raw logs instead of reports")
    run.add_argument("--no-cognition", action="store_true", help="skip cognition retrieval")
    run.add_argument("--resume", action="store_true", help="continue from the run directory")
    run.add_argument("--out", type=Path, default=Path("run_out"), help="run directory")

    score = sub.add_parser("score", help="validate and score a payload file")
    score.add_argument("payload", type=Path)
    score.add_argument("--benchmark", choices=BENCHMARKS, default="circle_packing")
    score.add_argument("--n", type=int, default=None, help="required circle count")
    score.add_argument("--seed", type=int, default=0, help="benchmark seed (toy landscape)")
    score.add_argument("--report", action="store_true", help="also print the validation report")

    seed_cmd = sub.add_parser("seed-cognition", help="load the shipped cognition items")
    seed_cmd.add_argument("--seed-file", type=Path, default=None,
                          help="alternative seed file (defaults to the packaged one)")
    seed_cmd.add_argument("--out", type=Path, default=None,
                          help="copy the seed records to this path after loading")

    dump = sub.add_parser("dump-archive", help="print island -> cell -> elite for a run")
    dump.add_argument("run_dir", type=Path)

    curve = sub.add_parser("export-curve", help="write evolution curves from trace files")
    curve.add_argument("traces", type=Path, nargs="+")
    curve.add_argument("--out", type=Path, required=True)
    curve.add_argument("--format", choices=("csv", "structured"), default="csv")
    curve.add_argument("--aggregate", action="store_true",
                       help="merge traces into mean/min/max per round")
    return parser


def _cmd_run(args) -> int:
    no_analyzer, no_cognition = args.no_analyzer, args.no_cognition
    if args.resume and (args.out / "trace.jsonl").exists():
        config, benchmark_name, flags = resumable_config(args.out)
        # ablation toggles stick across resume; flags may only be added
        no_analyzer = no_analyzer or flags.get("no_analyzer", False)
        no_cognition = no_cognition or flags.get("no_cognition", False)
    else:
        config = load_config(args.config) if args.config else RunConfig()
        benchmark_name = args.benchmark
        if args.seed is not None:
            config = dataclasses.replace(config, seed=args.seed)

    benchmark = make_benchmark(benchmark_name, seed=config.seed)
    store = CognitionStore()
    if not no_cognition and benchmark_name == "circle_packing":
        load_packaged_seed(store)

    templates = TemplateSet(config.template_dir)
    if args.agents == "remote":
        client = ChatClient()
        researcher = RemoteResearcher(client, templates, config.max_code_length,
                                      config.researcher_retries)
        analyzer = RemoteAnalyzer(client, templates, config.analyzer_log_cap)
        judge = RemoteJudge(client, templates) if config.judge_enabled else None
        deterministic, pipeline = False, True
    else:
        researcher = StubResearcher(benchmark, config.seed)
        analyzer = StubAnalyzer()
        judge = None
        deterministic, pipeline = True, False

    run = EvolutionRun(
        config, benchmark, researcher, analyzer, judge,
        cognition_store=store, out_dir=args.out,
        no_analyzer=no_analyzer, no_cognition=no_cognition,
        deterministic=deterministic, pipeline=pipeline,
    )
    trace = run.run(args.rounds, resume=args.resume)
    if trace.rows:
        print(f"completed {len(trace.rows)} rounds; best score {trace.best_score():.6f}")
    else:
        print("completed 0 rounds")
    if run._failure_budget_exceeded():
        print("failure budget exceeded", file=sys.stderr)
        return EXIT_FAILURE_BUDGET
    return EXIT_OK


def _cmd_score(args) -> int:
    kwargs = {}
    if args.n is not None:
        kwargs["n"] = args.n
    benchmark = make_benchmark(args.benchmark, seed=args.seed, **kwargs)
    line = args.payload.read_text(encoding="utf-8").strip().splitlines()[-1]
    payload = benchmark.parse_payload(line)
    value = benchmark.score(payload)
    print(value)
    if args.report:
        report = benchmark.validate(payload)
        print(f"valid: {report.valid}")
        for violation in report.violations:
            indices = ", ".join(str(i) for i in violation.indices)
            print(f"- {violation.kind} ({indices}): magnitude {violation.magnitude:.6f}")
    return EXIT_OK


def _cmd_seed_cognition(args) -> int:
    store = CognitionStore()
    source = args.seed_file if args.seed_file is not None else packaged_seed_path()
    count = store.load_seed(source)
    by_category: dict[str, int] = {}
    for item in store.items():
        by_category[item.category] = by_category.get(item.category, 0) + 1
    print(f"loaded {count} cognition items: " +
          ", ".join(f"{k}={v}" for k, v in sorted(by_category.items())))
    if args.out is not None:
        args.out.write_text(Path(source).read_text(encoding="utf-8"), encoding="utf-8")
        print(f"copied seed records to {args.out}")
    return EXIT_OK


def _cmd_dump_archive(args) -> int:
    db = rebuild_database(args.run_dir)
    print(db.dump_archive())
    return EXIT_OK


def _cmd_export_curve(args) -> int:
    traces = [read_trace(path) for path in args.traces]
    if args.aggregate:
        export_aggregate(traces, args.out, args.format)
    else:
        if len(traces) != 1:
            raise EvoloopError("pass exactly one trace, or use --aggregate")
        export_curve(traces[0], args.out, args.format)
    print(f"wrote {args.out}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "score": _cmd_score,
        "seed-cognition": _cmd_seed_cognition,
        "dump-archive": _cmd_dump_archive,
        "export-curve": _cmd_export_curve,
    }
    try:
        return handlers[args.command](args)
    except InfrastructureError as exc:
        print(f"infrastructure error: {exc}", file=sys.stderr)
        return EXIT_INFRASTRUCTURE
    except (EvoloopError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFRASTRUCTURE


if __name__ == "__main__":
    sys.exit(main())
