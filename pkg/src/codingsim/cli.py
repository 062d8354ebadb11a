"""Command-line entry point tying ingestion, simulation, sweeps and export.

Subcommands: ``simulate`` (trajectory export), ``sweep`` (F1-vs-gamma
report), ``synth`` (synthetic fixtures), ``rerun`` (replay a manifest).
Progress goes to stdout as JSON lines; human-readable summaries go to
stderr. Every output directory receives the manifest that produced it,
and re-running a manifest reproduces the output files byte for byte.

Exit codes: 0 ok, 1 usage, 2 input parse failure, 3 invalid configuration.
"""

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .dataio import (
    AnswerMapping,
    collect_agents,
    coding_init_sampler,
    ng_init_sampler,
    parse_events,
    parse_surveys,
    transform_answers,
    write_events,
    write_surveys,
)
from .engine import (
    MODEL_CODING,
    MODEL_NG,
    SimConfig,
    constant_sampler,
    derive_rng,
    run_repeated,
    write_trajectories_csv,
)
from .evaluation import DEFAULT_GAMMA_GRID, EvaluationReport, SweepConfig, sweep_gamma
from .synthetic import PlantedConfig, SynthSpec, generate_events, generate_planted_surveys
from .types import ConfigError, DataError, MemoryParams

ENV_OUT = "CODINGSIM_OUT"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_CONFIG = 3


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that exits 1 (not 2) on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True), flush=True)


def _say(message: str) -> None:
    print(message, file=sys.stderr)


def _float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}")


def _out_dir(value: str | None) -> Path:
    path = Path(value or os.environ.get(ENV_OUT, "codingsim-out"))
    path.mkdir(parents=True, exist_ok=True)
    return path


def _resolve(args: argparse.Namespace, defaults: dict) -> dict:
    """Merge flag values over config-file values over defaults."""
    file_cfg = {}
    if getattr(args, "config", None):
        try:
            file_cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"cannot read config file {args.config}: {exc}") from None
    resolved = {}
    for key, default in defaults.items():
        flag = getattr(args, key, None)
        resolved[key] = flag if flag is not None else file_cfg.get(key, default)
    return resolved


def _require(parser: argparse.ArgumentParser, options: dict, *keys: str) -> None:
    for key in keys:
        if options.get(key) is None:
            parser.error(f"--{key.replace('_', '-')} is required")


def _params(options: dict) -> MemoryParams:
    return MemoryParams(
        mu=options["mu"],
        theta=options["theta"],
        lambda_=options["lambda_"],
        forgetting=options["forgetting"],
    )


def _abs_path(value):
    return None if value is None else str(Path(value).resolve())


def _write_manifest(out: Path, command: str, options: dict) -> Path:
    manifest = {"command": command, "version": __version__, "options": options}
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, sort_keys=True, indent=1) + "\n", encoding="utf-8")
    return path


def _load_survey_records(options: dict):
    raw = parse_surveys(options["surveys"])
    if options.get("mapping"):
        mapping = AnswerMapping.from_json(options["mapping"])
    else:
        mapping = AnswerMapping.identity()
    return transform_answers(raw, mapping)


def _wave_times(waves: list[float]) -> dict[int, float]:
    # waves are the timestamps of the scored waves, in order, starting at wave 2
    times = {i + 2: float(t) for i, t in enumerate(waves)}
    if sorted(times.values()) != list(times.values()):
        raise ConfigError("wave timestamps must be increasing")
    if len(set(times.values())) != len(times):
        raise ConfigError("wave timestamps must be distinct")
    return times


# ---------------------------------------------------------------------------
# simulate


def _exec_simulate(options: dict, out: Path) -> int:
    events = parse_events(options["events"], options["timestamp_kind"])
    records = _load_survey_records(options)
    question = options["question"]
    wave1 = [r for r in records if r.question == question and r.wave == 1]
    if not wave1:
        raise ConfigError(f"no wave-1 answers for question {question!r}")
    agents = collect_agents(events, [r for r in records if r.question == question])
    snapshot_times = tuple(sorted(options["waves"]))

    if options["model"] == MODEL_CODING:
        sim = SimConfig(
            model=MODEL_CODING,
            seed=options["seed"],
            params=_params(options),
            gamma=options["gamma"],
            repetitions=options["reps"],
            snapshot_times=snapshot_times,
        )
        sampler = coding_init_sampler(wave1, agents, options["gamma"], t0=options["init_time"])
    else:
        sim = SimConfig(
            model=MODEL_NG,
            seed=options["seed"],
            repetitions=options["reps"],
            snapshot_times=snapshot_times,
        )
        sampler = ng_init_sampler(wave1, agents)
    if options["fixed_init"]:
        sampler = constant_sampler(sampler(0, derive_rng(options["seed"], 0)))

    trajectories = run_repeated(events, sampler, sim)
    traj_path = out / "trajectories.csv"
    write_trajectories_csv(trajectories, traj_path)
    manifest = _write_manifest(out, "simulate", options)
    _emit({"event": "done", "command": "simulate", "runs": len(trajectories),
           "trajectories": str(traj_path), "manifest": str(manifest)})
    _say(f"simulate: {len(trajectories)} run(s), {len(events)} events -> {traj_path}")
    return EXIT_OK


def _cmd_simulate(args) -> int:
    defaults = {
        "model": MODEL_CODING, "events": None, "surveys": None, "mapping": None,
        "question": None, "gamma": None, "mu": 0.3, "theta": 0.2, "lambda_": 0.005631,
        "forgetting": "exponential", "seed": 0, "reps": 10, "waves": None,
        "init_time": 0.0, "timestamp_kind": "epoch", "fixed_init": False,
    }
    options = _resolve(args, defaults)
    _require(args.parser, options, "events", "surveys", "question", "waves")
    if options["model"] == MODEL_CODING and options["gamma"] is None:
        args.parser.error("--gamma is required for the coding model")
    for key in ("events", "surveys", "mapping"):
        options[key] = _abs_path(options[key])
    return _exec_simulate(options, _out_dir(args.out))


# ---------------------------------------------------------------------------
# sweep


def _exec_sweep(options: dict, out: Path) -> int:
    events = parse_events(options["events"], options["timestamp_kind"])
    records = _load_survey_records(options)
    questions = options["questions"] or sorted({r.question for r in records})
    config = SweepConfig(
        seed=options["seed"],
        wave_times=_wave_times(options["waves"]),
        params=_params(options),
        repetitions=options["reps"],
        init_time=options["init_time"],
    )
    reports = []
    for question in questions:
        reports.append(sweep_gamma(events, records, question, options["gamma_grid"],
                                   config, progress=_emit))
    combined = EvaluationReport.combine(reports)
    csv_path = out / "report.csv"
    json_path = out / "report.json"
    combined.to_csv(csv_path)
    combined.to_json(json_path)
    manifest = _write_manifest(out, "sweep", options)
    for question in questions:
        _emit({"event": "best_gamma", "question": question,
               "gamma": combined.best_gamma(question)})
    _emit({"event": "done", "command": "sweep", "report_csv": str(csv_path),
           "report_json": str(json_path), "manifest": str(manifest)})
    _say(f"sweep: {len(questions)} question(s) x {len(options['gamma_grid'])} gamma value(s) "
         f"x {options['reps']} rep(s) -> {csv_path}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    defaults = {
        "events": None, "surveys": None, "mapping": None, "questions": None,
        "gamma_grid": list(DEFAULT_GAMMA_GRID), "mu": 0.3, "theta": 0.2,
        "lambda_": 0.005631, "forgetting": "exponential", "seed": 0, "reps": 10,
        "waves": None, "init_time": 0.0, "timestamp_kind": "epoch",
    }
    options = _resolve(args, defaults)
    _require(args.parser, options, "events", "surveys", "waves")
    for key in ("events", "surveys", "mapping"):
        options[key] = _abs_path(options[key])
    return _exec_sweep(options, _out_dir(args.out))


# ---------------------------------------------------------------------------
# synth


def _exec_synth(options: dict, out: Path) -> int:
    spec = SynthSpec(
        n_agents=options["agents"],
        topology=options["topology"],
        edge_prob=options["edge_prob"],
        attach_m=options["attach_m"],
        rate=options["rate"],
        horizon_days=options["horizon_days"],
        seed=options["seed"],
    )
    events = generate_events(spec)
    events_path = out / "events.csv"
    write_events(events, events_path, timestamp_kind="hours")
    written = {"events": str(events_path)}
    if options["waves"]:
        # plant from the parsed-back file so consumers of events.csv (which
        # rebases times to the earliest event) see exactly the planted run
        events = parse_events(events_path, timestamp_kind="hours")
        planted = PlantedConfig(
            model=options["model"],
            gamma=options["gamma"],
            params=_params(options),
            seed=options["seed"],
            question=options["question"],
            init_time=options["init_time"],
        )
        surveys = generate_planted_surveys(events, planted, _wave_times(options["waves"]))
        surveys_path = out / "surveys.csv"
        write_surveys(surveys, surveys_path)
        written["surveys"] = str(surveys_path)
    manifest = _write_manifest(out, "synth", options)
    _emit({"event": "done", "command": "synth", "n_events": len(events),
           "manifest": str(manifest), **written})
    _say(f"synth: {len(events)} events for {options['agents']} agents -> {events_path}")
    return EXIT_OK


def _cmd_synth(args) -> int:
    defaults = {
        "agents": None, "topology": "complete", "edge_prob": 0.1, "attach_m": 2,
        "rate": 1.0, "horizon_days": 30.0, "seed": 0, "waves": None,
        "model": MODEL_CODING, "gamma": 0.25, "mu": 0.3, "theta": 0.2,
        "lambda_": 0.005631, "forgetting": "exponential",
        "question": "synthetic", "init_time": 0.0,
    }
    options = _resolve(args, defaults)
    _require(args.parser, options, "agents")
    return _exec_synth(options, _out_dir(args.out))


# ---------------------------------------------------------------------------
# rerun

_EXECUTORS = {"simulate": _exec_simulate, "sweep": _exec_sweep, "synth": _exec_synth}


def _cmd_rerun(args) -> int:
    try:
        manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read manifest {args.manifest}: {exc}") from None
    command = manifest.get("command")
    if command not in _EXECUTORS:
        raise ConfigError(f"manifest has unknown command {command!r}")
    return _EXECUTORS[command](manifest["options"], _out_dir(args.out))


# ---------------------------------------------------------------------------


def _add_params(sub) -> None:
    sub.add_argument("--mu", type=float, help="reinforcement peak (default 0.3)")
    sub.add_argument("--theta", type=float, help="forgetting threshold (default 0.2)")
    sub.add_argument("--lambda", dest="lambda_", type=float,
                     help="forgetting intensity per hour (default 0.005631)")
    sub.add_argument("--forgetting", choices=["exponential"], help="forgetting kind")
    sub.add_argument("--seed", type=int, help="master seed (default 0)")


def _add_io(sub) -> None:
    sub.add_argument("--events", help="contact event CSV: sender,receiver,timestamp")
    sub.add_argument("--surveys", help="survey CSV: agent,wave,question,raw_answer")
    sub.add_argument("--mapping", help="JSON answer-scale mapping (default: ternary)")
    sub.add_argument("--timestamp-kind", choices=["epoch", "iso8601", "hours"],
                     help="event timestamp format (default epoch)")
    sub.add_argument("--waves", type=_float_list,
                     help="comma-separated snapshot hours for waves 2,3,... in order")
    sub.add_argument("--init-time", dest="init_time", type=float,
                     help="hour at which wave-1 initialization applies (default 0)")


def build_parser() -> _Parser:
    parser = _Parser(prog="codingsim",
                     description="Opinion-formation simulator and evaluation harness.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    sim = subs.add_parser("simulate", parents=[], help="run one model, export trajectories")
    sim.add_argument("--model", choices=[MODEL_NG, MODEL_CODING])
    _add_io(sim)
    sim.add_argument("--question", help="survey question short-code to initialize from")
    sim.add_argument("--gamma", type=float, help="exhibition threshold in [0, 1)")
    _add_params(sim)
    sim.add_argument("--reps", type=int, help="repetitions (default 10)")
    sim.add_argument("--fixed-init", dest="fixed_init", action="store_const", const=True,
                     help="sample the initial state once and reuse it across repetitions")
    sim.set_defaults(func=_cmd_simulate)

    swp = subs.add_parser("sweep", help="score a gamma grid against survey waves")
    _add_io(swp)
    swp.add_argument("--question", dest="questions", action="append",
                     help="question short-code (repeatable; default: all present)")
    swp.add_argument("--gamma-grid", dest="gamma_grid", type=_float_list,
                     help="comma-separated gamma values (default 0.1..0.9 step 0.1)")
    _add_params(swp)
    swp.add_argument("--reps", type=int, help="repetitions per cell (default 10)")
    swp.set_defaults(func=_cmd_sweep)

    syn = subs.add_parser("synth", help="generate a synthetic fixture")
    syn.add_argument("--agents", type=int, help="number of agents")
    syn.add_argument("--topology", choices=["complete", "erdos_renyi", "barabasi_albert"])
    syn.add_argument("--edge-prob", dest="edge_prob", type=float,
                     help="edge probability (erdos_renyi)")
    syn.add_argument("--attach-m", dest="attach_m", type=int,
                     help="attachment count (barabasi_albert)")
    syn.add_argument("--rate", type=float, help="events per directed pair per day")
    syn.add_argument("--horizon-days", dest="horizon_days", type=float,
                     help="stream length in days")
    syn.add_argument("--model", choices=[MODEL_NG, MODEL_CODING],
                     help="model that plants the ground truth")
    syn.add_argument("--gamma", type=float, help="generating gamma for planted truth")
    _add_params(syn)
    syn.add_argument("--waves", type=_float_list,
                     help="plant survey answers at these hours (waves 2,3,...)")
    syn.add_argument("--question", help="question short-code for the fixture")
    syn.add_argument("--init-time", dest="init_time", type=float)
    syn.set_defaults(func=_cmd_synth)

    rer = subs.add_parser("rerun", help="re-execute a previous run from its manifest")
    rer.add_argument("--manifest", required=True, help="path to a manifest.json")
    rer.set_defaults(func=_cmd_rerun)

    for sub in (sim, swp, syn, rer):
        sub.add_argument("--config", help="JSON config file (flags take precedence)")
        sub.add_argument("--out", help=f"output directory (default ${ENV_OUT} or ./codingsim-out)")
        sub.set_defaults(parser=sub)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DataError as exc:
        _say(f"input error: {exc}")
        return EXIT_DATA
    except FileNotFoundError as exc:
        _say(f"input error: {exc}")
        return EXIT_DATA
    except ConfigError as exc:
        _say(f"config error: {exc}")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
