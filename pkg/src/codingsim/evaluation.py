"""Scoring simulated opinions against survey waves, and gamma sweeps.

Predictions are compared per survey wave on the ternary scale with
multi-class F1; macro averaging over the classes present is the headline
number, with micro and support-weighted means carried alongside. Wave 1
only seeds initialization and is never scored. The aggregate row of a
sweep is the mean of per-wave scores; a pooled row (all waves scored as
one sample set) is emitted as well.
"""

import csv
import io
import json
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataio import SurveyRecord, coding_init_sampler, collect_agents, ng_init_sampler
from .engine import MODEL_CODING, MODEL_NG, SimConfig, Trajectory, run_repeated
from .types import (
    AgentId,
    ConfigError,
    ContactEvent,
    MemoryParams,
    OPINION_TO_TERNARY,
)

AVERAGINGS = ("macro", "micro", "weighted")

AGGREGATE = "aggregate"
POOLED = "pooled"


def f1_score(pred: Mapping, truth: Mapping, averaging: str = "macro") -> float:
    """Multi-class F1 restricted to keys present in both maps.

    Classes are the labels that actually occur in the restricted truth or
    prediction, so a perfect prediction scores 1.0 regardless of which
    ternary values the fixture uses.
    """
    if averaging not in AVERAGINGS:
        raise ConfigError(f"averaging must be one of {AVERAGINGS}, got {averaging!r}")
    common = sorted(set(pred) & set(truth))
    if not common:
        raise ValueError("no agents in common between prediction and truth")
    labels = sorted({truth[k] for k in common} | {pred[k] for k in common})
    tp = {label: 0 for label in labels}
    fp = {label: 0 for label in labels}
    fn = {label: 0 for label in labels}
    support = {label: 0 for label in labels}
    for key in common:
        actual, predicted = truth[key], pred[key]
        support[actual] += 1
        if actual == predicted:
            tp[actual] += 1
        else:
            fn[actual] += 1
            fp[predicted] += 1

    def class_f1(label) -> float:
        denom = 2 * tp[label] + fp[label] + fn[label]
        return 2 * tp[label] / denom if denom else 0.0

    if averaging == "micro":
        return sum(tp.values()) / len(common)
    if averaging == "weighted":
        return sum(support[l] * class_f1(l) for l in labels) / len(common)
    return sum(class_f1(l) for l in labels) / len(labels)


@dataclass(frozen=True)
class ReportRow:
    """One scored cell: a (question, model, gamma, wave) combination."""

    question: str
    model: str
    gamma: float | None
    wave: str  # "2", "3", ... or "aggregate" / "pooled"
    mean_f1: float
    std: float
    n_runs: int
    mean_f1_micro: float
    mean_f1_weighted: float


def _wave_order(wave: str):
    return (0, int(wave), "") if wave.isdigit() else (1, 0, wave)


def _row_order(row: ReportRow):
    return (row.question, row.model, -1.0 if row.gamma is None else row.gamma,
            _wave_order(row.wave))


@dataclass
class EvaluationReport:
    """Sweep results as a flat, deterministically ordered row list."""

    rows: list[ReportRow] = field(default_factory=list)

    def sort(self) -> None:
        self.rows.sort(key=_row_order)

    def questions(self) -> list[str]:
        return sorted({row.question for row in self.rows})

    def select(self, **filters) -> list[ReportRow]:
        out = self.rows
        for name, value in filters.items():
            out = [row for row in out if getattr(row, name) == value]
        return list(out)

    def best_gamma(self, question: str, scope: str = AGGREGATE):
        """Argmax gamma by mean macro F1; exact ties resolve to the smaller gamma.

        scope "aggregate" returns one gamma; scope "per_wave" returns a
        dict mapping each scored wave to its best gamma.
        """
        if scope == AGGREGATE:
            rows = self.select(question=question, model=MODEL_CODING, wave=AGGREGATE)
            return _argmax_gamma(rows)
        if scope == "per_wave":
            waves = sorted(
                {row.wave for row in self.select(question=question, model=MODEL_CODING)
                 if row.wave.isdigit()},
                key=int,
            )
            return {
                int(wave): _argmax_gamma(self.select(question=question, model=MODEL_CODING, wave=wave))
                for wave in waves
            }
        raise ConfigError(f"scope must be 'aggregate' or 'per_wave', got {scope!r}")

    # -- serialization --------------------------------------------------

    CSV_COLUMNS = ("question", "gamma", "wave", "model", "mean_f1", "std",
                   "n_runs", "mean_f1_micro", "mean_f1_weighted")

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.CSV_COLUMNS)
        for row in sorted(self.rows, key=_row_order):
            writer.writerow([
                row.question,
                "" if row.gamma is None else repr(row.gamma),
                row.wave,
                row.model,
                repr(row.mean_f1),
                repr(row.std),
                row.n_runs,
                repr(row.mean_f1_micro),
                repr(row.mean_f1_weighted),
            ])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text, encoding="utf-8")
        return text

    @classmethod
    def from_csv(cls, source) -> "EvaluationReport":
        text = Path(source).read_text(encoding="utf-8") if isinstance(source, (str, Path)) else source.read()
        reader = csv.reader(text.splitlines())
        header = next(reader, None)
        if header is None or tuple(header) != cls.CSV_COLUMNS:
            raise ValueError(f"unexpected report header: {header}")
        rows = []
        for fields in reader:
            if not fields:
                continue
            question, gamma, wave, model, mean_f1, std, n_runs, micro, weighted = fields
            rows.append(ReportRow(
                question=question,
                model=model,
                gamma=None if gamma == "" else float(gamma),
                wave=wave,
                mean_f1=float(mean_f1),
                std=float(std),
                n_runs=int(n_runs),
                mean_f1_micro=float(micro),
                mean_f1_weighted=float(weighted),
            ))
        return cls(rows=rows)

    def to_json(self, path=None) -> str:
        payload = {"rows": [row.__dict__ for row in sorted(self.rows, key=_row_order)]}
        text = json.dumps(payload, sort_keys=True, indent=1) + "\n"
        if path is not None:
            Path(path).write_text(text, encoding="utf-8")
        return text

    @classmethod
    def from_json(cls, source) -> "EvaluationReport":
        text = Path(source).read_text(encoding="utf-8") if isinstance(source, (str, Path)) else source.read()
        payload = json.loads(text)
        return cls(rows=[ReportRow(**entry) for entry in payload["rows"]])

    @classmethod
    def combine(cls, reports: Iterable["EvaluationReport"]) -> "EvaluationReport":
        merged = cls(rows=[row for rep in reports for row in rep.rows])
        merged.sort()
        return merged


def _argmax_gamma(rows: Sequence[ReportRow]) -> float:
    if not rows:
        raise ValueError("no gamma rows to choose from")
    best = None
    for row in sorted(rows, key=lambda r: r.gamma):
        if best is None or row.mean_f1 > best.mean_f1:
            best = row
    return best.gamma


def export_report(report: EvaluationReport, path, format: str = "csv") -> None:
    """Write plot-ready tables; bit-stable for a fixed seed."""
    if format == "csv":
        report.to_csv(path)
    elif format == "json":
        report.to_json(path)
    else:
        raise ConfigError(f"format must be 'csv' or 'json', got {format!r}")


DEFAULT_GAMMA_GRID = tuple(k / 10 for k in range(1, 10))


@dataclass(frozen=True)
class SweepConfig:
    """Protocol settings shared by every cell of a sweep."""

    seed: int
    wave_times: Mapping[int, float]
    params: MemoryParams = MemoryParams()
    repetitions: int = 10
    init_time: float = 0.0
    include_baseline: bool = True
    max_init_tries: int = 1000


def _scored_waves(records: Sequence[SurveyRecord], wave_times: Mapping[int, float]) -> list[int]:
    surveyed = {rec.wave for rec in records if rec.wave >= 2}
    missing = surveyed - set(wave_times)
    if missing:
        raise ConfigError(f"no timestamp configured for survey wave(s) {sorted(missing)}")
    return sorted(surveyed)


def _score_trajectories(
    trajectories: Sequence[Trajectory],
    truth_by_wave: Mapping[int, Mapping[AgentId, int]],
    wave_times: Mapping[int, float],
    scored_agents: set,
) -> dict[str, dict[str, list[float]]]:
    """Per-wave, aggregate and pooled F1 for each run, keyed by averaging."""
    waves = sorted(truth_by_wave)
    scores: dict[str, dict[str, list[float]]] = {
        avg: {str(w): [] for w in waves} | {AGGREGATE: [], POOLED: []} for avg in AVERAGINGS
    }
    for traj in trajectories:
        pooled_pred: dict[tuple, int] = {}
        pooled_truth: dict[tuple, int] = {}
        per_wave: dict[str, dict[str, float]] = {avg: {} for avg in AVERAGINGS}
        for wave in waves:
            snap = traj.snapshots[wave_times[wave]]
            truth = truth_by_wave[wave]
            pred = {a: OPINION_TO_TERNARY[snap[a]] for a in scored_agents if a in snap}
            for avg in AVERAGINGS:
                value = f1_score(pred, truth, averaging=avg)
                scores[avg][str(wave)].append(value)
                per_wave[avg][str(wave)] = value
            for agent in set(pred) & set(truth):
                pooled_pred[(agent, wave)] = pred[agent]
                pooled_truth[(agent, wave)] = truth[agent]
        for avg in AVERAGINGS:
            scores[avg][AGGREGATE].append(float(np.mean([per_wave[avg][str(w)] for w in waves])))
            scores[avg][POOLED].append(f1_score(pooled_pred, pooled_truth, averaging=avg))
    return scores


def _rows_from_scores(question, model, gamma, scores, n_runs) -> list[ReportRow]:
    rows = []
    for wave_key in scores["macro"]:
        macro = scores["macro"][wave_key]
        rows.append(ReportRow(
            question=question,
            model=model,
            gamma=gamma,
            wave=wave_key,
            mean_f1=float(np.mean(macro)),
            std=float(np.std(macro)),
            n_runs=n_runs,
            mean_f1_micro=float(np.mean(scores["micro"][wave_key])),
            mean_f1_weighted=float(np.mean(scores["weighted"][wave_key])),
        ))
    return rows


def sweep_gamma(
    events: Sequence[ContactEvent],
    surveys: Sequence[SurveyRecord],
    question: str,
    gammas: Sequence[float],
    config: SweepConfig,
    progress: Callable[[dict], None] | None = None,
) -> EvaluationReport:
    """Score the hybrid model over a gamma grid, plus the gamma-free baseline.

    For each gamma and repetition: initialize from wave-1 answers, replay
    the events, snapshot at each scored wave's timestamp, and compute F1
    against that wave. Agents without a wave-1 answer relay influence but
    are excluded from scoring.
    """
    records = [rec for rec in surveys if rec.question == question]
    wave1 = [rec for rec in records if rec.wave == 1]
    if not wave1:
        raise ConfigError(f"no wave-1 answers for question {question!r}")
    waves = _scored_waves(records, config.wave_times)
    if not waves:
        raise ConfigError(f"no scorable waves (>= 2) for question {question!r}")
    agents = collect_agents(events, records)
    scored_agents = {rec.agent for rec in wave1}
    truth_by_wave = {
        w: {rec.agent: rec.answer for rec in records if rec.wave == w and rec.agent in scored_agents}
        for w in waves
    }
    snapshot_times = tuple(sorted(config.wave_times[w] for w in waves))
    wave_times = {w: config.wave_times[w] for w in waves}

    report = EvaluationReport()
    for gamma in gammas:
        sim = SimConfig(
            model=MODEL_CODING,
            seed=config.seed,
            params=config.params,
            gamma=gamma,
            repetitions=config.repetitions,
            snapshot_times=snapshot_times,
        )
        sampler = coding_init_sampler(wave1, agents, gamma,
                                      t0=config.init_time, max_tries=config.max_init_tries)
        trajectories = run_repeated(events, sampler, sim)
        scores = _score_trajectories(trajectories, truth_by_wave, wave_times, scored_agents)
        report.rows.extend(_rows_from_scores(question, MODEL_CODING, gamma, scores, config.repetitions))
        if progress is not None:
            progress({"question": question, "model": MODEL_CODING, "gamma": gamma})

    if config.include_baseline:
        sim = SimConfig(
            model=MODEL_NG,
            seed=config.seed,
            repetitions=config.repetitions,
            snapshot_times=snapshot_times,
        )
        trajectories = run_repeated(events, ng_init_sampler(wave1, agents), sim)
        scores = _score_trajectories(trajectories, truth_by_wave, wave_times, scored_agents)
        report.rows.extend(_rows_from_scores(question, MODEL_NG, None, scores, config.repetitions))
        if progress is not None:
            progress({"question": question, "model": MODEL_NG, "gamma": None})

    report.sort()
    return report
