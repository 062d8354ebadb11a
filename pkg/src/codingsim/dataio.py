"""Event-log and survey ingestion, answer transformation, initialization.

File formats (CSV, UTF-8, comma-delimited, one optional header row):

    events:  sender,receiver,timestamp
    surveys: agent,wave,question,raw_answer

Event timestamps are epoch seconds (``epoch``, default), ISO-8601
(``iso8601``), or plain hours (``hours``); on ingest they are rebased to
hours since the earliest event and stably sorted. Survey answers are
ternary after transformation: agree (0), disagree (1), not sure (2).
"""

import csv
import io
import json
import logging
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from numpy.random import Generator

from .coding import CodingState, exhibited_opinion
from .naming_game import NgState
from .types import (
    AgentId,
    ContactEvent,
    ConfigError,
    DataError,
    DiscreteOpinion,
    TERNARY_TO_OPINION,
)

logger = logging.getLogger(__name__)

TIMESTAMP_KINDS = ("epoch", "iso8601", "hours")

# Weight bands used to seed latent vectors from wave-1 answers: a high
# band (>= 0.66) for the held opinion, a low band (<= 0.33) for the
# opposite one, and the middle band for "not sure".
HIGH_BAND = (0.66, 1.0)
LOW_BAND = (0.0, 0.33)
MID_BAND = (0.33, 0.66)


@dataclass(frozen=True)
class RawAnswer:
    """One survey row before scale transformation."""

    agent: AgentId
    wave: int
    question: str
    answer: str


@dataclass(frozen=True)
class SurveyRecord:
    """One survey row on the ternary scale: 0 agree, 1 disagree, 2 not sure."""

    agent: AgentId
    wave: int
    question: str
    answer: int


def _open_rows(source) -> tuple[list[list[str]], str]:
    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8")
        name = str(source)
    elif isinstance(source, io.TextIOBase):
        text = source.read()
        name = getattr(source, "name", "<stream>")
    else:
        text = "\n".join(source)
        name = "<iterable>"
    rows = [row for row in csv.reader(text.splitlines())]
    return rows, name


def _parse_stamp(field: str, kind: str) -> float:
    """Raw timestamp to hours (not yet rebased)."""
    if kind == "epoch":
        return float(field) / 3600.0
    if kind == "hours":
        return float(field)
    if kind == "iso8601":
        stamp = field.strip().replace("Z", "+00:00")
        dt = datetime.fromisoformat(stamp)
        if dt.tzinfo is None:
            dt = dt.replace(tzinfo=timezone.utc)
        return dt.timestamp() / 3600.0
    raise ConfigError(f"unknown timestamp kind {kind!r}")


def parse_events(source, timestamp_kind: str = "epoch") -> list[ContactEvent]:
    """Read a contact log into a sorted event list in rebased hours.

    Rows must have exactly three fields. Self-loop rows are dropped with a
    warning; any other malformed row raises DataError with its line number.
    Sorting is stable, so rows sharing a timestamp keep their file order.
    """
    if timestamp_kind not in TIMESTAMP_KINDS:
        raise ConfigError(f"timestamp_kind must be one of {TIMESTAMP_KINDS}, got {timestamp_kind!r}")
    rows, name = _open_rows(source)
    parsed: list[tuple[str, str, float]] = []
    dropped = 0
    for lineno, row in enumerate(rows, start=1):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 3:
            raise DataError(f"{name}:{lineno}: expected 3 fields, got {len(row)}")
        sender, receiver, stamp = (field.strip() for field in row)
        try:
            t = _parse_stamp(stamp, timestamp_kind)
        except (ValueError, OverflowError):
            if lineno == 1 and not any(ch.isdigit() for ch in stamp):
                continue  # header row
            raise DataError(f"{name}:{lineno}: unparseable timestamp {stamp!r}") from None
        if sender == receiver:
            dropped += 1
            logger.warning("%s:%d: dropped self-loop event for agent %r", name, lineno, sender)
            continue
        if not sender or not receiver:
            raise DataError(f"{name}:{lineno}: empty agent id")
        parsed.append((sender, receiver, t))
    if not parsed:
        raise DataError(f"{name}: no events found")
    if dropped:
        logger.warning("%s: dropped %d self-loop row(s)", name, dropped)
    base = min(t for _, _, t in parsed)
    events = [ContactEvent(s, r, t - base) for s, r, t in parsed]
    events.sort(key=lambda ev: ev.t)
    return events


def write_events(events: Iterable[ContactEvent], path, timestamp_kind: str = "hours") -> None:
    """Write events in a form parse_events reads back.

    The ``hours`` kind serializes timestamps with full float precision, so
    a parse -> write -> parse cycle reproduces the events exactly.
    """
    if timestamp_kind == "hours":
        stamp = lambda t: repr(t)
    elif timestamp_kind == "epoch":
        stamp = lambda t: repr(t * 3600.0)
    else:
        raise ConfigError(f"unsupported timestamp kind for writing: {timestamp_kind!r}")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["sender", "receiver", "timestamp"])
        for ev in events:
            writer.writerow([ev.sender, ev.receiver, stamp(ev.t)])


def parse_surveys(source) -> list[RawAnswer]:
    """Read survey rows; enforces (agent, wave, question) uniqueness."""
    rows, name = _open_rows(source)
    out: list[RawAnswer] = []
    seen: set[tuple[str, int, str]] = set()
    for lineno, row in enumerate(rows, start=1):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 4:
            raise DataError(f"{name}:{lineno}: expected 4 fields, got {len(row)}")
        agent, wave_field, question, answer = (field.strip() for field in row)
        try:
            wave = int(wave_field)
        except ValueError:
            if lineno == 1 and wave_field.lower() == "wave":
                continue  # header row
            raise DataError(f"{name}:{lineno}: unparseable wave {wave_field!r}") from None
        if wave < 1:
            raise DataError(f"{name}:{lineno}: wave must be >= 1, got {wave}")
        key = (agent, wave, question)
        if key in seen:
            raise DataError(f"{name}:{lineno}: duplicate record for {key}")
        seen.add(key)
        out.append(RawAnswer(agent, wave, question, answer))
    if not out:
        raise DataError(f"{name}: no survey rows found")
    return out


def write_surveys(records: Iterable[SurveyRecord], path) -> None:
    """Write ternary survey records as a raw survey file (identity scale)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["agent", "wave", "question", "raw_answer"])
        for rec in records:
            writer.writerow([rec.agent, rec.wave, rec.question, rec.answer])


@dataclass(frozen=True)
class QuestionScale:
    """How one question's raw answers map to the ternary scale.

    kind ``ternary``: raw values are already 0/1/2.
    kind ``yes_no_notsure``: yes -> 0, no -> 1, not sure -> 2.
    kind ``seven_point``: 1..7; values <= agree_max -> 0, values >=
    disagree_min -> 1, the middle -> 2 (midpoint-as-uncertain).
    """

    kind: str = "ternary"
    agree_max: int = 3
    disagree_min: int = 5

    def to_ternary(self, raw: str) -> int:
        value = raw.strip().lower()
        if self.kind == "ternary":
            if value in ("0", "1", "2"):
                return int(value)
            raise DataError(f"not a ternary answer: {raw!r}")
        if self.kind == "yes_no_notsure":
            if value == "yes":
                return 0
            if value == "no":
                return 1
            if value in ("not sure", "notsure", "not_sure", "unsure"):
                return 2
            raise DataError(f"not a yes/no/not-sure answer: {raw!r}")
        if self.kind == "seven_point":
            try:
                point = int(value)
            except ValueError:
                raise DataError(f"not a 7-point answer: {raw!r}") from None
            if not 1 <= point <= 7:
                raise DataError(f"7-point answer out of range: {raw!r}")
            if point <= self.agree_max:
                return 0
            if point >= self.disagree_min:
                return 1
            return 2
        raise ConfigError(f"unknown scale kind {self.kind!r}")


@dataclass(frozen=True)
class AnswerMapping:
    """Per-question scales, with an optional fallback under the key '*'."""

    scales: Mapping[str, QuestionScale]

    def scale_for(self, question: str) -> QuestionScale:
        if question in self.scales:
            return self.scales[question]
        if "*" in self.scales:
            return self.scales["*"]
        raise ConfigError(f"no answer scale configured for question {question!r}")

    @classmethod
    def identity(cls) -> "AnswerMapping":
        return cls(scales={"*": QuestionScale(kind="ternary")})

    @classmethod
    def from_json(cls, path) -> "AnswerMapping":
        try:
            spec = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: invalid mapping file: {exc}") from None
        scales = {}
        for question, entry in spec.items():
            scales[question] = QuestionScale(
                kind=entry.get("kind", "ternary"),
                agree_max=int(entry.get("agree_max", 3)),
                disagree_min=int(entry.get("disagree_min", 5)),
            )
        return cls(scales=scales)


def transform_answers(rows: Iterable[RawAnswer], mapping: AnswerMapping) -> list[SurveyRecord]:
    """Apply per-question scales; every raw value must map."""
    out = []
    for row in rows:
        scale = mapping.scale_for(row.question)
        try:
            ternary = scale.to_ternary(row.answer)
        except DataError as exc:
            raise DataError(f"question {row.question!r}, agent {row.agent!r}: {exc}") from None
        out.append(SurveyRecord(row.agent, row.wave, row.question, ternary))
    return out


def collect_agents(events: Iterable[ContactEvent], *record_lists) -> list[AgentId]:
    """Sorted roster of every agent seen in events or survey records."""
    agents: set[AgentId] = set()
    for ev in events:
        agents.add(ev.sender)
        agents.add(ev.receiver)
    for records in record_lists:
        for rec in records:
            agents.add(rec.agent)
    return sorted(agents)


def _answers_by_agent(wave1: Iterable[SurveyRecord]) -> dict[AgentId, int]:
    answers: dict[AgentId, int] = {}
    for rec in wave1:
        if rec.agent in answers and answers[rec.agent] != rec.answer:
            raise DataError(f"conflicting wave-1 answers for agent {rec.agent!r}")
        answers[rec.agent] = rec.answer
    return answers


def initialize_coding(
    wave1: Iterable[SurveyRecord],
    agents: Iterable[AgentId],
    gamma: float,
    rng: Generator,
    t0: float = 0.0,
    max_tries: int = 1000,
) -> CodingState:
    """Seed latent vectors from wave-1 answers.

    agree: o_a from the high band, o_b from the low band; disagree is the
    mirror image; not sure: both from the middle band. Each draw is checked
    against the exhibited opinion under gamma and resampled until it
    matches; if max_tries draws never match (possible only for extreme
    gamma), a ConfigError reports the infeasible combination.

    Agents without a wave-1 answer start neutral (both channels 0, which
    exhibits AB); callers are expected to exclude them from scoring.
    """
    answers = _answers_by_agent(wave1)
    state = CodingState(set(agents) | set(answers), t0=t0)
    bands = {
        0: (HIGH_BAND, LOW_BAND),
        1: (LOW_BAND, HIGH_BAND),
        2: (MID_BAND, MID_BAND),
    }
    for agent in state.agents:
        if agent not in answers:
            continue
        answer = answers[agent]
        if answer not in bands:
            raise DataError(f"agent {agent!r}: answer must be 0/1/2, got {answer}")
        expected = TERNARY_TO_OPINION[answer]
        band_a, band_b = bands[answer]
        i = state.index(agent)
        for _ in range(max_tries):
            o_a = float(rng.uniform(*band_a))
            o_b = float(rng.uniform(*band_b))
            if exhibited_opinion(o_a, o_b, gamma) is expected:
                state.o_a[i] = o_a
                state.o_b[i] = o_b
                break
        else:
            raise ConfigError(
                f"could not draw weights exhibiting {expected.value} for answer "
                f"{answer} under gamma={gamma} within {max_tries} tries"
            )
    return state


def initialize_ng(
    wave1: Iterable[SurveyRecord], agents: Iterable[AgentId]
) -> NgState:
    """Seed baseline states: 0 -> A, 1 -> B, 2 -> AB; missing agents -> AB."""
    answers = _answers_by_agent(wave1)
    state: NgState = {}
    for agent in sorted(set(agents) | set(answers)):
        answer = answers.get(agent)
        state[agent] = DiscreteOpinion.AB if answer is None else TERNARY_TO_OPINION[answer]
    return state


def coding_init_sampler(
    wave1: list[SurveyRecord],
    agents: list[AgentId],
    gamma: float,
    t0: float = 0.0,
    max_tries: int = 1000,
):
    """Per-repetition initializer used by the run engine for the hybrid model."""

    def sample(run_index: int, rng: Generator) -> CodingState:
        return initialize_coding(wave1, agents, gamma, rng, t0=t0, max_tries=max_tries)

    return sample


def ng_init_sampler(wave1: list[SurveyRecord], agents: list[AgentId]):
    """Per-repetition initializer for the baseline (deterministic, fresh copy per run)."""

    def sample(run_index: int, rng: Generator) -> NgState:
        return initialize_ng(wave1, agents)

    return sample
