"""The lesson bench: students drive row reduction or Krylov iteration step
by step while the engine validates, records, hints, and previews.

Sessions are rational-domain only so every accepted step is exact and every
transcript replays bit-for-bit. The registry serializes writes per session;
distinct sessions are independent. Sessions expire after an idle period and
can optionally append each accepted step to a JSON-lines transcript log.
"""

from __future__ import annotations

import json
import secrets
import threading
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence, Union

from .echelon import (
    AddMultiple,
    RowOp,
    Scale,
    Swap,
    TraceStep,
    apply_rowop,
    is_ref,
    is_rref,
    ref,
    rowop_from_json,
    rowop_to_json,
    rref,
    solve,
    UniqueSolution,
    validate_rowop,
)
from .errors import (
    GoalReachedError,
    LinalgError,
    ParseError,
    ShapeError,
    UnknownSessionError,
)
from .matrix import Matrix
from .poly import Polynomial, format_poly
from .scalars import RATIONAL_DOMAIN, format_rational, parse_rational

MODE_REF = "reduce_to_ref"
MODE_RREF = "reduce_to_rref"
MODE_KRYLOV = "krylov"
MODES = (MODE_REF, MODE_RREF, MODE_KRYLOV)

DEFAULT_IDLE_TTL = 24 * 3600.0


@dataclass(frozen=True)
class AppendIterate:
    """The one legal move of a Krylov session: append A times the last iterate."""


BenchOp = Union[RowOp, AppendIterate]


def bench_op_to_json(op: BenchOp) -> dict:
    if isinstance(op, AppendIterate):
        return {"kind": "AppendIterate"}
    return rowop_to_json(op)


def bench_op_from_json(obj: dict) -> BenchOp:
    if isinstance(obj, dict) and obj.get("kind") == "AppendIterate":
        return AppendIterate()
    return rowop_from_json(obj, RATIONAL_DOMAIN)


@dataclass(frozen=True)
class Hint:
    suggested_op: BenchOp
    rationale: str
    resulting_pivot: Optional[tuple[int, int]]


@dataclass(frozen=True)
class SessionView:
    """Immutable snapshot of a session, safe to hand to any caller."""

    id: str
    mode: str
    b: Optional[tuple[Fraction, ...]]
    status: str
    initial: Matrix
    current: Matrix
    steps: tuple[TraceStep, ...]
    annihilator: Optional[Polynomial]

    @property
    def goal_reached(self) -> bool:
        return self.status == "goal_reached"

    def export(self) -> dict:
        doc = {
            "version": "v1",
            "id": self.id,
            "mode": self.mode,
            "status": self.status,
            "initial": self.initial.to_json(),
            "steps": [
                {
                    "op": bench_op_to_json(s.op),
                    "annotation": s.annotation,
                    "after": s.after.to_json()["data"],
                }
                for s in self.steps
            ],
        }
        if self.b is not None:
            doc["b"] = [format_rational(x) for x in self.b]
        if self.annihilator is not None:
            doc["annihilator"] = format_poly(self.annihilator)
        return doc

    def state_json(self) -> dict:
        state = {
            "id": self.id,
            "mode": self.mode,
            "status": self.status,
            "initial": self.initial.to_json(),
            "current": self.current.to_json(),
            "step_count": len(self.steps),
        }
        analysis = ref(self.current)
        state["analysis"] = {
            "pivots": [list(p) for p in analysis.pivots],
            "free_cols": list(analysis.free_cols),
            "rank": analysis.rank,
        }
        if self.b is not None:
            state["b"] = [format_rational(x) for x in self.b]
        if self.annihilator is not None:
            state["annihilator"] = format_poly(self.annihilator)
        return state


@dataclass(frozen=True)
class ApplyOutcome:
    session: SessionView
    accepted: bool
    note: str


@dataclass(frozen=True)
class WhatIf:
    preview: Matrix
    would_reach_goal: bool
    note: str
    annihilator: Optional[Polynomial] = None


def _describe(op: BenchOp, count: int) -> str:
    if isinstance(op, Swap):
        return f"swap rows {op.i} and {op.j}"
    if isinstance(op, Scale):
        return f"scale row {op.i} by {format_rational(op.factor)}"
    if isinstance(op, AddMultiple):
        return f"add {format_rational(op.factor)} times row {op.src} to row {op.dst}"
    return f"append Krylov iterate A^{count} b"


class _Session:
    """Mutable session record; all mutation happens under self.lock."""

    def __init__(self, sid: str, initial: Matrix, mode: str, b: Optional[tuple]):
        self.id = sid
        self.initial = initial
        self.mode = mode
        self.b = b
        self.current = initial if mode != MODE_KRYLOV else Matrix.from_columns([list(b)])
        self.steps: list[TraceStep] = []
        self.annihilator: Optional[Polynomial] = None
        self.lock = threading.Lock()
        self.last_touch = 0.0

    def goal_reached(self) -> bool:
        if self.mode == MODE_REF:
            return is_ref(self.current)
        if self.mode == MODE_RREF:
            return is_rref(self.current)
        return ref(self.current).rank < self.current.cols

    def status(self) -> str:
        return "goal_reached" if self.goal_reached() else "in_progress"

    def view(self) -> SessionView:
        return SessionView(
            id=self.id,
            mode=self.mode,
            b=self.b,
            status=self.status(),
            initial=self.initial,
            current=self.current,
            steps=tuple(self.steps),
            annihilator=self.annihilator,
        )

    def next_iterate(self) -> tuple:
        return self.initial.apply(self.current.column(self.current.cols - 1))

    def krylov_annihilator_now(self) -> Optional[Polynomial]:
        """Annihilator read off the current iterate matrix, if dependent."""
        result = ref(self.current)
        if result.rank == self.current.cols:
            return None
        d = self.current.cols - 1
        if d == 0:
            return None
        prefix = Matrix.from_columns(
            [list(self.current.column(j)) for j in range(d)]
        )
        solution = solve(prefix, list(self.current.column(d)))
        assert isinstance(solution, UniqueSolution)
        return Polynomial([-x for x in solution.x] + [Fraction(1)])


class SessionRegistry:
    """In-memory session store: concurrent readers, serialized writers per
    session, lazy expiry, optional append-only transcript logging."""

    def __init__(
        self,
        idle_ttl: float = DEFAULT_IDLE_TTL,
        log_dir: Optional[str] = None,
        time_fn=time.monotonic,
    ):
        self.idle_ttl = idle_ttl
        self.log_dir = Path(log_dir) if log_dir else None
        self._time = time_fn
        self._sessions: dict[str, _Session] = {}
        self._lock = threading.Lock()
        if self.log_dir:
            self.log_dir.mkdir(parents=True, exist_ok=True)

    # -- bookkeeping -------------------------------------------------------

    def _purge(self):
        now = self._time()
        with self._lock:
            dead = [
                sid
                for sid, s in self._sessions.items()
                if now - s.last_touch > self.idle_ttl
            ]
            for sid in dead:
                del self._sessions[sid]

    def _entry(self, sid: str) -> _Session:
        self._purge()
        with self._lock:
            session = self._sessions.get(sid)
            if session is None:
                raise UnknownSessionError(sid)
            session.last_touch = self._time()
            return session

    def _log(self, session: _Session, record: dict):
        if not self.log_dir:
            return
        path = self.log_dir / f"{session.id}.jsonl"
        with path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(record) + "\n")

    # -- operations -----------------------------------------------------------

    def create(self, matrix: Matrix, mode: str, b: Optional[Sequence] = None) -> SessionView:
        if matrix.domain != RATIONAL_DOMAIN:
            raise ParseError(
                "sessions are rational-domain only: step validation must be exact"
            )
        if mode not in MODES:
            raise ParseError(f"unknown mode {mode!r}")
        vec = None
        if mode == MODE_KRYLOV:
            if b is None:
                raise ParseError("krylov mode needs a start vector b")
            vec = tuple(Fraction(x) for x in b)
            if len(vec) != matrix.rows or not matrix.is_square:
                raise ShapeError("krylov mode needs a square matrix and a matching b")
            if all(x == 0 for x in vec):
                raise ParseError("krylov mode needs b != 0")
        elif b is not None:
            raise ParseError(f"mode {mode} takes no start vector")
        sid = secrets.token_hex(16)
        session = _Session(sid, matrix, mode, vec)
        session.last_touch = self._time()
        with self._lock:
            self._sessions[sid] = session
        self._log(
            session,
            {
                "event": "create",
                "id": sid,
                "mode": mode,
                "matrix": matrix.to_json(),
                "b": [format_rational(x) for x in vec] if vec else None,
            },
        )
        self._purge()
        return session.view()

    def get(self, sid: str) -> SessionView:
        return self._entry(sid).view()

    def apply(self, sid: str, op: BenchOp) -> ApplyOutcome:
        session = self._entry(sid)
        with session.lock:
            if session.mode == MODE_KRYLOV:
                if not isinstance(op, AppendIterate):
                    return ApplyOutcome(
                        session.view(), False, "krylov sessions accept only AppendIterate"
                    )
                iterate = session.next_iterate()
                columns = [list(session.current.column(j)) for j in range(session.current.cols)]
                columns.append(list(iterate))
                session.current = Matrix.from_columns(columns)
                note = _describe(op, session.current.cols - 1)
                if session.annihilator is None:
                    session.annihilator = session.krylov_annihilator_now()
                    if session.annihilator is not None:
                        note += (
                            "; dependency found, annihilator "
                            + format_poly(session.annihilator)
                        )
            else:
                if isinstance(op, AppendIterate):
                    return ApplyOutcome(
                        session.view(), False, "AppendIterate applies only to krylov sessions"
                    )
                reason = validate_rowop(session.current, op)
                if reason is not None:
                    return ApplyOutcome(session.view(), False, reason)
                session.current = apply_rowop(session.current, op)
                note = _describe(op, len(session.steps))
            step = TraceStep(op=op, annotation=note, after=session.current)
            session.steps.append(step)
            self._log(
                session,
                {
                    "event": "op",
                    "id": sid,
                    "op": bench_op_to_json(op),
                    "annotation": note,
                    "after": session.current.to_json()["data"],
                },
            )
            return ApplyOutcome(session.view(), True, note)

    def hint(self, sid: str) -> Hint:
        session = self._entry(sid)
        with session.lock:
            if session.goal_reached():
                raise GoalReachedError(sid)
            if session.mode == MODE_KRYLOV:
                return Hint(
                    suggested_op=AppendIterate(),
                    rationale="append the next Krylov iterate and test for a dependency",
                    resulting_pivot=None,
                )
            result = (
                rref(session.current) if session.mode == MODE_RREF else ref(session.current)
            )
            step = result.trace.steps[0]
            anchor_row = step.op.i if isinstance(step.op, (Swap, Scale)) else step.op.src
            pivot = next(((r, c) for r, c in result.pivots if r == anchor_row), None)
            return Hint(suggested_op=step.op, rationale=step.annotation, resulting_pivot=pivot)

    def whatif(self, sid: str, op: BenchOp) -> WhatIf:
        session = self._entry(sid)
        with session.lock:
            if session.mode == MODE_KRYLOV:
                if not isinstance(op, AppendIterate):
                    raise ParseError("krylov sessions accept only AppendIterate")
                iterate = session.next_iterate()
                columns = [
                    list(session.current.column(j)) for j in range(session.current.cols)
                ]
                columns.append(list(iterate))
                preview = Matrix.from_columns(columns)
                dependent = ref(preview).rank < preview.cols
                annihilator = None
                note = "no dependency yet"
                if dependent:
                    probe = _Session(session.id, session.initial, MODE_KRYLOV, session.b)
                    probe.current = preview
                    annihilator = probe.krylov_annihilator_now()
                    note = "dependency detected"
                    if annihilator is not None:
                        note += ", annihilator " + format_poly(annihilator)
                return WhatIf(
                    preview=preview,
                    would_reach_goal=dependent,
                    note=note,
                    annihilator=annihilator,
                )
            if isinstance(op, AppendIterate):
                raise ParseError("AppendIterate applies only to krylov sessions")
            reason = validate_rowop(session.current, op)
            if reason is not None:
                raise ParseError(reason)
            preview = apply_rowop(session.current, op)
            reaches = is_rref(preview) if session.mode == MODE_RREF else (
                is_ref(preview) if session.mode == MODE_REF else False
            )
            return WhatIf(
                preview=preview,
                would_reach_goal=reaches,
                note=_describe(op, len(session.steps)),
            )

    def export(self, sid: str) -> dict:
        return self._entry(sid).view().export()


def verify_transcript(doc: dict) -> tuple[bool, str]:
    """Replay an exported transcript; flag the first snapshot that does not
    match what the ops actually produce."""
    try:
        mode = doc["mode"]
        initial = Matrix.from_json(doc["initial"], RATIONAL_DOMAIN)
        steps = doc["steps"]
    except (KeyError, TypeError) as exc:
        return False, f"malformed transcript: {exc}"
    if mode == MODE_KRYLOV:
        b = [parse_rational(x) for x in doc["b"]]
        current = Matrix.from_columns([b])
    else:
        current = initial
    for idx, raw in enumerate(steps):
        op = bench_op_from_json(raw["op"])
        if isinstance(op, AppendIterate):
            if mode != MODE_KRYLOV:
                return False, f"step {idx}: AppendIterate outside krylov mode"
            iterate = initial.apply(current.column(current.cols - 1))
            columns = [list(current.column(j)) for j in range(current.cols)]
            columns.append(list(iterate))
            current = Matrix.from_columns(columns)
        else:
            if mode == MODE_KRYLOV:
                return False, f"step {idx}: row op inside krylov mode"
            try:
                current = apply_rowop(current, op)
            except (ShapeError, LinalgError) as exc:
                return False, f"step {idx}: illegal op: {exc}"
        after = raw["after"]
        snapshot = Matrix.from_json(
            {"rows": len(after), "cols": len(after[0]), "data": after}, RATIONAL_DOMAIN
        )
        if snapshot != current:
            return False, f"step {idx}: snapshot does not match replay"
    return True, "transcript replays exactly"


def recover_sessions(log_dir: str, registry: SessionRegistry) -> int:
    """Rebuild sessions from the append-only transcript log after a crash.

    Returns the number of sessions restored. Ids are preserved so bookmarked
    URLs keep working.
    """
    count = 0
    for path in sorted(Path(log_dir).glob("*.jsonl")):
        lines = [json.loads(line) for line in path.read_text().splitlines() if line.strip()]
        if not lines or lines[0].get("event") != "create":
            continue
        head = lines[0]
        matrix = Matrix.from_json(head["matrix"], RATIONAL_DOMAIN)
        b = head.get("b")
        session = _Session(head["id"], matrix, head["mode"],
                           tuple(parse_rational(x) for x in b) if b else None)
        session.last_touch = registry._time()
        for raw in lines[1:]:
            if raw.get("event") != "op":
                continue
            op = bench_op_from_json(raw["op"])
            if isinstance(op, AppendIterate):
                iterate = session.next_iterate()
                columns = [
                    list(session.current.column(j)) for j in range(session.current.cols)
                ]
                columns.append(list(iterate))
                session.current = Matrix.from_columns(columns)
                if session.annihilator is None:
                    session.annihilator = session.krylov_annihilator_now()
            else:
                session.current = apply_rowop(session.current, op)
            session.steps.append(
                TraceStep(op=op, annotation=raw.get("annotation", ""), after=session.current)
            )
        with registry._lock:
            registry._sessions[session.id] = session
        count += 1
    return count
