"""Layered nearest-neighbor stabilizer circuits on a line.

Operations are limited to {CX, H, RZ, MZ}.  Layers are packed greedily:
an appended operation lands in the earliest layer after the last use of
each qubit it touches (an explicit barrier can force sequencing).
Measurement record indices are dense and follow temporal order, i.e.
(layer, line position).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

CX, H, RZ, MZ = 0, 1, 2, 3
OP_NAMES = {CX: "CX", H: "H", RZ: "RZ", MZ: "MZ"}
OP_CODES = {v: k for k, v in OP_NAMES.items()}

ROLE_NAMES = ("data", "cat", "entangle")
ROLE_CODES = {name: i for i, name in enumerate(ROLE_NAMES)}


@dataclass(frozen=True)
class Detector:
    """Tags one measurement group with (level, gadget path, repetition, stabilizer id)."""

    level: int
    gadget: str
    rep: int
    stab: str
    indices: tuple[int, ...]


@dataclass
class Circuit:
    """A finalized circuit: op arrays plus detector and observable metadata."""

    n: int
    kind: np.ndarray      # int8, op codes
    qa: np.ndarray        # int32
    qb: np.ndarray        # int32, -1 for 1-qubit ops
    layer: np.ndarray     # int32, nondecreasing
    rec: np.ndarray       # int32, record index for MZ else -1
    positions: np.ndarray  # int32, qubit -> line coordinate
    roles: np.ndarray     # int8, role codes
    detectors: list[Detector] = field(default_factory=list)
    observables: dict[str, list[tuple[int, ...]]] = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    @property
    def num_ops(self) -> int:
        return len(self.kind)

    @property
    def num_layers(self) -> int:
        return int(self.layer[-1]) + 1 if len(self.layer) else 0

    @property
    def num_meas(self) -> int:
        return int(np.count_nonzero(self.kind == MZ))

    def role_of(self, q: int) -> str:
        return ROLE_NAMES[int(self.roles[q])]

    def data_qubits(self) -> np.ndarray:
        return np.flatnonzero(self.roles == ROLE_CODES["data"])

    def detector_index(self) -> dict[tuple, Detector]:
        return {(d.level, d.gadget, d.rep, d.stab): d for d in self.detectors}


class CircuitWriter:
    """Accumulates operations and metadata, then finalizes into a Circuit."""

    def __init__(self, n: int, positions: Sequence[int] | None = None, roles: Sequence[str] | None = None):
        self.n = n
        self.positions = np.arange(n, dtype=np.int32) if positions is None else np.asarray(positions, dtype=np.int32)
        if roles is None:
            self.roles = np.zeros(n, dtype=np.int8)
        else:
            self.roles = np.array([ROLE_CODES[r] for r in roles], dtype=np.int8)
        self._kind: list[int] = []
        self._qa: list[int] = []
        self._qb: list[int] = []
        self._layer: list[int] = []
        self._next_free = np.zeros(n, dtype=np.int64)
        self._floor = 0
        self._detectors: list[tuple[int, str, int, str, list[int]]] = []
        self._observables: dict[str, list[list[int]]] = {}
        self.meta: dict = {}

    # -- emission -------------------------------------------------------

    def _emit(self, kind: int, a: int, b: int = -1) -> int:
        lay = max(self._floor, self._next_free[a], self._next_free[b] if b >= 0 else 0)
        self._kind.append(kind)
        self._qa.append(a)
        self._qb.append(b)
        self._layer.append(int(lay))
        self._next_free[a] = lay + 1
        if b >= 0:
            self._next_free[b] = lay + 1
        return len(self._kind) - 1

    def cx(self, control: int, target: int) -> int:
        if control == target:
            raise ValueError("CX control equals target")
        return self._emit(CX, control, target)

    def h(self, q: int) -> int:
        return self._emit(H, q)

    def rz(self, q: int) -> int:
        return self._emit(RZ, q)

    def mz(self, q: int) -> int:
        """Returns a measurement handle, resolved to a record index at finalize."""
        return self._emit(MZ, q)

    def barrier(self) -> None:
        """Force every later op to start after everything emitted so far."""
        if self._layer:
            self._floor = max(self._floor, max(self._layer) + 1)

    def detector(self, level: int, gadget: str, rep: int, stab: str, handles: Iterable[int]) -> None:
        self._detectors.append((level, gadget, rep, stab, list(handles)))

    def observable(self, name: str, handles: Iterable[int]) -> None:
        self._observables.setdefault(name, []).append(list(handles))

    # -- finalize ---------------------------------------------------------

    def finalize(self) -> Circuit:
        kind = np.array(self._kind, dtype=np.int8)
        qa = np.array(self._qa, dtype=np.int32)
        qb = np.array(self._qb, dtype=np.int32)
        layer = np.array(self._layer, dtype=np.int64)
        # temporal order: layer, then line position of the primary qubit
        order = np.lexsort((self.positions[qa], layer))
        kind, qa, qb, layer = kind[order], qa[order], qb[order], layer[order]
        # map emission handle -> sorted index
        inverse = np.empty(len(order), dtype=np.int64)
        inverse[order] = np.arange(len(order))
        rec = np.full(len(kind), -1, dtype=np.int32)
        is_mz = kind == MZ
        rec[is_mz] = np.arange(int(is_mz.sum()), dtype=np.int32)
        handle_to_rec = {h: int(rec[inverse[h]]) for h in range(len(order)) if self._kind[h] == MZ}

        detectors = [
            Detector(level, gadget, rep, stab, tuple(handle_to_rec[h] for h in handles))
            for level, gadget, rep, stab, handles in self._detectors
        ]
        observables = {
            name: [tuple(handle_to_rec[h] for h in group) for group in groups]
            for name, groups in self._observables.items()
        }
        return Circuit(
            n=self.n,
            kind=kind,
            qa=qa,
            qb=qb,
            layer=layer.astype(np.int32),
            rec=rec,
            positions=self.positions.copy(),
            roles=self.roles.copy(),
            detectors=detectors,
            observables=observables,
            meta=dict(self.meta),
        )


def check_locality(circuit) -> list[str]:
    """Every 2-qubit gate must act on adjacent line coordinates.

    Returns a list of human-readable violations; empty means the circuit
    is strictly nearest-neighbor.  Hierarchical circuits implement their
    own template-aware version with the same return contract.
    """
    if hasattr(circuit, "locality_violations"):
        return circuit.locality_violations()
    pos = circuit.positions
    out = []
    two_q = circuit.kind == CX
    for i in np.flatnonzero(two_q):
        a, b = int(circuit.qa[i]), int(circuit.qb[i])
        if abs(int(pos[a]) - int(pos[b])) != 1:
            out.append(f"layer {int(circuit.layer[i])}: CX {a} {b} spans |{int(pos[a])}-{int(pos[b])}| != 1")
    return out


# -- text format ----------------------------------------------------------


def circuit_to_text(circuit: Circuit, header_comment: str | None = None) -> str:
    lines = []
    if header_comment:
        for row in header_comment.splitlines():
            lines.append(f"# {row}" if row else "#")
    lines.append(f"QUBITS {circuit.n}")
    for q in range(circuit.n):
        lines.append(f"POS {q} {int(circuit.positions[q])}")
    for q in range(circuit.n):
        lines.append(f"ROLE {q} {circuit.role_of(q)}")
    current = 0
    for i in range(circuit.num_ops):
        while circuit.layer[i] > current:
            lines.append("TICK")
            current += 1
        k = int(circuit.kind[i])
        if k == CX:
            lines.append(f"CX {int(circuit.qa[i])} {int(circuit.qb[i])}")
        elif k == H:
            lines.append(f"H {int(circuit.qa[i])}")
        elif k == RZ:
            lines.append(f"RZ {int(circuit.qa[i])}")
        else:
            lines.append(f"MZ {int(circuit.qa[i])} {int(circuit.rec[i])}")
    for d in circuit.detectors:
        idx = " ".join(str(i) for i in d.indices)
        lines.append(f"DETECTOR {d.level} {d.gadget} {d.rep} {d.stab} {idx}".rstrip())
    for name, groups in circuit.observables.items():
        for group in groups:
            idx = " ".join(str(i) for i in group)
            lines.append(f"OBSERVABLE {name} {idx}".rstrip())
    return "\n".join(lines) + "\n"


class CircuitParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def circuit_from_text(text: str) -> Circuit:
    n = None
    positions: dict[int, int] = {}
    roles: dict[int, str] = {}
    kind, qa, qb, rec, layer = [], [], [], [], []
    detectors: list[Detector] = []
    observables: dict[str, list[tuple[int, ...]]] = {}
    current_layer = 0

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        tok = parts[0]
        try:
            if tok == "QUBITS":
                n = int(parts[1])
            elif tok == "POS":
                positions[int(parts[1])] = int(parts[2])
            elif tok == "ROLE":
                if parts[2] not in ROLE_CODES:
                    raise ValueError(f"unknown role {parts[2]!r}")
                roles[int(parts[1])] = parts[2]
            elif tok == "TICK":
                current_layer += 1
            elif tok == "CX":
                kind.append(CX); qa.append(int(parts[1])); qb.append(int(parts[2])); rec.append(-1); layer.append(current_layer)
            elif tok == "H":
                kind.append(H); qa.append(int(parts[1])); qb.append(-1); rec.append(-1); layer.append(current_layer)
            elif tok == "RZ":
                kind.append(RZ); qa.append(int(parts[1])); qb.append(-1); rec.append(-1); layer.append(current_layer)
            elif tok == "MZ":
                kind.append(MZ); qa.append(int(parts[1])); qb.append(-1); rec.append(int(parts[2])); layer.append(current_layer)
            elif tok == "DETECTOR":
                detectors.append(Detector(int(parts[1]), parts[2], int(parts[3]), parts[4], tuple(int(i) for i in parts[5:])))
            elif tok == "OBSERVABLE":
                observables.setdefault(parts[1], []).append(tuple(int(i) for i in parts[2:]))
            else:
                raise ValueError(f"unknown token {tok!r}")
        except (IndexError, ValueError) as exc:
            if isinstance(exc, CircuitParseError):
                raise
            raise CircuitParseError(lineno, str(exc) or f"malformed {tok!r} line") from exc

    if n is None:
        raise CircuitParseError(0, "missing QUBITS header")
    pos_arr = np.arange(n, dtype=np.int32)
    for q, p in positions.items():
        pos_arr[q] = p
    role_arr = np.zeros(n, dtype=np.int8)
    for q, r in roles.items():
        role_arr[q] = ROLE_CODES[r]
    return Circuit(
        n=n,
        kind=np.array(kind, dtype=np.int8),
        qa=np.array(qa, dtype=np.int32),
        qb=np.array(qb, dtype=np.int32),
        layer=np.array(layer, dtype=np.int32),
        rec=np.array(rec, dtype=np.int32),
        positions=pos_arr,
        roles=role_arr,
        detectors=detectors,
        observables=observables,
    )
