"""Level-0 fault-tolerant gadget compilation.

Every gadget here is emitted as a flat, strictly nearest-neighbor
circuit over a window of (entangling, data, cat) triples.  A hookless
measurement of an observable runs in three phases:

  1. cat preparation: reset + H on every cat qubit in the contiguous
     span covering the observable's support, then three repetitions of
     ZZ parity checks between consecutive cat qubits, each mediated by
     the entangling qubit between them (the far CNOT of a check crosses
     one data qubit and is decomposed into four adjacent CNOTs);
  2. parity couplings: per span site, entangle the cat qubit with its
     data qubit (CX for an X factor, H-conjugated CX for a Z factor);
  3. readout: every span cat qubit is measured in the X basis (H, MZ)
     and reset; the XOR of these bits reconstructs the outcome.

The measurement-based preparation leaves the first round of parity
checks genuinely random; all downstream consumers therefore work with
record *comparisons* (against a same-seed noiseless reference), never
with absolute bits.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .circuit import Circuit, CircuitWriter
from .codes import (
    ROLE_CAT,
    ROLE_DATA,
    ROLE_ENTANGLE,
    SparsePauli,
    StabilizerCode,
    build_tower,
    outer_stab_rep,
)

CAT_ROUNDS = 3
EC_REPS = 3
MEAS_HOOKS = 3


@dataclass(frozen=True)
class ObservableSpec:
    """A measurable Pauli product, carried as a physical representative.

    ``pauli`` lives on the window's qubits and must be supported on
    data-role qubits only; ``blocks`` names the touched child blocks
    (one or two, adjacent).
    """

    level: int
    pauli: SparsePauli
    blocks: tuple[int, ...]
    name: str

    def __post_init__(self):
        if len(self.blocks) not in (1, 2):
            raise ValueError("an observable touches one or two adjacent blocks")
        if len(self.blocks) == 2 and abs(self.blocks[0] - self.blocks[1]) != 1:
            raise ValueError("a two-block observable needs adjacent blocks")


def ent_qubit(t: int) -> int:
    return 3 * t


def data_qubit(t: int) -> int:
    return 3 * t + 1


def cat_qubit(t: int) -> int:
    return 3 * t + 2


def triple_kinds(pauli: SparsePauli, n: int) -> dict[int, str]:
    """Map triple index -> Pauli kind on its data qubit; rejects Y and helper support."""
    kinds: dict[int, str] = {}
    xs, zs = set(pauli.x_sites.tolist()), set(pauli.z_sites.tolist())
    for q in sorted(xs | zs):
        if q % 3 != 1:
            raise ValueError(f"observable touches non-data qubit {q}")
        t = q // 3
        if q in xs and q in zs:
            raise ValueError(f"observable has a Y factor at data qubit {q}; no phase gate available")
        kinds[t] = "X" if q in xs else "Z"
    if not kinds:
        raise ValueError("empty observable")
    return kinds


def hook_span(pauli: SparsePauli, n: int) -> list[int]:
    kinds = triple_kinds(pauli, n)
    lo, hi = min(kinds), max(kinds)
    return list(range(lo, hi + 1))


# ---------------------------------------------------------------------------
# emission primitives (compose into one writer)


def emit_cat_prep(w: CircuitWriter, span: list[int], path: str) -> None:
    """Initialize the span's cat qubits to |+> and harden with 3 ZZ rounds."""
    if len(span) < 2:
        raise ValueError("cat preparation needs a span of at least 2 sites")
    if any(b - a != 1 for a, b in zip(span, span[1:])):
        raise ValueError("cat span must be consecutive triples in line order")
    for t in span:
        w.rz(cat_qubit(t))
    for t in span:
        w.h(cat_qubit(t))
    for rnd in range(CAT_ROUNDS):
        for k, t in enumerate(span[:-1]):
            _emit_zz_check(w, t, path, rnd, k)


def _emit_zz_check(w: CircuitWriter, t: int, path: str, rnd: int, k: int) -> None:
    """Parity of Z(cat t) Z(cat t+1) via the entangling qubit between them.

    The CNOT from the right cat qubit crosses the data qubit of triple
    t+1 and is decomposed into four adjacent CNOTs touching it.
    """
    e = ent_qubit(t + 1)
    c_left, c_right = cat_qubit(t), cat_qubit(t + 1)
    d_mid = data_qubit(t + 1)
    w.rz(e)
    w.cx(c_left, e)
    w.cx(c_right, d_mid)
    w.cx(d_mid, e)
    w.cx(c_right, d_mid)
    w.cx(d_mid, e)
    h = w.mz(e)
    w.detector(0, path, rnd, f"cat{k}", [h])


def emit_hook(
    w: CircuitWriter,
    obs: ObservableSpec,
    path: str,
    rep: int,
    name: str,
) -> list[int]:
    """One hookless measurement; returns the handles whose XOR is the outcome."""
    kinds = triple_kinds(obs.pauli, w.n)
    span = hook_span(obs.pauli, w.n)
    if len(span) >= 2:
        emit_cat_prep(w, span, f"{path}/r{rep}/{name}")
    else:
        t = span[0]
        w.rz(cat_qubit(t))
        w.h(cat_qubit(t))
    v_handles: list[int] = []
    for t in span:
        c, d = cat_qubit(t), data_qubit(t)
        kind = kinds.get(t, "I")
        if kind == "X":
            w.cx(c, d)
        elif kind == "Z":
            w.h(d)
            w.cx(c, d)
            w.h(d)
        w.h(c)
        v_handles.append(w.mz(c))
        w.rz(c)
    w.detector(0, path, rep, name, v_handles)
    w.barrier()
    return v_handles


def block_stab_observables(code: StabilizerCode, block_offset: int = 0, n_total: int | None = None) -> list[ObservableSpec]:
    """The outer (Hamming) stabilizers of one block as observables.

    Sequencing follows the fixed measurement order: X-stabilizers in
    generator order, then Z-stabilizers.
    """
    n = n_total if n_total is not None else code.n
    out = []
    for st in code.tower.outer_stabs:
        rep = outer_stab_rep(code, st).shifted(block_offset, n)
        out.append(
            ObservableSpec(
                level=0,
                pauli=rep,
                blocks=(block_offset // code.n if code.n else 0,),
                name=f"{st.kind.lower()}{st.bit}",
            )
        )
    return out


def emit_ec(w: CircuitWriter, code: StabilizerCode, path: str, block_offset: int = 0) -> None:
    """Three repetitions of hookless measurements of all outer stabilizers."""
    stabs = block_stab_observables(code, block_offset, w.n)
    for rep in range(EC_REPS):
        for obs in stabs:
            emit_hook(w, obs, path, rep, obs.name)


def emit_meas(
    w: CircuitWriter,
    code: StabilizerCode,
    obs: ObservableSpec,
    path: str,
    block_offsets: list[int] | None = None,
) -> None:
    """hook(O); EC; hook(O); EC; hook(O); the surrounding ECs belong to the caller.

    The outcome is the majority over the three hooks; each hook's bits
    are recorded as one observable group under the observable's name.
    """
    offsets = block_offsets if block_offsets is not None else [0]
    for h in range(MEAS_HOOKS):
        v = emit_hook(w, obs, path, h, f"obs:{obs.name}")
        w.observable(obs.name, v)
        if h < MEAS_HOOKS - 1:
            for j, off in enumerate(offsets):
                emit_ec(w, code, f"{path}/ec{h}b{j}", off)


# ---------------------------------------------------------------------------
# public builders


def _window_writer(code: StabilizerCode) -> CircuitWriter:
    return CircuitWriter(code.n, roles=[code.roles[q] for q in range(code.n)])


@lru_cache(maxsize=4)
def _default_code(level: int) -> StabilizerCode:
    return build_tower(level)


def build_cat_prep(level: int, span: list[int], code: StabilizerCode | None = None) -> Circuit:
    """Standalone cat-preparation fragment over the given cat sites (triples)."""
    if level != 0:
        from . import hier

        return hier.build_cat_prep(level, span, code)
    code = code or _default_code(0)
    w = _window_writer(code)
    emit_cat_prep(w, list(span), "catprep")
    c = w.finalize()
    c.meta["span"] = list(span)
    return c


def build_hook(level: int, obs: ObservableSpec, code: StabilizerCode | None = None) -> Circuit:
    """Standalone hookless measurement of one observable."""
    if level != 0:
        from . import hier

        return hier.build_hook(level, obs, code)
    code = code or _default_code(0)
    w = _window_writer(code)
    v = emit_hook(w, obs, "hook", 0, obs.name)
    w.observable(obs.name, v)
    c = w.finalize()
    c.meta["observable_paulis"] = {obs.name: obs.pauli.to_label()}
    return c


def build_ec(level: int, code: StabilizerCode | None = None) -> Circuit:
    """Error-correction gadget: 3 repetitions of all outer-stabilizer hooks."""
    if level != 0:
        from . import hier

        return hier.build_ec(level, code)
    code = code or _default_code(0)
    w = _window_writer(code)
    emit_ec(w, code, "ec0")
    c = w.finalize()
    c.meta["gadget"] = "ec"
    return c


def build_meas(level: int, obs: ObservableSpec, code: StabilizerCode | None = None) -> Circuit:
    """Fault-tolerant measurement: 3 hooks alternated with internal ECs."""
    if level != 0:
        from . import hier

        return hier.build_meas(level, obs, code)
    code = code or _default_code(0)
    w = _window_writer(code)
    emit_meas(w, code, obs, "meas0")
    c = w.finalize()
    c.meta["gadget"] = "meas"
    c.meta["observable_paulis"] = {obs.name: obs.pauli.to_label()}
    return c


def build_memory_experiment(
    level: int,
    cycles: int,
    observables: list[int] | None = None,
    code: StabilizerCode | None = None,
) -> Circuit:
    """Reset everything, project with one EC pass, run `cycles` more EC
    passes, then read all data qubits transversally in Z.

    Tracked observables are logical Z indices; their final-readout
    parities, compared against the same-seed noiseless reference,
    define the logical flip bits.
    """
    if cycles < 1:
        raise ValueError("memory experiment needs cycles >= 1")
    if level != 0:
        from . import hier

        return hier.build_memory_experiment(level, cycles, observables, code)
    code = code or _default_code(0)
    tracked = list(range(code.k)) if observables is None else list(observables)
    w = _window_writer(code)
    for q in range(code.n):
        w.rz(q)
    w.barrier()
    for e in range(cycles + 1):
        emit_ec(w, code, f"ec{e}")
    readout: dict[int, int] = {}
    for q in code.data_qubits():
        h = w.mz(int(q))
        readout[int(q)] = h
        w.detector(0, "readout", 0, f"q{int(q)}", [h])
    for i in tracked:
        group = [readout[int(q)] for q in code.logical_z[i].support()]
        w.observable(f"LZ{i}", group)
    c = w.finalize()
    c.meta["gadget"] = "memory"
    c.meta["cycles"] = cycles
    c.meta["tracked"] = tracked
    c.meta["observable_paulis"] = {f"LZ{i}": code.logical_z[i].to_label() for i in tracked}
    return c


# ---------------------------------------------------------------------------
# absolute-record interpretation
#
# The measurement-based cat preparation projects with random ZZ outcomes,
# so each hook physically applies a *known* partial product of its factors
# to the data (the tracked Pauli correction; no feedback gates exist).
# Runs are interpreted either relative to a same-seed noiseless reference
# (which cancels these frames exactly) or with the explicit frame
# accounting below.


def hook_frame_pauli(obs_pauli: SparsePauli, n: int, check_bits: list[int]) -> SparsePauli:
    """The data Pauli a hook applies, from its last-round ZZ check outcomes.

    The frame is fixed by the convention that the leftmost span site is
    unflipped; the complementary choice differs by the measured operator
    itself, which the recorded outcome already absorbs.
    """
    kinds = triple_kinds(obs_pauli, n)
    span = hook_span(obs_pauli, n)
    xs, zs = [], []
    flip = 0
    for k, t in enumerate(span):
        if k > 0:
            flip ^= int(check_bits[k - 1])
        if flip and t in kinds:
            (xs if kinds[t] == "X" else zs).append(data_qubit(t))
    return SparsePauli(n, xs, zs)


def track_hook_frames(circuit: Circuit, record: np.ndarray, obs_paulis: dict[str, SparsePauli]):
    """Frame-corrected hook outcomes of an absolute (non-diffed) record.

    Walks the hooks in temporal order, accumulating the applied data
    frame, and returns ({(gadget, rep, stab): corrected outcome bit},
    final accumulated frame).  ``obs_paulis`` must resolve every hook's
    observable name ("x1".."z4" style stabilizer ids or "obs:<name>").
    """
    n = circuit.n
    v_dets = [d for d in circuit.detectors if not d.stab.startswith("cat") and d.gadget != "readout"]
    v_dets.sort(key=lambda d: min(d.indices))
    cat_by_path: dict[str, dict[tuple[int, str], int]] = {}
    for d in circuit.detectors:
        if d.stab.startswith("cat"):
            cat_by_path.setdefault(d.gadget, {})[(d.rep, d.stab)] = d.indices[0]
    frame = SparsePauli(n)
    corrected: dict[tuple[str, int, str], int] = {}
    for d in v_dets:
        name = d.stab.split(":", 1)[1] if d.stab.startswith("obs:") else d.stab
        pauli = obs_paulis[name]
        raw = int(np.bitwise_xor.reduce(record[list(d.indices)]))
        corrected[(d.gadget, d.rep, d.stab)] = raw ^ (0 if frame.commutes(pauli) else 1)
        checks = cat_by_path.get(f"{d.gadget}/r{d.rep}/{d.stab}", {})
        span = hook_span(pauli, n)
        bits = [int(record[checks[(CAT_ROUNDS - 1, f"cat{k}")]]) for k in range(len(span) - 1)] if checks else []
        frame = frame.compose(hook_frame_pauli(pauli, n, bits))
    return corrected, frame


# convenient observable constructors --------------------------------------


def stab_observable(code: StabilizerCode, stab_name: str) -> ObservableSpec:
    for st in code.tower.outer_stabs:
        if f"{st.kind.lower()}{st.bit}" == stab_name:
            return ObservableSpec(0, outer_stab_rep(code, st), (0,), stab_name)
    raise KeyError(stab_name)


def logical_z_observable(code: StabilizerCode, i: int) -> ObservableSpec:
    return ObservableSpec(0, code.logical_z[i], (0,), f"LZ{i}")


def logical_x_observable(code: StabilizerCode, i: int) -> ObservableSpec:
    return ObservableSpec(0, code.logical_x[i], (0,), f"LX{i}")
