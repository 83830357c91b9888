"""Exact stabilizer-tableau simulation of {CX, H, RZ, MZ} circuits.

This is the semantic ground truth for everything else in the package:
the fast Pauli-frame paths are only trusted after being checked
bit-for-bit against runs of this simulator.

Random measurement outcomes are drawn from a counter-based PRF keyed by
(shot seed, record index), so identical (circuit, faults, seed) triples
produce bit-identical records and a run can be reproduced measurement
by measurement.
"""

from __future__ import annotations

import numpy as np

from . import circuit as circ
from .pauli import PauliString

_MASK = (1 << 64) - 1


def _splitmix64(v: int) -> int:
    v = (v + 0x9E3779B97F4A7C15) & _MASK
    z = v
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def prf_bit(seed: int, counter: int) -> int:
    """Deterministic random bit for measurement `counter` of shot `seed`."""
    return _splitmix64(_splitmix64(seed & _MASK) ^ ((counter + 1) * 0xD1B54A32D192ED03 & _MASK)) & 1


class Tableau:
    """Aaronson-Gottesman tableau: rows 0..n-1 destabilizers, n..2n-1 stabilizers.

    Row (x, z, r) represents (-1)^r times the Pauli word with Y on
    qubits in both supports.  The instance is single-owner and mutated
    in place; copy() before sharing.
    """

    def __init__(self, n: int):
        self.n = n
        self.x = np.zeros((2 * n, n), dtype=bool)
        self.z = np.zeros((2 * n, n), dtype=bool)
        self.r = np.zeros(2 * n, dtype=bool)
        for i in range(n):
            self.x[i, i] = True          # destabilizer X_i
            self.z[n + i, i] = True      # stabilizer Z_i

    def copy(self) -> "Tableau":
        t = Tableau.__new__(Tableau)
        t.n = self.n
        t.x = self.x.copy()
        t.z = self.z.copy()
        t.r = self.r.copy()
        return t

    # -- gates ------------------------------------------------------------

    def apply_h(self, q: int) -> None:
        self.r ^= self.x[:, q] & self.z[:, q]
        tmp = self.x[:, q].copy()
        self.x[:, q] = self.z[:, q]
        self.z[:, q] = tmp

    def apply_cnot(self, c: int, t: int) -> None:
        self.r ^= self.x[:, c] & self.z[:, t] & (self.x[:, t] ^ self.z[:, c] ^ True)
        self.x[:, t] ^= self.x[:, c]
        self.z[:, c] ^= self.z[:, t]

    def apply_pauli(self, p: PauliString) -> None:
        """Conjugation by a Pauli only flips signs of anticommuting rows."""
        anti = ((self.x & p.z).sum(axis=1) + (self.z & p.x).sum(axis=1)) % 2
        self.r ^= anti.astype(bool)

    # -- rowsum (the AG phase bookkeeping) ---------------------------------

    def _g_sum(self, xi, zi, xh, zh) -> int:
        xi_ = xi.astype(np.int8)
        zi_ = zi.astype(np.int8)
        xh_ = xh.astype(np.int8)
        zh_ = zh.astype(np.int8)
        g = np.zeros(self.n, dtype=np.int8)
        yy = xi & zi
        g[yy] = zh_[yy] - xh_[yy]
        xx = xi & ~zi
        g[xx] = zh_[xx] * (2 * xh_[xx] - 1)
        zz = ~xi & zi
        g[zz] = xh_[zz] * (1 - 2 * zh_[zz])
        return int(g.sum())

    def _rowsum_into(self, xh, zh, rh: int, i: int) -> tuple[np.ndarray, np.ndarray, int]:
        total = 2 * rh + 2 * int(self.r[i]) + self._g_sum(self.x[i], self.z[i], xh, zh)
        return xh ^ self.x[i], zh ^ self.z[i], (total % 4) // 2

    def rowsum(self, h: int, i: int) -> None:
        xh, zh, rh = self._rowsum_into(self.x[h], self.z[h], int(self.r[h]), i)
        self.x[h], self.z[h], self.r[h] = xh, zh, bool(rh)

    # -- measurement and reset ---------------------------------------------

    def measure_z(self, q: int, random_bit: int) -> tuple[int, bool]:
        """Measure Z on qubit q; returns (outcome, was_random)."""
        n = self.n
        stab_hits = np.flatnonzero(self.x[n:, q]) + n
        if len(stab_hits):
            p = int(stab_hits[0])
            others = np.flatnonzero(self.x[:, q])
            for i in others:
                if i != p:
                    self.rowsum(int(i), p)
            self.x[p - n] = self.x[p]
            self.z[p - n] = self.z[p]
            self.r[p - n] = self.r[p]
            self.x[p] = False
            self.z[p] = False
            self.z[p, q] = True
            self.r[p] = bool(random_bit)
            return int(random_bit), True
        # deterministic: accumulate stabilizer partners of flagged destabilizers
        xh = np.zeros(n, dtype=bool)
        zh = np.zeros(n, dtype=bool)
        rh = 0
        for i in np.flatnonzero(self.x[:n, q]):
            xh, zh, rh = self._rowsum_into(xh, zh, rh, int(i) + n)
        return int(rh), False

    def reset_z(self, q: int, random_bit: int) -> None:
        outcome, _ = self.measure_z(q, random_bit)
        if outcome:
            # apply X_q to bring the qubit to |0>
            self.r ^= self.z[:, q]

    # -- inspection ----------------------------------------------------------

    def stabilizer_row(self, i: int) -> PauliString:
        """Row as a PauliString (canonical i^k X^x Z^z form)."""
        y = int(np.count_nonzero(self.x[i] & self.z[i]))
        k = (2 * int(self.r[i]) + y) % 4
        return PauliString(self.n, self.x[i], self.z[i], k)

    def expectation(self, p: PauliString) -> int:
        """+1/-1 if p is in the +-stabilizer group, 0 if the outcome is random."""
        n = self.n
        anti_stab = ((self.x[n:] & p.z).sum(axis=1) + (self.z[n:] & p.x).sum(axis=1)) % 2
        if anti_stab.any():
            return 0
        # p = +- product of stabilizers flagged by anticommuting destabilizers
        sel = np.flatnonzero(((self.x[:n] & p.z).sum(axis=1) + (self.z[:n] & p.x).sum(axis=1)) % 2)
        acc = PauliString.identity(n)
        for i in sel:
            acc = acc.compose(self.stabilizer_row(int(i) + n))
        if not acc.equal_up_to_phase(p):
            return 0
        ratio = acc.phase / p.phase
        return 1 if abs(ratio - 1) < 1e-9 else -1

    def symplectic_rank(self) -> int:
        from .gf2 import rank

        m = np.concatenate([self.x[self.n:], self.z[self.n:]], axis=1).astype(np.uint8)
        return rank(m)


def _fault_key(f) -> tuple[int, int]:
    loc = getattr(f, "location", None)
    if loc is None:
        loc = (f.layer, f.op_index)
    return int(loc[0]), int(loc[1])


def tableau_simulate(circuit, injected_faults=(), seed: int = 0, return_state: bool = False):
    """Run a circuit exactly, injecting Pauli faults after their locations.

    Faults carry location (layer, op_index_within_layer); op_index -1
    means "after the layer" (idle faults), and layer -1 applies the
    Pauli before the circuit starts (input errors).  Identical
    (circuit, faults, seed) triples give bit-identical records.
    """
    n = circuit.n
    tab = Tableau(n)
    record = np.zeros(circuit.num_meas, dtype=np.uint8)

    num_layers = circuit.num_layers
    by_loc: dict[tuple[int, int], list[PauliString]] = {}
    for f in injected_faults:
        lay, idx = _fault_key(f)
        if lay >= num_layers or lay < -1:
            raise ValueError(f"fault layer {lay} out of range (circuit has {num_layers} layers)")
        by_loc.setdefault((lay, idx), []).append(f.pauli)

    for p in by_loc.pop((-1, -1), []):
        tab.apply_pauli(p)

    starts = np.searchsorted(circuit.layer, np.arange(num_layers))
    kind, qa, qb, rec, layers = circuit.kind, circuit.qa, circuit.qb, circuit.rec, circuit.layer
    for i in range(circuit.num_ops):
        lay = int(layers[i])
        idx = i - int(starts[lay])
        k = int(kind[i])
        a = int(qa[i])
        if k == circ.CX:
            tab.apply_cnot(a, int(qb[i]))
        elif k == circ.H:
            tab.apply_h(a)
        elif k == circ.RZ:
            # the collapsed branch is irrelevant: reset forces |0> either way
            tab.reset_z(a, 0)
        else:
            out, _ = tab.measure_z(a, prf_bit(seed, int(rec[i])))
            record[int(rec[i])] = out
        for p in by_loc.pop((lay, idx), []):
            if p.n != n:
                raise ValueError("fault Pauli has wrong qubit count")
            tab.apply_pauli(p)
        # idle faults fire after the last op of the layer
        if i + 1 == circuit.num_ops or int(layers[i + 1]) != lay:
            for p in by_loc.pop((lay, -1), []):
                tab.apply_pauli(p)

    if by_loc:
        bad = sorted(by_loc)[0]
        raise ValueError(f"fault location {bad} does not exist in the circuit")
    if return_state:
        return record, tab
    return record
