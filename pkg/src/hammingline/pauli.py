"""Signed n-qubit Pauli operators.

The canonical internal form of an operator is ``i^k * X^x * Z^z`` where
``x`` and ``z`` are support bit-vectors and ``k`` is a phase exponent
mod 4.  The global phase convention is fixed so that ``X * Z == -i Y``;
every composition and conjugation rule below is derived from that one
choice, which keeps measurement signs reproducible across the package.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

_PHASES = {0: 1 + 0j, 1: 1j, 2: -1 + 0j, 3: -1j}
_KIND_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


class PauliString:
    """A signed Pauli operator on ``n`` qubits.

    A qubit carries Y exactly when it is in both the X and Z supports.
    ``phase`` is the displayed scalar in front of the I/X/Y/Z word, an
    element of {1, i, -1, -i}.
    """

    __slots__ = ("n", "x", "z", "k")

    def __init__(self, n: int, x=None, z=None, phase_exp: int = 0):
        self.n = int(n)
        self.x = np.zeros(n, dtype=bool) if x is None else np.asarray(x, dtype=bool).copy()
        self.z = np.zeros(n, dtype=bool) if z is None else np.asarray(z, dtype=bool).copy()
        if self.x.shape != (n,) or self.z.shape != (n,):
            raise ValueError(f"support length mismatch: n={n}, x={self.x.shape}, z={self.z.shape}")
        self.k = int(phase_exp) % 4

    # -- constructors ---------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n)

    @classmethod
    def single(cls, n: int, qubit: int, kind: str) -> "PauliString":
        """One-qubit Pauli ``kind`` in {X, Y, Z} embedded into n qubits."""
        if not 0 <= qubit < n:
            raise ValueError(f"qubit {qubit} out of range for n={n}")
        p = cls(n)
        xb, zb = _KIND_BITS[kind]
        p.x[qubit] = xb
        p.z[qubit] = zb
        if kind == "Y":  # Y = i * XZ in the canonical form
            p.k = 1
        return p

    @classmethod
    def from_sites(cls, n: int, x_sites: Iterable[int] = (), z_sites: Iterable[int] = ()) -> "PauliString":
        p = cls(n)
        for q in x_sites:
            p.x[q] = True
        for q in z_sites:
            p.z[q] = True
        return p

    @classmethod
    def from_label(cls, label: str, n: int) -> "PauliString":
        """Parse a sparse label such as ``X1*X3*Z7`` (0-based indices)."""
        p = cls(n)
        label = label.strip()
        if label in ("", "I"):
            return p
        for token in label.split("*"):
            kind, idx = token[0], int(token[1:])
            if kind not in "XYZ":
                raise ValueError(f"bad Pauli token {token!r}")
            xb, zb = _KIND_BITS[kind]
            if p.x[idx] or p.z[idx]:
                raise ValueError(f"duplicate qubit {idx} in label {label!r}")
            p.x[idx] ^= xb
            p.z[idx] ^= zb
            if kind == "Y":
                p.k = (p.k + 1) % 4
        return p

    # -- views ----------------------------------------------------------

    @property
    def phase(self) -> complex:
        """Displayed phase: i^k adjusted by -i per Y factor."""
        y = int(np.count_nonzero(self.x & self.z))
        return _PHASES[(self.k + 3 * y) % 4]

    @property
    def weight(self) -> int:
        return int(np.count_nonzero(self.x | self.z))

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.x | self.z)

    def kind_at(self, q: int) -> str:
        return "IXZY"[int(self.x[q]) + 2 * int(self.z[q])].replace("Y", "Y")

    def is_identity(self) -> bool:
        return not (self.x.any() or self.z.any())

    def to_label(self) -> str:
        parts = []
        for q in self.support():
            parts.append(f"{'IXZY'[int(self.x[q]) + 2 * int(self.z[q])]}{q}")
        return "*".join(parts) if parts else "I"

    # -- algebra ----------------------------------------------------------

    def compose(self, other: "PauliString") -> "PauliString":
        """Group product self * other with exact phase tracking."""
        if self.n != other.n:
            raise ValueError(f"dimension mismatch: {self.n} != {other.n}")
        swaps = int(np.count_nonzero(self.z & other.x))
        return PauliString(
            self.n,
            self.x ^ other.x,
            self.z ^ other.z,
            (self.k + other.k + 2 * swaps) % 4,
        )

    __mul__ = compose

    def commutes(self, other: "PauliString") -> bool:
        if self.n != other.n:
            raise ValueError(f"dimension mismatch: {self.n} != {other.n}")
        overlap = int(np.count_nonzero(self.x & other.z)) + int(np.count_nonzero(self.z & other.x))
        return overlap % 2 == 0

    def conjugate_cnot(self, control: int, target: int) -> "PauliString":
        """CNOT . P . CNOT; with the i^k X^x Z^z form no phase correction arises."""
        if control == target:
            raise ValueError("control == target is not a valid CNOT")
        if not (0 <= control < self.n and 0 <= target < self.n):
            raise ValueError("CNOT indices out of range")
        p = self.copy()
        p.x[target] ^= p.x[control]
        p.z[control] ^= p.z[target]
        return p

    def conjugate_h(self, qubit: int) -> "PauliString":
        """H . P . H: swaps X and Z on the qubit, Y picks up a sign."""
        p = self.copy()
        if p.x[qubit] and p.z[qubit]:
            p.k = (p.k + 2) % 4
        p.x[qubit], p.z[qubit] = bool(p.z[qubit]), bool(p.x[qubit])
        return p

    def copy(self) -> "PauliString":
        return PauliString(self.n, self.x, self.z, self.k)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliString):
            return NotImplemented
        return (
            self.n == other.n
            and self.k == other.k
            and bool(np.array_equal(self.x, other.x))
            and bool(np.array_equal(self.z, other.z))
        )

    def equal_up_to_phase(self, other: "PauliString") -> bool:
        return (
            self.n == other.n
            and bool(np.array_equal(self.x, other.x))
            and bool(np.array_equal(self.z, other.z))
        )

    def __repr__(self) -> str:
        ph = {1 + 0j: "+", 1j: "+i", -1 + 0j: "-", -1j: "-i"}[self.phase]
        return f"PauliString({ph}{self.to_label()})"


def pauli_compose(a: PauliString, b: PauliString) -> PauliString:
    """Group product a . b under the X*Z = -iY convention."""
    return a.compose(b)


def pauli_commutes(a: PauliString, b: PauliString) -> bool:
    """True iff the symplectic inner product of the supports is even."""
    return a.commutes(b)


def conjugate_by_cnot(p: PauliString, control: int, target: int) -> PauliString:
    """Propagate a Pauli through a CNOT: X copies control->target, Z target->control."""
    return p.conjugate_cnot(control, target)
