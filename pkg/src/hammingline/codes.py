"""The modified tower of interleaved-concatenated quantum Hamming codes.

Recursion: the base block puts every Hamming-code qubit into a triple
(entangling, data, cat/measurement) on the line; each later level
reserves one logical qubit for cat storage, interleaves the code with a
side-by-side copy of itself, and wraps the result in the next larger
Hamming code.  All constructions are pure and deterministic; codes are
immutable once built.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from . import gf2
from .pauli import PauliString

DEFAULT_QUBIT_BUDGET = 10**6
BUDGET_ENV_VAR = "HAMMING_LINE_BUDGET"

ROLE_ENTANGLE, ROLE_DATA, ROLE_CAT = "entangle", "data", "cat"


class BudgetExceeded(RuntimeError):
    """Raised when a requested code level would exceed the qubit budget."""

    def __init__(self, r: int, n_r: int, budget: int):
        super().__init__(f"C_{r} needs n={n_r} qubits, over the budget of {budget}")
        self.n_r = n_r


def qubit_budget(override: int | None = None) -> int:
    if override is not None:
        return override
    env = os.environ.get(BUDGET_ENV_VAR)
    return int(env) if env else DEFAULT_QUBIT_BUDGET


# ---------------------------------------------------------------------------
# sparse Pauli support vectors (unsigned; code algebra never needs phases)


class SparsePauli:
    """Unsigned Pauli support on n qubits, stored as sorted site arrays."""

    __slots__ = ("n", "x_sites", "z_sites")

    def __init__(self, n: int, x_sites=(), z_sites=()):
        self.n = int(n)
        self.x_sites = np.unique(np.asarray(list(x_sites), dtype=np.int32))
        self.z_sites = np.unique(np.asarray(list(z_sites), dtype=np.int32))

    @property
    def weight(self) -> int:
        return len(np.union1d(self.x_sites, self.z_sites))

    def support(self) -> np.ndarray:
        return np.union1d(self.x_sites, self.z_sites)

    def shifted(self, offset: int, n: int) -> "SparsePauli":
        return SparsePauli(n, self.x_sites + offset, self.z_sites + offset)

    def compose(self, other: "SparsePauli") -> "SparsePauli":
        return SparsePauli(
            self.n,
            np.setxor1d(self.x_sites, other.x_sites),
            np.setxor1d(self.z_sites, other.z_sites),
        )

    def commutes(self, other: "SparsePauli") -> bool:
        overlap = len(np.intersect1d(self.x_sites, other.z_sites)) + len(
            np.intersect1d(self.z_sites, other.x_sites)
        )
        return overlap % 2 == 0

    def to_dense(self) -> PauliString:
        p = PauliString(self.n)
        p.x[self.x_sites] = True
        p.z[self.z_sites] = True
        return p

    def to_label(self) -> str:
        both = set(self.x_sites) & set(self.z_sites)
        parts = []
        for q in sorted(set(self.x_sites) | set(self.z_sites)):
            kind = "Y" if q in both else ("X" if q in set(self.x_sites) else "Z")
            parts.append(f"{kind}{q}")
        return "*".join(parts) if parts else "I"

    @classmethod
    def from_label(cls, label: str, n: int) -> "SparsePauli":
        xs, zs = [], []
        label = label.strip()
        if label not in ("", "I"):
            for token in label.split("*"):
                kind, idx = token[0], int(token[1:])
                if kind in ("X", "Y"):
                    xs.append(idx)
                if kind in ("Z", "Y"):
                    zs.append(idx)
        return cls(n, xs, zs)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SparsePauli)
            and self.n == other.n
            and np.array_equal(self.x_sites, other.x_sites)
            and np.array_equal(self.z_sites, other.z_sites)
        )

    def __repr__(self) -> str:
        return f"SparsePauli({self.to_label()})"


@dataclass(frozen=True)
class LogicalPair:
    x: SparsePauli
    z: SparsePauli


@dataclass(frozen=True)
class OuterStab:
    """One Hamming stabilizer of the outermost concatenation layer.

    ``sites`` lists (child block index, child logical index) pairs: the
    stabilizer acts as its kind on that logical qubit of that block.
    """

    copy: int
    kind: str       # "X" or "Z"
    bit: int        # 1-based Hamming generator index
    sites: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class LogicalSite:
    child: int
    local: int


@dataclass(frozen=True)
class LogicalInfo:
    """Child-grain view of one logical pair of an interleaved code."""

    outer: int
    copy: int
    x_sites: tuple[LogicalSite, ...]
    z_sites: tuple[LogicalSite, ...]


@dataclass(frozen=True)
class TowerInfo:
    """Structured view of the outermost interleave, at the (r-1)-block grain."""

    hamming_m: int
    copies: int
    outer_stabs: tuple[OuterStab, ...]
    logical_sites: tuple[LogicalInfo, ...]


@dataclass
class StabilizerCode:
    """A stabilizer code with a strict 1D layout and reserved-qubit bookkeeping.

    ``reserved`` holds logical pairs removed from service at *this*
    level; reservations inside child blocks live in the child template.
    """

    n: int
    k: int
    level: int
    stabilizers: list[SparsePauli]
    logical_x: list[SparsePauli]
    logical_z: list[SparsePauli]
    reserved: list[LogicalPair] = field(default_factory=list)
    roles: np.ndarray | None = None           # int-free: array of role strings
    children: list[tuple[int, int]] = field(default_factory=list)
    child_template: "StabilizerCode | None" = None
    tower: TowerInfo | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.roles is None:
            self.roles = np.array([ROLE_DATA] * self.n, dtype=object)

    @property
    def positions(self) -> np.ndarray:
        return np.arange(self.n, dtype=np.int32)

    def role_of(self, q: int) -> str:
        return self.roles[q]

    def data_qubits(self) -> np.ndarray:
        return np.flatnonzero(self.roles == ROLE_DATA)

    def reserved_total(self) -> int:
        """Reservations at this level plus inside all descendant blocks."""
        own = len(self.reserved)
        if self.child_template is not None:
            own += len(self.children) * self.child_template.reserved_total()
        return own

    def copy_shallow(self) -> "StabilizerCode":
        return replace(
            self,
            stabilizers=list(self.stabilizers),
            logical_x=list(self.logical_x),
            logical_z=list(self.logical_z),
            reserved=list(self.reserved),
            children=list(self.children),
            meta=dict(self.meta),
        )


@dataclass(frozen=True)
class CodeParams:
    """Closed-form parameters of C_r (no code materialization needed)."""

    n: int
    k: int
    rate: float
    d: int
    s: int
    T: int | None = None


# ---------------------------------------------------------------------------
# quantum Hamming codes


def _min_weight_rep(vec: np.ndarray, stab_rows: np.ndarray) -> np.ndarray:
    """Exhaustive min-weight coset representative; ties break lexicographically."""
    m = len(stab_rows)
    combos = np.zeros((1 << m, vec.shape[0]), dtype=np.uint8)
    for c in range(1, 1 << m):
        low = (c & -c).bit_length() - 1
        combos[c] = combos[c & (c - 1)] ^ stab_rows[low]
    cands = combos ^ vec
    weights = cands.sum(axis=1)
    best = np.flatnonzero(weights == weights.min())
    # lexicographic tie-break on the support pattern
    keys = ["".join(map(str, cands[i])) for i in best]
    return cands[best[int(np.argmin(keys))]].copy()


def hamming_code(m: int) -> StabilizerCode:
    """The [[2^m - 1, 2^m - 2m - 1, 3]] CSS quantum Hamming code.

    Generator k (1-based) touches qubit at 1-based position i iff bit k
    of i is one; internally qubits are 0-based (site = position - 1).
    """
    if m < 3:
        raise ValueError(f"quantum Hamming code needs m >= 3, got {m}")
    n = (1 << m) - 1
    h = np.zeros((m, n), dtype=np.uint8)
    for k in range(1, m + 1):
        for i in range(1, n + 1):
            if (i >> (k - 1)) & 1:
                h[k - 1, i - 1] = 1

    stabs: list[SparsePauli] = []
    for k in range(m):
        sites = np.flatnonzero(h[k])
        stabs.append(SparsePauli(n, x_sites=sites))
    for k in range(m):
        sites = np.flatnonzero(h[k])
        stabs.append(SparsePauli(n, z_sites=sites))

    # logical space: ker(h) modulo rowspace(h), self-dual CSS
    null = gf2.nullspace(h)
    checker = gf2.SpanChecker(h)
    quotient: list[np.ndarray] = []
    seen = gf2.SpanChecker(h)
    basis_rows = [row for row in h]
    for row in null:
        if not seen.contains(row):
            quotient.append(row)
            basis_rows.append(row)
            seen = gf2.SpanChecker(np.array(basis_rows))
    k_log = len(quotient)
    assert k_log == n - 2 * m, (k_log, n, m)
    lx = np.array(quotient, dtype=np.uint8)
    lz = lx.copy()
    pairing = (lx @ lz.T) % 2
    # adjust Z side so the symplectic pairing is the identity
    inv = _gf2_inv(pairing)
    lz = (inv.T @ lz) % 2
    assert np.array_equal((lx @ lz.T) % 2, np.eye(k_log, dtype=np.uint8))

    logical_x = []
    logical_z = []
    for i in range(k_log):
        bx = _min_weight_rep(lx[i], h)
        bz = _min_weight_rep(lz[i], h)
        logical_x.append(SparsePauli(n, x_sites=np.flatnonzero(bx)))
        logical_z.append(SparsePauli(n, z_sites=np.flatnonzero(bz)))

    code = StabilizerCode(
        n=n,
        k=k_log,
        level=-1,
        stabilizers=stabs,
        logical_x=logical_x,
        logical_z=logical_z,
        meta={"hamming_m": m},
    )
    _ = checker  # kept for clarity: rowspace membership defined the quotient
    return code


def _gf2_inv(mat: np.ndarray) -> np.ndarray:
    k = mat.shape[0]
    aug = np.concatenate([mat % 2, np.eye(k, dtype=np.uint8)], axis=1)
    red, pivots = gf2.rref(aug)
    if pivots[:k] != list(range(k)):
        raise ValueError("matrix is singular over GF(2)")
    return red[:k, k:]


def trivial_inner_code() -> StabilizerCode:
    """The [[3,1,1]] base block: (entangling, data, cat) triple on the line.

    The data qubit carries the logical; the two helpers are stabilized
    by Z on themselves after reset.
    """
    return StabilizerCode(
        n=3,
        k=1,
        level=-1,
        stabilizers=[SparsePauli(3, z_sites=[0]), SparsePauli(3, z_sites=[2])],
        logical_x=[SparsePauli(3, x_sites=[1])],
        logical_z=[SparsePauli(3, z_sites=[1])],
        roles=np.array([ROLE_ENTANGLE, ROLE_DATA, ROLE_CAT], dtype=object),
        meta={"trivial_block": True},
    )


# ---------------------------------------------------------------------------
# basic code transformations


def _lift_through(inner: StabilizerCode, logical_idx: int, kind: str, copy_offset: int, n_total: int) -> SparsePauli:
    rep = inner.logical_x[logical_idx] if kind == "X" else inner.logical_z[logical_idx]
    return rep.shifted(copy_offset, n_total)


def _flat_logical_site(inner: StabilizerCode, b: int) -> tuple[int, int]:
    """Map inner-code logical b to (flat child slot within one inner copy, local index)."""
    if inner.meta.get("is_pair"):
        return b % 2, b // 2
    return 0, b


def _flat_children_per_copy(inner: StabilizerCode) -> int:
    return 2 if inner.meta.get("is_pair") else 1


def interleave_concat(outer: StabilizerCode, inner: StabilizerCode) -> StabilizerCode:
    """Interleaved concatenation: k_inner copies of outer, n_outer copies of inner.

    Physical qubit i of every outer copy is encoded into the i-th inner
    copy; inner stabilizers are carried over per copy and outer
    stabilizers are lifted through the inner logical operators.
    """
    n_a, k_a = outer.n, outer.k
    n_b, k_b = inner.n, inner.k
    n = n_a * n_b
    k = k_a * k_b

    stabs: list[SparsePauli] = []
    for i in range(n_a):
        off = i * n_b
        for s in inner.stabilizers:
            stabs.append(s.shifted(off, n))

    per_copy = _flat_children_per_copy(inner)
    m = outer.meta.get("hamming_m")
    outer_stabs: list[OuterStab] = []

    def lift_outer(vec: SparsePauli, b: int) -> SparsePauli:
        acc = SparsePauli(n)
        for i in vec.x_sites:
            acc = acc.compose(_lift_through(inner, b, "X", int(i) * n_b, n))
        for i in vec.z_sites:
            acc = acc.compose(_lift_through(inner, b, "Z", int(i) * n_b, n))
        return acc

    for b in range(k_b):
        slot, local = _flat_logical_site(inner, b)
        for s_idx, s in enumerate(outer.stabilizers):
            stabs.append(lift_outer(s, b))
            if m is not None:
                kind = "X" if s_idx < m else "Z"
                bit = (s_idx % m) + 1
                sites = tuple(
                    (int(i) * per_copy + slot, local)
                    for i in (s.x_sites if kind == "X" else s.z_sites)
                )
                outer_stabs.append(OuterStab(copy=b, kind=kind, bit=bit, sites=sites))

    logical_x: list[SparsePauli] = []
    logical_z: list[SparsePauli] = []
    logical_sites: list[LogicalInfo] = []
    for a in range(k_a):
        for b in range(k_b):
            logical_x.append(lift_outer(outer.logical_x[a], b))
            logical_z.append(lift_outer(outer.logical_z[a], b))
            slot, local = _flat_logical_site(inner, b)
            x_sites = tuple(
                LogicalSite(int(i) * per_copy + slot, local)
                for i in outer.logical_x[a].support()
            )
            z_sites = tuple(
                LogicalSite(int(i) * per_copy + slot, local)
                for i in outer.logical_z[a].support()
            )
            logical_sites.append(LogicalInfo(outer=a, copy=b, x_sites=x_sites, z_sites=z_sites))

    # children at the (r-1)-block grain: pair copies are flattened
    children: list[tuple[int, int]] = []
    if inner.meta.get("is_pair"):
        half = n_b // 2
        template = inner.child_template
        for i in range(n_a):
            children.append((i * n_b, i * n_b + half))
            children.append((i * n_b + half, (i + 1) * n_b))
    else:
        template = inner
        for i in range(n_a):
            children.append((i * n_b, (i + 1) * n_b))

    roles = np.tile(inner.roles, n_a)
    tower = None
    if m is not None:
        tower = TowerInfo(
            hamming_m=m,
            copies=k_b,
            outer_stabs=tuple(outer_stabs),
            logical_sites=tuple(logical_sites),
        )
    return StabilizerCode(
        n=n,
        k=k,
        level=inner.level + 1,
        stabilizers=stabs,
        logical_x=logical_x,
        logical_z=logical_z,
        roles=roles,
        children=children,
        child_template=template,
        tower=tower,
        meta={"outer_m": m},
    )


def reserve_logical(code: StabilizerCode) -> StabilizerCode:
    """Remove one logical pair from service for cat-state storage.

    The reserved index is the logical with the lexicographically
    smallest Z-representative support, which makes the choice
    deterministic and reproducible.
    """
    if code.k < 1:
        raise ValueError("cannot reserve a logical qubit of a code with k == 0")
    keys = [tuple(code.logical_z[i].support().tolist()) for i in range(code.k)]
    pick = min(range(code.k), key=lambda i: (keys[i], i))
    out = code.copy_shallow()
    pair = LogicalPair(x=out.logical_x.pop(pick), z=out.logical_z.pop(pick))
    out.reserved.append(pair)
    out.k -= 1
    if out.tower is not None:
        sites = list(out.tower.logical_sites)
        reserved_sites = sites.pop(pick)
        out.meta["reserved_sites"] = reserved_sites
        out.tower = replace(out.tower, logical_sites=tuple(sites))
    return out


def pair_interleave(code: StabilizerCode) -> StabilizerCode:
    """2 (x) B: two copies side by side with alternating logical ownership.

    Logical index l of the pair lives in copy l % 2 at local index l // 2,
    so adjacent logical indices always sit in different copies.
    """
    n = code.n
    n2 = 2 * n
    stabs = [s.shifted(0, n2) for s in code.stabilizers] + [s.shifted(n, n2) for s in code.stabilizers]
    logical_x: list[SparsePauli] = []
    logical_z: list[SparsePauli] = []
    for l in range(2 * code.k):
        copy, local = l % 2, l // 2
        off = copy * n
        logical_x.append(code.logical_x[local].shifted(off, n2))
        logical_z.append(code.logical_z[local].shifted(off, n2))
    reserved = [
        LogicalPair(x=p.x.shifted(copy * n, n2), z=p.z.shifted(copy * n, n2))
        for copy in (0, 1)
        for p in code.reserved
    ]
    return StabilizerCode(
        n=n2,
        k=2 * code.k,
        level=code.level,
        stabilizers=stabs,
        logical_x=logical_x,
        logical_z=logical_z,
        reserved=reserved,
        roles=np.tile(code.roles, 2),
        children=[(0, n), (n, n2)],
        child_template=code,
        meta={"is_pair": True},
    )


# ---------------------------------------------------------------------------
# the tower


def build_tower(r: int, budget: int | None = None) -> StabilizerCode:
    """Materialize C_r = H_{r+4} (x) (2 (x) Reserve_1(C_{r-1})), C_0 = H_4 (x) [[3,1,1]]."""
    if r < 0:
        raise ValueError("tower level must be >= 0")
    limit = qubit_budget(budget)
    n_r = tower_params(r).n
    if n_r > limit:
        raise BudgetExceeded(r, n_r, limit)
    code = interleave_concat(hamming_code(4), trivial_inner_code())
    for level in range(1, r + 1):
        code = interleave_concat(hamming_code(level + 4), pair_interleave(reserve_logical(code)))
    return code


def tower_params(r: int, depth_constants: tuple[int, int] | None = None) -> CodeParams:
    """Exact closed-form parameters of C_r.

    The depth estimate T is only available when measured depths for
    levels 0 and 1 are supplied (or cached by the caller); beyond level
    1 it extrapolates T_r = c * n_r * T_{r-1} with c fitted at r = 1.
    """
    if r < 0:
        raise ValueError("tower level must be >= 0")
    n, k = 45, 7
    d = 3
    s = 8
    for level in range(1, r + 1):
        m = level + 4
        s = 2 * m * 2 * (k - 1)
        n = 2 * ((1 << m) - 1) * n
        k = ((1 << m) - 2 * m - 1) * 2 * (k - 1)
        d *= 3
    t_val: int | None = None
    if depth_constants is not None:
        t0, t1 = depth_constants
        if r == 0:
            t_val = t0
        elif r == 1:
            t_val = t1
        else:
            n_prev, t_prev = 2790, t1
            c = t1 / (2790 * t0)
            n_i, k_i = 2790, 252
            for level in range(2, r + 1):
                m = level + 4
                n_i = 2 * ((1 << m) - 1) * n_i
                k_i = ((1 << m) - 2 * m - 1) * 2 * (k_i - 1)
                t_prev = int(round(c * n_i * t_prev))
            t_val = t_prev
            _ = n_prev
    return CodeParams(n=n, k=k, rate=k / n, d=d, s=s, T=t_val)


def tower_rate_sequence(r_max: int) -> list[Fraction]:
    """Exact rates k_r / n_r up to r_max (bigint arithmetic, no budget limit)."""
    n, k = 45, 7
    out = [Fraction(k, n)]
    for level in range(1, r_max + 1):
        m = level + 4
        n = 2 * ((1 << m) - 1) * n
        k = ((1 << m) - 2 * m - 1) * 2 * (k - 1)
        out.append(Fraction(k, n))
    return out


def plain_hamming_rate_product(m_max: int) -> float:
    """Rate of the unmodified Hamming tower H_4 (x) ... (x) H_m."""
    prod = Fraction(1)
    for i in range(4, m_max + 1):
        prod *= Fraction((1 << i) - 2 * i - 1, (1 << i) - 1)
    return float(prod)


# ---------------------------------------------------------------------------
# representative utilities used by the gadget builders


def hamming_stab_rows(code: StabilizerCode) -> tuple[np.ndarray, np.ndarray]:
    """Dense (x_rows, z_rows) of the outer Hamming stabilizers.

    Intended for single-copy blocks (C_0 and its reserved variant); the
    exhaustive coset searches below scale as 4^m in the row count.
    """
    xs, zs = [], []
    for st in code.tower.outer_stabs:
        vec = np.zeros(code.n, dtype=np.uint8)
        rep = outer_stab_rep(code, st)
        if st.kind == "X":
            vec[rep.x_sites] = 1
            xs.append(vec)
        else:
            vec[rep.z_sites] = 1
            zs.append(vec)
    return np.array(xs, dtype=np.uint8), np.array(zs, dtype=np.uint8)


def outer_stab_rep(code: StabilizerCode, st: OuterStab) -> SparsePauli:
    """Physical representative of one outer Hamming stabilizer."""
    acc = SparsePauli(code.n)
    template = code.child_template
    for child, local in st.sites:
        lo, _hi = code.children[child]
        rep = template.logical_x[local] if st.kind == "X" else template.logical_z[local]
        acc = acc.compose(rep.shifted(lo, code.n))
    return acc


def product_rep_avoiding_y(
    code: StabilizerCode, z_part: SparsePauli, x_part: SparsePauli
) -> SparsePauli:
    """A representative of [z_part * x_part] with disjoint X and Z supports.

    Searches products with the code's outer (Hamming-lifted) stabilizers
    of each type; a Y site would need a phase gate the gate set does not
    have, so the gadget builders require a Y-free representative.
    """
    xs_rows, zs_rows = hamming_stab_rows(code)
    zvec = np.zeros(code.n, dtype=np.uint8)
    zvec[z_part.z_sites] = 1
    xvec = np.zeros(code.n, dtype=np.uint8)
    xvec[x_part.x_sites] = 1

    def combos(rows: np.ndarray) -> np.ndarray:
        m = len(rows)
        out = np.zeros((1 << m, code.n), dtype=np.uint8)
        for c in range(1, 1 << m):
            low = (c & -c).bit_length() - 1
            out[c] = out[c & (c - 1)] ^ rows[low]
        return out

    z_cands = combos(zs_rows) ^ zvec
    x_cands = combos(xs_rows) ^ xvec
    best: tuple[int, int, int] | None = None
    best_pair = None
    for zi, zc in enumerate(z_cands):
        overlap = (x_cands & zc).sum(axis=1)
        ok = np.flatnonzero(overlap == 0)
        if len(ok) == 0:
            continue
        weights = x_cands[ok].sum(axis=1) + zc.sum()
        pick = int(ok[np.argmin(weights)])
        key = (int(weights.min()), zi, pick)
        if best is None or key < best:
            best = key
            best_pair = (zc.copy(), x_cands[pick].copy())
    if best_pair is None:
        raise ValueError("no Y-free representative exists for this product")
    zc, xc = best_pair
    return SparsePauli(code.n, x_sites=np.flatnonzero(xc), z_sites=np.flatnonzero(zc))


# ---------------------------------------------------------------------------
# text export


def code_to_text(code: StabilizerCode) -> str:
    lines = [f"CODE {code.n} {code.k} {code.level}"]
    for s in code.stabilizers:
        lines.append(f"STAB {s.to_label()}")
    for i in range(code.k):
        lines.append(f"LOGX {i} {code.logical_x[i].to_label()}")
        lines.append(f"LOGZ {i} {code.logical_z[i].to_label()}")
    for p in code.reserved:
        lines.append(f"RESX {p.x.to_label()}")
        lines.append(f"RESZ {p.z.to_label()}")
    for q in range(code.n):
        lines.append(f"POS {q} {q} ROLE {code.roles[q]}")
    for lo, hi in code.children:
        lines.append(f"CHILD {lo} {hi}")
    return "\n".join(lines) + "\n"


def code_from_text(text: str) -> StabilizerCode:
    n = k = level = None
    stabs: list[SparsePauli] = []
    lx: list[SparsePauli] = []
    lz: list[SparsePauli] = []
    resx: list[SparsePauli] = []
    resz: list[SparsePauli] = []
    roles: dict[int, str] = {}
    children: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "CODE":
                n, k, level = int(parts[1]), int(parts[2]), int(parts[3])
            elif parts[0] == "STAB":
                stabs.append(SparsePauli.from_label(parts[1], n))
            elif parts[0] == "LOGX":
                lx.append(SparsePauli.from_label(parts[2], n))
            elif parts[0] == "LOGZ":
                lz.append(SparsePauli.from_label(parts[2], n))
            elif parts[0] == "RESX":
                resx.append(SparsePauli.from_label(parts[1], n))
            elif parts[0] == "RESZ":
                resz.append(SparsePauli.from_label(parts[1], n))
            elif parts[0] == "POS":
                roles[int(parts[1])] = parts[4]
            elif parts[0] == "CHILD":
                children.append((int(parts[1]), int(parts[2])))
            else:
                raise ValueError(f"unknown token {parts[0]!r}")
        except (IndexError, ValueError, TypeError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
    if n is None:
        raise ValueError("missing CODE header")
    role_arr = np.array([roles.get(q, ROLE_DATA) for q in range(n)], dtype=object)
    return StabilizerCode(
        n=n,
        k=k,
        level=level,
        stabilizers=stabs,
        logical_x=lx,
        logical_z=lz,
        reserved=[LogicalPair(x=a, z=b) for a, b in zip(resx, resz)],
        roles=role_arr,
        children=children,
    )


# ---------------------------------------------------------------------------
# commutation validation (exhaustive; intended for r <= 1)


def validate_code(code: StabilizerCode) -> None:
    """Exhaustively check stabilizer/logical commutation relations."""
    n = code.n
    rows = len(code.stabilizers)
    sx = np.zeros((rows, n), dtype=np.float32)
    sz = np.zeros((rows, n), dtype=np.float32)
    for i, s in enumerate(code.stabilizers):
        sx[i, s.x_sites] = 1
        sz[i, s.z_sites] = 1
    cross = (sx @ sz.T + sz @ sx.T) % 2
    if cross.any():
        bad = np.argwhere(cross)[0]
        raise AssertionError(f"stabilizers {bad[0]} and {bad[1]} anticommute")

    # CSS tower: X-logicals are pure X, Z-logicals pure Z
    klog = code.k
    lx_x = np.zeros((klog, n), dtype=np.float32)
    lz_z = np.zeros((klog, n), dtype=np.float32)
    for i in range(klog):
        lx_x[i, code.logical_x[i].x_sites] = 1
        lz_z[i, code.logical_z[i].z_sites] = 1
    pairing = (lx_x @ lz_z.T) % 2
    if not np.array_equal(pairing, np.eye(klog, dtype=np.float32)):
        raise AssertionError("logical pairing is not symplectic-diagonal")
    if ((sx @ lz_z.T) % 2).any():
        raise AssertionError("an X stabilizer anticommutes with a logical Z")
    if ((sz @ lx_x.T) % 2).any():
        raise AssertionError("a Z stabilizer anticommutes with a logical X")
