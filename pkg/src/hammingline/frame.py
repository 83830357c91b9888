"""Pauli-frame propagation: the fast path for fault effects.

Injecting Pauli faults never changes which measurements are random, so
a noisy run differs from the same-seed noiseless reference by a frame
that propagates linearly through the Clifford ops.  This module
precomputes, per fault location, the induced record flips and the
residual end-of-circuit frame (a backward dynamic program over the op
list), and samples depolarizing noise over batches of shots.

The tableau simulator stays the ground truth: `frame_flips_single` is a
direct forward propagation used to cross-check the tables, and the test
suite demonstrates bit-equivalence of both against tableau record diffs
before any experiment trusts this path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import circuit as circ
from .pauli import PauliString

CHUNK = 1024


# ---------------------------------------------------------------------------
# single-shot forward propagation (reference implementation)


def frame_flips_single(circuit, faults) -> tuple[np.ndarray, PauliString]:
    """Forward-propagate faults; returns (record flip bits, end frame).

    Fault locations follow the tableau convention: (layer, op index in
    layer), -1 for end-of-layer idles, layer -1 for input errors.
    """
    n = circuit.n
    fx = np.zeros(n, dtype=bool)
    fz = np.zeros(n, dtype=bool)
    flips = np.zeros(circuit.num_meas, dtype=np.uint8)

    by_loc: dict[tuple[int, int], list] = {}
    for f in faults:
        loc = getattr(f, "location", None) or (f.layer, f.op_index)
        by_loc.setdefault((int(loc[0]), int(loc[1])), []).append(f.pauli)
    for p in by_loc.pop((-1, -1), []):
        fx ^= p.x
        fz ^= p.z

    num_layers = circuit.num_layers
    starts = np.searchsorted(circuit.layer, np.arange(num_layers))
    kind, qa, qb, rec, layers = circuit.kind, circuit.qa, circuit.qb, circuit.rec, circuit.layer
    for i in range(circuit.num_ops):
        lay = int(layers[i])
        k = int(kind[i])
        a = int(qa[i])
        if k == circ.CX:
            b = int(qb[i])
            fx[b] ^= fx[a]
            fz[a] ^= fz[b]
        elif k == circ.H:
            fx[a], fz[a] = fz[a], fx[a]
        elif k == circ.RZ:
            fx[a] = fz[a] = False
        else:
            flips[int(rec[i])] = 1 if fx[a] else 0
            fz[a] = False
        for p in by_loc.pop((lay, i - int(starts[lay])), []):
            fx ^= p.x
            fz ^= p.z
        if i + 1 == circuit.num_ops or int(layers[i + 1]) != lay:
            for p in by_loc.pop((lay, -1), []):
                fx ^= p.x
                fz ^= p.z
    if by_loc:
        raise ValueError(f"fault location {sorted(by_loc)[0]} does not exist")
    return flips, PauliString(n, fx, fz)


# ---------------------------------------------------------------------------
# backward effect tables


@dataclass
class EffectTable:
    """Per-insertion-point fault effects for one flat circuit.

    Row r describes the consequence of a basis Pauli at one insertion
    point: `flip_*` lists flipped record indices, `endx_*`/`endz_*` the
    X/Z components of the residual end frame.  `op_rows[i, slot, basis]`
    is the row for a Pauli right after op i on that qubit; `grid_rows`
    covers end-of-layer insertions for every (layer, qubit); and
    `start_rows` covers input errors.
    """

    circuit: object
    flip_idx: np.ndarray
    flip_ptr: np.ndarray
    endx_idx: np.ndarray
    endx_ptr: np.ndarray
    endz_idx: np.ndarray
    endz_ptr: np.ndarray
    op_rows: np.ndarray      # (num_ops, 2, 2) int32, -1 where no qubit
    start_rows: np.ndarray   # (n, 2) int32
    grid_rows: np.ndarray    # (num_layers, n, 2) int32

    def row_flips(self, row: int) -> np.ndarray:
        return self.flip_idx[self.flip_ptr[row]: self.flip_ptr[row + 1]]

    def row_end(self, row: int) -> tuple[np.ndarray, np.ndarray]:
        return (
            self.endx_idx[self.endx_ptr[row]: self.endx_ptr[row + 1]],
            self.endz_idx[self.endz_ptr[row]: self.endz_ptr[row + 1]],
        )

    def effect(self, rows: list[int]) -> tuple[np.ndarray, PauliString]:
        """Combined (record flips, end frame) of basis rows XORed together."""
        m = self.circuit.num_meas
        n = self.circuit.n
        flips = np.zeros(m, dtype=np.uint8)
        fx = np.zeros(n, dtype=bool)
        fz = np.zeros(n, dtype=bool)
        for r in rows:
            flips[self.row_flips(r)] ^= 1
            ex, ez = self.row_end(r)
            fx[ex] ^= True
            fz[ez] ^= True
        return flips, PauliString(n, fx, fz)


def compile_effects(circuit) -> EffectTable:
    """Backward DP over the op list; cost O(ops x row size)."""
    n = circuit.n
    num_ops = circuit.num_ops
    num_layers = circuit.num_layers

    # current effect per (qubit, basis): (frozenset flips, frozenset end components)
    empty = (frozenset(), frozenset())
    cur: list[list[tuple[frozenset, frozenset]]] = [
        [(frozenset(), frozenset([(q, 0)])), (frozenset(), frozenset([(q, 1)]))] for q in range(n)
    ]

    rows: dict[tuple[frozenset, frozenset], int] = {}
    row_list: list[tuple[frozenset, frozenset]] = []

    def intern(effect) -> int:
        rid = rows.get(effect)
        if rid is None:
            rid = len(row_list)
            rows[effect] = rid
            row_list.append(effect)
        return rid

    def combine(a, b):
        return (a[0] ^ b[0], a[1] ^ b[1])

    op_rows = np.full((num_ops, 2, 2), -1, dtype=np.int32)
    kind, qa, qb, rec = circuit.kind, circuit.qa, circuit.qb, circuit.rec

    for i in range(num_ops - 1, -1, -1):
        k = int(kind[i])
        a = int(qa[i])
        op_rows[i, 0, 0] = intern(cur[a][0])
        op_rows[i, 0, 1] = intern(cur[a][1])
        if k == circ.CX:
            b = int(qb[i])
            op_rows[i, 1, 0] = intern(cur[b][0])
            op_rows[i, 1, 1] = intern(cur[b][1])
            # forward: X_a -> X_a X_b ; Z_b -> Z_a Z_b
            cur[a][0] = combine(cur[a][0], cur[b][0])
            cur[b][1] = combine(cur[b][1], cur[a][1])
        elif k == circ.H:
            cur[a][0], cur[a][1] = cur[a][1], cur[a][0]
        elif k == circ.RZ:
            cur[a][0] = empty
            cur[a][1] = empty
        else:  # MZ: X flips the bit and persists; Z is absorbed
            r = int(rec[i])
            fl, en = cur[a][0]
            cur[a][0] = (fl ^ frozenset([r]), en)
            cur[a][1] = empty

    start_rows = np.zeros((n, 2), dtype=np.int32)
    for q in range(n):
        start_rows[q, 0] = intern(cur[q][0])
        start_rows[q, 1] = intern(cur[q][1])

    # grid: effect at end of each layer = rows after the last op on the
    # qubit at a layer <= l (else the start rows)
    grid = np.empty((num_layers, n, 2), dtype=np.int32)
    grid[:, :, 0] = start_rows[:, 0][None, :]
    grid[:, :, 1] = start_rows[:, 1][None, :]
    layers = circuit.layer
    for i in range(num_ops):
        lay = int(layers[i])
        a = int(qa[i])
        grid[lay:, a, 0] = op_rows[i, 0, 0]
        grid[lay:, a, 1] = op_rows[i, 0, 1]
        if int(kind[i]) == circ.CX:
            b = int(qb[i])
            grid[lay:, b, 0] = op_rows[i, 1, 0]
            grid[lay:, b, 1] = op_rows[i, 1, 1]

    flip_ptr = np.zeros(len(row_list) + 1, dtype=np.int64)
    endx_ptr = np.zeros(len(row_list) + 1, dtype=np.int64)
    endz_ptr = np.zeros(len(row_list) + 1, dtype=np.int64)
    flip_chunks, endx_chunks, endz_chunks = [], [], []
    for r, (flips, ends) in enumerate(row_list):
        fl = np.array(sorted(flips), dtype=np.int32)
        ex = np.array(sorted(q for q, bb in ends if bb == 0), dtype=np.int32)
        ez = np.array(sorted(q for q, bb in ends if bb == 1), dtype=np.int32)
        flip_chunks.append(fl)
        endx_chunks.append(ex)
        endz_chunks.append(ez)
        flip_ptr[r + 1] = flip_ptr[r] + len(fl)
        endx_ptr[r + 1] = endx_ptr[r] + len(ex)
        endz_ptr[r + 1] = endz_ptr[r] + len(ez)

    return EffectTable(
        circuit=circuit,
        flip_idx=np.concatenate(flip_chunks) if flip_chunks else np.zeros(0, dtype=np.int32),
        flip_ptr=flip_ptr,
        endx_idx=np.concatenate(endx_chunks) if endx_chunks else np.zeros(0, dtype=np.int32),
        endx_ptr=endx_ptr,
        endz_idx=np.concatenate(endz_chunks) if endz_chunks else np.zeros(0, dtype=np.int32),
        endz_ptr=endz_ptr,
        op_rows=op_rows,
        start_rows=start_rows,
        grid_rows=grid,
    )


# ---------------------------------------------------------------------------
# depolarizing sampling over shot batches


@dataclass
class NoiseUniverse:
    """The (layer, qubit) locations subject to depolarizing noise."""

    table: EffectTable
    layer: np.ndarray     # per location
    qubit: np.ndarray
    rows: np.ndarray      # (L, 2) int32: x/z basis effect rows

    @property
    def size(self) -> int:
        return len(self.layer)


def noise_universe(table: EffectTable, idle_noise: bool = True) -> NoiseUniverse:
    c = table.circuit
    n, num_layers = c.n, c.num_layers
    if idle_noise:
        lay = np.repeat(np.arange(num_layers, dtype=np.int32), n)
        qub = np.tile(np.arange(n, dtype=np.int32), num_layers)
    else:
        pairs = [(int(c.layer[i]), int(c.qa[i])) for i in range(c.num_ops)]
        pairs += [
            (int(c.layer[i]), int(c.qb[i]))
            for i in range(c.num_ops)
            if int(c.kind[i]) == circ.CX
        ]
        pairs.sort()
        lay = np.array([p[0] for p in pairs], dtype=np.int32)
        qub = np.array([p[1] for p in pairs], dtype=np.int32)
    rows = table.grid_rows[lay, qub]
    return NoiseUniverse(table=table, layer=lay, qubit=qub, rows=rows)


def _distinct_locations(rng, universe_size: int, counts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Uniform distinct location subsets per shot (exact, by rejection)."""
    shot_of = np.repeat(np.arange(len(counts)), counts)
    ids = rng.integers(0, universe_size, int(counts.sum()), dtype=np.int64)
    for _ in range(64):
        order = np.lexsort((ids, shot_of))
        s_sorted, i_sorted = shot_of[order], ids[order]
        dup = (s_sorted[1:] == s_sorted[:-1]) & (i_sorted[1:] == i_sorted[:-1])
        if not dup.any():
            break
        bad_shots = np.unique(s_sorted[1:][dup])
        redraw = np.isin(shot_of, bad_shots)
        ids[redraw] = rng.integers(0, universe_size, int(redraw.sum()), dtype=np.int64)
    else:
        raise RuntimeError("location sampling failed to converge")
    return shot_of, ids


@dataclass
class ChunkResult:
    flips: np.ndarray       # (shots, num_meas) uint8
    end_x: np.ndarray       # (shots, n) uint8
    end_z: np.ndarray
    fault_shot: np.ndarray  # per sampled fault
    fault_layer: np.ndarray
    fault_qubit: np.ndarray
    fault_pauli: np.ndarray  # 0=X 1=Y 2=Z


def sample_chunk(
    universe: NoiseUniverse,
    p: float,
    seed: int,
    chunk_index: int,
    shots: int,
) -> ChunkResult:
    """Sample one chunk of shots under depolarizing noise of strength p.

    Chunks are the unit of reproducibility: the stream for (seed,
    chunk_index) never depends on how many shots of the chunk are
    consumed or on any other chunk, so merged and multi-worker runs are
    bit-identical to single-threaded ones.
    """
    if not 0 <= p < 1:
        raise ValueError("depolarizing strength must lie in [0, 1)")
    table = universe.table
    c = table.circuit
    m, n = c.num_meas, c.n
    rng = np.random.Generator(np.random.Philox(key=[seed & 0xFFFFFFFFFFFFFFFF, chunk_index]))
    counts = rng.binomial(universe.size, p, size=CHUNK)
    shot_of, loc_ids = _distinct_locations(rng, universe.size, counts)
    paulis = rng.integers(0, 3, len(loc_ids), dtype=np.int8)

    keep = shot_of < shots
    shot_of, loc_ids, paulis = shot_of[keep], loc_ids[keep], paulis[keep]

    rows_x = universe.rows[loc_ids, 0]
    rows_z = universe.rows[loc_ids, 1]
    use_x = paulis != 2  # X or Y
    use_z = paulis != 0  # Z or Y

    flips = np.zeros((shots, m), dtype=np.uint8)
    end_x = np.zeros((shots, n), dtype=np.uint8)
    end_z = np.zeros((shots, n), dtype=np.uint8)

    def accumulate(rows, mask, idx, ptr, target, width):
        rr = rows[mask]
        ss = shot_of[mask]
        lens = (ptr[rr + 1] - ptr[rr]).astype(np.int64)
        if lens.sum() == 0:
            return
        rep_shot = np.repeat(ss, lens)
        starts = np.repeat(ptr[rr], lens)
        offs = np.arange(len(rep_shot), dtype=np.int64) - np.repeat(
            np.cumsum(lens) - lens, lens
        )
        cols = idx[starts + offs]
        keys = rep_shot.astype(np.int64) * width + cols
        hist = np.bincount(keys, minlength=shots * width).astype(np.uint8) & 1
        target ^= hist.reshape(shots, width)

    accumulate(rows_x, use_x, table.flip_idx, table.flip_ptr, flips, m)
    accumulate(rows_z, use_z, table.flip_idx, table.flip_ptr, flips, m)
    accumulate(rows_x, use_x, table.endx_idx, table.endx_ptr, end_x, n)
    accumulate(rows_z, use_z, table.endx_idx, table.endx_ptr, end_x, n)
    accumulate(rows_x, use_x, table.endz_idx, table.endz_ptr, end_z, n)
    accumulate(rows_z, use_z, table.endz_idx, table.endz_ptr, end_z, n)

    return ChunkResult(
        flips=flips,
        end_x=end_x,
        end_z=end_z,
        fault_shot=shot_of,
        fault_layer=universe.layer[loc_ids],
        fault_qubit=universe.qubit[loc_ids],
        fault_pauli=paulis,
    )
