"""Level-0 gadget circuits checked against exact tableau simulation.

The measurement-based cat preparation applies a known, outcome-dependent
Pauli frame to the data each hook (there is no feedback in the circuit),
so absolute record values are only meaningful after frame correction;
`track_hook_frames` performs that accounting and these tests use it to
validate the whole measurement algebra end to end.
"""

import numpy as np
import pytest

from hammingline.circuit import CircuitWriter, check_locality
from hammingline.codes import build_tower, outer_stab_rep
from hammingline.gadgets import (
    build_cat_prep,
    build_ec,
    build_hook,
    build_meas,
    build_memory_experiment,
    cat_qubit,
    emit_cat_prep,
    emit_ec,
    emit_hook,
    emit_meas,
    logical_z_observable,
    stab_observable,
    track_hook_frames,
)
from hammingline.pauli import PauliString
from hammingline.tableau import tableau_simulate


@pytest.fixture(scope="module")
def c0():
    return build_tower(0)


def stab_paulis(code):
    out = {}
    for st in code.tower.outer_stabs:
        out[f"{st.kind.lower()}{st.bit}"] = outer_stab_rep(code, st)
    return out


def xor_bits(record, indices):
    return int(np.bitwise_xor.reduce(record[list(indices)]))


class TestFourCnotDecomposition:
    def test_implements_distance_two_cnot_exactly(self):
        # CX(a,b); CX(b,c); CX(a,b); CX(b,c) == CX(a,c), identity on b
        seq = [(0, 1), (1, 2), (0, 1), (1, 2)]
        for kind in ("X", "Z"):
            for q in range(3):
                p = PauliString.single(3, q, kind)
                via_seq = p
                for c, t in seq:
                    via_seq = via_seq.conjugate_cnot(c, t)
                assert via_seq == p.conjugate_cnot(0, 2)


class TestCatPrep:
    def test_span2_counts(self, c0):
        frag = build_cat_prep(0, [0, 1], c0)
        cat_checks = [d for d in frag.detectors if d.stab.startswith("cat")]
        assert len(cat_checks) == 3  # one check, three rounds
        ent_meas = [i for i in range(frag.num_ops) if frag.kind[i] == 3 and int(frag.qa[i]) == 3]
        assert len(ent_meas) == 3  # the entangling qubit is measured three times

    @pytest.mark.parametrize("t", [2, 5, 15])
    def test_parity_bit_count(self, c0, t):
        frag = build_cat_prep(0, list(range(t)), c0)
        cat_checks = [d for d in frag.detectors if d.stab.startswith("cat")]
        assert len(cat_checks) == 3 * (t - 1)

    def test_short_span_rejected(self, c0):
        with pytest.raises(ValueError):
            build_cat_prep(0, [3], c0)
        with pytest.raises(ValueError):
            build_cat_prep(0, [1, 3], c0)

    @pytest.mark.parametrize("seed", [0, 1, 5])
    def test_cat_state_consistency(self, c0, seed):
        # measurement-based prep: final Z readouts agree up to the check frame
        span = [0, 1, 2, 3]
        w = CircuitWriter(c0.n, roles=[c0.roles[q] for q in range(c0.n)])
        emit_cat_prep(w, span, "catprep")
        w.barrier()
        for t in span:
            w.mz(cat_qubit(t))
        c = w.finalize()
        rec = tableau_simulate(c, seed=seed)
        checks = {(d.rep, d.stab): d.indices[0] for d in c.detectors}
        for k in range(len(span) - 1):
            frame_bit = rec[checks[(2, f"cat{k}")]]  # last hardening round
            za = rec[c.rec[np.flatnonzero((c.kind == 3) & (c.qa == cat_qubit(span[k])))[-1]]]
            zb = rec[c.rec[np.flatnonzero((c.kind == 3) & (c.qa == cat_qubit(span[k + 1])))[-1]]]
            assert (int(za) ^ int(zb)) == int(frame_bit)


class TestHook:
    def test_locality_all_stab_hooks(self, c0):
        for st in c0.tower.outer_stabs:
            name = f"{st.kind.lower()}{st.bit}"
            circ = build_hook(0, stab_observable(c0, name), c0)
            assert check_locality(circ) == []

    def test_weight8_stab_touches_eight_triples(self, c0):
        # the top X stabilizer (bit 4) is supported on Hamming sites 8..15
        circ = build_hook(0, stab_observable(c0, "x4"), c0)
        coupled = {
            int(q) // 3
            for i, q in enumerate(circ.qb)
            if circ.kind[i] == 0 and int(circ.qa[i]) % 3 == 2 and int(q) % 3 == 1
        }
        assert coupled == set(range(7, 15))

    @pytest.mark.parametrize("seed", [0, 1, 2, 9])
    def test_noiseless_hook_reproduces_projected_eigenvalue(self, c0, seed):
        # project into the codespace with one EC, then re-measure each stabilizer;
        # after frame correction every repetition must agree, and Z stabilizers
        # are definite +1 on the all-zeros start state
        w = CircuitWriter(c0.n, roles=[c0.roles[q] for q in range(c0.n)])
        for q in range(c0.n):
            w.rz(q)
        w.barrier()
        emit_ec(w, c0, "ec0")
        for st in c0.tower.outer_stabs:
            name = f"{st.kind.lower()}{st.bit}"
            emit_hook(w, stab_observable(c0, name), "extra", 0, name)
        circ = w.finalize()
        rec = tableau_simulate(circ, seed=seed)
        corrected, _ = track_hook_frames(circ, rec, stab_paulis(c0))
        for st in c0.tower.outer_stabs:
            name = f"{st.kind.lower()}{st.bit}"
            vals = [corrected[("ec0", rep, name)] for rep in range(3)]
            vals.append(corrected[("extra", 0, name)])
            assert len(set(vals)) == 1, f"{name} disagreed across repetitions: {vals}"
            if name.startswith("z"):
                assert vals[0] == 0


class TestEC:
    def test_hook_count(self, c0):
        ec = build_ec(0, c0)
        v_groups = [d for d in ec.detectors if not d.stab.startswith("cat")]
        assert len(v_groups) == 24  # 8 stabilizers x 3 repetitions
        assert check_locality(ec) == []

    @pytest.mark.parametrize("seed", [0, 3, 11])
    def test_noiseless_reps_agree_after_frame_correction(self, c0, seed):
        ec = build_ec(0, c0)
        rec = tableau_simulate(ec, seed=seed)
        corrected, _ = track_hook_frames(ec, rec, stab_paulis(c0))
        for st in c0.tower.outer_stabs:
            name = f"{st.kind.lower()}{st.bit}"
            assert len({corrected[("ec0", rep, name)] for rep in range(3)}) == 1


class TestMeas:
    def test_structure(self, c0):
        m = build_meas(0, logical_z_observable(c0, 0), c0)
        hooks = [d for d in m.detectors if d.gadget == "meas0" and d.stab.startswith("obs:")]
        assert len(hooks) == 3
        internal_ecs = {d.gadget for d in m.detectors if "/ec" in d.gadget and not d.stab.startswith("cat")}
        assert len(internal_ecs) == 2
        assert check_locality(m) == []

    @pytest.mark.parametrize("seed", [0, 4, 8])
    def test_noiseless_logical_z_majority_zero(self, c0, seed):
        w = CircuitWriter(c0.n, roles=[c0.roles[q] for q in range(c0.n)])
        for q in range(c0.n):
            w.rz(q)
        w.barrier()
        emit_ec(w, c0, "ec_pre")
        emit_meas(w, c0, logical_z_observable(c0, 0), "meas0")
        circ = w.finalize()
        rec = tableau_simulate(circ, seed=seed)
        paulis = stab_paulis(c0)
        paulis["LZ0"] = c0.logical_z[0]
        corrected, _ = track_hook_frames(circ, rec, paulis)
        vals = [corrected[("meas0", h, "obs:LZ0")] for h in range(3)]
        assert vals == [0, 0, 0]


class TestMemory:
    def test_detector_coverage_cycles1(self, c0):
        mem = build_memory_experiment(0, 1, code=c0)
        paths = {d.gadget.split("/")[0] for d in mem.detectors}
        assert {"ec0", "ec1", "readout"} <= paths
        assert check_locality(mem) == []

    @pytest.mark.parametrize("seed", [0, 1, 7])
    def test_noiseless_logical_parities_zero_after_frames(self, c0, seed):
        mem = build_memory_experiment(0, 1, code=c0)
        rec = tableau_simulate(mem, seed=seed)
        paulis = stab_paulis(c0)
        _, frame = track_hook_frames(mem, rec, paulis)
        flipped = set(frame.x_sites.tolist())
        readout = {d.stab: d.indices[0] for d in mem.detectors if d.gadget == "readout"}
        for i in mem.meta["tracked"]:
            support = c0.logical_z[i].support()
            parity = 0
            for q in support:
                parity ^= int(rec[readout[f"q{int(q)}"]]) ^ (1 if int(q) in flipped else 0)
            assert parity == 0, f"LZ{i}"

    @pytest.mark.parametrize("seed", [2, 6])
    def test_z_stab_parities_zero_in_readout(self, c0, seed):
        mem = build_memory_experiment(0, 1, code=c0)
        rec = tableau_simulate(mem, seed=seed)
        _, frame = track_hook_frames(mem, rec, stab_paulis(c0))
        flipped = set(frame.x_sites.tolist())
        readout = {d.stab: d.indices[0] for d in mem.detectors if d.gadget == "readout"}
        for st in c0.tower.outer_stabs:
            if st.kind != "Z":
                continue
            rep = outer_stab_rep(c0, st)
            parity = 0
            for q in rep.z_sites:
                parity ^= int(rec[readout[f"q{int(q)}"]]) ^ (1 if int(q) in flipped else 0)
            assert parity == 0
