"""Tower construction: Hamming codes, transformations, parameters, export."""

import numpy as np
import pytest

from hammingline.codes import (
    BudgetExceeded,
    SparsePauli,
    StabilizerCode,
    build_tower,
    code_from_text,
    code_to_text,
    hamming_code,
    interleave_concat,
    pair_interleave,
    plain_hamming_rate_product,
    product_rep_avoiding_y,
    reserve_logical,
    tower_params,
    tower_rate_sequence,
    trivial_inner_code,
    validate_code,
)


@pytest.fixture(scope="module")
def c0():
    return build_tower(0)


@pytest.fixture(scope="module")
def c1():
    return build_tower(1)


class TestHamming:
    @pytest.mark.parametrize("m,n,k", [(3, 7, 1), (4, 15, 7), (5, 31, 21)])
    def test_parameters(self, m, n, k):
        code = hamming_code(m)
        assert (code.n, code.k) == (n, k)
        assert len(code.stabilizers) == 2 * m

    def test_m_below_three_rejected(self):
        with pytest.raises(ValueError):
            hamming_code(2)

    def test_stabilizer_support_rule(self):
        code = hamming_code(4)
        for idx, stab in enumerate(code.stabilizers[:4]):
            k = idx + 1
            expect = [i - 1 for i in range(1, 16) if (i >> (k - 1)) & 1]
            assert stab.x_sites.tolist() == expect

    def test_commutation_and_pairing(self):
        validate_code(hamming_code(3))
        validate_code(hamming_code(4))
        validate_code(hamming_code(5))

    def test_min_weight_logicals(self):
        code = hamming_code(4)
        assert min(p.weight for p in code.logical_x) == 3
        assert max(p.weight for p in code.logical_z) <= 7


class TestTransformations:
    def test_interleave_generic_params(self):
        # [[4,2]] (x) [[3,2]] -> [[12, 4]]
        a = StabilizerCode(
            n=4, k=2, level=-1,
            stabilizers=[SparsePauli(4, x_sites=[0, 1, 2, 3]), SparsePauli(4, z_sites=[0, 1, 2, 3])],
            logical_x=[SparsePauli(4, x_sites=[0, 1]), SparsePauli(4, x_sites=[0, 2])],
            logical_z=[SparsePauli(4, z_sites=[0, 2]), SparsePauli(4, z_sites=[0, 1])],
        )
        b = StabilizerCode(
            n=3, k=2, level=-1,
            stabilizers=[SparsePauli(3, x_sites=[0, 1, 2])],
            logical_x=[SparsePauli(3, x_sites=[0]), SparsePauli(3, x_sites=[1])],
            logical_z=[SparsePauli(3, z_sites=[0, 2]), SparsePauli(3, z_sites=[1, 2])],
        )
        ab = interleave_concat(a, b)
        assert (ab.n, ab.k) == (12, 4)
        assert len(ab.stabilizers) == 4 * 1 + 2 * 2  # inner copies + lifted outer

    def test_interleave_identity_inner(self):
        triv = StabilizerCode(
            n=1, k=1, level=-1, stabilizers=[],
            logical_x=[SparsePauli(1, x_sites=[0])],
            logical_z=[SparsePauli(1, z_sites=[0])],
        )
        h = hamming_code(3)
        out = interleave_concat(h, triv)
        assert (out.n, out.k) == (h.n, h.k)
        for s_out, s_in in zip(out.stabilizers, h.stabilizers):
            assert s_out == s_in

    def test_c0_is_45_7(self, c0):
        assert (c0.n, c0.k) == (45, 7)
        assert len(c0.stabilizers) == 38
        assert len(c0.children) == 15
        assert c0.level == 0

    def test_reserve_counts_and_errors(self, c0):
        r1 = reserve_logical(c0)
        assert (r1.n, r1.k, len(r1.reserved)) == (45, 6, 1)
        r2 = reserve_logical(r1)
        assert (r2.k, len(r2.reserved)) == (5, 2)
        empty = StabilizerCode(n=1, k=0, level=-1, stabilizers=[], logical_x=[], logical_z=[])
        with pytest.raises(ValueError):
            reserve_logical(empty)

    def test_pair_interleave_alternates(self, c0):
        r = reserve_logical(c0)
        pair = pair_interleave(r)
        assert (pair.n, pair.k) == (90, 12)
        for l in range(pair.k - 1):
            side_a = pair.logical_x[l].support().max() < 45
            side_b = pair.logical_x[l + 1].support().max() < 45
            assert side_a != side_b  # adjacent logicals live in different copies
        assert len(pair.reserved) == 2

    def test_pair_of_empty_code(self):
        base = StabilizerCode(
            n=2, k=0, level=-1,
            stabilizers=[SparsePauli(2, z_sites=[0]), SparsePauli(2, z_sites=[1])],
            logical_x=[], logical_z=[],
        )
        pair = pair_interleave(base)
        assert (pair.n, pair.k) == (4, 0)


class TestTower:
    def test_params_exact(self):
        assert (tower_params(0).n, tower_params(0).k) == (45, 7)
        assert (tower_params(1).n, tower_params(1).k) == (2790, 252)
        assert (tower_params(2).n, tower_params(2).k) == (351540, 25602)

    def test_rate_one(self):
        p = tower_params(1)
        assert p.rate == pytest.approx(252 / 2790)

    def test_outer_stab_count(self):
        assert tower_params(0).s == 8
        assert tower_params(1).s == 120

    def test_distance_recursion(self):
        assert [tower_params(r).d for r in range(4)] == [3, 9, 27, 81]

    def test_budget_guard(self):
        with pytest.raises(BudgetExceeded):
            build_tower(2, budget=1000)

    def test_c1_measured_matches_params(self, c1):
        p = tower_params(1)
        assert (c1.n, c1.k) == (p.n, p.k)
        assert len(c1.children) == 62
        reserved_total = c1.reserved_total()
        assert c1.n == c1.k + len(c1.stabilizers) + reserved_total
        assert len(c1.tower.outer_stabs) == p.s

    def test_c0_measured_matches_params(self, c0):
        p = tower_params(0)
        assert (c0.n, c0.k) == (p.n, p.k)
        assert c0.n == c0.k + len(c0.stabilizers)
        assert len(c0.tower.outer_stabs) == p.s

    def test_commutation_exhaustive_r0(self, c0):
        validate_code(c0)

    def test_commutation_exhaustive_r1(self, c1):
        validate_code(c1)

    def test_c1_logicals_on_data_roles_only(self, c1):
        data = set(np.flatnonzero(c1.roles == "data").tolist())
        for i in range(c1.k):
            assert set(c1.logical_x[i].support().tolist()) <= data
            assert set(c1.logical_z[i].support().tolist()) <= data

    def test_reserved_disjoint_from_data_logicals(self, c1):
        tmpl = c1.child_template
        assert len(tmpl.reserved) == 1
        reserved_idx_rep = tmpl.reserved[0].z
        for i in range(tmpl.k):
            assert reserved_idx_rep != tmpl.logical_z[i]

    def test_rate_limits(self):
        # plain Hamming tower product approaches ~19.7%
        assert plain_hamming_rate_product(60) == pytest.approx(0.197, abs=1e-3)
        rates = tower_rate_sequence(40)
        assert all(r > 0.05 for r in rates)  # bounded below by 1/20
        assert float(rates[40]) == pytest.approx(0.06, abs=5e-3)


class TestExport:
    def test_roundtrip_c0(self, c0):
        text = code_to_text(c0)
        back = code_from_text(text)
        assert (back.n, back.k, back.level) == (c0.n, c0.k, c0.level)
        assert back.stabilizers == c0.stabilizers
        assert back.logical_x == c0.logical_x
        assert back.logical_z == c0.logical_z
        assert back.children == c0.children
        assert list(back.roles) == list(c0.roles)

    def test_roundtrip_with_reserved(self, c0):
        r = reserve_logical(c0)
        back = code_from_text(code_to_text(r))
        assert len(back.reserved) == 1
        assert back.reserved[0].z == r.reserved[0].z


class TestRepUtilities:
    def test_product_rep_avoids_y(self, c0):
        r = reserve_logical(c0)
        res_x = r.reserved[0].x
        for j in range(r.k):
            rep = product_rep_avoiding_y(r, r.logical_z[j], res_x)
            assert len(np.intersect1d(rep.x_sites, rep.z_sites)) == 0
            # still in the right coset: syndrome-free difference
            assert rep.weight > 0

    def test_roles_layout_c0(self, c0):
        assert list(c0.roles[:6]) == ["entangle", "data", "cat", "entangle", "data", "cat"]
