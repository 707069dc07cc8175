"""Expanded-quiver comparison: dimensions, transversal lift, flag map,
equivariance, pullback, and slice linear algebra."""

import json
from fractions import Fraction

import pytest

from quivalg.quiver import (
    QuiverRep,
    moment_map,
    sample_fiber,
    sample_lambda0,
    sample_tangent,
    trace_invariant,
)
from quivalg.scalars import Matrix
from quivalg.typea import (
    BlockRep,
    FlagDimensionMismatch,
    InvalidPartition,
    LiftInconsistent,
    NonPositiveDimension,
    PreconditionMomentMap,
    Sl2Triple,
    build_typea,
    flag_iso_e0,
    grad_degree,
    kazhdan_action_check,
    maffei_lift,
    maffei_verify,
    sl2_for_blocks,
    slodowy_slice,
    symplectic_pullback_check,
)
from quivalg.typea import _pullback_pair


def _comm(a, b):
    return a * b - b * a


@pytest.fixture(scope="module")
def gen_data():
    return build_typea(3, 4, (2, 1, 1), (2, 1))


@pytest.fixture(scope="module")
def gen_point(gen_data):
    return sample_lambda0(gen_data.framed_quiver(), gen_data.v, 20406)


@pytest.fixture(scope="module")
def gen_lift(gen_data, gen_point):
    return maffei_lift(gen_point, gen_data)


class TestBuildTypea:
    def test_e0_case(self):
        data = build_typea(3, 4, (2, 1, 1), (4, 0))
        assert data.v == (2, 1)
        assert data.tilde_v == (2, 1)
        assert data.tilde_d == (4, 0)

    def test_two_step(self):
        data = build_typea(2, 2, (1, 1), (2,))
        assert data.v == (1,)
        assert data.tilde_v == (1,)

    def test_nonpositive_rejected(self):
        with pytest.raises(NonPositiveDimension):
            build_typea(2, 2, (2, 0), (2,))

    def test_bad_r_sum(self):
        with pytest.raises(ValueError):
            build_typea(3, 4, (1, 1, 1), (4, 0))

    def test_bad_d_sum(self):
        with pytest.raises(ValueError):
            build_typea(3, 4, (2, 1, 1), (2, 0))

    def test_summand_dimensions_close_up(self, gen_data):
        # vertex 0 carries exactly N dimensions, vertex i exactly tilde_v_i
        assert gen_data.offsets(0)[1] == gen_data.N
        for i in range(1, gen_data.n):
            assert gen_data.offsets(i)[1] == gen_data.tilde_v[i - 1]

    def test_multiplicity_weighted_expansion(self):
        # the k-multiplicity of D_j in D_i' is j - i, so the expanded
        # dimension adds each d_j with that multiplicity
        data = build_typea(4, 6, (1, 2, 2, 1), (1, 1, 1))
        assert data.v == (2, 2, 1)
        assert data.tilde_v == (5, 3, 1)
        for i in range(1, data.n):
            assert data.offsets(i)[1] == data.tilde_v[i - 1]

    def test_zero_framing_entries_skipped(self):
        data = build_typea(5, 8, (2, 2, 2, 1, 1), (2, 1, 0, 1))
        assert all(key[1] != 3 for key in data.summands(0) if key[0] == "D")
        assert data.offsets(0)[1] == 8


class TestGradDegree:
    def test_forced_shift_block(self):
        assert grad_degree(0, 2, 1, 2, 2, "T") == 0

    def test_forced_diagonal_block(self):
        assert grad_degree(0, 2, 1, 2, 1, "S") == 0

    def test_negative_degree(self):
        assert grad_degree(0, 3, 1, 3, 3, "T") == -1

    def test_bad_kind(self):
        with pytest.raises(ValueError):
            grad_degree(0, 2, 1, 2, 2, "X")

    def test_out_of_tower(self):
        with pytest.raises(ValueError):
            grad_degree(0, 2, 2, 2, 1, "T")


class TestSl2ForBlocks:
    def test_length_one_tower_is_trivial(self, gen_data):
        tri = sl2_for_blocks(1, gen_data)
        assert tri.e.is_zero() and tri.f.is_zero() and tri.h.is_zero()

    def test_length_two_tower(self, gen_data):
        tri = sl2_for_blocks(0, gen_data)
        diag = [tri.h.entries[k][k] for k in range(4)]
        assert diag == [0, 0, 1, -1]
        assert _comm(tri.e, tri.f) == tri.h

    def test_relations_validated_on_construction(self):
        with pytest.raises(ValueError):
            Sl2Triple(Matrix.identity(2), Matrix.identity(2), Matrix.identity(2))

    def test_empty_block_space_rejected(self, gen_data):
        with pytest.raises(ValueError):
            sl2_for_blocks(2, gen_data)


class TestCanonicalFrame:
    def test_zero_point_lifts_to_frame(self, gen_data):
        x0 = QuiverRep.zero(gen_data.framed_quiver(), gen_data.v)
        bt = maffei_lift(x0, gen_data)
        assert maffei_verify(bt, x0)["ok"]
        for key in (
            ("TV", 0, (2, 1)),
            ("SD", 0, (2, 2)),
            ("T", 0, (2, 1), (2, 1)),
            ("S", 0, (2, 2), (2, 1)),
        ):
            assert bt.block(key).is_zero()

    def test_frame_has_identity_ladder(self, gen_data):
        x0 = QuiverRep.zero(gen_data.framed_quiver(), gen_data.v)
        bt = maffei_lift(x0, gen_data)
        assert bt.block(("T", 0, (2, 1), (2, 2))) == Matrix.identity(1)
        assert bt.block(("S", 0, (2, 1), (2, 1))) == Matrix.identity(1)

    def test_frame_fixed_by_any_scaling(self, gen_data):
        x0 = QuiverRep.zero(gen_data.framed_quiver(), gen_data.v)
        bt = maffei_lift(x0, gen_data)
        assert kazhdan_action_check(bt, gen_data, 5)


class TestLift:
    def test_solved_blocks_match_closed_forms(self, gen_data, gen_point, gen_lift):
        # frozen closed forms for this shape, derived by eliminating the
        # grade-2 equations by hand
        x, bt = gen_point, gen_lift
        A1, B1 = x.A[0], x.B[0]
        G2, D2 = x.Gamma[1], x.Delta[1]
        half = Fraction(1, 2)
        assert bt.block(("TV", 0, (2, 1))) == B1 * G2
        assert bt.block(("SD", 0, (2, 2))) == D2 * A1
        assert bt.block(("T", 0, (2, 1), (2, 1))) == (D2 * G2).scale(half)
        assert bt.block(("S", 0, (2, 2), (2, 1))) == (D2 * G2).scale(half)

    def test_verify_passes(self, gen_data, gen_point, gen_lift):
        report = maffei_verify(gen_lift, gen_point)
        assert report["ok"]
        assert report["matching"]["checked"] == 6

    def test_expanded_moment_vanishes(self, gen_lift):
        assert all(m.is_zero() for m in moment_map(gen_lift.as_quiver_rep()))

    def test_deterministic(self, gen_data, gen_point, gen_lift):
        assert maffei_lift(gen_point, gen_data) == gen_lift

    def test_matched_blocks_round_trip(self, gen_data, gen_point, gen_lift):
        x, bt = gen_point, gen_lift
        assert bt.block(("A", 1)) == x.A[0]
        assert bt.block(("B", 1)) == x.B[0]
        assert bt.block(("TV", 0, (1, 1))) == x.Gamma[0]
        assert bt.block(("SD", 0, (1, 1))) == x.Delta[0]
        assert bt.block(("TV", 1, (2, 1))) == x.Gamma[1]
        assert bt.block(("SD", 1, (2, 1))) == x.Delta[1]

    def test_many_seeds(self, gen_data):
        fq = gen_data.framed_quiver()
        for seed in range(5):
            x = sample_lambda0(fq, gen_data.v, 300 + seed)
            assert maffei_verify(maffei_lift(x, gen_data), x)["ok"]

    def test_multi_stage_shape(self):
        data = build_typea(4, 6, (1, 2, 2, 1), (1, 1, 1))
        x = sample_lambda0(data.framed_quiver(), data.v, 17)
        bt = maffei_lift(x, data)
        assert maffei_verify(bt, x)["ok"]

    def test_moment_precondition(self, gen_data):
        bad = sample_fiber(gen_data.framed_quiver(), gen_data.v, 5, chi=(1, -1))
        with pytest.raises(PreconditionMomentMap):
            maffei_lift(bad, gen_data)

    def test_shape_mismatch_rejected(self, gen_data):
        other = build_typea(3, 4, (2, 1, 1), (4, 0))
        x = QuiverRep.zero(other.framed_quiver(), other.v)
        with pytest.raises(ValueError):
            maffei_lift(x, gen_data)


class TestVerifyNegativeControls:
    def test_perturbed_forced_zero_block_is_named(self, gen_point, gen_lift):
        bad = gen_lift.with_block(
            ("T", 0, (2, 1), (1, 1)), Matrix([[Fraction(1), Fraction(0)]])
        )
        report = maffei_verify(bad, gen_point)
        assert not report["ok"]
        assert report["vanishing"]["failures"] == ["T[0] D(2,1) <- D(1,1)"]

    def test_perturbed_identity_block_is_named(self, gen_point, gen_lift):
        bad = gen_lift.with_block(("T", 0, (2, 1), (2, 2)), Matrix([[Fraction(3)]]))
        report = maffei_verify(bad, gen_point)
        assert "T[0] D(2,1) <- D(2,2)" in report["identity"]["failures"]

    def test_perturbed_matched_block_is_named(self, gen_data, gen_point, gen_lift):
        bad = gen_lift.with_block(("A", 1), gen_lift.block(("A", 1)).scale(2))
        report = maffei_verify(bad, gen_point)
        assert "A[1]" in report["matching"]["failures"]
        # and the moment equations break too
        assert report["moment"]["failures"]

    def test_verify_without_x_skips_matching(self, gen_lift):
        report = maffei_verify(gen_lift, None)
        assert report["ok"]
        assert report["matching"]["checked"] == 0


class TestBlockRep:
    def test_json_round_trip(self, gen_lift):
        blob = json.dumps(gen_lift.to_json())
        back = BlockRep.from_json(json.loads(blob))
        assert back == gen_lift

    def test_json_schema_tag(self, gen_lift):
        assert gen_lift.to_json()["schema"] == "blockrep"

    def test_unknown_cell_rejected(self, gen_lift):
        with pytest.raises(ValueError):
            gen_lift.block(("T", 0, (3, 1), (2, 1)))

    def test_corner_blocks_need_inner_vertex(self, gen_lift):
        with pytest.raises(ValueError):
            gen_lift.block(("A", 0))

    def test_from_blocks_validates_shape(self, gen_data):
        with pytest.raises(ValueError):
            BlockRep.from_blocks(gen_data, {("A", 1): Matrix.identity(3)})


class TestFlagIso:
    def test_degenerate_point_rejected(self):
        data = build_typea(3, 4, (2, 1, 1), (4, 0))
        x0 = QuiverRep.zero(data.framed_quiver(), data.v)
        with pytest.raises(FlagDimensionMismatch):
            flag_iso_e0(x0, data)

    def test_complete_flag_two_by_two(self):
        data = build_typea(2, 2, (1, 1), (2,))
        x = sample_lambda0(data.framed_quiver(), data.v, 3)
        endo, flags = flag_iso_e0(x, data)
        assert [f.cols for f in flags] == [1]
        assert (endo * flags[0]).is_zero()
        assert (endo * endo).is_zero()

    def test_flag_dims_and_nilpotency(self):
        data = build_typea(3, 4, (2, 1, 1), (4, 0))
        x = sample_lambda0(data.framed_quiver(), data.v, 7)
        endo, flags = flag_iso_e0(x, data)
        assert [f.cols for f in flags] == [2, 3]
        cube = endo * endo * endo
        assert cube.is_zero()

    def test_flag_agrees_with_lift(self):
        # two code paths for the same correspondence
        data = build_typea(3, 4, (2, 1, 1), (4, 0))
        x = sample_lambda0(data.framed_quiver(), data.v, 7)
        bt = maffei_lift(x, data)
        endo, _ = flag_iso_e0(x, data)
        assert bt.A_tilde[0] == x.Gamma[0]
        assert bt.B_tilde[0] == x.Delta[0]
        assert endo == bt.B_tilde[0] * bt.A_tilde[0]

    def test_general_data_rejected(self, gen_data, gen_point):
        with pytest.raises(ValueError):
            flag_iso_e0(gen_point, gen_data)

    def test_trace_invariants_match_endomorphism(self):
        # cyclic paths through the framing pair at vertex 1 compute the
        # power traces of the endomorphism on the other side
        data = build_typea(3, 4, (2, 1, 1), (4, 0))
        x = sample_lambda0(data.framed_quiver(), data.v, 7)
        endo, _ = flag_iso_e0(x, data)
        power = endo
        for p in range(1, 5):
            path = [("D", 0), ("G", 0)] * p
            assert power.trace() == trace_invariant(x, path)
            power = power * endo


class TestSymplecticPullback:
    def test_sampled_pairs(self, gen_data, gen_point):
        assert symplectic_pullback_check(gen_point, gen_data, 3)

    def test_equal_arguments(self, gen_data, gen_point):
        v = sample_tangent(gen_point, 5)
        lhs, rhs = _pullback_pair(gen_data, v, v)
        assert lhs == rhs

    def test_zero_tangent(self, gen_data, gen_point):
        lhs, rhs = _pullback_pair(gen_data, gen_point, gen_point)
        assert lhs == 0 and rhs == 0

    def test_e0_shape(self):
        data = build_typea(3, 4, (2, 1, 1), (4, 0))
        x = sample_lambda0(data.framed_quiver(), data.v, 7)
        assert symplectic_pullback_check(x, data, 2)


class TestKazhdanAction:
    def test_identity_scaling_fixes(self, gen_data, gen_lift):
        assert kazhdan_action_check(gen_lift, gen_data, 1)

    def test_scaling_values(self, gen_data, gen_lift):
        for t in (2, 3, -1, Fraction(1, 2)):
            assert kazhdan_action_check(gen_lift, gen_data, t)

    def test_corner_scales_inversely(self, gen_data, gen_lift):
        # reproduce the scaled rep and inspect one matched block
        from quivalg.typea import _cell_key, _iter_cells, _stage_of

        t = Fraction(2)
        blocks = {}
        for i in range(gen_data.n - 1):
            for side in ("A", "B"):
                for tgt, src in _iter_cells(gen_data, side, i):
                    key = _cell_key(side, i, tgt, src)
                    stage = _stage_of(gen_data, side, i, tgt, src)
                    blocks[key] = gen_lift.block(key).scale(t ** (-stage))
        scaled = BlockRep.from_blocks(gen_data, blocks)
        assert scaled.block(("A", 1)) == gen_lift.block(("A", 1)).scale(Fraction(1, 2))

    def test_zero_t_rejected(self, gen_data, gen_lift):
        with pytest.raises(ValueError):
            kazhdan_action_check(gen_lift, gen_data, 0)


class TestSlodowy:
    def test_regular_two_by_two(self):
        s = slodowy_slice(2, (2,))
        assert s.dim() == 2
        assert sorted(s.kazhdan_degrees) == [2, 4]

    def test_zero_nilpotent_two_by_two(self):
        s = slodowy_slice(2, (1, 1))
        assert s.dim() == 4
        assert set(s.kazhdan_degrees) == {2}

    def test_subregular_three_by_three(self):
        s = slodowy_slice(3, (2, 1))
        assert s.dim() == 5

    def test_triple_relations(self):
        s = slodowy_slice(4, (3, 1))
        assert _comm(s.h, s.e) == s.e.scale(2)
        assert _comm(s.h, s.f) == s.f.scale(-2)
        assert _comm(s.e, s.f) == s.h

    def test_basis_commutes_with_f(self):
        s = slodowy_slice(4, (2, 2))
        assert all(_comm(s.f, z).is_zero() for z in s.slice_basis)

    def test_dual_partition_dimension_all_n4(self):
        expected = {
            (4,): 4,
            (3, 1): 6,
            (2, 2): 8,
            (2, 1, 1): 10,
            (1, 1, 1, 1): 16,
        }
        for pt, dim in expected.items():
            s = slodowy_slice(4, pt)
            assert s.dim() == dim
            assert all(deg >= 2 for deg in s.kazhdan_degrees)

    def test_invalid_partitions(self):
        for bad in ((2, 2), (0, 3), (-1, 4), ()):
            with pytest.raises(InvalidPartition):
                slodowy_slice(3, bad)


class TestTwoStepShape:
    def test_lift_is_trivial(self):
        data = build_typea(2, 2, (1, 1), (2,))
        x = sample_lambda0(data.framed_quiver(), data.v, 3)
        bt = maffei_lift(x, data)
        assert bt.A_tilde[0] == x.Gamma[0]
        assert bt.B_tilde[0] == x.Delta[0]
        assert maffei_verify(bt, x)["ok"]
