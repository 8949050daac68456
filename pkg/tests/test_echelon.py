"""Echelon forms, traced row operations, linear systems, and the
independence/span/basis decision procedures."""

from fractions import Fraction

import pytest

from matrixfirst.echelon import (
    AddMultiple,
    InconsistentSystem,
    ParametricSolution,
    Scale,
    StepTrace,
    Swap,
    UniqueSolution,
    apply_rowop,
    basis_check,
    in_span,
    independence_size_bound,
    is_independent,
    is_ref,
    is_rref,
    nullspace_basis,
    ref,
    rowop_from_json,
    rowop_to_json,
    rref,
    solve,
    span_equals,
    validate_rowop,
    verify_replay,
)
from matrixfirst.errors import ShapeError, SpanContainmentError
from matrixfirst.matrix import Matrix
from tests.conftest import random_rational_matrix


def mat(rows):
    return Matrix.from_rows(rows)


class TestRowOps:
    def test_apply_each_kind(self):
        a = mat([[1, 2], [3, 4]])
        assert apply_rowop(a, Swap(0, 1)) == mat([[3, 4], [1, 2]])
        assert apply_rowop(a, Scale(0, Fraction(2))) == mat([[2, 4], [3, 4]])
        assert apply_rowop(a, AddMultiple(0, Fraction(-3), 1)) == mat([[1, 2], [0, -2]])

    def test_validation(self):
        a = mat([[1, 2], [3, 4]])
        assert validate_rowop(a, Scale(0, Fraction(0))) is not None
        assert validate_rowop(a, Swap(0, 5)) is not None
        assert validate_rowop(a, AddMultiple(1, Fraction(1), 1)) is not None
        assert validate_rowop(a, Swap(0, 1)) is None
        with pytest.raises(ShapeError):
            apply_rowop(a, Scale(0, Fraction(0)))

    def test_json_round_trip(self):
        ops = [Swap(0, 2), Scale(1, Fraction(-2, 3)), AddMultiple(0, Fraction(5), 1)]
        for op in ops:
            assert rowop_from_json(rowop_to_json(op)) == op
        assert rowop_to_json(ops[2]) == {
            "kind": "AddMultiple", "src": 0, "factor": "5", "dst": 1,
        }


class TestRef:
    def test_identity(self):
        result = ref(Matrix.identity(3))
        assert result.pivots == ((0, 0), (1, 1), (2, 2))
        assert result.free_cols == ()
        assert result.rank == 3

    def test_zero_matrix(self):
        result = ref(Matrix.zeros(2, 3))
        assert result.rank == 0
        assert result.free_cols == (0, 1, 2)

    def test_rank_one(self):
        result = ref(mat([[1, 2], [2, 4]]))
        assert result.pivots == ((0, 0),)
        assert result.free_cols == (1,)
        # one elimination step by hand: row1 - 2*row0
        assert result.ref == mat([[1, 2], [0, 0]])

    def test_no_column_swaps_means_staircase(self, rng):
        for _ in range(50):
            a = random_rational_matrix(rng, rng.randint(1, 5), rng.randint(1, 5))
            result = ref(a)
            assert is_ref(result.ref)
            # pivots strictly increase in both coordinates
            for (r1, c1), (r2, c2) in zip(result.pivots, result.pivots[1:]):
                assert r2 == r1 + 1 and c2 > c1

    def test_pivot_invariance_between_strategies(self, rng):
        for _ in range(150):
            a = random_rational_matrix(rng, rng.randint(1, 6), rng.randint(1, 6))
            first = ref(a, "first_nonzero")
            partial = ref(a, "partial_pivot")
            assert first.pivots == partial.pivots
            assert first.free_cols == partial.free_cols

    def test_replay_soundness(self, rng):
        for _ in range(40):
            a = random_rational_matrix(rng, rng.randint(1, 5), rng.randint(1, 5))
            result = rref(a, "partial_pivot")
            assert verify_replay(a, result.trace) is None

    def test_trace_json_round_trip(self):
        a = mat([[0, 2], [3, 1]])
        trace = ref(a, "partial_pivot").trace
        assert StepTrace.from_json(trace.to_json()) == trace

    def test_tampered_trace_detected(self):
        a = mat([[1, 2], [2, 4]])
        result = ref(a)
        step = result.trace.steps[0]
        bad_after = Matrix.from_rows([[1, 2], [0, 1]])
        tampered = StepTrace((type(step)(step.op, step.annotation, bad_after),))
        assert verify_replay(a, tampered) == 0

    def test_rank_equals_transpose_rank(self, rng):
        for _ in range(60):
            a = random_rational_matrix(rng, rng.randint(1, 6), rng.randint(1, 6))
            assert ref(a).rank == ref(a.transpose()).rank

    def test_exchange_count_counts_swaps(self):
        result = ref(mat([[0, 1], [1, 0]]))
        assert result.exchange_count == 1


class TestRref:
    def test_diagonal_normalized(self):
        assert rref(mat([[2, 0], [0, 3]])).rref == Matrix.identity(2)

    def test_rank_one_case(self):
        assert rref(mat([[1, 2], [2, 4]])).rref == mat([[1, 2], [0, 0]])

    def test_idempotent_on_rref_input(self):
        a = mat([[1, 0, 3], [0, 1, -2]])
        result = rref(a)
        assert result.rref == a
        assert len(result.trace.steps) == 0

    def test_pivots_match_ref(self, rng):
        for _ in range(40):
            a = random_rational_matrix(rng, rng.randint(1, 5), rng.randint(1, 5))
            assert rref(a).pivots == ref(a).pivots

    def test_is_rref_predicate(self):
        assert is_rref(Matrix.identity(3))
        assert is_rref(Matrix.zeros(2, 2))
        assert not is_rref(mat([[2, 0], [0, 1]]))
        assert not is_rref(mat([[0, 1], [1, 0]]))
        assert is_ref(mat([[2, 1], [0, 3]]))


class TestSolve:
    def test_unique(self):
        solution = solve(Matrix.identity(2), [1, 2])
        assert isinstance(solution, UniqueSolution)
        assert solution.x == (1, 2)

    def test_inconsistent_by_augmented_pivot(self):
        solution = solve(mat([[1, 2], [2, 4]]), [1, 1])
        assert isinstance(solution, InconsistentSystem)
        assert solution.witness_row == 1

    def test_parametric_with_substitution_oracle(self):
        a = mat([[1, 2]])
        solution = solve(a, [3])
        assert isinstance(solution, ParametricSolution)
        assert solution.particular == (3, 0)
        assert solution.nullspace_basis == ((-2, 1),)
        # substitute back: A x = b and A n = 0, exactly
        assert a.apply(solution.particular) == (3,)
        assert a.apply(solution.nullspace_basis[0]) == (0,)

    def test_substitution_holds_on_random_systems(self, rng):
        for _ in range(80):
            rows, cols = rng.randint(1, 5), rng.randint(1, 5)
            a = random_rational_matrix(rng, rows, cols)
            x_true = [Fraction(rng.randint(-4, 4)) for _ in range(cols)]
            b = list(a.apply(x_true))  # consistent by construction
            solution = solve(a, b)
            if isinstance(solution, UniqueSolution):
                assert a.apply(solution.x) == tuple(b)
            else:
                assert isinstance(solution, ParametricSolution)
                assert a.apply(solution.particular) == tuple(b)
                for v in solution.nullspace_basis:
                    assert a.apply(v) == tuple([Fraction(0)] * rows)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            solve(Matrix.identity(2), [1, 2, 3])


class TestNullspace:
    def test_identity_has_trivial_kernel(self):
        assert nullspace_basis(Matrix.identity(3)) == ()

    def test_zero_matrix_kernel_is_everything(self):
        assert nullspace_basis(Matrix.zeros(2, 2)) == ((1, 0), (0, 1))

    def test_rank_one_kernel(self):
        a = mat([[1, 2], [2, 4]])
        basis = nullspace_basis(a)
        assert basis == ((-2, 1),)
        assert a.apply(basis[0]) == (0, 0)

    def test_dimension_formula(self, rng):
        for _ in range(50):
            a = random_rational_matrix(rng, rng.randint(1, 5), rng.randint(1, 5))
            basis = nullspace_basis(a)
            assert len(basis) == a.cols - ref(a).rank
            for v in basis:
                assert all(x == 0 for x in a.apply(v))


class TestIndependence:
    def test_standard_basis_independent(self):
        assert is_independent([(1, 0), (0, 1)]).independent

    def test_scaled_pair_dependent(self):
        report = is_independent([(1, 1), (2, 2)])
        assert not report.independent
        assert report.dependent_index == 1
        assert report.coefficients == (2,)

    def test_three_vector_dependency_with_certificate(self):
        z0, z1, z2 = (1, 0, 1), (0, 1, 1), (1, 1, 2)
        report = is_independent([z0, z1, z2])
        assert not report.independent
        assert report.dependent_index == 2
        assert report.coefficients == (1, 1)
        # verified by addition: z2 = 1*z0 + 1*z1
        assert tuple(a + b for a, b in zip(z0, z1)) == z2

    def test_zero_vector_first(self):
        report = is_independent([(0, 0), (1, 0)])
        assert not report.independent
        assert report.dependent_index == 0
        assert report.coefficients == ()

    def test_consistency_with_nullspace(self, rng):
        for _ in range(60):
            k = rng.randint(1, 4)
            vectors = [tuple(rng.randint(-3, 3) for _ in range(3)) for _ in range(k)]
            report = is_independent(vectors)
            kernel = nullspace_basis(Matrix.from_columns([list(v) for v in vectors]))
            assert report.independent == (len(kernel) == 0)


class TestSpan:
    def test_zero_vector_always_member(self):
        report = in_span((0, 0), [(1, 1)])
        assert report.member
        assert report.coefficients == (0,)

    def test_outside_span(self):
        assert not in_span((1, 0), [(0, 1)]).member

    def test_member_with_reproducing_coefficients(self):
        report = in_span((3, 3), [(1, 1)])
        assert report.member
        assert report.coefficients == (3,)

    def test_span_equality_reflexive_and_scale_invariant(self):
        assert span_equals([(1, 0)], [(1, 0)])
        assert span_equals([(1, 0)], [(2, 0)])

    def test_perturbed_spanning_counterexample(self):
        # z1 = e1, z2 = -e1; replacing the set by {z1 + z2} = {0} destroys the span
        z1, z2 = (1, 0), (-1, 0)
        perturbed = [tuple(a + b for a, b in zip(z1, z2))]
        assert perturbed == [(0, 0)]
        assert not span_equals(perturbed, [z1])

    def test_mixed_lengths_rejected(self):
        with pytest.raises(ShapeError):
            in_span((1, 0), [(1, 0, 0)])


class TestSizeBound:
    def test_forced_by_duplication(self):
        report = independence_size_bound([(1, 0)], [(1, 0), (2, 0)])
        assert report.forced_dependent
        assert report.certificate["dependency"]["index"] == 1

    def test_forced_with_explicit_dependency(self):
        report = independence_size_bound(
            [(1, 0), (0, 1)], [(1, 0), (0, 1), (1, 1)]
        )
        assert report.forced_dependent
        dep = report.certificate["dependency"]
        assert dep["index"] == 2
        assert dep["coefficients"] == (1, 1)
        assert report.certificate["m"] == 3
        assert report.certificate["dim"] == 2

    def test_bound_not_triggered_at_equality(self):
        report = independence_size_bound([(1, 0), (0, 1)], [(1, 0), (0, 1)])
        assert not report.forced_dependent

    def test_hypothesis_violation_rejected(self):
        with pytest.raises(SpanContainmentError):
            independence_size_bound([(1, 0)], [(0, 1)])


class TestBasisCheck:
    def test_standard_basis(self):
        report = basis_check([(1, 0), (0, 1)], 2)
        assert report.is_basis
        assert report.rank == report.count == 2

    def test_too_few_vectors(self):
        report = basis_check([(1, 1)], 2)
        assert not report.is_basis
        assert report.reason == "fails"

    def test_independent_pair(self):
        report = basis_check([(1, 0), (1, 1)], 2)
        assert report.is_basis
        assert report.reason == "independent_hence_spanning"

    def test_spanning_direction_recorded(self):
        report = basis_check([(1, 0), (1, 1)], 2, assume="spanning")
        assert report.is_basis
        assert report.reason == "spanning_hence_independent"

    def test_duality_on_random_subspaces(self, rng):
        # a spanning set's REF basis has exactly rank-many vectors and passes
        # basis_check in both directions
        for _ in range(30):
            vectors = [
                tuple(rng.randint(-3, 3) for _ in range(4)) for _ in range(rng.randint(1, 5))
            ]
            columns = Matrix.from_columns([list(v) for v in vectors])
            result = ref(columns)
            picked = [vectors[c] for _, c in result.pivots]
            if not picked:
                continue
            k = result.rank
            assert len(picked) == k
            assert basis_check(picked, k).is_basis
            assert basis_check(picked, k, assume="spanning").is_basis


class TestFloatDomain:
    def test_threshold_kills_noise_pivots(self):
        a = Matrix.from_rows([[1.0, 2.0], [1e-14, 2e-14]], "float")
        result = ref(a)
        assert result.rank == 1
        assert result.free_cols == (1,)

    def test_explicit_tolerance_override(self):
        a = Matrix.from_rows([[1.0, 0.0], [1e-6, 1.0]], "float")
        assert ref(a, tol=1e-3).rank == 2  # threshold only affects pivot choice
        assert ref(a, tol=1e-3).pivots == ((0, 0), (1, 1))

    def test_float_solve(self):
        a = Matrix.from_rows([[2.0, 0.0], [0.0, 4.0]], "float")
        solution = solve(a, [1.0, 2.0])
        assert isinstance(solution, UniqueSolution)
        assert solution.x[0] == pytest.approx(0.5)
        assert solution.x[1] == pytest.approx(0.5)
