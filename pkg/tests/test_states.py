import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jensen_lab import (
    AtomicField,
    BlockTraceAlgebra,
    Interval,
    OperatorColumn,
    State,
    apply_function,
    centralizer_test,
    commuting_state,
    conditional_expectation,
    field_jensen_gap,
    lookup,
    random_atomic_field,
    random_hermitian_in,
    random_unitary,
    trace_jensen_report,
)
from jensen_lab.errors import AllMassZero, NotInCentralizer, NotUnitalField
from jensen_lab.states import matrix_unit_commutator

seeds = st.integers(min_value=0, max_value=2**63 - 1)
I = Interval.closed(-1.5, 1.5)
EXP = lookup("exp")


def test_tracial_state_centralizes_everything(rng):
    y = random_hermitian_in(4, I, rng)
    ok, c = centralizer_test(State.tracial(4), y)
    assert ok and c <= 1e-15


def test_commuting_diagonals():
    ok, _ = centralizer_test(State(np.diag([0.2, 0.5, 0.3])), np.diag([1.0, -2.0, 3.0]))
    assert ok


def test_centralizer_counterexample():
    state = State(np.diag([0.7, 0.3]))
    y = np.array([[0.0, 1.0], [1.0, 0.0]])
    ok, c = centralizer_test(state, y)
    assert not ok
    assert c == pytest.approx(0.4 * np.sqrt(2))
    # matrix-unit oracle: phi(e_12 y) != phi(y e_12)
    e12 = np.array([[0.0, 1.0], [0.0, 0.0]])
    assert state(e12 @ y) != pytest.approx(state(y @ e12))
    assert matrix_unit_commutator(state, y) == pytest.approx(0.4)


@given(seeds, st.integers(1, 4))
@settings(max_examples=30, deadline=None)
def test_centralizer_agrees_with_matrix_units(seed, dim):
    rng = np.random.default_rng(seed)
    y = random_hermitian_in(dim, I, rng)
    commuting = commuting_state(y, rng)
    ok, _ = centralizer_test(commuting, y)
    assert ok
    units_max = 0.0
    for i in range(dim):
        for j in range(dim):
            e = np.zeros((dim, dim))
            e[i, j] = 1
            units_max = max(units_max, abs(commuting(e @ y) - commuting(y @ e)))
    assert units_max <= 1e-12
    if dim > 1:
        generic = State(np.diag(rng.uniform(0.1, 1, dim)))
        y2 = y + 0.5 * random_unitary(dim, rng)[:, :1] @ random_unitary(dim, rng)[:1, :]
        y2 = 0.5 * (y2 + y2.conj().T)
        assert centralizer_test(generic, y2)[0] == (matrix_unit_commutator(generic, y2) <= 1e-12)


def test_expectation_of_function_of_y(rng):
    y = random_hermitian_in(5, I, rng)
    state = commuting_state(y, rng)
    table = conditional_expectation(state, y, apply_function(np.cos, y))
    np.testing.assert_allclose(table.values, np.cos(table.eigenvalues), atol=1e-12)
    ones = conditional_expectation(state, y, np.eye(5))
    np.testing.assert_allclose(ones.values, 1.0, atol=1e-14)


@given(seeds, st.integers(1, 6))
@settings(max_examples=40, deadline=None)
def test_expectation_positive_and_pairing(seed, dim):
    rng = np.random.default_rng(seed)
    y = random_hermitian_in(dim, I, rng)
    state = commuting_state(y, rng)
    G = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    x = G @ G.conj().T
    table = conditional_expectation(state, y, x)
    assert np.all(table.values >= -1e-10)
    for g in (np.exp, np.sin, lambda t: t**3):
        lhs = state(apply_function(g, y) @ x).real
        assert abs(lhs - table.pairing(g)) <= 1e-10 * max(1, abs(lhs))
    # module property
    gy = apply_function(np.sin, y)
    moved = conditional_expectation(state, y, gy @ x)
    np.testing.assert_allclose(moved.values, np.sin(table.eigenvalues) * table.values,
                               atol=1e-10 * max(1, np.abs(table.values).max()))


def test_degenerate_eigenvalue_and_zero_mass():
    y = np.diag([1.0, 1.0, -1.0])
    rho = np.diag([0.5, 0.5, 0.0])
    table = conditional_expectation(State(rho), y, np.diag([2.0, 4.0, 7.0]))
    np.testing.assert_allclose(table.eigenvalues, [1.0])  # -1 carries no mass
    np.testing.assert_allclose(table.values, [3.0])


def test_expectation_errors():
    with pytest.raises(NotInCentralizer):
        conditional_expectation(State(np.diag([0.7, 0.3])), [[0, 1], [1, 0]], np.eye(2))
    state = State(np.diag([1.0, 0.0]))
    # every projection of y sees mass here, so force zero mass by a zero density on y's support
    with pytest.raises(ValueError):
        State(np.zeros((2, 2)))
    assert conditional_expectation(state, np.diag([1.0, 2.0]), np.eye(2)).weights.size == 1
    with pytest.raises(AllMassZero):
        from jensen_lab.states import _Expectation
        from jensen_lab.spectral import DEFAULT_TOL

        _Expectation(State(np.diag([1e-20, 1.0]) * 1.0), np.diag([3.0, 3.0]),
                     DEFAULT_TOL.with_overrides(eq=10.0))


def test_positivity_domination(rng):
    # 0 <= phi(x z) <= ||x|| phi(z) for x >= 0 and z >= 0 a function of y
    for _ in range(20):
        y = random_hermitian_in(4, I, rng)
        state = commuting_state(y, rng)
        G = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        x = G @ G.conj().T
        z = apply_function(lambda t: (t + 2) ** 2, y)
        val = state(x @ z)
        assert abs(val.imag) <= 1e-12 * abs(val)
        assert -1e-12 <= val.real <= np.linalg.norm(x, 2) * state(z).real * (1 + 1e-12)


def test_idempotent_on_range(rng):
    y = random_hermitian_in(4, I, rng)
    state = commuting_state(y, rng)
    g = apply_function(np.exp, y)
    np.testing.assert_allclose(conditional_expectation(state, y, g).values,
                               np.exp(np.linalg.eigvalsh(y)), atol=1e-12)


def test_single_point_field_has_zero_gap(rng):
    x = random_hermitian_in(3, I, rng)
    fld = AtomicField([1.0], np.eye(3)[None], x[None])
    rep = field_jensen_gap(EXP, fld, State.tracial(3))
    assert abs(rep.gap) <= 1e-14


def test_tracial_state_matches_trace_gap(rng):
    fld = random_atomic_field(3, 4, I, rng)
    rep = field_jensen_gap(EXP, fld, State.tracial(4))
    col = OperatorColumn(np.sqrt(fld.weights)[:, None, None] * fld.a)
    tr = trace_jensen_report(EXP, col, fld.x)
    assert rep.gap == pytest.approx(tr.gap / 4, abs=1e-12)


def test_block_algebra_trace_axioms(rng):
    alg = BlockTraceAlgebra((2, 3), (1.0, 2.0))
    units = list(alg.matrix_units())
    assert len(units) == 4 + 9
    for e in units:
        for f in units:
            assert alg.trace(e @ f) == pytest.approx(alg.trace(f @ e))
    X = alg.project(rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5)))
    assert alg.trace(X.conj().T @ X).real >= 0
    assert alg.trace(np.eye(5)) == pytest.approx(1 * 2 + 2 * 3)
    # the trace is the functional of the density of the algebra
    assert alg.state()(X) == pytest.approx(alg.trace(X))


def test_block_algebra_field_example():
    alg = BlockTraceAlgebra((2, 1), (1.0, 2.0))
    rng = np.random.default_rng(77)
    fld = random_atomic_field(3, None, I, rng, alg)
    assert all(alg.contains(a) and alg.contains(x) for a, x in zip(fld.a, fld.x))
    y = fld.mean()
    state = commuting_state(y, rng, alg)
    rep = field_jensen_gap(EXP, fld, state)
    assert rep.gap >= -1e-9 * rep.scale
    assert rep.aggregation_residual <= 1e-10
    assert rep.mass_error <= 1e-10 and rep.barycenter_error <= 1e-10
    assert np.all(rep.pointwise_slack >= -1e-10)


def test_field_requires_centralizer_and_unital(rng):
    fld = random_atomic_field(2, 2, I, rng)
    generic = State(np.array([[0.6, 0.2], [0.2, 0.4]]))
    if not centralizer_test(generic, fld.mean())[0]:
        with pytest.raises(NotInCentralizer):
            field_jensen_gap(EXP, fld, generic)
    bad = AtomicField(fld.weights, 1.1 * fld.a, fld.x)
    with pytest.raises(NotUnitalField):
        field_jensen_gap(EXP, bad, State.tracial(2))
