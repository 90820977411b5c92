import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jensen_lab import (
    BendatShermanRep,
    Interval,
    ProbeConfig,
    apply_function,
    bs_eval,
    bs_eval_matrix,
    catalog,
    lookup,
    operator_convexity_defect,
    parse_expression,
    probe,
    random_bs,
    random_hermitian_in,
)
from jensen_lab.errors import FormatError, SpectrumOutsideUnitInterval
from jensen_lab.functions import integrand_block

seeds = st.integers(min_value=0, max_value=2**63 - 1)
INNER = Interval.closed(-0.9, 0.9)


def test_point_mass_at_zero_is_square():
    rep = BendatShermanRep(0, 0, 2, ((0.0, 1.0),))
    t = np.linspace(-0.99, 0.99, 41)
    np.testing.assert_allclose(bs_eval(rep, t), t**2, atol=1e-15)


@pytest.mark.parametrize("seed", range(5))
def test_taylor_coefficients_at_zero(seed):
    rep = random_bs(seed)
    h = 1e-4
    f = lambda t: bs_eval(rep, t)  # noqa: E731
    assert f(0.0) == rep.beta0
    assert (f(h) - f(-h)) / (2 * h) == pytest.approx(rep.beta1, abs=1e-6)
    second = (f(h) - 2 * f(0.0) + f(-h)) / h**2
    assert second == pytest.approx(rep.beta2, rel=1e-5, abs=1e-5)


def test_matrix_mode_example():
    rep = BendatShermanRep(0, 0, 2, ((1.0, 1.0),))
    out = bs_eval_matrix(rep, np.diag([0.0, 0.5]))
    np.testing.assert_allclose(out, np.diag([0.0, 0.5]), atol=1e-15)


@given(seeds, st.integers(1, 8))
@settings(max_examples=40, deadline=None)
def test_matrix_mode_matches_eigen_route(seed, dim):
    rng = np.random.default_rng(seed)
    rep = random_bs(rng.integers(2**32))
    H = random_hermitian_in(dim, INNER, rng)
    solve_route = bs_eval_matrix(rep, H)
    eig_route = apply_function(rep.as_function(), H)
    assert np.linalg.norm(solve_route - eig_route) <= 1e-10 * max(1, np.linalg.norm(eig_route))


def test_outside_unit_interval():
    rep = random_bs(0)
    with pytest.raises(SpectrumOutsideUnitInterval):
        bs_eval(rep, 1.0)
    with pytest.raises(SpectrumOutsideUnitInterval):
        bs_eval_matrix(rep, np.diag([0.0, -1.2]))


def test_mixture_linearity():
    a, b = random_bs(3), random_bs(4)
    p = 0.3
    # beta2 acts as the mass of the measure, so mix through unnormalized integrals
    beta2 = p * a.beta2 + (1 - p) * b.beta2
    atoms = tuple((al, p * a.beta2 * w / beta2) for al, w in a.atoms) + tuple(
        (al, (1 - p) * b.beta2 * w / beta2) for al, w in b.atoms)
    mixed = BendatShermanRep(p * a.beta0 + (1 - p) * b.beta0, p * a.beta1 + (1 - p) * b.beta1,
                             beta2, atoms)
    t = np.linspace(-0.95, 0.95, 31)
    np.testing.assert_allclose(bs_eval(mixed, t), p * bs_eval(a, t) + (1 - p) * bs_eval(b, t),
                               rtol=1e-13, atol=1e-13)


def test_random_bs_valid_and_deterministic():
    for seed in range(50):
        rep = random_bs(seed)
        assert 1 <= len(rep.atoms) <= 5
        assert abs(rep.weights.sum() - 1) <= 1e-12
        assert rep.beta2 >= 0 and np.all(np.abs(rep.alphas) <= 1)
    assert random_bs(9).to_dict() == random_bs(9).to_dict()


def test_rep_validation():
    with pytest.raises(ValueError):
        BendatShermanRep(0, 0, -1, ((0.0, 1.0),))
    with pytest.raises(ValueError):
        BendatShermanRep(0, 0, 1, ((0.0, 0.5),))
    with pytest.raises(ValueError):
        BendatShermanRep(0, 0, 1, ((1.5, 1.0),))


@pytest.mark.parametrize("alpha", [-1.0, -0.5, 0.0, 0.7, 1.0])
def test_integrand_blocks_midpoint_convex(alpha):
    g = integrand_block(alpha)
    rng = np.random.default_rng(int((alpha + 2) * 1000))
    for _ in range(50):
        x = random_hermitian_in(3, INNER, rng)
        y = random_hermitian_in(3, INNER, rng)
        assert operator_convexity_defect(g, x, y, 0.5).min_eig >= -1e-9


def test_random_bs_survives_probe():
    for seed in range(3):
        f = random_bs(seed).as_function()
        report = probe(ProbeConfig(f, INNER, orders=(1, 2, 3, 4), trials=150, seed=seed,
                                   threshold=1e-8))
        assert not report.found


def test_catalog_contents():
    names = {f.name: f for f in catalog()}
    expected = {
        "square": "operator-convex-certified",
        "inverse": "operator-convex-certified",
        "abs": "convex-only",
        "quartic": "convex-only",
        "exp": "convex-only",
        "negsquare": "non-convex",
        "shifted-square": "convex-only",
    }
    for name, tag in expected.items():
        assert names[name].tag == tag
    assert lookup("shifted-square")(0.0) == 1.0
    t = np.linspace(0.1, 3, 7)
    np.testing.assert_allclose(lookup("inverse")(t), 1 / t)
    with pytest.raises(KeyError):
        lookup("nope")


def test_square_tag_survives_probe():
    report = probe(ProbeConfig(lookup("square"), Interval.closed(-1, 1), orders=(1, 2, 4),
                               trials=2000, seed=3, threshold=1e-8))
    assert not report.found
    assert min(report.min_defect.values()) >= -1e-10


def test_quartic_tag_is_earned():
    report = probe(ProbeConfig(lookup("quartic"), Interval.closed(-2, 2), orders=(2,),
                               trials=2000, seed=3))
    assert report.found and report.counterexamples[0].min_eig < -1e-6


def test_negsquare_fails_scalar_midpoint():
    f = lookup("negsquare")
    assert 0.5 * f(0.0) + 0.5 * f(1.0) < f(0.5)


@pytest.mark.parametrize("expr, t, value", [
    ("t**2 + 1", 2.0, 5.0),
    ("-t", 3.0, -3.0),
    ("exp(t) - 2*quartic(t)", 0.0, 1.0),
    ("shifted_square(t) / 2", 1.0, 1.0),
    ("3", 7.0, 3.0),
])
def test_parse_expression(expr, t, value):
    assert parse_expression(expr)(np.array([t]))[0] == pytest.approx(value)


@pytest.mark.parametrize("expr", ["t +", "__import__('os')", "x**2", "t.real", "lambda: 1"])
def test_parse_expression_rejects(expr):
    with pytest.raises(FormatError):
        parse_expression(expr)
