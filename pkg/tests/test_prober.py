import numpy as np
import pytest

from jensen_lab import Interval, ProbeConfig, lookup, operator_convexity_defect, probe
from jensen_lab.errors import EvaluationFailure
from jensen_lab.functions import ScalarFunction
from jensen_lab.prober import (
    Counterexample,
    convexity_min_eig,
    pad_counterexample,
    refine,
    revalidate,
    trial_rng,
)

ABS, QUARTIC = lookup("abs"), lookup("quartic")
UNIT = Interval.closed(-1, 1)
WIDE = Interval.closed(-2, 2)


def test_probe_is_reproducible():
    cfg = dict(function=ABS, interval=UNIT, orders=(1, 2), trials=300, seed=11)
    a = probe(ProbeConfig(**cfg)).to_dict(timing=False)
    b = probe(ProbeConfig(**cfg)).to_dict(timing=False)
    assert a == b
    c = probe(ProbeConfig(**{**cfg, "seed": 12})).to_dict(timing=False)
    assert c != a


def test_trial_streams_are_independent():
    a = trial_rng(5, 2, 0).standard_normal(4)
    b = trial_rng(5, 2, 1).standard_normal(4)
    assert not np.allclose(a, b)
    np.testing.assert_array_equal(a, trial_rng(5, 2, 0).standard_normal(4))


def test_abs_scalar_order_finds_nothing():
    report = probe(ProbeConfig(ABS, UNIT, orders=(1,), trials=2000, seed=0))
    assert not report.found
    assert report.min_defect[1] >= -1e-12
    assert report.trials[1] == 2000


def test_abs_order_two_counterexample():
    report = probe(ProbeConfig(ABS, UNIT, orders=(2,), trials=100_000, seed=7))
    assert report.found
    c = report.counterexamples[0]
    assert c.min_eig <= -1e-3
    assert report.trials[2] < 100_000  # early stop after the first hit


def _raw_quartic():
    report = probe(ProbeConfig(QUARTIC, WIDE, orders=(2,), trials=1000, seed=7, refine_budget=0))
    return report.counterexamples[0]


def test_counterexamples_are_sound():
    c = _raw_quartic()
    lo, hi = WIDE.lower, WIDE.upper
    for M in (c.x, c.y):
        assert np.linalg.norm(M - M.conj().T) == 0
        w = np.linalg.eigvalsh(M)
        assert w[0] >= lo and w[-1] <= hi
    assert 0 <= c.lam <= 1
    checked = revalidate(c, QUARTIC)
    assert not checked.holds
    assert checked.min_eig == pytest.approx(c.min_eig, abs=1e-12 * c.scale)


def test_refine_monotone_and_improves():
    c = _raw_quartic()
    out = refine(c, QUARTIC, WIDE, 500)
    assert out.min_eig < c.min_eig
    assert out.refine_steps == 500
    assert revalidate(out, QUARTIC).min_eig == pytest.approx(out.min_eig, abs=1e-12 * out.scale)
    lo, hi = WIDE.lower, WIDE.upper
    for M in (out.x, out.y):
        w = np.linalg.eigvalsh(M)
        assert w[0] >= lo and w[-1] <= hi
    # a longer run from the same seed never ends worse
    assert refine(c, QUARTIC, WIDE, 50).min_eig >= out.min_eig
    assert refine(c, QUARTIC, WIDE, 50).min_eig <= c.min_eig


def test_refine_zero_budget_is_identity():
    c = _raw_quartic()
    assert refine(c, QUARTIC, WIDE, 0) is c


def test_padding_preserves_defect():
    c = _raw_quartic()
    for s in (-1.5, 0.0, 1.0):
        big = pad_counterexample(c, s)
        assert big.order == 3
        rep = operator_convexity_defect(QUARTIC, big.x, big.y, big.lam)
        assert rep.min_eig == pytest.approx(c.min_eig, abs=1e-12 * c.scale)


def test_counterexample_round_trip():
    c = _raw_quartic()
    d = Counterexample.from_dict(c.to_dict())
    np.testing.assert_array_equal(d.x, c.x)
    assert d.seed == c.seed and d.min_eig == c.min_eig


def test_evaluation_failure():
    bad =ScalarFunction("nan", Interval.real_line(), lambda t: np.log(np.asarray(t) - 5),
                         "unknown")
    with np.errstate(invalid="ignore"):
        with pytest.raises(EvaluationFailure):
            convexity_min_eig(bad, np.eye(2), np.zeros((2, 2)), 0.5)


def test_config_validation():
    with pytest.raises(ValueError):
        ProbeConfig(ABS, UNIT, orders=(0,))
    with pytest.raises(ValueError):
        ProbeConfig(ABS, UNIT, threshold=1e-12)
    with pytest.raises(ValueError):
        ProbeConfig(ABS, Interval.real_line())
