"""Randomized search for violations of matrix convexity.

Each trial draws ``x, y`` with spectra in the probe interval and a weight
``lam``; the least eigenvalue of ``lam f(x) + (1-lam) f(y) - f(lam x + (1-lam) y)``
is recorded. Any value below ``-threshold * scale`` is refined by a
derivative-free descent and reported as a counterexample.
"""
import time
from dataclasses import dataclass

import numpy as np

from .errors import EvaluationFailure
from .inequalities import operator_convexity_defect
from .io import matrix_from_json, matrix_to_json
from .spectral import (
    DEFAULT_TOL,
    Interval,
    evaluate,
    fro,
    hermitian_part,
    random_gue,
    random_hermitian_in,
)

LAMBDA_GRID = tuple(k / 8 for k in range(1, 8))


@dataclass
class ProbeConfig:
    function: object  # ScalarFunction or any callable with a name
    interval: Interval
    orders: tuple = (1, 2)
    trials: int = 1000
    grid: tuple = LAMBDA_GRID
    seed: int = 0
    refine_budget: int = 200
    threshold: float = 1e-6
    max_counterexamples: int = 1  # per order; the search of an order stops once reached

    def __post_init__(self):
        self.orders = tuple(int(n) for n in self.orders)
        if not self.orders or min(self.orders) < 1:
            raise ValueError("orders must be >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.threshold > DEFAULT_TOL.order:
            raise ValueError("threshold must exceed the Loewner-order tolerance")
        if not self.interval.bounded:
            raise ValueError("probe interval must be bounded")

    def to_dict(self):
        return {
            "function": getattr(self.function, "name", "f"),
            "interval": self.interval.to_dict(),
            "orders": list(self.orders),
            "trials": self.trials,
            "grid": list(self.grid),
            "seed": self.seed,
            "refine_budget": self.refine_budget,
            "threshold": self.threshold,
            "max_counterexamples": self.max_counterexamples,
        }


@dataclass
class Counterexample:
    order: int
    x: np.ndarray
    y: np.ndarray
    lam: float
    min_eig: float
    scale: float
    seed: tuple  # (master seed, order, trial)
    refine_steps: int = 0

    def to_dict(self):
        return {
            "order": self.order,
            "x": matrix_to_json(self.x),
            "y": matrix_to_json(self.y),
            "lam": self.lam,
            "minEig": self.min_eig,
            "scale": self.scale,
            "seed": list(self.seed),
            "refine_steps": self.refine_steps,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(int(d["order"]), matrix_from_json(d["x"], "x"), matrix_from_json(d["y"], "y"),
                   float(d["lam"]), float(d["minEig"]), float(d["scale"]), tuple(d["seed"]),
                   int(d.get("refine_steps", 0)))


@dataclass
class ProbeReport:
    config: dict
    min_defect: dict  # order -> least defect eigenvalue seen
    counterexamples: list
    trials: dict  # order -> trials executed
    wall_clock: float = 0.0

    @property
    def found(self):
        return bool(self.counterexamples)

    def to_dict(self, timing=True):
        d = {
            "config": self.config,
            "min_defect": {str(k): v for k, v in self.min_defect.items()},
            "counterexamples": [c.to_dict() for c in self.counterexamples],
            "trials": {str(k): v for k, v in self.trials.items()},
            "found": self.found,
        }
        if timing:
            d["wall_clock"] = self.wall_clock
        return d


def trial_rng(seed, *key):
    """Generator for one trial: ``SeedSequence(seed, spawn_key=key)``."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key)))


def _fmat(f, H):
    w, V = np.linalg.eigh(H)
    fw = evaluate(f, w)
    if not np.all(np.isfinite(fw)):
        raise EvaluationFailure(f"function is not finite at {w[~np.isfinite(fw)][0]!r}")
    return (V * fw) @ V.conj().T


def convexity_min_eig(f, x, y, lam):
    """Least defect eigenvalue and scale; unchecked fast path for the search loop."""
    fx, fy = _fmat(f, x), _fmat(f, y)
    fm = _fmat(f, hermitian_part(lam * x + (1 - lam) * y))
    D = hermitian_part(lam * fx + (1 - lam) * fy - fm)
    scale = max(1.0, fro(fx), fro(fy), fro(fm))
    return float(np.linalg.eigvalsh(D)[0]), scale


def _clip_spectrum(H, lo, hi):
    w, V = np.linalg.eigh(hermitian_part(H))
    return hermitian_part((V * np.clip(w, lo, hi)) @ V.conj().T)


def refine(c, f, interval, budget, decay=0.95, initial_step=0.1):
    """Random coordinate descent on ``(x, y, lam)`` with monotone acceptance.

    Each step perturbs one of ``x``, ``y`` (by a random Hermitian direction,
    spectrum re-clipped into ``interval``) or ``lam``; the candidate is kept
    only if the least defect eigenvalue strictly decreases. The step size
    shrinks by ``decay`` after every rejection. The generator is seeded from
    ``c.seed`` so the result is reproducible.
    """
    if budget <= 0:
        return c
    lo, hi = interval.interior_bounds()
    width = hi - lo
    rng = trial_rng(*c.seed, 1)  # trailing 1 separates refinement from sampling
    x, y, lam = c.x.copy(), c.y.copy(), c.lam
    best, scale = c.min_eig, c.scale
    step = initial_step * width
    n = c.order
    for _ in range(budget):
        coord = rng.integers(3)
        cx, cy, cl = x, y, lam
        if coord == 0:
            G = random_gue(n, rng)
            cx = _clip_spectrum(x + step * G / max(fro(G), 1e-300), lo, hi)
        elif coord == 1:
            G = random_gue(n, rng)
            cy = _clip_spectrum(y + step * G / max(fro(G), 1e-300), lo, hi)
        else:
            cl = float(np.clip(lam + step / width * rng.normal(), 0.0, 1.0))
        val, sc = convexity_min_eig(f, cx, cy, cl)
        if val < best:
            x, y, lam, best, scale = cx, cy, cl, val, sc
        else:
            step *= decay
    return Counterexample(n, x, y, lam, best, scale, c.seed, c.refine_steps + budget)


def probe(config):
    """Search every configured order; see :class:`ProbeReport`."""
    f, interval = config.function, config.interval
    start = time.perf_counter()
    min_defect, trials_run, found = {}, {}, []
    for order in config.orders:
        best = np.inf
        hits = 0
        executed = 0
        for trial in range(config.trials):
            rng = trial_rng(config.seed, order, trial)
            x = random_hermitian_in(order, interval, rng)
            y = random_hermitian_in(order, interval, rng)
            if trial % 2 == 0:
                lam = config.grid[(trial // 2) % len(config.grid)]
            else:
                lam = float(rng.uniform())
            val, scale = convexity_min_eig(f, x, y, lam)
            executed += 1
            best = min(best, val)
            if val < -config.threshold * scale:
                c = Counterexample(order, x, y, lam, val, scale, (config.seed, order, trial))
                c = refine(c, f, interval, config.refine_budget)
                best = min(best, c.min_eig)
                found.append(c)
                hits += 1
                if hits >= config.max_counterexamples:
                    break
        min_defect[order] = float(best)
        trials_run[order] = executed
    return ProbeReport(config.to_dict(), min_defect, found, trials_run,
                       time.perf_counter() - start)


def revalidate(c, f, domain=None, tol=DEFAULT_TOL):
    """Recompute a counterexample's defect through the checked public path."""
    return operator_convexity_defect(f, c.x, c.y, c.lam, domain, tol)


def pad_counterexample(c, s):
    """Embed an order-n counterexample into order n+1 by a direct sum with ``s``."""
    def pad(M):
        out = np.zeros((c.order + 1, c.order + 1), dtype=complex)
        out[:-1, :-1] = M
        out[-1, -1] = s
        return out

    return Counterexample(c.order + 1, pad(c.x), pad(c.y), c.lam, c.min_eig, c.scale,
                          c.seed, c.refine_steps)
