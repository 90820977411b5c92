"""Scalar functions with convexity tags, and the integral representation of
operator convex functions on (-1, 1) as a generator of certified examples.
"""
import ast
import math
import operator
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import FormatError, SpectrumOutsideUnitInterval
from .spectral import (
    DEFAULT_TOL,
    REAL_LINE,
    Interval,
    check_hermitian,
    hermitian_part,
)

TAGS = ("operator-convex-certified", "convex-only", "non-convex", "unknown")

UNIT_INTERVAL = Interval.open(-1.0, 1.0)


@dataclass(frozen=True)
class ScalarFunction:
    """A named real function on an interval.

    The tag is descriptive metadata; nothing in the verifiers reads it.
    """

    name: str
    domain: Interval
    eval: Callable = field(repr=False)
    tag: str = "unknown"

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f"unknown tag {self.tag!r}")

    def __call__(self, t):
        return self.eval(t)

    def with_domain(self, domain):
        return ScalarFunction(self.name, domain, self.eval, self.tag)


def _xlogx(t):
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(t > 0, t * np.log(np.where(t > 0, t, 1.0)), 0.0)


_POSITIVE = Interval(0.0, math.inf, False, False)
_NONNEG = Interval(0.0, math.inf, True, False)

_CATALOG = (
    ScalarFunction("square", REAL_LINE, np.square, "operator-convex-certified"),
    ScalarFunction("inverse", _POSITIVE, lambda t: 1.0 / np.asarray(t, dtype=float),
                   "operator-convex-certified"),
    ScalarFunction("affine", REAL_LINE, lambda t: 2.0 * np.asarray(t, dtype=float) + 3.0,
                   "operator-convex-certified"),
    ScalarFunction("xlogx", _NONNEG, _xlogx, "operator-convex-certified"),
    ScalarFunction("negsqrt", _NONNEG, lambda t: -np.sqrt(np.asarray(t, dtype=float)),
                   "operator-convex-certified"),
    ScalarFunction("abs", REAL_LINE, np.abs, "convex-only"),
    ScalarFunction("quartic", REAL_LINE, lambda t: np.asarray(t, dtype=float) ** 4, "convex-only"),
    ScalarFunction("exp", REAL_LINE, np.exp, "convex-only"),
    ScalarFunction("shifted-square", REAL_LINE, lambda t: np.square(t) + 1.0, "convex-only"),
    ScalarFunction("negsquare", REAL_LINE, lambda t: -np.square(t), "non-convex"),
)


def catalog():
    """All built-in scalar functions."""
    return list(_CATALOG)


def lookup(name):
    for f in _CATALOG:
        if f.name == name:
            return f
    raise KeyError(f"no catalog function named {name!r}")


@dataclass(frozen=True, eq=False)
class BendatShermanRep:
    """``beta0 + beta1 t + beta2/2 * sum_j w_j t^2 / (1 - alpha_j t)`` on (-1, 1)."""

    beta0: float
    beta1: float
    beta2: float
    atoms: tuple  # ((alpha, weight), ...)

    def __post_init__(self):
        atoms = tuple((float(a), float(w)) for a, w in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if not self.beta2 >= 0:
            raise ValueError("beta2 must be non-negative")
        if not atoms:
            raise ValueError("measure needs at least one atom")
        alphas = np.array([a for a, _ in atoms])
        weights = np.array([w for _, w in atoms])
        if np.any(np.abs(alphas) > 1):
            raise ValueError("atom locations must lie in [-1, 1]")
        if np.any(weights <= 0) or abs(weights.sum() - 1.0) > 1e-12:
            raise ValueError("atom weights must be positive and sum to 1")

    @property
    def alphas(self):
        return np.array([a for a, _ in self.atoms])

    @property
    def weights(self):
        return np.array([w for _, w in self.atoms])

    def __call__(self, t):
        return bs_eval(self, t)

    def as_function(self, name="bs"):
        return ScalarFunction(name, UNIT_INTERVAL, self.__call__, "operator-convex-certified")

    def to_dict(self):
        return {
            "beta0": self.beta0,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "atoms": [[a, w] for a, w in self.atoms],
        }

    @classmethod
    def from_dict(cls, d):
        try:
            return cls(float(d["beta0"]), float(d["beta1"]), float(d["beta2"]),
                       tuple(tuple(a) for a in d["atoms"]))
        except KeyError as exc:
            raise FormatError(exc.args[0], "missing field") from None
        except (TypeError, ValueError) as exc:
            raise FormatError("atoms", str(exc)) from None


def bs_eval(rep, t):
    """Scalar (vectorized) evaluation on (-1, 1)."""
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) >= 1):
        bad = t[np.abs(t) >= 1].ravel()[0]
        raise SpectrumOutsideUnitInterval(bad, UNIT_INTERVAL)
    integral = sum(w * t**2 / (1.0 - a * t) for a, w in rep.atoms)
    return rep.beta0 + rep.beta1 * t + 0.5 * rep.beta2 * integral


def bs_eval_matrix(rep, H, tol=DEFAULT_TOL):
    """Matrix evaluation by linear solves, without an eigendecomposition.

    ``H^2 (1 - alpha H)^{-1}`` is formed with ``numpy.linalg.solve``; the
    spectrum is only used to guard the domain.
    """
    H = check_hermitian(H, tol)
    w = np.linalg.eigvalsh(H)
    if w[0] <= -1 or w[-1] >= 1:
        bad = w[0] if w[0] <= -1 else w[-1]
        raise SpectrumOutsideUnitInterval(bad, UNIT_INTERVAL)
    eye = np.eye(H.shape[0])
    H2 = H @ H
    integral = sum(wt * np.linalg.solve(eye - a * H, H2) for a, wt in rep.atoms)
    return hermitian_part(rep.beta0 * eye + rep.beta1 * H + 0.5 * rep.beta2 * integral)


def random_bs(seed):
    """A random representation with 1 to 5 atoms; deterministic per seed."""
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 6))
    alphas = rng.uniform(-1.0, 1.0, size=k)
    weights = rng.dirichlet(np.ones(k))
    weights = weights / weights.sum()
    return BendatShermanRep(
        beta0=float(rng.normal()),
        beta1=float(rng.normal()),
        beta2=float(rng.exponential(2.0)),
        atoms=tuple(zip(alphas.tolist(), weights.tolist())),
    )


def integrand_block(alpha):
    """``t^2 / (1 - alpha t)`` on (-1, 1)."""
    return ScalarFunction(f"g[{alpha:g}]", UNIT_INTERVAL,
                          lambda t: np.asarray(t, float) ** 2 / (1.0 - alpha * np.asarray(t, float)),
                          "operator-convex-certified")


# -- small arithmetic expression language ------------------------------------

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}
_UNARY = {ast.USub: operator.neg, ast.UAdd: operator.pos}
_CALLS = {"exp": np.exp, "log": np.log, "sqrt": np.sqrt, "abs": np.abs}


def parse_expression(text, domain=REAL_LINE):
    """Compile an expression in ``t`` such as ``"t**2 + 1"`` or ``"2*quartic(t)"``.

    Allowed: numbers, ``t``, ``+ - * / **``, unary minus, calls to
    ``exp log sqrt abs`` and to catalog functions by name (with ``-`` written
    as ``_``).
    """
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise FormatError("expr", f"cannot parse {text!r}: {exc.msg}") from None
    calls = dict(_CALLS)
    calls.update({f.name.replace("-", "_"): f.eval for f in _CATALOG})

    def build(node):
        if isinstance(node, ast.Expression):
            return build(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            v = float(node.value)
            return lambda t: v
        if isinstance(node, ast.Name):
            if node.id != "t":
                raise FormatError("expr", f"unknown variable {node.id!r}")
            return lambda t: t
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            op, lhs, rhs = _BINOPS[type(node.op)], build(node.left), build(node.right)
            return lambda t: op(lhs(t), rhs(t))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            op, arg = _UNARY[type(node.op)], build(node.operand)
            return lambda t: op(arg(t))
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in calls and len(node.args) == 1 and not node.keywords):
            fn, arg = calls[node.func.id], build(node.args[0])
            return lambda t: fn(arg(t))
        raise FormatError("expr", f"unsupported syntax {ast.dump(node)[:60]}")

    body = build(tree)

    def f(t):
        t = np.asarray(t, dtype=float)
        return np.broadcast_to(np.asarray(body(t), dtype=float), t.shape).copy()

    return ScalarFunction(text, domain, f, "unknown")
