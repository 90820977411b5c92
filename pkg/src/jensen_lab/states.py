"""Finite-dimensional states, centralizers, the conditional expectation onto
the algebra generated by a self-adjoint element, and the Jensen gap for
atomic column fields.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import AllMassZero, DimensionMismatch, NotInCentralizer, NotUnitalField
from .spectral import (
    DEFAULT_TOL,
    apply_function,
    check_hermitian,
    check_spectrum,
    domain_of,
    eigendecompose,
    evaluate,
    fro,
    hermitian_part,
    min_eig,
    random_hermitian_in,
)


@dataclass(frozen=True, eq=False)
class State:
    """Positive functional ``phi(x) = Tr(rho x)``; ``rho`` need not have unit trace."""

    rho: np.ndarray

    def __post_init__(self):
        rho = check_hermitian(self.rho, DEFAULT_TOL, "rho")
        if min_eig(rho) < -DEFAULT_TOL.order * max(1.0, fro(rho)):
            raise ValueError("rho must be positive semidefinite")
        if not np.trace(rho).real > 0:
            raise ValueError("rho must have positive trace")
        object.__setattr__(self, "rho", rho)

    @property
    def dim(self):
        return self.rho.shape[0]

    @property
    def normalization(self):
        return float(np.trace(self.rho).real)

    def __call__(self, x):
        return complex(np.trace(self.rho @ np.asarray(x, dtype=complex)))

    @classmethod
    def tracial(cls, dim):
        return cls(np.eye(dim) / dim)


@dataclass(frozen=True, eq=False)
class AtomicField:
    """Finitely many points ``(w_j, a_j, x_j)`` with ``sum w_j a_j* a_j = 1``."""

    weights: np.ndarray
    a: np.ndarray
    x: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).ravel()
        a = np.asarray(self.a, dtype=complex)
        x = np.asarray(self.x, dtype=complex)
        if a.ndim != 3 or a.shape != x.shape or a.shape[0] != w.size or a.shape[1] != a.shape[2]:
            raise DimensionMismatch(f"field shapes w{w.shape}, a{a.shape}, x{x.shape} disagree")
        if np.any(w <= 0):
            raise ValueError("field weights must be positive")
        x = np.stack([check_hermitian(xj, DEFAULT_TOL, f"x[{j}]") for j, xj in enumerate(x)])
        for arr in (w, a, x):
            arr.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "x", x)

    @property
    def m(self):
        return self.a.shape[1]

    def integrate(self, values):
        """``sum_j w_j a_j* v_j a_j``."""
        v = np.asarray(values, dtype=complex)
        out = np.einsum("j,jki,jkl,jlr->ir", self.weights, self.a.conj(), v, self.a)
        return hermitian_part(out)

    def mean(self):
        return self.integrate(self.x)

    def gram(self):
        return self.integrate(np.broadcast_to(np.eye(self.m), self.a.shape))

    def check_unital(self, tol=DEFAULT_TOL):
        r = fro(self.gram() - np.eye(self.m))
        if r > tol.order * np.sqrt(self.m):
            raise NotUnitalField(f"sum w_j a_j* a_j differs from 1 by {r:.3e}")
        return r


@dataclass(frozen=True)
class BlockTraceAlgebra:
    """Block-diagonal algebra with trace ``tau(x) = sum_i c_i Tr(x_i)``."""

    blocks: tuple
    weights: tuple

    def __post_init__(self):
        b = tuple(int(v) for v in self.blocks)
        c = tuple(float(v) for v in self.weights)
        if not b or len(b) != len(c) or min(b) < 1 or min(c) <= 0:
            raise ValueError("need matching positive block sizes and weights")
        object.__setattr__(self, "blocks", b)
        object.__setattr__(self, "weights", c)

    @property
    def dim(self):
        return sum(self.blocks)

    def slices(self):
        start = 0
        for size in self.blocks:
            yield slice(start, start + size)
            start += size

    def density(self):
        return np.diag(np.concatenate([np.full(b, c) for b, c in zip(self.blocks, self.weights)]))

    def project(self, x):
        """Compress onto the block diagonal (the algebra)."""
        out = np.zeros_like(np.asarray(x, dtype=complex))
        for sl in self.slices():
            out[sl, sl] = x[sl, sl]
        return out

    def contains(self, x, atol=1e-12):
        x = np.asarray(x)
        return fro(x - self.project(x)) <= atol * max(1.0, fro(x))

    def trace(self, x):
        x = np.asarray(x, dtype=complex)
        return complex(sum(c * np.trace(x[sl, sl]) for c, sl in zip(self.weights, self.slices())))

    def state(self, density=None):
        """The functional ``x -> tau(h x)`` for ``h`` in the algebra (default 1)."""
        D = self.density()
        if density is not None:
            D = hermitian_part(D @ self.project(density))
        return State(D)

    def matrix_units(self):
        for sl in self.slices():
            for i in range(sl.start, sl.stop):
                for j in range(sl.start, sl.stop):
                    e = np.zeros((self.dim, self.dim), dtype=complex)
                    e[i, j] = 1.0
                    yield e


def centralizer_test(state, y, tol=DEFAULT_TOL):
    """Whether ``y`` lies in the centralizer of the state; also ``||rho y - y rho||_F``."""
    y = np.asarray(y, dtype=complex)
    if y.shape != state.rho.shape:
        raise DimensionMismatch(f"state is {state.dim}-dimensional, y has shape {y.shape}")
    c = fro(state.rho @ y - y @ state.rho)
    bound = tol.eq * max(1.0, np.linalg.norm(state.rho, 2) * np.linalg.norm(y, 2))
    return bool(c <= bound), c


def matrix_unit_commutator(state, y):
    """``max_{ij} |phi(e_ij y) - phi(y e_ij)|`` over all matrix units."""
    rho, y = state.rho, np.asarray(y, dtype=complex)
    # phi(e_ij y) = (y rho)_{ji}, phi(y e_ij) = (rho y)_{ji}
    return float(np.max(np.abs(y @ rho - rho @ y)))


@dataclass
class ExpectationTable:
    eigenvalues: np.ndarray  # distinct eigenvalues of y with phi(P_i) > 0
    values: np.ndarray  # Phi(x)(lambda_i)
    weights: np.ndarray  # phi(P_i)
    projections: list

    def to_dict(self):
        return {"rows": [
            {"eigenvalue": float(l), "value": float(v), "weight": float(w)}
            for l, v, w in zip(self.eigenvalues, self.values, self.weights)
        ]}

    def pairing(self, g):
        """``sum_i g(lambda_i) Phi(x)(lambda_i) phi(P_i)``."""
        return float(np.sum(evaluate(g, self.eigenvalues) * self.values * self.weights))


def spectral_projections(y, tol=DEFAULT_TOL):
    """Distinct eigenvalues of ``y`` (clustered at ``tol.eq`` relative spacing) and projections."""
    w, V = eigendecompose(y, tol)
    gap = tol.eq * max(1.0, float(np.max(np.abs(w))))
    groups = [[0]]
    for i in range(1, len(w)):
        if w[i] - w[groups[-1][-1]] <= gap:
            groups[-1].append(i)
        else:
            groups.append([i])
    eigs = np.array([w[g].mean() for g in groups])
    projs = [V[:, g] @ V[:, g].conj().T for g in groups]
    return eigs, projs


class _Expectation:
    """Conditional expectation data for a fixed (state, y)."""

    def __init__(self, state, y, tol):
        y = check_hermitian(y, tol, "y")
        ok, c = centralizer_test(state, y, tol)
        if not ok:
            raise NotInCentralizer(f"||rho y - y rho||_F = {c:.3e}")
        eigs, projs = spectral_projections(y, tol)
        phis = np.array([state(P).real for P in projs])
        cutoff = tol.eq * state.normalization
        keep = phis > cutoff
        if not np.any(keep):
            raise AllMassZero("the state vanishes on every spectral projection of y")
        self.state = state
        self.eigenvalues = eigs[keep]
        self.weights = phis[keep]
        self.projections = [P for P, k in zip(projs, keep) if k]
        # rho P_i, precomputed for phi(P_i x)
        self._rho_p = [state.rho @ P for P in self.projections]

    def __call__(self, x):
        x = np.asarray(x, dtype=complex)
        num = np.array([np.sum(rp.T * x).real for rp in self._rho_p])  # Tr(rho P_i x)
        return num / self.weights


def conditional_expectation(state, y, x, tol=DEFAULT_TOL):
    """``Phi(x)(lambda_i) = phi(P_i x) / phi(P_i)`` over eigenvalues of ``y`` with ``phi(P_i) > 0``.

    Raises
    ------
    NotInCentralizer
        If ``rho`` and ``y`` do not commute.
    AllMassZero
        If ``phi(P_i) = 0`` for every spectral projection of ``y``.
    """
    E = _Expectation(state, y, tol)
    return ExpectationTable(E.eigenvalues, E(x), E.weights, E.projections)


@dataclass
class FieldReport:
    context: str
    gap: float
    holds: bool
    scale: float
    eigenvalues: np.ndarray
    weights: np.ndarray  # phi(P_i)
    masses: np.ndarray
    barycenters: np.ndarray
    integrals: np.ndarray  # int f dmu_i
    f_values: np.ndarray  # f(lambda_i)
    aggregation_residual: float
    pairing_residual: float

    @property
    def pointwise_slack(self):
        return self.integrals - self.f_values

    @property
    def mass_error(self):
        return float(np.max(np.abs(self.masses - 1.0)))

    @property
    def barycenter_error(self):
        return float(np.max(np.abs(self.barycenters - self.eigenvalues)))

    def to_dict(self):
        return {
            "context": self.context,
            "gap": self.gap,
            "minEig": self.gap,
            "holds": self.holds,
            "scale": self.scale,
            "aggregation_residual": self.aggregation_residual,
            "pairing_residual": self.pairing_residual,
            "steps": [
                {"eigenvalue": float(l), "weight": float(w), "mass": float(ms),
                 "barycenter": float(b), "integral_f": float(i), "f_at_eigenvalue": float(fv)}
                for l, w, ms, b, i, fv in zip(self.eigenvalues, self.weights, self.masses,
                                              self.barycenters, self.integrals, self.f_values)
            ],
        }


def field_jensen_gap(f, fld, state, domain=None, tol=DEFAULT_TOL):
    """``phi(sum w_j a_j* f(x_j) a_j) - phi(f(y))`` with per-eigenvalue measures.

    For each eigenvalue ``lambda_i`` of ``y = sum w_j a_j* x_j a_j`` carrying
    state mass, the measure ``g -> Phi(sum w_j a_j* g(x_j) a_j)(lambda_i)`` is
    evaluated on ``g = 1``, ``g = id`` and ``g = f``.
    """
    domain = domain or domain_of(f)
    fld.check_unital(tol)
    y = fld.mean()
    E = _Expectation(state, y, tol)
    fxs = np.stack([apply_function(f, x, domain, tol) for x in fld.x])
    rhs = fld.integrate(fxs)
    fy = apply_function(f, y, domain, tol)
    gap = float((state(rhs) - state(fy)).real)
    scale = max(1.0, fro(rhs), fro(fy)) * max(1.0, float(np.linalg.norm(state.rho, 2)))

    masses = E(fld.gram())
    barys = E(y)
    integrals = E(rhs)
    lam = check_spectrum(E.eigenvalues, domain, float(np.max(np.abs(E.eigenvalues))), tol)
    f_vals = evaluate(f, lam)
    aggregated = float(np.sum(E.weights * (integrals - f_vals)))
    # pairing identity with z = f(y): phi(f(y) x) = sum f(lambda_i) Phi(x)(lambda_i) phi(P_i)
    pairing = abs(float(state(fy @ rhs).real) - float(np.sum(f_vals * integrals * E.weights)))
    holds = gap >= -tol.order * scale
    ctx = f"eq9:{getattr(f, 'name', 'f')}:points={len(fld.weights)}:m={fld.m}"
    return FieldReport(ctx, gap, bool(holds), scale, E.eigenvalues, E.weights, masses, barys,
                       integrals, f_vals, abs(aggregated - gap), pairing)


def random_atomic_field(points, m, interval, seed, algebra: Optional[BlockTraceAlgebra] = None):
    """Random unital atomic field; block-diagonal when ``algebra`` is given."""
    rng = np.random.default_rng(seed)
    w = rng.dirichlet(np.ones(points))
    if algebra is None:
        sizes = [m]
    else:
        sizes = list(algebra.blocks)
        m = algebra.dim
    a = np.zeros((points, m, m), dtype=complex)
    x = np.zeros((points, m, m), dtype=complex)
    start = 0
    for size in sizes:
        sl = slice(start, start + size)
        Z = rng.standard_normal((points * size, size)) + 1j * rng.standard_normal((points * size, size))
        Q, _ = np.linalg.qr(Z)
        blocks = Q.reshape(points, size, size)
        for j in range(points):
            a[j, sl, sl] = blocks[j] / np.sqrt(w[j])
            x[j, sl, sl] = random_hermitian_in(size, interval, rng)
        start += size
    return AtomicField(w, a, x)


def commuting_state(y, seed, algebra: Optional[BlockTraceAlgebra] = None):
    """``rho = h(y) / Tr h(y)`` with ``h(t) = exp(b t + c t^2)`` for random ``b, c``.

    With an algebra, ``rho`` is its trace density times ``h(y)``.
    """
    rng = np.random.default_rng(seed)
    b, c = rng.normal(), rng.normal(scale=0.5)
    h = apply_function(lambda t: np.exp(b * t + c * t * t), y)
    if algebra is not None:
        return algebra.state(h)
    return State(h / np.trace(h).real)
