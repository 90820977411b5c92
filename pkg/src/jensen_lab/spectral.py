"""Dense Hermitian linear algebra: eigendecomposition, functional calculus,
the Loewner order and random matrices with a prescribed spectral interval.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Validation
helpers return a cleaned copy so callers can work with the result directly.
"""
import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .errors import (
    DimensionMismatch,
    NotCommuting,
    NotHermitian,
    NotIsometry,
    NotProjection,
    NotUnitary,
    SpectrumOutsideDomain,
    UnboundedInterval,
)

# Residual allowed in V*V = 1, p^2 = p and similar structural checks.
STRUCTURE_TOL = 1e-10


@dataclass(frozen=True)
class ToleranceProfile:
    """Relative tolerances, each scaled by ``max(1, operand norm)`` at use.

    Attributes
    ----------
    herm : float
        Self-adjointness slack for ``||H - H*||_F``.
    eig : float
        Eigendecomposition reconstruction / unitarity slack (per dimension).
    order : float
        Loewner-order slack: ``A <= B`` iff ``minEig(B - A) >= -order*scale``.
    eq : float
        Slack for identities that hold exactly in exact arithmetic.
    """

    herm: float = 1e-12
    eig: float = 1e-12
    order: float = 1e-9
    eq: float = 1e-10

    def __post_init__(self):
        for name in ("herm", "eig", "order", "eq"):
            if not getattr(self, name) > 0:
                raise ValueError(f"tolerance {name} must be strictly positive")

    def with_overrides(self, **kwargs):
        return replace(self, **kwargs)


DEFAULT_TOL = ToleranceProfile()


@dataclass(frozen=True)
class Interval:
    """A real interval, possibly unbounded, with per-endpoint closedness."""

    lower: float = -math.inf
    upper: float = math.inf
    closed_lower: bool = True
    closed_upper: bool = True

    def __post_init__(self):
        lo, hi = float(self.lower), float(self.upper)
        if math.isnan(lo) or math.isnan(hi) or not lo < hi:
            raise ValueError(f"invalid interval endpoints ({lo}, {hi})")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        # infinite endpoints are never attained
        if math.isinf(lo):
            object.__setattr__(self, "closed_lower", False)
        if math.isinf(hi):
            object.__setattr__(self, "closed_upper", False)

    @classmethod
    def closed(cls, lower, upper):
        return cls(lower, upper, True, True)

    @classmethod
    def open(cls, lower, upper):
        return cls(lower, upper, False, False)

    @classmethod
    def real_line(cls):
        return cls(-math.inf, math.inf, False, False)

    @property
    def bounded(self):
        return math.isfinite(self.lower) and math.isfinite(self.upper)

    @property
    def width(self):
        return self.upper - self.lower

    def contains(self, t, slack=0.0):
        """Vectorized membership; ``slack`` widens closed endpoints only."""
        t = np.asarray(t, dtype=float)
        if self.closed_lower:
            ok_lo = t >= self.lower - slack
        else:
            ok_lo = t > self.lower
        if self.closed_upper:
            ok_hi = t <= self.upper + slack
        else:
            ok_hi = t < self.upper
        return ok_lo & ok_hi

    def clip(self, t):
        """Clip into the closed hull of the interval."""
        return np.clip(t, self.lower, self.upper)

    def interior_bounds(self, margin=1e-9):
        """Finite bounds that stay inside the interval (open ends are nudged)."""
        if not self.bounded:
            raise UnboundedInterval(f"{self} is unbounded")
        eps = margin * self.width
        lo = self.lower if self.closed_lower else self.lower + eps
        hi = self.upper if self.closed_upper else self.upper - eps
        return lo, hi

    def midpoint(self):
        if self.bounded:
            return 0.5 * (self.lower + self.upper)
        if math.isfinite(self.lower):
            return self.lower + 1.0
        if math.isfinite(self.upper):
            return self.upper - 1.0
        return 0.0

    def to_dict(self):
        return {
            "lower": self.lower,
            "upper": self.upper,
            "closed_lower": self.closed_lower,
            "closed_upper": self.closed_upper,
        }

    def __str__(self):
        left = "[" if self.closed_lower else "("
        right = "]" if self.closed_upper else ")"
        return f"{left}{self.lower:g}, {self.upper:g}{right}"


REAL_LINE = Interval.real_line()


class SpectralDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self):
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.conj().T


def fro(A):
    return float(np.linalg.norm(A))


def dagger(A):
    return np.conj(np.swapaxes(A, -1, -2))


def check_square(A, name="matrix"):
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise DimensionMismatch(f"{name} must be a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NotHermitian(f"{name} has non-finite entries")
    return A


def check_hermitian(H, tol=DEFAULT_TOL, name="matrix"):
    """Validate self-adjointness and return the symmetrized complex copy."""
    H = check_square(H, name)
    resid = fro(H - H.conj().T)
    if resid > tol.herm * max(1.0, fro(H)):
        raise NotHermitian(f"{name} is not Hermitian: ||H - H*||_F = {resid:.3e}")
    return 0.5 * (H + H.conj().T)


def hermitian_part(A):
    return 0.5 * (A + dagger(A))


def same_shape(*mats):
    shapes = {np.shape(M) for M in mats}
    if len(shapes) != 1:
        raise DimensionMismatch(f"operands have shapes {sorted(shapes)}")


def eigendecompose(H, tol=DEFAULT_TOL):
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.

    Within a degenerate eigenspace the basis is whatever LAPACK returns;
    downstream code must not depend on it.
    """
    H = check_hermitian(H, tol)
    w, V = np.linalg.eigh(H)
    return SpectralDecomposition(w, V)


def min_eig(A):
    """Least eigenvalue of the Hermitian part of ``A``."""
    return float(np.linalg.eigvalsh(hermitian_part(np.asarray(A, dtype=complex)))[0])


def domain_of(f):
    return getattr(f, "domain", None) or REAL_LINE


def check_spectrum(eigenvalues, domain, scale=1.0, tol=DEFAULT_TOL):
    """Raise ``SpectrumOutsideDomain`` unless every eigenvalue lies in ``domain``.

    Closed endpoints get ``tol.order * max(1, scale)`` of slack; eigenvalues in
    that slack are clipped onto the endpoint. Returns the (clipped) values.
    """
    w = np.asarray(eigenvalues, dtype=float)
    slack = tol.order * max(1.0, scale)
    inside = domain.contains(w, slack)
    if not np.all(inside):
        bad = w[~inside][0]
        raise SpectrumOutsideDomain(bad, domain)
    return domain.clip(w) if (domain.closed_lower or domain.closed_upper) else w


def evaluate(f, t):
    """Evaluate a scalar function on an array of reals, returning floats."""
    t = np.asarray(t, dtype=float)
    with np.errstate(all="ignore"):
        try:
            out = np.asarray(f(t), dtype=float)
        except TypeError:
            out = np.array([float(f(float(s))) for s in t.ravel()]).reshape(t.shape)
    if out.shape != t.shape:
        out = np.broadcast_to(out, t.shape).astype(float)
    return out


def apply_function(f, H, domain=None, tol=DEFAULT_TOL):
    """Spectral functional calculus ``f(H) = V diag(f(w)) V*``.

    Parameters
    ----------
    f : callable or ScalarFunction
        Vectorized real function. A ``domain`` attribute is used when
        ``domain`` is not given.
    H : array_like
        Hermitian matrix.
    domain : Interval, optional
        Interval on which ``f`` is defined; defaults to the real line.

    Raises
    ------
    SpectrumOutsideDomain
        If an eigenvalue of ``H`` lies outside the domain.
    """
    domain = domain or domain_of(f)
    w, V = eigendecompose(H, tol)
    w = check_spectrum(w, domain, float(np.max(np.abs(w))), tol)
    fw = evaluate(f, w)
    if not np.all(np.isfinite(fw)):
        bad = w[~np.isfinite(fw)][0]
        raise SpectrumOutsideDomain(bad, domain)
    return hermitian_part((V * fw) @ V.conj().T)


def loewner_defect(A, B, tol=DEFAULT_TOL):
    """Least eigenvalue of ``B - A`` and whether ``A <= B`` within slack."""
    A = check_hermitian(A, tol, "A")
    B = check_hermitian(B, tol, "B")
    same_shape(A, B)
    m = min_eig(B - A)
    scale = max(1.0, fro(A), fro(B))
    return m, bool(m >= -tol.order * scale)


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_gue(dim, rng):
    G = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (G + G.conj().T) / 2


def random_hermitian_in(dim, interval, seed):
    """Random Hermitian matrix with spectrum inside a bounded interval.

    A Gaussian Hermitian sample has its spectrum affinely rescaled onto a
    uniformly chosen closed subinterval of ``interval``; no rejection step.
    """
    if dim < 1:
        raise DimensionMismatch("dim must be >= 1")
    lo, hi = interval.interior_bounds()
    rng = _rng(seed)
    if dim == 1:
        return np.array([[rng.uniform(lo, hi)]], dtype=complex)
    w, V = np.linalg.eigh(random_gue(dim, rng))
    c, d = np.sort(rng.uniform(lo, hi, size=2))
    spread = w[-1] - w[0]
    w = c + (w - w[0]) * ((d - c) / spread) if spread > 0 else np.full(dim, c)
    w = np.clip(w, lo, hi)
    return hermitian_part((V * w) @ V.conj().T)


def random_unitary(dim, seed):
    """Haar-distributed unitary via QR with phase correction."""
    rng = _rng(seed)
    Z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_isometry(rows, cols, seed):
    if cols > rows:
        raise DimensionMismatch("an isometry needs cols <= rows")
    return random_unitary(rows, seed)[:, :cols]


def check_unitary(u, name="u"):
    u = check_square(u, name)
    r = fro(u.conj().T @ u - np.eye(u.shape[0]))
    if r > STRUCTURE_TOL * max(1, u.shape[0]):
        raise NotUnitary(f"{name} is not unitary: ||u*u - 1||_F = {r:.3e}")
    return u


def check_isometry(v, name="v"):
    v = np.asarray(v, dtype=complex)
    if v.ndim != 2 or v.shape[1] > v.shape[0]:
        raise NotIsometry(f"{name} has shape {v.shape}; need rows >= cols")
    r = fro(v.conj().T @ v - np.eye(v.shape[1]))
    if r > STRUCTURE_TOL:
        raise NotIsometry(f"{name} is not an isometry: ||v*v - 1||_F = {r:.3e}")
    return v


def check_projection(p, name="p"):
    p = check_square(p, name)
    r = max(fro(p @ p - p), fro(p - p.conj().T))
    if r > STRUCTURE_TOL * max(1.0, fro(p)):
        raise NotProjection(f"{name} is not an orthogonal projection (residual {r:.3e})")
    return hermitian_part(p)


def projection_range(p):
    """Orthonormal basis (as columns) of the range of a projection."""
    w, V = np.linalg.eigh(hermitian_part(p))
    return V[:, w > 0.5]


@dataclass(frozen=True)
class DavisReport:
    conjugation_residual: float
    block_residual: float
    padded_residual: float
    scale: float
    holds: bool

    def to_dict(self):
        return {
            "conjugation_residual": self.conjugation_residual,
            "block_residual": self.block_residual,
            "padded_residual": self.padded_residual,
            "scale": self.scale,
            "holds": self.holds,
        }


def davis_property_check(f, x, u, p, s=None, domain=None, tol=DEFAULT_TOL):
    """Residuals of the two covariance properties of an operator function.

    ``conjugation_residual`` is ``||f(u*xu) - u*f(x)u||_F``. ``block_residual``
    compares ``p f(x) p`` with ``f`` applied to the compression of ``x`` to
    the range of ``p`` and embedded back; ``padded_residual`` compares it with
    ``p f(pxp + s(1-p)) p`` for a scalar ``s`` in the domain (default: the
    midpoint of the spectrum of ``x``).
    """
    domain = domain or domain_of(f)
    x = check_hermitian(x, tol, "x")
    u = check_unitary(u)
    p = check_projection(p)
    same_shape(x, u, p)
    comm = fro(p @ x - x @ p)
    if comm > tol.eq * max(1.0, fro(x)):
        raise NotCommuting(f"projection does not commute with x: ||px - xp||_F = {comm:.3e}")

    fx = apply_function(f, x, domain, tol)
    r1 = fro(apply_function(f, u.conj().T @ x @ u, domain, tol) - u.conj().T @ fx @ u)

    W = projection_range(p)
    if W.shape[1] == 0:
        embedded = np.zeros_like(x)
    else:
        fy = apply_function(f, W.conj().T @ x @ W, domain, tol)
        embedded = W @ fy @ W.conj().T
    pfp = p @ fx @ p
    r2 = fro(pfp - embedded)

    if s is None:
        w = np.linalg.eigvalsh(x)
        s = 0.5 * (w[0] + w[-1])
    eye = np.eye(x.shape[0])
    padded = p @ apply_function(f, p @ x @ p + s * (eye - p), domain, tol) @ p
    r3 = fro(pfp - padded)

    scale = max(1.0, fro(fx))
    holds = max(r1, r2, r3) <= tol.eq * scale
    return DavisReport(r1, r2, r3, scale, bool(holds))
