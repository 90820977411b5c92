"""Defects (right side minus left side) of the Jensen-type inequalities and
numerical replays of the identities used to prove them.

Every defect is oriented so that a positive semidefinite result means the
inequality holds.
"""
import hashlib
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .columns import (
    OperatorColumn,
    PinchingSystem,
    augment_to_unital,
    block,
    block_diag_of,
    block_diagonal,
    canonical_dilation,
    gram_and_classify,
    unitarity_residual,
)
from .errors import (
    DimensionMismatch,
    NotUnital,
    NotUnitalOrContractive,
    ZeroNotInDomain,
)
from .spectral import (
    DEFAULT_TOL,
    check_hermitian,
    check_isometry,
    check_projection,
    check_spectrum,
    domain_of,
    eigendecompose,
    evaluate,
    fro,
    hermitian_part,
    min_eig,
    apply_function,
    projection_range,
    same_shape,
)


def digest(*arrays):
    h = hashlib.sha256()
    for a in arrays:
        a = np.ascontiguousarray(np.asarray(a, dtype=complex))
        h.update(str(a.shape).encode())
        h.update(a.tobytes())
    return h.hexdigest()[:12]


def _name(f):
    return getattr(f, "name", getattr(f, "__name__", "f"))


@dataclass
class DefectReport:
    context: str
    defect: np.ndarray
    min_eig: float
    holds: bool
    scale: float
    steps: list = field(default_factory=list)

    def to_dict(self):
        from .io import matrix_to_json

        d = {
            "context": self.context,
            "minEig": self.min_eig,
            "holds": self.holds,
            "scale": self.scale,
            "steps": self.steps,
        }
        if np.ndim(self.defect) == 2:
            d["defect"] = matrix_to_json(self.defect)
        else:
            d["defect"] = float(self.defect)
        return d


def _defect_report(context, defect, scale, tol, steps=None):
    defect = hermitian_part(np.asarray(defect, dtype=complex))
    m = min_eig(defect)
    scale = max(1.0, float(scale))
    return DefectReport(context, defect, m, bool(m >= -tol.order * scale), scale, steps or [])


@dataclass
class ChainStep:
    label: str
    kind: str  # "equality" or "inequality"
    value: float  # residual for equalities, least eigenvalue for inequalities
    ok: bool

    def to_dict(self):
        return {"label": self.label, "kind": self.kind, "value": self.value, "ok": self.ok}


@dataclass
class ChainReport:
    context: str
    steps: list
    holds: bool
    scale: float
    slack: Optional[np.ndarray] = None

    @property
    def min_eig(self):
        ineq = [s.value for s in self.steps if s.kind == "inequality"]
        return min(ineq) if ineq else 0.0

    @property
    def max_residual(self):
        eq = [s.value for s in self.steps if s.kind == "equality"]
        return max(eq) if eq else 0.0

    def step(self, label):
        for s in self.steps:
            if s.label == label:
                return s
        raise KeyError(label)

    def to_dict(self):
        return {
            "context": self.context,
            "minEig": self.min_eig,
            "holds": self.holds,
            "scale": self.scale,
            "steps": [s.to_dict() for s in self.steps],
        }


class _Chain:
    def __init__(self, scale, tol):
        self.scale = max(1.0, float(scale))
        self.tol = tol
        self.steps = []

    def equality(self, label, residual):
        residual = float(residual)
        ok = residual <= self.tol.eq * self.scale
        self.steps.append(ChainStep(label, "equality", residual, bool(ok)))

    def inequality(self, label, slack_min):
        slack_min = float(slack_min)
        ok = slack_min >= -self.tol.order * self.scale
        self.steps.append(ChainStep(label, "inequality", slack_min, bool(ok)))

    def report(self, context, slack=None):
        holds = all(s.ok for s in self.steps)
        return ChainReport(context, self.steps, holds, self.scale, slack)


def _as_stack(xs, tol):
    xs = [check_hermitian(x, tol, f"xs[{k}]") for k, x in enumerate(xs)]
    if len({x.shape for x in xs}) != 1:
        raise DimensionMismatch("all x_k must share one shape")
    return np.stack(xs)


# -- convexity and Jensen defects ---------------------------------------------

def operator_convexity_defect(f, x, y, lam, domain=None, tol=DEFAULT_TOL):
    """``lam f(x) + (1 - lam) f(y) - f(lam x + (1 - lam) y)``."""
    domain = domain or domain_of(f)
    x = check_hermitian(x, tol, "x")
    y = check_hermitian(y, tol, "y")
    same_shape(x, y)
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    fx = apply_function(f, x, domain, tol)
    fy = apply_function(f, y, domain, tol)
    rhs = lam * fx + (1 - lam) * fy
    lhs = apply_function(f, lam * x + (1 - lam) * y, domain, tol)
    scale = max(fro(fx), fro(fy), fro(lhs))
    ctx = f"eq3:{_name(f)}:lam={lam:g}:{digest(x, y)}"
    return _defect_report(ctx, rhs - lhs, scale, tol)


def _weighted_sum(col, fxs):
    return col.compress(fxs)


def jensen_operator_defect(f, col, xs, mode="auto", domain=None, tol=DEFAULT_TOL):
    """``sum a_k* f(x_k) a_k - f(sum a_k* x_k a_k)``.

    Parameters
    ----------
    mode : {"auto", "unital", "contractive"}
        ``"auto"`` picks unital when the column is unital, else contractive.
        Contractive mode needs ``0`` in the domain; the instance is also
        augmented with ``a_{n+1} = (1 - sum a_k* a_k)^{1/2}``, ``x_{n+1} = 0``
        and the augmented (unital) defect is reported in ``steps``. The
        returned defect is that of the original, unaugmented instance, which
        differs from the augmented one by ``-f(0) (1 - sum a_k* a_k)``.
    """
    domain = domain or domain_of(f)
    xs = _as_stack(xs, tol)
    if xs.shape[0] != col.n or xs.shape[1] != col.m:
        raise DimensionMismatch(f"column is {col.n} x ({col.m}x{col.m}), operands {xs.shape}")
    cls = gram_and_classify(col, tol)
    if mode == "auto":
        mode = "unital" if cls.kind == "unital" else "contractive"
    if mode == "unital" and cls.kind != "unital":
        raise NotUnitalOrContractive(f"column is {cls.kind}, unital mode requested")
    if mode == "contractive" and cls.kind == "neither":
        raise NotUnitalOrContractive("column is neither unital nor contractive")
    if mode not in ("unital", "contractive"):
        raise ValueError(f"unknown mode {mode!r}")

    fxs = np.stack([apply_function(f, x, domain, tol) for x in xs])
    rhs = _weighted_sum(col, fxs)
    yv = col.compress(xs)
    lhs = apply_function(f, yv, domain, tol)
    defect = rhs - lhs
    scale = max(fro(rhs), fro(lhs))
    ctx = f"{'eq5' if mode == 'unital' else 'eq6'}:{_name(f)}:n={col.n}:m={col.m}:{digest(col.blocks, xs)}"
    steps = []
    if mode == "contractive":
        if not domain.contains(0.0):
            raise ZeroNotInDomain(f"contractive mode needs 0 in {domain}")
        f0 = float(evaluate(f, np.zeros(1))[0])
        aug = augment_to_unital(col, tol)
        aug_xs = np.concatenate([xs, np.zeros((1, col.m, col.m), dtype=complex)])
        aug_rhs = aug.compress(np.concatenate([fxs, f0 * np.eye(col.m)[None]]))
        aug_defect = hermitian_part(aug_rhs - apply_function(f, aug.compress(aug_xs), domain, tol))
        completion = f0 * (np.eye(col.m) - cls.gram)
        steps = [
            {"label": "augmented_minEig", "value": min_eig(aug_defect)},
            {"label": "augmentation_identity_residual",
             "value": fro(defect - (aug_defect - completion))},
            {"label": "f(0)", "value": f0},
        ]
    return _defect_report(ctx, defect, scale, tol, steps)


def pinching_defect(f, x, p, s=None, domain=None, tol=DEFAULT_TOL):
    """``p f(x) p - p f(pxp + s(1 - p)) p`` restricted to the range of ``p``.

    ``s`` defaults to the midpoint of the spectrum of ``x``.
    """
    domain = domain or domain_of(f)
    x = check_hermitian(x, tol, "x")
    p = check_projection(p)
    same_shape(x, p)
    if s is None:
        w = np.linalg.eigvalsh(x)
        s = 0.5 * (w[0] + w[-1])
    check_spectrum([s], domain, abs(s), tol)
    eye = np.eye(x.shape[0])
    fx = apply_function(f, x, domain, tol)
    pinched = apply_function(f, p @ x @ p + s * (eye - p), domain, tol)
    defect = p @ fx @ p - p @ pinched @ p
    W = projection_range(p)
    compressed = W.conj().T @ defect @ W if W.shape[1] else np.zeros((1, 1))
    rep = _defect_report(f"pinch:{_name(f)}:s={s:g}:{digest(x, p)}", compressed,
                         max(fro(fx), fro(pinched)), tol)
    rep.defect = hermitian_part(defect)
    return rep


def isometry_defect(f, x, v, domain=None, tol=DEFAULT_TOL):
    """``v* f(x) v - f(v* x v)`` for an isometry ``v``."""
    domain = domain or domain_of(f)
    x = check_hermitian(x, tol, "x")
    v = check_isometry(v)
    if v.shape[0] != x.shape[0]:
        raise DimensionMismatch(f"isometry has {v.shape[0]} rows, x is {x.shape[0]}-square")
    fx = apply_function(f, x, domain, tol)
    rhs = v.conj().T @ fx @ v
    lhs = apply_function(f, v.conj().T @ x @ v, domain, tol)
    return _defect_report(f"isometry:{_name(f)}:{digest(x, v)}", rhs - lhs,
                          max(fro(rhs), fro(lhs)), tol)


def monomial_identity_residual(power, x, v, s):
    """``||p v g(v*xv) v* p - p g(pxp + s(1 - p)) p||_F`` for ``g(t) = t^power``, ``p = vv*``.

    Both sides use repeated matrix products, no eigendecomposition.
    """
    x = np.asarray(x, dtype=complex)
    v = check_isometry(v)
    p = v @ v.conj().T
    eye = np.eye(x.shape[0])
    lhs = p @ v @ np.linalg.matrix_power(v.conj().T @ x @ v, power) @ v.conj().T @ p
    rhs = p @ np.linalg.matrix_power(p @ x @ p + s * (eye - p), power) @ p
    return fro(lhs - rhs)


# -- proof replays -------------------------------------------------------------

def rotation_unitary(lam, m):
    """``[[sqrt(lam), sqrt(1-lam)], [-sqrt(1-lam), sqrt(lam)]] (x) 1_m``."""
    c, s = np.sqrt(lam), np.sqrt(1.0 - lam)
    return np.kron(np.array([[c, s], [-s, c]]), np.eye(m)).astype(complex)


def two_point_reduction(x, y, lam, f, s=None, domain=None, tol=DEFAULT_TOL):
    """Recover the two-point convexity inequality from a 2 x 2 block pinching.

    Steps: ``U`` unitary; ``U*XU`` matches the closed block form; the
    compressed function value equals ``f(lam x + (1-lam) y)``; the
    compression of ``U* f(X) U`` equals ``lam f(x) + (1-lam) f(y)``; finally
    the convexity slack (an inequality, reported rather than assumed).

    The closed block form used here has off-diagonal blocks
    ``sqrt(lam - lam^2) (x - y)``, which is what ``U*XU`` evaluates to for
    this ``U``.
    """
    domain = domain or domain_of(f)
    x = check_hermitian(x, tol, "x")
    y = check_hermitian(y, tol, "y")
    same_shape(x, y)
    m = x.shape[0]
    if s is None:
        s = domain.midpoint() if domain.bounded else float(np.trace(x).real / m)
    X = block_diag_of([x, y])
    U = rotation_unitary(lam, m)
    P = block_diag_of([np.eye(m), np.zeros((m, m))])
    eye = np.eye(2 * m)

    fx = apply_function(f, x, domain, tol)
    fy = apply_function(f, y, domain, tol)
    fmix = apply_function(f, lam * x + (1 - lam) * y, domain, tol)
    chain = _Chain(max(fro(X), fro(fx), fro(fy), fro(fmix)), tol)

    chain.equality("unitary", unitarity_residual(U))
    M = hermitian_part(U.conj().T @ X @ U)
    off = np.sqrt(lam - lam * lam) * (x - y)
    closed = np.block([[lam * x + (1 - lam) * y, off], [off, lam * y + (1 - lam) * x]])
    chain.equality("block_formula", fro(M - closed))
    compressed = P @ apply_function(f, P @ M @ P + s * (eye - P), domain, tol) @ P
    chain.equality("compressed_value", fro(block(compressed, 0, 0, m) - fmix))
    avg = P @ U.conj().T @ block_diag_of([fx, fy]) @ U @ P
    chain.equality("compressed_average", fro(block(avg, 0, 0, m) - (lam * fx + (1 - lam) * fy)))
    slack = hermitian_part(lam * fx + (1 - lam) * fy - fmix)
    chain.inequality("convexity_slack", min_eig(slack))
    return chain.report(f"twopoint:{_name(f)}:lam={lam:g}:{digest(x, y)}", slack)


def _spectral_hull_midpoint(xs):
    lo = min(np.linalg.eigvalsh(x)[0] for x in xs)
    hi = max(np.linalg.eigvalsh(x)[-1] for x in xs)
    return 0.5 * (lo + hi)


def replay_pinching_chain(f, col, xs, s=None, x_extra=None, domain=None, tol=DEFAULT_TOL):
    """Replay the dilation-and-pinching derivation of the Jensen operator inequality.

    The unital column is extended to ``(a_1, ..., a_n, 0)``, the last column
    of its canonical dilation ``U``; ``X = diag(x_1, ..., x_n, x_extra)``
    with ``x_extra = s 1`` by default. Equality steps are checked against
    ``tol.eq * scale``, the single inequality step against ``tol.order * scale``.
    The returned ``slack`` is the last diagonal block of
    ``pinch(U* f(X) U) - f(pinch(U* X U))``.
    """
    domain = domain or domain_of(f)
    xs = _as_stack(xs, tol)
    cls = gram_and_classify(col, tol)
    if cls.kind != "unital":
        raise NotUnital(f"chain replay needs a unital column (got {cls.kind})")
    n, m = col.n, col.m
    if x_extra is None:
        if s is None:
            s = _spectral_hull_midpoint(xs)
        x_extra = s * np.eye(m)
    x_extra = check_hermitian(x_extra, tol, "x_extra")
    all_x = np.concatenate([xs, x_extra[None]])
    N = n + 1

    U = canonical_dilation(col, tol)
    X = block_diag_of(all_x)
    fX = block_diag_of([apply_function(f, x, domain, tol) for x in all_x])
    M = hermitian_part(U.conj().T @ X @ U)
    R = hermitian_part(U.conj().T @ fX @ U)
    ps = PinchingSystem(N, m)
    y = col.compress(xs)
    rhs = col.compress(np.stack([block(fX, k, k, m) for k in range(n)]))

    pinched = hermitian_part(ps.pinch(M))
    f_pinched = apply_function(f, pinched, domain, tol)
    averaged = sum(apply_function(f, ps.conjugate(M, k), domain, tol) for k in range(1, N + 1)) / N
    pinched_R = hermitian_part(ps.pinch(R))

    chain = _Chain(max(fro(X), fro(fX), fro(f_pinched)), tol)
    chain.equality("e1_corner_compression", fro(block(M, n, n, m) - y))
    chain.equality("e2_pinch_is_block_diagonal", fro(pinched - block_diagonal(M, N, m)))
    chain.equality("e2_pinch_corner", fro(block(pinched, n, n, m) - y))
    f_blocks = block_diag_of([apply_function(f, block(M, k, k, m), domain, tol) for k in range(N)])
    chain.equality("e3_blockwise_calculus", fro(f_pinched - f_blocks))
    chain.equality("e4_conjugation_covariance", fro(averaged - pinched_R))
    chain.inequality("e4_convexity", min_eig(averaged - f_pinched))
    chain.equality("e5_corner_of_dilated_values", fro(block(R, n, n, m) - rhs))

    slack = hermitian_part(block(pinched_R - f_pinched, n, n, m))
    direct = jensen_operator_defect(f, col, xs, "unital", domain, tol)
    chain.equality("total_matches_direct_defect", fro(slack - direct.defect))
    ctx = f"chain16:{_name(f)}:n={n}:m={m}:{digest(col.blocks, xs, x_extra)}"
    return chain.report(ctx, slack)


# -- trace inequality ------------------------------------------------------------

@dataclass
class EigenWitness:
    """Atomic probability measure attached to one eigenvector of ``y``."""

    eigenvalue: float
    mass: float
    barycenter: float
    integral_f: float
    f_at_eigenvalue: float
    atoms: Optional[list] = None  # [(location, mass), ...]

    @property
    def gap(self):
        return self.integral_f - self.f_at_eigenvalue

    def to_dict(self):
        d = {
            "eigenvalue": self.eigenvalue,
            "mass": self.mass,
            "barycenter": self.barycenter,
            "integral_f": self.integral_f,
            "f_at_eigenvalue": self.f_at_eigenvalue,
            "gap": self.gap,
        }
        if self.atoms is not None:
            d["atoms"] = [[float(a), float(w)] for a, w in self.atoms]
        return d


@dataclass
class TraceReport:
    context: str
    mode: str
    gap: float
    holds: bool
    scale: float
    m: int
    witnesses: list = field(default_factory=list)
    mass_error: float = 0.0
    barycenter_error: float = 0.0
    aggregation_residual: float = 0.0
    witness_gap: Optional[float] = None  # trace gap of the (augmented) unital instance

    @property
    def min_pointwise_gap(self):
        return min((w.gap for w in self.witnesses), default=0.0)

    def to_dict(self):
        return {
            "context": self.context,
            "mode": self.mode,
            "gap": self.gap,
            "minEig": self.gap,
            "holds": self.holds,
            "scale": self.scale,
            "m": self.m,
            "mass_error": self.mass_error,
            "barycenter_error": self.barycenter_error,
            "aggregation_residual": self.aggregation_residual,
            "witness_gap": self.witness_gap,
            "steps": [w.to_dict() for w in self.witnesses],
        }


def eigen_witnesses(f, col, xs, domain=None, with_atoms=False, tol=DEFAULT_TOL):
    """Per-eigenvector measures for ``y = sum a_k* x_k a_k``.

    For each eigenvector ``xi`` of ``y`` the measure puts mass
    ``|<v, a_k xi>|^2`` at every eigenpair ``(lambda, v)`` of every ``x_k``.
    Returns the witnesses and the trace gap ``sum_xi (int f dmu - f(y_xi))``
    recomputed from them.
    """
    domain = domain or domain_of(f)
    y = col.compress(xs)
    nu, Xi = eigendecompose(y, tol)
    nu_c = check_spectrum(nu, domain, float(np.max(np.abs(nu))), tol)
    f_nu = evaluate(f, nu_c)
    masses, locs = [], []
    for a, x in zip(col.blocks, xs):
        lam, V = np.linalg.eigh(x)
        lam = check_spectrum(lam, domain, float(np.max(np.abs(lam))), tol)
        c = V.conj().T @ a @ Xi  # row: eigenvector of x_k, column: eigenvector of y
        masses.append(np.abs(c) ** 2)
        locs.append(lam)
    masses = np.concatenate(masses)  # (n*m, m)
    locs = np.concatenate(locs)
    f_locs = evaluate(f, locs)
    out = []
    for j in range(len(nu)):
        mu = masses[:, j]
        atoms = list(zip(locs.tolist(), mu.tolist())) if with_atoms else None
        out.append(EigenWitness(float(nu[j]), float(mu.sum()), float(locs @ mu),
                                float(f_locs @ mu), float(f_nu[j]), atoms))
    return out


def trace_jensen_report(f, col=None, xs=None, mode="unital", *, s=None, t=None, lam=None, m=1,
                        domain=None, with_atoms=False, tol=DEFAULT_TOL):
    """Trace gap ``Tr(sum a_k* f(x_k) a_k) - Tr f(sum a_k* x_k a_k)`` with witnesses.

    Modes
    -----
    unital
        ``col`` must be unital.
    contractive
        ``col`` contractive and ``0`` in the domain. The gap is that of the
        given instance; witnesses are built on the augmented unital instance
        (``x_{n+1} = 0``) whose gap is ``witness_gap``.
    scalar
        ``x = s 1_m``, ``y = t 1_m`` with weights ``sqrt(lam) 1_m`` and
        ``sqrt(1 - lam) 1_m``; ``col``/``xs`` are ignored.
    """
    domain = domain or domain_of(f)
    if mode == "scalar":
        col = OperatorColumn(np.stack([np.sqrt(lam) * np.eye(m), np.sqrt(1 - lam) * np.eye(m)]))
        xs = np.stack([s * np.eye(m), t * np.eye(m)])
        unital_col, unital_xs = col, xs
    else:
        xs = _as_stack(xs, tol)
        if xs.shape[0] != col.n or xs.shape[1] != col.m:
            raise DimensionMismatch(f"column is {col.n} x ({col.m}x{col.m}), operands {xs.shape}")
        cls = gram_and_classify(col, tol)
        if mode == "unital":
            if cls.kind != "unital":
                raise NotUnitalOrContractive(f"column is {cls.kind}, unital mode requested")
            unital_col, unital_xs = col, xs
        elif mode == "contractive":
            if cls.kind == "neither":
                raise NotUnitalOrContractive("column is neither unital nor contractive")
            if not domain.contains(0.0):
                raise ZeroNotInDomain(f"contractive mode needs 0 in {domain}")
            unital_col = augment_to_unital(col, tol)
            unital_xs = np.concatenate([xs, np.zeros((1, col.m, col.m), dtype=complex)])
        else:
            raise ValueError(f"unknown mode {mode!r}")
    dim = col.m
    fxs = np.stack([apply_function(f, x, domain, tol) for x in xs])
    rhs = col.compress(fxs)
    lhs = apply_function(f, col.compress(xs), domain, tol)
    gap = float(np.trace(rhs).real - np.trace(lhs).real)
    scale = max(1.0, fro(rhs), fro(lhs))

    witnesses = eigen_witnesses(f, unital_col, unital_xs, domain, with_atoms, tol)
    u_rhs = unital_col.compress(np.stack([apply_function(f, x, domain, tol) for x in unital_xs]))
    u_lhs = apply_function(f, unital_col.compress(unital_xs), domain, tol)
    witness_gap = float(np.trace(u_rhs).real - np.trace(u_lhs).real)
    nu = np.array([w.eigenvalue for w in witnesses])
    mass_error = float(np.max(np.abs([w.mass - 1.0 for w in witnesses])))
    bary_error = float(np.max(np.abs([w.barycenter for w in witnesses] - nu)))
    agg = abs(sum(w.gap for w in witnesses) - witness_gap)

    holds = gap >= -tol.order * dim * scale
    tag = {"unital": "eq7", "contractive": "eq8", "scalar": "eq7-scalar"}[mode]
    ctx = f"{tag}:{_name(f)}:n={col.n}:m={dim}:{digest(col.blocks, xs)}"
    return TraceReport(ctx, mode, gap, bool(holds), scale, dim, witnesses,
                       mass_error, bary_error, float(agg), witness_gap)


def scalar_jensen_gap(f, s, t, lam):
    """``lam f(s) + (1 - lam) f(t) - f(lam s + (1 - lam) t)`` in plain floats."""
    vals = evaluate(f, np.array([s, t, lam * s + (1 - lam) * t]))
    return float(lam * vals[0] + (1 - lam) * vals[1] - vals[2])
