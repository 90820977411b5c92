"""Operator columns, their unitary dilations and the roots-of-unity pinching."""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, NotContractive, NotUnital
from .spectral import DEFAULT_TOL, dagger, fro, hermitian_part, min_eig


@dataclass(frozen=True, eq=False)
class OperatorColumn:
    """An n-tuple ``(a_1, ..., a_n)`` of m x m complex matrices.

    ``blocks`` is stored as one array of shape ``(n, m, m)``.
    """

    blocks: np.ndarray

    def __post_init__(self):
        b = np.array(self.blocks, dtype=complex)
        if b.ndim == 2:
            b = b[None]
        if b.ndim != 3 or b.shape[1] != b.shape[2] or b.shape[0] == 0 or b.shape[1] == 0:
            raise DimensionMismatch(f"column blocks must have shape (n, m, m), got {b.shape}")
        if not np.all(np.isfinite(b)):
            raise DimensionMismatch("column blocks have non-finite entries")
        b.setflags(write=False)
        object.__setattr__(self, "blocks", b)

    @property
    def n(self):
        return self.blocks.shape[0]

    @property
    def m(self):
        return self.blocks.shape[1]

    def __len__(self):
        return self.n

    def __getitem__(self, k):
        return self.blocks[k]

    def __iter__(self):
        return iter(self.blocks)

    def gram(self):
        """``sum_k a_k* a_k``."""
        return hermitian_part(np.einsum("kji,kjl->il", self.blocks.conj(), self.blocks))

    def row_gram(self):
        """``sum_k a_k a_k*``; the column condition of the adjoint tuple."""
        return hermitian_part(np.einsum("kij,klj->il", self.blocks, self.blocks.conj()))

    def adjoint(self):
        return OperatorColumn(dagger(self.blocks))

    def stacked(self):
        """The column as a single ``(n*m) x m`` matrix."""
        return self.blocks.reshape(self.n * self.m, self.m)

    def compress(self, xs):
        """``sum_k a_k* x_k a_k``."""
        xs = np.asarray(xs, dtype=complex)
        if xs.shape != self.blocks.shape:
            raise DimensionMismatch(f"expected {self.blocks.shape} operands, got {xs.shape}")
        return hermitian_part(np.einsum("kji,kjl,klr->ir", self.blocks.conj(), xs, self.blocks))

    def append(self, block):
        return OperatorColumn(np.concatenate([self.blocks, np.asarray(block, complex)[None]]))

    def permuted(self, order):
        return OperatorColumn(self.blocks[list(order)])


@dataclass(frozen=True, eq=False)
class ColumnClass:
    gram: np.ndarray
    kind: str  # "unital" | "contractive" | "neither"
    defect: float


def gram_and_classify(col, tol=DEFAULT_TOL):
    """Classify a column as unital, contractive or neither.

    ``defect`` is ``||gram - 1||_F`` for unital columns and
    ``minEig(1 - gram)`` otherwise.
    """
    g = col.gram()
    eye = np.eye(col.m)
    dist = fro(g - eye)
    if dist <= tol.order * np.sqrt(col.m):
        return ColumnClass(g, "unital", dist)
    margin = min_eig(eye - g)
    kind = "contractive" if margin >= -tol.order else "neither"
    return ColumnClass(g, kind, margin)


def psd_sqrt(A, tol=DEFAULT_TOL):
    """Principal square root of a PSD matrix; eigenvalues in ``[-tol.order, 0)`` clip to 0."""
    w, V = np.linalg.eigh(hermitian_part(A))
    if w[0] < -tol.order:
        raise NotContractive(f"matrix is not positive semidefinite (least eigenvalue {w[0]:.3e})")
    return hermitian_part((V * np.sqrt(np.clip(w, 0.0, None))) @ V.conj().T)


def augment_to_unital(col, tol=DEFAULT_TOL):
    """Append ``(1 - sum a_k* a_k)^{1/2}`` to a contractive column."""
    cls = gram_and_classify(col, tol)
    if cls.kind == "neither":
        raise NotContractive(f"column is not contractive (minEig(1 - gram) = {cls.defect:.3e})")
    return col.append(psd_sqrt(np.eye(col.m) - cls.gram, tol))


def canonical_dilation(col, tol=DEFAULT_TOL):
    """The ``(n+1) m`` square unitary whose last block column is ``(a_1, ..., a_n, 0)``.

    Block ``(i, j)`` is ``delta_ij 1 - a_i a_j*`` for ``i, j <= n``, the last
    block column holds the ``a_i``, the last block row ``-a_j*`` and the corner
    block is zero.
    """
    cls = gram_and_classify(col, tol)
    if cls.kind != "unital":
        raise NotUnital(f"column is not unital (kind={cls.kind}, defect={cls.defect:.3e})")
    n, m = col.n, col.m
    A = col.stacked()
    U = np.zeros(((n + 1) * m, (n + 1) * m), dtype=complex)
    U[: n * m, : n * m] = np.eye(n * m) - A @ A.conj().T
    U[: n * m, n * m:] = A
    U[n * m:, : n * m] = -A.conj().T
    return U


def unitarity_residual(U):
    return fro(U.conj().T @ U - np.eye(U.shape[0]))


def block(M, i, j, m):
    return M[i * m:(i + 1) * m, j * m:(j + 1) * m]


def block_diagonal(A, n, m):
    """Zero every off-diagonal ``m x m`` block of an ``(n m)``-square matrix."""
    A = np.asarray(A)
    mask = np.kron(np.eye(n), np.ones((m, m)))
    return A * mask


def diag_blocks(A, n, m):
    return np.stack([block(A, i, i, m) for i in range(n)])


def block_diag_of(blocks):
    blocks = np.asarray(blocks, dtype=complex)
    n, m = blocks.shape[0], blocks.shape[1]
    out = np.zeros((n * m, n * m), dtype=complex)
    for i in range(n):
        out[i * m:(i + 1) * m, i * m:(i + 1) * m] = blocks[i]
    return out


@dataclass(frozen=True)
class PinchingSystem:
    """Phase data for ``E = diag(theta, theta^2, ..., theta^{n-1}, 1) (x) 1_m``.

    ``E`` is kept as integer exponents; conjugation multiplies block ``(i, j)``
    by ``theta^{k (e_j - e_i)}`` with the exponent reduced mod n before the
    complex exponential is taken.
    """

    n: int
    m: int

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise DimensionMismatch("pinching system needs n >= 1 and m >= 1")

    @property
    def theta(self):
        return np.exp(2j * np.pi / self.n)

    @property
    def exponents(self):
        return np.arange(1, self.n + 1) % self.n

    def _root(self, e):
        return np.exp(2j * np.pi * (np.asarray(e) % self.n) / self.n)

    @property
    def dim(self):
        return self.n * self.m

    def unitary(self):
        """Dense ``E``; for inspection and tests only."""
        return np.kron(np.diag(self._root(self.exponents)), np.eye(self.m))

    def _check(self, A):
        A = np.asarray(A, dtype=complex)
        if A.shape != (self.dim, self.dim):
            raise DimensionMismatch(f"expected a {self.dim}-square matrix, got shape {A.shape}")
        return A

    def _phase(self, k):
        e = self.exponents
        return self._root(k * (e[None, :] - e[:, None]))

    def conjugate(self, A, k):
        """``E^{-k} A E^k``."""
        A = self._check(A)
        return A * np.kron(self._phase(k), np.ones((self.m, self.m)))

    def pinch(self, A):
        """``(1/n) sum_{k=1}^n E^{-k} A E^k``."""
        A = self._check(A)
        factor = sum(self._phase(k) for k in range(1, self.n + 1)) / self.n
        return A * np.kron(factor, np.ones((self.m, self.m)))

    def projection(self, k):
        """``P_k = E^{-k} (P (x) 1_m) E^k`` with ``P`` the all-``1/n`` matrix."""
        base = np.kron(np.full((self.n, self.n), 1.0 / self.n), np.eye(self.m))
        return self.conjugate(base, k)

    def projections(self):
        return [self.projection(k) for k in range(1, self.n + 1)]


def pinching_system(n, m):
    return PinchingSystem(int(n), int(m))


def random_unital_column(n, m, seed):
    """Blocks of a Haar-random isometry ``C^m -> C^{nm}``."""
    rng = np.random.default_rng(seed)
    Z = rng.standard_normal((n * m, m)) + 1j * rng.standard_normal((n * m, m))
    Q, _ = np.linalg.qr(Z)
    return OperatorColumn(Q.reshape(n, m, m))


def random_contractive_column(n, m, seed, shrink: Optional[float] = None):
    """A unital column scaled by a random contraction on the right."""
    rng = np.random.default_rng(seed)
    col = random_unital_column(n, m, rng)
    c = np.diag(rng.uniform(0.0, 1.0, size=m) if shrink is None else np.full(m, shrink))
    W, _ = np.linalg.qr(rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m)))
    contraction = W @ c @ W.conj().T
    return OperatorColumn(col.blocks @ contraction)
