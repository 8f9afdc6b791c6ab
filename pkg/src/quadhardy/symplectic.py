"""
Symplectic matrices, their block structure, and free symplectic matrices.

Phase-space vectors are ordered ``z = (x_1..x_n, p_1..p_n)`` and the standard
symplectic matrix is ``J = [[0, I], [-I, 0]]``.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, NotFreeError, NotSymplecticError, SingularMatrixError
from .expm import expm

DEFAULT_TOL = 1e-9
SINGULAR_FLOOR_REL = 1e-10


def symplectic_form(n):
    """Standard symplectic matrix ``J`` of size ``2n``."""
    if n < 1:
        raise DimensionError("half-dimension must be positive")
    I = np.eye(n)
    Z = np.zeros((n, n))
    return np.block([[Z, I], [-I, Z]])


def half_dim(mtx):
    """Return ``n`` for a square ``2n x 2n`` array, raising otherwise."""
    mtx = np.asarray(mtx)
    if mtx.ndim != 2 or mtx.shape[0] != mtx.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {mtx.shape}")
    if mtx.shape[0] % 2 or mtx.shape[0] == 0:
        raise DimensionError(f"expected even dimension, got {mtx.shape[0]}")
    return mtx.shape[0] // 2


def symplectic_residual(mtx):
    """Max-norm of ``S^T J S - J``."""
    mtx = np.asarray(mtx, dtype=float)
    J = symplectic_form(half_dim(mtx))
    return float(np.max(np.abs(mtx.T @ J @ mtx - J)))


def is_symplectic(mtx, tol=DEFAULT_TOL):
    """True iff ``||S^T J S - J||_max <= tol``."""
    return symplectic_residual(mtx) <= tol


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SymplecticMatrix:
    """Validated element of Sp(2n, R).

    Construction checks ``S^T J S = J`` in max-norm against ``tol`` and
    raises :class:`NotSymplecticError` otherwise.
    """

    entries: np.ndarray
    tol: float = DEFAULT_TOL
    n: int = field(init=False)

    def __post_init__(self):
        entries = _readonly(self.entries)
        n = half_dim(entries)
        if not np.all(np.isfinite(entries)):
            raise NotSymplecticError("matrix has non-finite entries")
        res = symplectic_residual(entries)
        if res > self.tol:
            raise NotSymplecticError(
                f"||S^T J S - J||_max = {res:.3e} exceeds tol {self.tol:.3e}")
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "n", n)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    @property
    def A(self):
        return self.entries[:self.n, :self.n]

    @property
    def B(self):
        return self.entries[:self.n, self.n:]

    @property
    def C(self):
        return self.entries[self.n:, :self.n]

    @property
    def D(self):
        return self.entries[self.n:, self.n:]

    def block_residuals(self):
        """Residuals of the block characterisation of Sp(2n).

        Returns the max-norms of ``A^T C - C^T A``, ``B^T D - D^T B`` and
        ``A^T D - C^T B - I``.
        """
        A, B, C, D = self.A, self.B, self.C, self.D
        return (
            float(np.max(np.abs(A.T @ C - C.T @ A))),
            float(np.max(np.abs(B.T @ D - D.T @ B))),
            float(np.max(np.abs(A.T @ D - C.T @ B - np.eye(self.n)))),
        )

    def singular_floor(self):
        """Scale-aware threshold below which ``|det B|`` counts as zero."""
        return SINGULAR_FLOOR_REL * float(np.max(np.abs(self.entries))) ** self.n

    def __matmul__(self, other):
        if isinstance(other, SymplecticMatrix):
            return SymplecticMatrix(self.entries @ other.entries,
                                    tol=max(self.tol, other.tol))
        return self.entries @ np.asarray(other)


def from_blocks(A, B, C, D, tol=DEFAULT_TOL):
    return SymplecticMatrix(np.block([[A, B], [C, D]]), tol=tol)


def symplectic_inverse(S):
    """Inverse via the block formula ``[[D^T, -B^T], [-C^T, A^T]]``."""
    inv = np.block([[S.D.T, -S.B.T], [-S.C.T, S.A.T]])
    return SymplecticMatrix(inv, tol=S.tol)


def is_free(S, singular_floor=None):
    """Test whether ``det B`` is bounded away from zero.

    Returns
    -------
    free : bool
    abs_det_b : float
    """
    if singular_floor is None:
        singular_floor = S.singular_floor()
    d = abs(float(np.linalg.det(S.B)))
    return d > singular_floor, d


@dataclass(frozen=True)
class GeneratingFunction:
    """Quadratic form ``W(x, x') = <Px,x>/2 - <L^{-1}x, x'> + <Qx',x'>/2``."""

    P: np.ndarray
    Q: np.ndarray
    L: np.ndarray
    tol: float = DEFAULT_TOL
    singular_floor: float = 1e-12

    def __post_init__(self):
        P, Q, L = (np.atleast_2d(np.asarray(a, dtype=float)) for a in (self.P, self.Q, self.L))
        n = L.shape[0]
        for name, a in (("P", P), ("Q", Q), ("L", L)):
            if a.shape != (n, n):
                raise DimensionError(f"{name} has shape {a.shape}, expected {(n, n)}")
        for name, a in (("P", P), ("Q", Q)):
            if np.max(np.abs(a - a.T)) > self.tol:
                raise NotSymplecticError(f"{name} is not symmetric")
        if abs(np.linalg.det(L)) <= self.singular_floor:
            raise SingularMatrixError("L is numerically singular")
        for name, a in (("P", P), ("Q", Q), ("L", L)):
            object.__setattr__(self, name, _readonly(a))

    @property
    def n(self):
        return self.L.shape[0]

    def __call__(self, x, xp):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        xp = np.atleast_1d(np.asarray(xp, dtype=float))
        Linv = np.linalg.inv(self.L)
        return 0.5 * x @ self.P @ x - (Linv @ x) @ xp + 0.5 * xp @ self.Q @ xp


def free_matrix_from_generating(W):
    """Free symplectic matrix ``[[LQ, L], [PLQ - L^{-T}, PL]]`` generated by ``W``."""
    P, Q, L = W.P, W.Q, W.L
    Linv_T = np.linalg.inv(L).T
    S = np.block([[L @ Q, L], [P @ L @ Q - Linv_T, P @ L]])
    return SymplecticMatrix(S, tol=W.tol * max(1.0, float(np.max(np.abs(S)))) ** 2)


def generating_from_free(S, singular_floor=None):
    """Generating function of a free symplectic matrix.

    ``P = D B^{-1}``, ``L = B``, ``Q = B^{-1} A``. Symmetry of ``P`` and ``Q``
    follows from the block conditions and is checked to ``10 * S.tol``.
    """
    free, _ = is_free(S, singular_floor)
    if not free:
        raise NotFreeError("S is not free: det B is below the singular floor")
    Binv = np.linalg.inv(S.B)
    P = S.D @ Binv
    Q = Binv @ S.A
    tol = 10 * S.tol
    for name, a in (("D B^-1", P), ("B^-1 A", Q)):
        asym = np.max(np.abs(a - a.T))
        if asym > tol * max(1.0, np.max(np.abs(a))):
            raise NotSymplecticError(f"{name} is not symmetric (asymmetry {asym:.3e})")
    return GeneratingFunction(0.5 * (P + P.T), 0.5 * (Q + Q.T), S.B.copy(), tol=tol,
                              singular_floor=0.0)


def random_symmetric(rng, size):
    G = rng.standard_normal((size, size))
    return 0.5 * (G + G.T)


def random_symplectic(seed, n, scale=1.0):
    """Deterministic random symplectic matrix ``exp(scale * J M)``, ``M`` symmetric Gaussian."""
    if n < 1:
        raise DimensionError("n must be >= 1")
    if scale < 0:
        raise ValueError("scale must be nonnegative")
    rng = np.random.default_rng(seed)
    M = random_symmetric(rng, 2 * n)
    S = expm(scale * symplectic_form(n) @ M)
    return SymplecticMatrix(S, tol=1e-9 * max(1.0, float(np.max(np.abs(S)))) ** 2)
