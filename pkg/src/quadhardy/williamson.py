"""
Williamson diagonalisation of positive definite quadratic forms and the
resulting trigonometric closed form of ``exp(t J M)``.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import schur

from .errors import DefinitenessError, UnsupportedRegimeError, ValidationError
from .symplectic import SymplecticMatrix, half_dim, symplectic_form, symplectic_inverse

DEFAULT_TOL_W = 1e-8


@dataclass(frozen=True)
class WilliamsonDecomposition:
    """Symplectic ``S`` and spectrum ``Lambda`` with ``S^T M S = diag(Lambda, Lambda)``.

    Columns of ``S`` are ``e_1..e_n | f_1..f_n``; ``Lambda`` is sorted in
    descending order. ``degenerate`` flags symplectic eigenvalues closer than
    the tolerance used to build the decomposition, in which case the basis
    inside each eigenplane is not unique.
    """

    S: SymplecticMatrix
    Lambda: np.ndarray
    degenerate: bool = False

    @property
    def n(self):
        return self.S.n

    @property
    def e(self):
        return self.S.entries[:, :self.n]

    @property
    def f(self):
        return self.S.entries[:, self.n:]

    def diagonal(self):
        return np.diag(np.concatenate([self.Lambda, self.Lambda]))


def _check_symmetric(M, tol):
    M = np.asarray(M, dtype=float)
    half_dim(M)
    if np.max(np.abs(M - M.T)) > tol * max(1.0, np.max(np.abs(M))):
        raise ValidationError("M is not symmetric")
    return 0.5 * (M + M.T)


def williamson(M, tol_w=DEFAULT_TOL_W):
    """Williamson decomposition of a symmetric positive definite ``M``.

    ``K = M^{1/2} J M^{1/2}`` is skew-symmetric; its real Schur form is a
    direct sum of 2x2 rotation generators whose orthogonal basis, mapped back
    through ``M^{-1/2}`` and scaled by ``Lambda^{1/2}``, gives ``S``.

    Raises
    ------
    DefinitenessError
        If the smallest eigenvalue of ``M`` is not above ``tol_w``.
    """
    M = _check_symmetric(M, tol_w)
    n = half_dim(M)
    w, V = np.linalg.eigh(M)
    if w[0] <= tol_w:
        raise DefinitenessError(f"M is not positive definite (min eigenvalue {w[0]:.3e})")
    root = np.sqrt(w)
    R = (V * root) @ V.T
    Rinv = (V / root) @ V.T

    K = R @ symplectic_form(n) @ R
    K = 0.5 * (K - K.T)
    T, O = schur(K, output="real")

    lambdas = np.empty(n)
    cols_e = np.empty((2 * n, n))
    cols_f = np.empty((2 * n, n))
    for k in range(n):
        i = 2 * k
        a = 0.5 * (T[i, i + 1] - T[i + 1, i])
        u, v = O[:, i], O[:, i + 1]
        if a < 0:
            u, v = v, u
        lambdas[k] = abs(a)
        cols_e[:, k] = u
        cols_f[:, k] = v

    order = np.argsort(-lambdas, kind="stable")
    lambdas = lambdas[order]
    root_lam = np.sqrt(lambdas)
    E = Rinv @ cols_e[:, order] * root_lam
    F = Rinv @ cols_f[:, order] * root_lam

    # enforce sigma(e_j, f_j) = -1, i.e. e_j^T J f_j = 1
    J = symplectic_form(n)
    pair = np.einsum("ij,ik,kj->j", E, J, F)
    scale = 1.0 / np.sqrt(pair)
    E = E * scale
    F = F * scale

    S_mat = np.hstack([E, F])
    S = SymplecticMatrix(S_mat, tol=tol_w * max(1.0, float(np.max(np.abs(S_mat)))) ** 2)
    gaps = np.abs(np.diff(lambdas))
    degenerate = bool(np.any(gaps < tol_w * max(1.0, float(lambdas[0]))))
    return WilliamsonDecomposition(S, lambdas, degenerate)


def exp_from_basis(S, lambdas, t):
    """``exp(tX) = J S^{-T} [[Theta, -Omega], [Omega, Theta]] S^{-1}``.

    ``Theta = diag(sin(lambda_j t))`` and ``Omega = diag(cos(lambda_j t))``;
    ``S`` must be a Williamson basis for the generator's ``M``.
    """
    lambdas = np.asarray(lambdas, dtype=float)
    n = S.n
    Sinv = symplectic_inverse(S).entries
    Theta = np.diag(np.sin(lambdas * t))
    Omega = np.diag(np.cos(lambdas * t))
    middle = np.block([[Theta, -Omega], [Omega, Theta]])
    E = symplectic_form(n) @ Sinv.T @ middle @ Sinv
    return SymplecticMatrix(E, tol=1e-8 * max(1.0, float(np.max(np.abs(E)))) ** 2)


def exp_via_williamson(M, t, tol_w=DEFAULT_TOL_W, decomposition=None):
    """Flow ``exp(t J M)`` of a positive definite ``M`` without a matrix exponential."""
    if decomposition is None:
        decomposition = williamson(M, tol_w)
    return exp_from_basis(decomposition.S, decomposition.Lambda, t)


def _check_cross_regime(m, omega, theta):
    if m <= 0:
        raise UnsupportedRegimeError("mass must be positive")
    if not omega > abs(theta):
        raise UnsupportedRegimeError(
            f"cross-term system needs omega > |theta| (got omega={omega}, theta={theta})")


def cross_term_spectrum(omega, theta):
    """``(sqrt(w(w+theta)), sqrt(w(w-theta)))`` for the cross-term oscillator."""
    return np.sqrt(omega * (omega + theta)), np.sqrt(omega * (omega - theta))


def cross_term_basis(m, omega, theta):
    """Hand-derived symplectic eigenbasis of the 2-D oscillator with ``theta p_1 x_2``.

    Returns
    -------
    e1, f1, e2, f2 : ndarray, shape (4,)
        ``X (e_j +- i f_j) = +- i lambda_j (e_j +- i f_j)`` with
        ``X = J M`` and ``{e_j, f_j}`` a symplectic basis.
    """
    _check_cross_regime(m, omega, theta)
    lam1, lam2 = cross_term_spectrum(omega, theta)
    c1 = np.sqrt(0.5 * m * lam1)
    c2 = np.sqrt(0.5 * m * lam2)
    d1 = np.sqrt(0.5 * m / lam1)
    d2 = np.sqrt(0.5 * m / lam2)
    e1 = c1 * np.array([-1.0 / (m * omega), 0.0, 0.0, 1.0])
    f1 = d1 * np.array([0.0, -1.0 / m, -omega, 0.0])
    e2 = c2 * np.array([-1.0 / (m * omega), 0.0, 0.0, -1.0])
    f2 = d2 * np.array([0.0, 1.0 / m, -omega, 0.0])
    return e1, f1, e2, f2


paper_basis_cross_term = cross_term_basis


def cross_term_decomposition(m, omega, theta):
    """Williamson decomposition assembled from :func:`cross_term_basis`.

    Column order is ``(e1 | e2 | f1 | f2)``, so ``Lambda = (lambda_1, lambda_2)``
    is descending for ``theta >= 0`` and ascending for ``theta < 0``.
    """
    e1, f1, e2, f2 = cross_term_basis(m, omega, theta)
    cols = np.column_stack([e1, e2, f1, f2])
    S = SymplecticMatrix(cols, tol=1e-10 * max(1.0, float(np.max(np.abs(cols)))) ** 2)
    lam = np.array(cross_term_spectrum(omega, theta))
    return WilliamsonDecomposition(S, lam, degenerate=bool(theta == 0))
