"""
Quadratic Hamiltonians ``H(z) = <Mz, z>/2``, their generators ``X = J M``
and the classical flow ``t -> exp(tX)``.

Three named systems have analytic flows: the free particle, the anisotropic
harmonic oscillator (squared frequencies may be negative) and the 2-D
oscillator with a ``theta * p_1 * x_2`` cross term.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, UnsupportedRegimeError, ValidationError
from .expm import expm
from .symplectic import SymplecticMatrix, from_blocks, half_dim, symplectic_form
from .williamson import cross_term_decomposition, exp_from_basis

PRESETS = ("free", "oscillator", "cross_term")
SYMMETRY_TOL = 1e-9


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class QuadraticHamiltonian:
    """``H(z) = <Mz, z>/2`` on phase space ``z = (x, p)``.

    ``name`` and ``params`` are set by :func:`preset` so that analytic
    shortcuts can be looked up later; they are informational otherwise.
    """

    M: np.ndarray
    hbar: float = 1.0
    mass: float = 1.0
    name: str = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        M = np.asarray(self.M, dtype=float)
        half_dim(M)
        if not np.all(np.isfinite(M)):
            raise ValidationError("M has non-finite entries")
        asym = float(np.max(np.abs(M - M.T)))
        if asym > SYMMETRY_TOL * max(1.0, float(np.max(np.abs(M)))):
            raise ValidationError(f"M is not symmetric (max asymmetry {asym:.3e})")
        if not self.hbar > 0:
            raise ValidationError("hbar must be positive")
        if not self.mass > 0:
            raise ValidationError("mass must be positive")
        object.__setattr__(self, "M", _readonly(M))

    @property
    def n(self):
        return self.M.shape[0] // 2

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        return 0.5 * np.einsum("...i,ij,...j->...", z, self.M, z)


@dataclass(frozen=True)
class AlgebraElement:
    """Element ``X`` of sp(2n, R), i.e. ``XJ + JX^T = 0``."""

    X: np.ndarray
    tol: float = SYMMETRY_TOL

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        J = symplectic_form(half_dim(X))
        res = float(np.max(np.abs(X @ J + J @ X.T)))
        if res > self.tol * max(1.0, float(np.max(np.abs(X)))):
            raise ValidationError(f"X is not in sp(2n): ||XJ + JX^T|| = {res:.3e}")
        object.__setattr__(self, "X", _readonly(X))

    @property
    def n(self):
        return self.X.shape[0] // 2


@dataclass(frozen=True)
class FlowPoint:
    t: float
    S: SymplecticMatrix


def generator(H):
    """Hamiltonian vector field matrix ``X = J M``."""
    return AlgebraElement(symplectic_form(H.n) @ H.M)


def flow(X, t):
    """``exp(tX)`` by Padé scaling and squaring."""
    if isinstance(X, QuadraticHamiltonian):
        X = generator(X)
    tX = t * X.X
    S = expm(tX)
    scale = max(1.0, float(np.linalg.norm(tX, 1)), float(np.max(np.abs(S))) ** 2)
    return FlowPoint(t, SymplecticMatrix(S, tol=1e-8 * scale))


def _as_list(v):
    return [float(x) for x in np.atleast_1d(v)]


def oscillator_omega_sq(params):
    if "omega_sq" in params and "omega" in params:
        raise ValidationError("give either omega or omega_sq, not both")
    if "omega_sq" in params:
        return np.array(_as_list(params["omega_sq"]))
    if "omega" in params:
        return np.array(_as_list(params["omega"])) ** 2
    raise ValidationError("oscillator preset needs omega or omega_sq")


def preset(name, hbar=1.0, **params):
    """Build one of the named Hamiltonians.

    Parameters
    ----------
    name : {'free', 'oscillator', 'cross_term'}
    hbar : float
    **params
        ``free``: ``m``, ``n``.
        ``oscillator``: ``m`` and ``omega`` (list) or ``omega_sq`` (list,
        entries may be negative).
        ``cross_term``: ``m``, ``omega``, ``theta``.
    """
    m = float(params.get("m", 1.0))
    if not m > 0:
        raise ValidationError("mass must be positive")
    if name == "free":
        n = int(params.get("n", 1))
        if n < 1:
            raise DimensionError("n must be >= 1")
        M = np.diag(np.concatenate([np.zeros(n), np.full(n, 1.0 / m)]))
        stored = {"m": m, "n": n}
    elif name == "oscillator":
        w2 = oscillator_omega_sq(params)
        M = np.diag(np.concatenate([m * w2, np.full(w2.size, 1.0 / m)]))
        stored = {"m": m, "omega_sq": w2.tolist()}
    elif name == "cross_term":
        omega = float(params["omega"])
        theta = float(params.get("theta", 0.0))
        M = np.array([
            [m * omega**2, 0.0, 0.0, 0.0],
            [0.0, m * omega**2, theta, 0.0],
            [0.0, theta, 1.0 / m, 0.0],
            [0.0, 0.0, 0.0, 1.0 / m],
        ])
        stored = {"m": m, "omega": omega, "theta": theta}
    else:
        raise ValidationError(f"unknown preset {name!r}; expected one of {PRESETS}")
    return QuadraticHamiltonian(M, hbar=hbar, mass=m, name=name, params=stored)


def sin_over_omega(omega_sq, t):
    """``sin(w t)/w`` as an even analytic function of ``w**2`` (``sinh`` branch for ``w**2 < 0``)."""
    omega_sq = np.asarray(omega_sq, dtype=float)
    k = np.sqrt(np.abs(omega_sq))
    kt = k * abs(t)
    small = kt < 1e-4
    safe_k = np.where(small, 1.0, k)
    out = np.where(omega_sq >= 0, np.sin(safe_k * t), np.sinh(safe_k * t)) / safe_k
    series = t * (1.0 - omega_sq * t**2 / 6.0 + omega_sq**2 * t**4 / 120.0)
    return np.where(small, series, out)


def cos_omega(omega_sq, t):
    omega_sq = np.asarray(omega_sq, dtype=float)
    k = np.sqrt(np.abs(omega_sq))
    return np.where(omega_sq >= 0, np.cos(k * t), np.cosh(k * t))


def oscillator_blocks(omega_sq, m, t):
    """Analytic ``A, B, C, D`` of the oscillator flow."""
    w2 = np.asarray(omega_sq, dtype=float)
    s = sin_over_omega(w2, t)
    c = cos_omega(w2, t)
    A = np.diag(c)
    B = np.diag(s / m)
    C = np.diag(-m * w2 * s)
    return A, B, C, A.copy()


def closed_form_flow(name, t, **params):
    """Flow of a named Hamiltonian from its analytic expression (no ``expm``).

    The cross-term system uses the trigonometric Williamson formula with the
    hand-derived eigenbasis and needs ``omega > |theta|``.
    """
    m = float(params.get("m", 1.0))
    if name == "free":
        n = int(params.get("n", 1))
        I = np.eye(n)
        S = from_blocks(I, (t / m) * I, np.zeros((n, n)), I)
    elif name == "oscillator":
        w2 = oscillator_omega_sq(params)
        blocks = oscillator_blocks(w2, m, t)
        mat = np.block([[blocks[0], blocks[1]], [blocks[2], blocks[3]]])
        S = SymplecticMatrix(mat, tol=1e-9 * max(1.0, float(np.max(np.abs(mat)))) ** 2)
    elif name == "cross_term":
        omega = float(params["omega"])
        theta = float(params.get("theta", 0.0))
        if not omega > abs(theta):
            raise UnsupportedRegimeError("cross-term closed form needs omega > |theta|")
        dec = cross_term_decomposition(m, omega, theta)
        S = exp_from_basis(dec.S, dec.Lambda, t)
    else:
        raise ValidationError(f"unknown preset {name!r}; expected one of {PRESETS}")
    return FlowPoint(t, S)
