"""
Sampled cross-Wigner distributions, exact Gaussian propagation and a 1-D
quadratic Fourier transform, used to check the covariance property
``W(S_hat u)(z) = W u(S^{-1} z)`` on a grid.

Conventions
-----------
The lattice on each axis is ``x_k = (k - N/2) dx`` with ``dx = extent / N``.
Wigner distributions use the ``hbar``-scaled kernel

    W(f, g)(x, xi) = (2 pi hbar)^{-n} int exp(-i <xi, y> / hbar) f(x + y/2) conj(g(x - y/2)) dy,

so an FFT over the half-lag ``s = y/2`` sampled at ``dx`` gives the frequency
spacing ``dxi = 2 pi hbar / (P * dy)`` with ``dy = 2 dx`` and ``P`` the padded
FFT length.
"""

import struct
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RegularGridInterpolator
from scipy.signal import czt

from .errors import (
    AliasingError, DecayBoundViolation, DimensionError, LatticeError, NotFreeError,
)
from .hamiltonian import flow
from .symplectic import generating_from_free, is_free, symplectic_inverse

EDGE_CELLS = 3
EDGE_ENERGY_TOL = 1e-8


@dataclass(frozen=True)
class GridSpec:
    """Square position lattice, ``samples`` points per axis covering ``[-extent/2, extent/2)``."""

    n: int = 1
    x_extent: float = 12.0
    samples: int = 512
    hbar: float = 1.0

    def __post_init__(self):
        if self.n not in (1, 2):
            raise DimensionError("grid Wigner transforms support n = 1 or 2")
        N = self.samples
        if N < 64 or N & (N - 1):
            raise LatticeError(f"samples per axis must be a power of two >= 64, got {N}")
        if not (self.x_extent > 0 and self.hbar > 0):
            raise LatticeError("extent and hbar must be positive")

    @property
    def dx(self):
        return self.x_extent / self.samples

    @property
    def x(self):
        return (np.arange(self.samples) - self.samples // 2) * self.dx

    @property
    def shape(self):
        return (self.samples,) * self.n

    def mesh(self):
        """Position coordinates as ``n`` arrays of shape ``self.shape``."""
        return np.meshgrid(*([self.x] * self.n), indexing="ij")

    def sample(self, func):
        """Evaluate ``func`` on the lattice (``func`` receives ``n`` coordinate arrays)."""
        return np.asarray(func(*self.mesh()), dtype=complex)


@dataclass(frozen=True)
class WignerGrid:
    """Sampled (cross-)Wigner distribution.

    ``values`` has shape ``(N,)*n + (len(xi),)*n``: position axes first, then
    frequency axes.
    """

    spec: GridSpec
    x: np.ndarray
    xi: np.ndarray
    values: np.ndarray

    @property
    def dxi(self):
        return float(self.xi[1] - self.xi[0])

    def integral(self):
        return self.values.sum() * (self.spec.dx * self.dxi) ** self.spec.n

    def marginal_x(self):
        """``int W dxi``; equals ``|f(x)|^2`` for the auto-Wigner distribution."""
        axes = tuple(range(self.spec.n, 2 * self.spec.n))
        return self.values.sum(axis=axes) * self.dxi ** self.spec.n


def _check_lattice(a, spec, name):
    a = np.asarray(a, dtype=complex)
    if a.shape != spec.shape:
        raise LatticeError(f"{name} has shape {a.shape}, lattice is {spec.shape}")
    return a


def _lag_products_1d(f, g):
    """``P[k, j] = f[k + j] conj(g[k - j])`` for ``j in [-N/2, N/2)``, zero off-lattice."""
    N = f.shape[-1]
    k = np.arange(N)[:, None]
    j = np.arange(-N // 2, N // 2)[None, :]
    ip, im = k + j, k - j
    valid = (ip >= 0) & (ip < N) & (im >= 0) & (im < N)
    fp = np.take(f, np.clip(ip, 0, N - 1), axis=-1)
    gm = np.take(g, np.clip(im, 0, N - 1), axis=-1)
    return np.where(valid, fp * np.conj(gm), 0.0)


def _xi_axis(spec, oversample):
    N = spec.samples
    P = N * oversample
    dxi = np.pi * spec.hbar / (P * spec.dx)
    return (np.arange(P) - P // 2) * dxi


def cross_wigner(f, g, spec, xi_oversample=1, xi_max=None):
    """Cross-Wigner distribution of two sampled functions.

    Parameters
    ----------
    f, g : array_like
        Samples on ``spec``'s lattice, shape ``spec.shape``. Both must be
        negligible near the window edge.
    spec : GridSpec
    xi_oversample : int
        Zero-padding factor on the lag axis; refines the frequency spacing
        without changing the values at shared frequencies.
    xi_max : float, optional
        Keep only frequencies with ``|xi| <= xi_max``.

    Returns
    -------
    WignerGrid
        Real-valued when ``f is g`` (or equal), complex otherwise.
    """
    f = _check_lattice(f, spec, "f")
    g = _check_lattice(g, spec, "g")
    if xi_oversample < 1 or int(xi_oversample) != xi_oversample:
        raise LatticeError("xi_oversample must be a positive integer")
    N = spec.samples
    P = N * int(xi_oversample)
    xi = _xi_axis(spec, int(xi_oversample))
    keep = np.ones(P, dtype=bool) if xi_max is None else np.abs(xi) <= xi_max
    lag_slots = np.arange(-N // 2, N // 2) % P
    norm = (2.0 * spec.dx / (2.0 * np.pi * spec.hbar)) ** spec.n

    if spec.n == 1:
        padded = np.zeros((N, P), dtype=complex)
        padded[:, lag_slots] = _lag_products_1d(f, g)
        vals = np.fft.fftshift(np.fft.fft(padded, axis=1), axes=1)[:, keep]
    else:
        nk = int(keep.sum())
        vals = np.empty((N, N, nk, nk), dtype=complex)
        k = np.arange(N)
        j = np.arange(-N // 2, N // 2)
        i1p, i1m = k[:, None] + j[None, :], k[:, None] - j[None, :]
        ok1 = (i1p >= 0) & (i1p < N) & (i1m >= 0) & (i1m < N)
        i1p, i1m = np.clip(i1p, 0, N - 1), np.clip(i1m, 0, N - 1)
        for k1 in range(N):
            # rows f[k1 + j1, :] and g[k1 - j1, :] for every lag j1
            fr = f[i1p[k1]]
            gr = g[i1m[k1]]
            prod = _lag_products_1d(fr, gr)  # (j1, k2, j2)
            prod = np.where(ok1[k1][:, None, None], prod, 0.0)
            prod = np.moveaxis(prod, 0, 1)  # (k2, j1, j2)
            padded = np.zeros((N, P, P), dtype=complex)
            padded[:, lag_slots[:, None], lag_slots[None, :]] = prod
            spec2 = np.fft.fftshift(np.fft.fft2(padded, axes=(1, 2)), axes=(1, 2))
            vals[k1] = spec2[:, keep][:, :, keep]
    vals = norm * vals
    if f is g or np.array_equal(f, g):
        vals = vals.real
    return WignerGrid(spec, spec.x, xi[keep], vals)


def wigner_decay_bound(u, alpha, spec, K=None, rtol=1e-6, noise_floor=1e-12):
    """Smallest ``kappa`` with ``|W u(x, xi)| <= kappa exp(-2 alpha |x|^2)`` on the grid.

    Points where ``|W u|`` is below ``noise_floor * max|W u|`` are ignored. The
    grid value is compared against the envelope implied by
    ``|u(x)| <= K exp(-alpha |x|^2)``, namely
    ``(2 pi hbar)^{-n} K^2 (2 pi / alpha)^{n/2}``; ``K`` defaults to the
    smallest constant valid on the lattice.

    Raises
    ------
    DecayBoundViolation
        If the grid coefficient exceeds that envelope by more than ``rtol``.
    """
    u = _check_lattice(u, spec, "u")
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    r2 = sum(c**2 for c in spec.mesh())
    absu = np.abs(u)
    if absu.max() == 0.0:
        return 0.0
    if K is None:
        sig = absu > noise_floor * absu.max()
        K = float(np.max(absu[sig] * np.exp(alpha * r2[sig])))

    W = cross_wigner(u, u, spec)
    absw = np.abs(W.values)
    envelope = np.exp(2.0 * alpha * r2)
    envelope = envelope.reshape(envelope.shape + (1,) * spec.n)
    ratio = np.where(absw > noise_floor * absw.max(), absw * envelope, 0.0)
    kappa = float(ratio.max())

    admissible = (2 * np.pi * spec.hbar) ** (-spec.n) * K**2 * (2 * np.pi / alpha) ** (spec.n / 2)
    if kappa > admissible * (1.0 + rtol):
        idx = np.unravel_index(np.argmax(ratio), ratio.shape)
        point = tuple(float(W.x[i]) for i in idx[:spec.n]) + tuple(float(W.xi[i]) for i in idx[spec.n:])
        raise DecayBoundViolation(
            f"kappa {kappa:.6g} exceeds admissible {admissible:.6g} at {point}",
            worst_point=point, ratio=kappa / admissible)
    return kappa


@dataclass(frozen=True)
class GaussianState:
    """Gaussian wave packet described by its Wigner moments.

    ``cov`` is the phase-space covariance of the (normalised) Wigner function
    and ``center`` its mean ``(x0, xi0)``. The wave function is
    ``amplitude * exp(-<(G_r - i G_i) d, d>/2 + i <xi0, x>/hbar)`` with
    ``d = x - x0``, ``G_r = cov_xx^{-1}/2`` and ``G_i = cov_xx^{-1} cov_xp / hbar``;
    this requires a pure state, ``det cov = (hbar/2)^{2n}``.
    """

    center: np.ndarray
    cov: np.ndarray
    amplitude: complex = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        cov = np.array(self.cov, dtype=float)
        center = np.array(self.center, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
            raise DimensionError("cov must be 2n x 2n")
        if center.shape != (cov.shape[0],):
            raise DimensionError("center must have length 2n")
        cov = 0.5 * (cov + cov.T)
        if np.linalg.eigvalsh(cov)[0] <= 0:
            raise ValueError("covariance must be positive definite")
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "center", center)

    @classmethod
    def from_decay(cls, alpha, n=1, hbar=1.0, center=None, amplitude=1.0):
        """State of ``amplitude * exp(-alpha |x - x0|^2)`` (times a plane wave if ``xi0 != 0``)."""
        cov = np.diag(np.concatenate([np.full(n, 1.0 / (4 * alpha)), np.full(n, alpha * hbar**2)]))
        if center is None:
            center = np.zeros(2 * n)
        return cls(center, cov, amplitude, hbar)

    @property
    def n(self):
        return self.cov.shape[0] // 2

    def _gammas(self):
        n = self.n
        sxx = self.cov[:n, :n]
        sxp = self.cov[:n, n:]
        sxx_inv = np.linalg.inv(sxx)
        return 0.5 * sxx_inv, sxx_inv @ sxp / self.hbar

    def is_pure(self, rtol=1e-8):
        target = (0.5 * self.hbar) ** (2 * self.n)
        return abs(np.linalg.det(self.cov) - target) <= rtol * target

    def norm_sq(self):
        gr, _ = self._gammas()
        return abs(self.amplitude) ** 2 * np.pi ** (self.n / 2) / np.sqrt(np.linalg.det(gr))

    def decay_exponent(self):
        """Largest ``beta`` with ``|psi(x)| <= K exp(-beta |x - x0|^2)``."""
        n = self.n
        return 1.0 / (4.0 * float(np.linalg.eigvalsh(self.cov[:n, :n])[-1]))

    def wavefunction(self, *coords):
        if not self.is_pure():
            raise ValueError("wave function is only defined for pure Gaussian states")
        n = self.n
        gr, gi = self._gammas()
        x0, xi0 = self.center[:n], self.center[n:]
        coords = np.broadcast_arrays(*coords)
        d = np.stack([c - x0[i] for i, c in enumerate(coords)], axis=-1)
        x = np.stack(coords, axis=-1)
        quad = np.einsum("...i,ij,...j->...", d, gr - 1j * gi, d)
        return self.amplitude * np.exp(-0.5 * quad + 1j * (x @ xi0) / self.hbar)

    def wigner(self, z):
        """Analytic Wigner distribution at phase-space points ``z`` (shape ``(..., 2n)``)."""
        d = np.asarray(z, dtype=float) - self.center
        inv = np.linalg.inv(self.cov)
        expo = np.einsum("...i,ij,...j->...", d, inv, d)
        pref = self.norm_sq() / ((2 * np.pi) ** self.n * np.sqrt(np.linalg.det(self.cov)))
        return pref * np.exp(-0.5 * expo)


def propagate_gaussian(g, S):
    """Push a Gaussian through ``S``: ``cov -> S cov S^T``, ``center -> S center``, norm kept."""
    S_mat = np.asarray(S, dtype=float)
    if S_mat.shape != g.cov.shape:
        raise DimensionError("symplectic matrix and state dimensions differ")
    cov = S_mat @ g.cov @ S_mat.T
    center = S_mat @ g.center
    out = GaussianState(center, cov, 1.0, g.hbar)
    phase = g.amplitude / abs(g.amplitude) if g.amplitude != 0 else 1.0
    amp = np.sqrt(g.norm_sq() / out.norm_sq()) * phase
    return GaussianState(center, cov, amp, g.hbar)


def _check_edges(u, name):
    energy = np.abs(u) ** 2
    total = energy.sum()
    if total == 0:
        return
    edge = energy[:EDGE_CELLS].sum() + energy[-EDGE_CELLS:].sum()
    if edge > EDGE_ENERGY_TOL * total:
        raise AliasingError(
            f"{name}: fraction {edge / total:.3e} of the energy lies within "
            f"{EDGE_CELLS} cells of the window edge")


def maslov_index(W):
    """Smallest ``m`` in ``0..3`` with ``m pi = arg det L (mod 2 pi)``."""
    return 0 if np.linalg.det(W.L) > 0 else 1


def quadratic_fourier_1d(u0, W, spec, m_index=0):
    """Apply the quadratic Fourier transform of ``W`` to samples of ``u0`` (n = 1).

    ``u(x) = (2 pi i hbar)^{-1/2} |L|^{-1/2} i^m int exp(i W(x, x') / hbar) u0(x') dx'``
    with ``sqrt(i) = exp(i pi/4)``. The kernel factors into an output chirp
    ``exp(i P x^2 / 2hbar)``, an input chirp ``exp(i Q x'^2 / 2hbar)`` and
    ``exp(-i x x' / (hbar L))``, which is evaluated on the lattice with a
    chirp-z transform.

    Raises
    ------
    AliasingError
        If the input or output has more than ``1e-8`` of its energy within
        three cells of the window edge.
    """
    if spec.n != 1 or W.n != 1:
        raise DimensionError("quadratic_fourier_1d handles n = 1 only")
    u0 = _check_lattice(u0, spec, "u0")
    _check_edges(u0, "input")
    hbar = spec.hbar
    P, Q, L = float(W.P[0, 0]), float(W.Q[0, 0]), float(W.L[0, 0])
    x, dx, N = spec.x, spec.dx, spec.samples
    c = N // 2

    v = u0 * np.exp(0.5j * Q * x**2 / hbar)
    a = dx * dx / (hbar * L)
    k = np.arange(N)
    kernel_sum = czt(v, N, np.exp(-1j * a), np.exp(-1j * a * c))
    kernel_sum *= np.exp(1j * a * c * k - 1j * a * c * c)

    pref = (2 * np.pi * hbar) ** -0.5 * np.exp(-0.25j * np.pi) * abs(L) ** -0.5 * 1j ** (m_index % 4)
    u = pref * dx * np.exp(0.5j * P * x**2 / hbar) * kernel_sum
    _check_edges(u, "output")
    return u


def _is_identity(S, tol=1e-12):
    return np.max(np.abs(np.asarray(S) - np.eye(2 * S.n))) <= tol


def propagate_samples(u0, S, spec):
    """Metaplectic image of sampled ``u0`` under a free (or identity) ``S``, up to sign."""
    if _is_identity(S):
        return np.asarray(u0, dtype=complex).copy()
    free, _ = is_free(S)
    if not free:
        raise NotFreeError("flow matrix is not free at this time")
    W = generating_from_free(S)
    return quadratic_fourier_1d(u0, W, spec, maslov_index(W))


def xi_oversample_for(spec):
    """Smallest power-of-two padding giving ``dxi <= dx``."""
    p = 1
    while np.pi * spec.hbar / (p * spec.samples * spec.dx) > spec.dx:
        p *= 2
    return p


def covariance_check(u0, H, t, spec, window=0.5):
    """Max discrepancy between ``W(S_hat u0)`` and ``W u0 o S^{-1}`` on the inner window.

    The left side is the grid Wigner distribution of the propagated samples;
    the right side is the grid Wigner distribution of ``u0`` bilinearly
    interpolated at ``S^{-1} z``. Only ``|x|, |xi| <= window * extent / 2``
    is compared.
    """
    if spec.n != 1 or H.n != 1:
        raise DimensionError("covariance_check handles n = 1 only")
    S = flow(H, t).S
    ut = propagate_samples(u0, S, spec)

    p = xi_oversample_for(spec)
    half = window * spec.x_extent / 2
    lhs = cross_wigner(ut, ut, spec, p, xi_max=spec.x_extent / 2)
    xm, xim = np.meshgrid(lhs.x, lhs.xi, indexing="ij")
    inside = (np.abs(xm) <= half) & (np.abs(xim) <= half)
    z = np.stack([xm[inside], xim[inside]], axis=-1)
    zp = z @ symplectic_inverse(S).entries.T

    reach = max(spec.x_extent / 2, float(np.max(np.abs(zp[:, 1]))) + 1.0)
    rhs_grid = cross_wigner(u0, u0, spec, p, xi_max=reach)
    interp = RegularGridInterpolator((rhs_grid.x, rhs_grid.xi), rhs_grid.values,
                                     method="linear", bounds_error=False, fill_value=0.0)
    return float(np.max(np.abs(lhs.values[inside] - interp(zp))))


def hardy_saturation_probe(alpha, H, T):
    """``(2 hbar)^2 ||B(T)||_op^2 alpha beta(T)`` for the Gaussian ``exp(-alpha |x|^2)``.

    ``beta(T)`` is the exact decay exponent of the evolved packet, read off
    its position covariance. A nonzero solution can never exceed 1 here.
    """
    g0 = GaussianState.from_decay(alpha, n=H.n, hbar=H.hbar)
    S = flow(H, T).S
    gT = propagate_gaussian(g0, S)
    beta = gT.decay_exponent()
    norm_sq = float(np.linalg.svd(S.B, compute_uv=False)[0] ** 2)
    return (2.0 * H.hbar) ** 2 * norm_sq * alpha * beta


# grid dumps ---------------------------------------------------------------

_HEADER = struct.Struct("<qqddqddq")


def write_grid_csv(grid, path):
    """Rows ``x..., xi..., value`` (or ``value_re, value_im`` for complex grids)."""
    n = grid.spec.n
    cplx = np.iscomplexobj(grid.values)
    names = ([f"x{i + 1}" for i in range(n)] if n > 1 else ["x"]) + \
            ([f"xi{i + 1}" for i in range(n)] if n > 1 else ["xi"])
    names += ["value_re", "value_im"] if cplx else ["value"]
    axes = [grid.x] * n + [grid.xi] * n
    mesh = np.meshgrid(*axes, indexing="ij")
    cols = [m.ravel() for m in mesh]
    vals = grid.values.ravel()
    cols += [vals.real, vals.imag] if cplx else [vals]
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(names) + "\n")
        for row in zip(*cols):
            fh.write(",".join(format(float(v), ".17g") for v in row) + "\n")


def write_grid_binary(grid, path):
    """Little-endian header ``n, N, extent, hbar, n_xi, xi_0, dxi, is_complex`` then row-major values."""
    spec = grid.spec
    cplx = np.iscomplexobj(grid.values)
    header = _HEADER.pack(spec.n, spec.samples, spec.x_extent, spec.hbar,
                          len(grid.xi), float(grid.xi[0]), grid.dxi, int(cplx))
    dtype = "<c16" if cplx else "<f8"
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(grid.values, dtype=dtype).tobytes(order="C"))


def read_grid_binary(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    n, N, extent, hbar, n_xi, xi0, dxi, cplx = _HEADER.unpack_from(raw)
    spec = GridSpec(n=n, x_extent=extent, samples=N, hbar=hbar)
    dtype = "<c16" if cplx else "<f8"
    values = np.frombuffer(raw, dtype=dtype, offset=_HEADER.size).reshape((N,) * n + (n_xi,) * n)
    xi = xi0 + dxi * np.arange(n_xi)
    return WignerGrid(spec, spec.x, xi, values.copy())
