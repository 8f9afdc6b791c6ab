import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from quadhardy.errors import NumericOverflowError, UnsupportedRegimeError, ValidationError
from quadhardy.hamiltonian import (
    AlgebraElement, QuadraticHamiltonian, closed_form_flow, flow, generator, preset,
    sin_over_omega,
)
from quadhardy.symplectic import is_symplectic, random_symmetric, symplectic_form


def test_hamiltonian_validation():
    with pytest.raises(ValidationError):
        QuadraticHamiltonian(np.array([[1.0, 1.0], [0.0, 1.0]]))
    with pytest.raises(ValidationError):
        QuadraticHamiltonian(np.eye(2), hbar=0.0)
    with pytest.raises(ValidationError):
        preset("free", m=-1.0)
    with pytest.raises(ValidationError):
        preset("quartic")


def test_energy_evaluation():
    H = preset("oscillator", m=2.0, omega=[3.0])
    x, p = 0.4, -1.3
    assert H([x, p]) == pytest.approx(0.5 * 2.0 * 9.0 * x * x + p * p / (2 * 2.0))


def test_presets_match_displays():
    np.testing.assert_array_equal(preset("free", m=1.0, n=2).M, np.diag([0.0, 0.0, 1.0, 1.0]))
    np.testing.assert_array_equal(preset("oscillator", m=1.0, omega=[1.0, 2.0]).M,
                                  np.diag([1.0, 4.0, 1.0, 1.0]))
    M = preset("cross_term", m=1.0, omega=2.0, theta=1.0).M
    expected = np.diag([4.0, 4.0, 1.0, 1.0])
    expected[1, 2] = expected[2, 1] = 1.0
    np.testing.assert_array_equal(M, expected)


def test_generators():
    m = 2.0
    X = generator(preset("free", m=m, n=2)).X
    np.testing.assert_array_equal(X, np.block([[np.zeros((2, 2)), np.eye(2) / m], [np.zeros((2, 2))] * 2]))
    X = generator(preset("oscillator", m=m, omega=[1.0, 3.0])).X
    W2 = np.diag([1.0, 9.0])
    np.testing.assert_array_equal(X, np.block([[np.zeros((2, 2)), np.eye(2) / m], [-m * W2, np.zeros((2, 2))]]))
    # cross term: X = J M written out row by row
    m, w, th = 1.5, 2.0, 0.5
    X = generator(preset("cross_term", m=m, omega=w, theta=th)).X
    expected = np.array([
        [0.0, th, 1 / m, 0.0],
        [0.0, 0.0, 0.0, 1 / m],
        [-m * w * w, 0.0, 0.0, 0.0],
        [0.0, -m * w * w, -th, 0.0],
    ])
    np.testing.assert_array_equal(X, expected)


def test_algebra_membership():
    with pytest.raises(ValidationError):
        AlgebraElement(np.eye(2))
    AlgebraElement(symplectic_form(2) @ np.diag([1.0, 2.0, 3.0, 4.0]))


def test_flow_examples():
    H = preset("free", m=2.0, n=2)
    assert np.array_equal(flow(H, 0.0).S.entries, np.eye(4))
    S = flow(H, 3.0).S
    np.testing.assert_allclose(S.B, 1.5 * np.eye(2), atol=1e-15)
    np.testing.assert_allclose(S.A, np.eye(2), atol=1e-15)
    m, w = 1.3, np.array([0.7, 2.1])
    t = 1.7
    S = flow(preset("oscillator", m=m, omega=w), t).S
    np.testing.assert_allclose(S.A, np.diag(np.cos(w * t)), atol=1e-13)
    np.testing.assert_allclose(S.D, np.diag(np.cos(w * t)), atol=1e-13)
    np.testing.assert_allclose(S.B, np.diag(np.sin(w * t) / w) / m, atol=1e-13)
    np.testing.assert_allclose(S.C, -m * np.diag(w * np.sin(w * t)), atol=1e-13)


def test_flow_overflow():
    H = preset("oscillator", omega_sq=[-1.0])
    with pytest.raises(NumericOverflowError):
        flow(H, 1e4)


def test_group_law():
    rng = np.random.default_rng(11)
    for _ in range(20):
        n = rng.integers(1, 4)
        X = AlgebraElement(symplectic_form(n) @ random_symmetric(rng, 2 * n) * 0.3)
        s, t = rng.uniform(-5, 5, size=2)
        lhs = flow(X, s).S.entries @ flow(X, t).S.entries
        rhs = flow(X, s + t).S.entries
        assert np.max(np.abs(lhs - rhs)) <= 1e-8 * max(1.0, np.max(np.abs(rhs)))


def test_symplectic_along_flow():
    rng = np.random.default_rng(5)
    for _ in range(100):
        n = int(rng.integers(1, 4))
        M = random_symmetric(rng, 2 * n)
        M /= np.linalg.norm(M, 2)
        H = QuadraticHamiltonian(M)
        for t in (0.1, 0.5, 1.0, 2.5, 5.0):
            S = flow(H, t).S.entries
            assert is_symplectic(S, 1e-8 * max(1.0, np.max(np.abs(S))) ** 2)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6), st.floats(-4.0, 4.0))
def test_energy_conservation(seed, t):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    A = rng.standard_normal((2 * n, 2 * n))
    M = A @ A.T + 0.1 * np.eye(2 * n)
    M /= np.linalg.norm(M, 2)
    H = QuadraticHamiltonian(M)
    S = flow(H, t).S.entries
    z = rng.standard_normal(2 * n)
    assert abs(H(S @ z) - H(z)) <= 1e-8 * max(H(z), 1e-300) * max(1.0, np.linalg.cond(S))


def test_matches_scipy_expm():
    H = preset("cross_term", m=0.8, omega=1.7, theta=0.6)
    for t in np.linspace(-6, 6, 13):
        ref = scipy.linalg.expm(t * generator(H).X)
        np.testing.assert_allclose(flow(H, t).S.entries, ref, atol=1e-12)


GRID = np.linspace(-4.0, 4.0, 50)


@pytest.mark.parametrize("name,params", [
    ("free", {"m": 0.7, "n": 2}),
    ("oscillator", {"m": 1.3, "omega": [1.0, 2.0, 3.0]}),
    ("oscillator", {"m": 0.5, "omega_sq": [-1.0, 0.25]}),
    ("cross_term", {"m": 1.0, "omega": 2.0, "theta": 1.0}),
    ("cross_term", {"m": 2.0, "omega": 1.0, "theta": -0.4}),
])
def test_closed_form_matches_flow(name, params):
    H = preset(name, **params)
    worst = 0.0
    for t in GRID:
        if abs(t) * np.linalg.norm(generator(H).X, 2) > 20:
            continue
        a = closed_form_flow(name, t, **params).S.entries
        b = flow(H, t).S.entries
        worst = max(worst, np.max(np.abs(a - b)))
    assert worst <= 1e-9


def test_closed_form_examples():
    S = closed_form_flow("oscillator", 1.0, m=1.0, omega=[np.pi]).S
    np.testing.assert_allclose(S.entries, [[-1.0, 0.0], [0.0, -1.0]], atol=1e-15)
    S = closed_form_flow("free", 2.5, m=0.5, n=3).S
    np.testing.assert_array_equal(S.B, 5.0 * np.eye(3))
    # cross term with vanishing coupling reduces to the isotropic oscillator
    m, w, t = 1.2, 1.7, 0.9
    a = closed_form_flow("cross_term", t, m=m, omega=w, theta=0.0).S.entries
    b = closed_form_flow("oscillator", t, m=m, omega=[w, w]).S.entries
    np.testing.assert_allclose(a, b, atol=1e-14)


def test_closed_form_cross_term_regime():
    with pytest.raises(UnsupportedRegimeError):
        closed_form_flow("cross_term", 1.0, m=1.0, omega=1.0, theta=1.5)


def test_sin_over_omega_branches():
    t = 0.8
    assert sin_over_omega(4.0, t) == pytest.approx(np.sin(2 * t) / 2, rel=1e-15)
    assert sin_over_omega(-4.0, t) == pytest.approx(np.sinh(2 * t) / 2, rel=1e-15)
    # series branch is continuous with the closed form
    for w2 in (1e-9, -1e-9, 0.0):
        assert sin_over_omega(w2, t) == pytest.approx(t * (1 - w2 * t * t / 6), rel=1e-15)
    assert sin_over_omega(1e-6, 1.0) == pytest.approx(np.sin(1e-3) / 1e-3, rel=1e-14)
