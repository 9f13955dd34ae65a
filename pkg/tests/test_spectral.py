import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kernel_sysid import (
    DimensionError,
    Spectrum,
    eigenvalues,
    is_schur_stable,
    spectral_radius,
    topological_entropy_bowen,
    topological_entropy_paper,
)
from kernel_sysid.spectral import sort_eigenvalues

from conftest import A3, A4B, A6, A7, random_stable


def test_diagonal_spectrum():
    ev = eigenvalues(A4B).eigenvalues
    np.testing.assert_array_equal(ev, [-25, 20, 15, -10])


def test_example6_spectrum():
    ev = eigenvalues(A6).eigenvalues
    np.testing.assert_allclose(ev, [-21.9, 10.4, -1.5, 1.0], atol=1e-6)


def test_rotation():
    t = math.pi / 3
    R = [[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]]
    ev = eigenvalues(R).eigenvalues
    np.testing.assert_allclose(ev, [np.exp(1j * t), np.exp(-1j * t)], atol=1e-10)


def test_sort_rule():
    ev = sort_eigenvalues([0.5, -2, 2, 1j, -1j, 1 + 1j, 1 - 1j, -0.5])
    np.testing.assert_array_equal(ev, [2, -2, 1 + 1j, 1 - 1j, 1j, -1j, 0.5, -0.5])


def test_spectrum_round_trip():
    s = eigenvalues(A7)
    assert Spectrum.from_pairs(s.as_pairs()).eigenvalues.tolist() == s.eigenvalues.tolist()
    assert len(s) == 4 and s.radius == pytest.approx(40.0, rel=1e-12)


def test_backward_error(rng):
    for n in range(1, 11):
        A = rng.standard_normal((n, n)) * 10.0 ** rng.uniform(-2, 2)
        ev, V = np.linalg.eig(A)
        ours = eigenvalues(A).eigenvalues
        # every computed eigenvalue has a small-residual eigenvector
        for lam in ours:
            j = np.argmin(np.abs(ev - lam))
            v = V[:, j]
            assert abs(ev[j] - lam) == 0
            assert np.linalg.norm(A @ v - lam * v) <= 1e-8 * np.linalg.norm(A, 2)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32), n=st.integers(1, 8))
def test_conjugate_pairing(seed, n):
    rng = np.random.Generator(np.random.PCG64(seed))
    ev = eigenvalues(rng.standard_normal((n, n))).eigenvalues
    assert ev.size == n
    cplx = ev[ev.imag != 0]
    assert cplx.size % 2 == 0
    for a, b in zip(cplx[0::2], cplx[1::2]):
        assert a == np.conj(b) and a.imag > 0


def test_radius_and_stability():
    assert spectral_radius(np.zeros((3, 3))) == 0.0
    assert is_schur_stable(np.zeros((3, 3)))
    assert spectral_radius(A3) == pytest.approx(0.8, abs=1e-12)
    assert is_schur_stable(A3, margin=0.1)
    assert not is_schur_stable(A3, margin=0.25)
    assert spectral_radius(A6) == pytest.approx(21.9, abs=1e-9)
    assert not is_schur_stable(A6)


def test_paper_entropy_examples(rng):
    assert topological_entropy_paper(A6) == pytest.approx(34.80, abs=1e-6)
    assert topological_entropy_paper(random_stable(rng, 3)) == 3.0
    # the literal formula counts the two eigenvalues inside the disk as 1 each
    assert topological_entropy_paper(A7) == pytest.approx(57.30, abs=1e-6)


def test_paper_entropy_printed_convention(rng):
    assert topological_entropy_paper(A7, "printed") == pytest.approx(55.30, abs=1e-6)
    assert topological_entropy_paper(A6, "printed") == pytest.approx(34.80, abs=1e-6)
    assert topological_entropy_paper(random_stable(rng, 3), "printed") == 0.0
    with pytest.raises(ValueError):
        topological_entropy_paper(A6, "log")


def test_bowen_examples(rng):
    assert topological_entropy_bowen(random_stable(rng, 4)) == 0.0
    assert topological_entropy_bowen(A6) == pytest.approx(math.log(1.5) + math.log(10.4) + math.log(21.9), abs=1e-10)
    assert topological_entropy_bowen(A6) == pytest.approx(5.8338, abs=1e-4)
    assert topological_entropy_bowen(np.diag([math.e, math.e])) == pytest.approx(2.0, abs=1e-14)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32), n=st.integers(1, 6))
def test_similarity_invariance(seed, n):
    rng = np.random.Generator(np.random.PCG64(seed))
    A = rng.standard_normal((n, n)) * 2
    while True:
        T = rng.standard_normal((n, n)) + 2 * np.eye(n)
        if np.linalg.cond(T) < 1e3:
            break
    B = T @ A @ np.linalg.inv(T)
    assert spectral_radius(B) == pytest.approx(spectral_radius(A), abs=1e-6)
    for f in (topological_entropy_paper, topological_entropy_bowen):
        assert f(B) == pytest.approx(f(A), abs=1e-6)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32), n=st.integers(1, 6), scale=st.floats(0.1, 3))
def test_entropy_bounds(seed, n, scale):
    rng = np.random.Generator(np.random.PCG64(seed))
    A = rng.standard_normal((n, n)) * scale
    r = spectral_radius(A)
    hp, hb = topological_entropy_paper(A), topological_entropy_bowen(A)
    assert hp >= n
    assert (hp == n) == (r <= 1)
    assert (hb == 0) == (r <= 1)
    # direct-evaluation oracle
    mod = np.abs(np.linalg.eigvals(A))
    assert hb == pytest.approx(sum(math.log(m) for m in mod if m > 1), abs=1e-10)


def test_errors():
    with pytest.raises(DimensionError):
        eigenvalues(np.ones((2, 3)))
    with pytest.raises(ValueError):
        eigenvalues([[np.nan]])
