from math import pi, sqrt

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spinbus.errors import CapacityError, DomainError, RegimeError
from spinbus.memory import (
    ModeCouplings,
    analytic_storage_fidelity,
    chi_profile,
    decay_rate,
    decode,
    dispersion,
    encoding_unitary,
    exact_ring_validation,
    gaussian_lambda_profile,
    simulate_inhomogeneous,
    simulate_storage_map,
    write_mode_table,
)
from spinbus.models import MemoryParams


def test_dispersion_examples():
    p = MemoryParams(8, J=0.7, B0=0.3, nuclear_zeeman=2.0)
    assert dispersion(p, 8) == pytest.approx(0.6)
    assert dispersion(p, 4) == pytest.approx(0.6 + 4 * 0.7 * 0.5)
    w = dispersion(MemoryParams(8, J=1e-300), np.arange(1, 9))
    assert np.ptp(w) < 1e-250
    with pytest.raises(DomainError):
        dispersion(p, 0)
    with pytest.raises(DomainError):
        dispersion(p, 9)


def test_gaussian_profile():
    prof = gaussian_lambda_profile(20, 2.0, 1.5)
    assert prof[0] == pytest.approx(1.5 / (sqrt(2 * pi) * 2.0))
    assert np.all(np.diff(prof) < 0)
    wide = gaussian_lambda_profile(20, 20e3, 1.0)
    assert np.ptp(wide) / wide.max() < 1e-6
    with pytest.raises(DomainError):
        gaussian_lambda_profile(20, 0.0)


def test_uniform_profile_has_no_leakage():
    m = chi_profile(np.full(16, 0.9), 0.9)
    assert m.total_weight() < 1e-20
    assert decay_rate(MemoryParams(16, lam=0.9), m) == pytest.approx(0, abs=1e-20)


def test_chi_trends():
    N = 64
    peaks = [np.abs(chi_profile(gaussian_lambda_profile(N, s)).chi).max() for s in (0.5, 1.0, 2.0, 4.0)]
    assert np.all(np.diff(peaks) < 0)
    absx = np.abs(chi_profile(gaussian_lambda_profile(N, 3.0)).chi)
    k = np.arange(1, N)
    assert absx[0] == pytest.approx(absx.max()) and absx[-1] == pytest.approx(absx.max())
    assert absx[np.abs(k - N // 2) < 3].max() < absx[0]


def test_decay_rate_scalings():
    N = 128
    p = MemoryParams(N, J=0.05)
    m = chi_profile(gaussian_lambda_profile(N, 0.5))
    g1 = decay_rate(p, m)
    assert g1 > 0
    doubled = ModeCouplings(2 * m.chi, m.lambda_profile)
    assert decay_rate(p, doubled) == pytest.approx(4 * g1, rel=1e-12)
    # resonance far above the band
    far = decay_rate(p, m, broadening=1e-4, resonance=100.0)
    assert far < 1e-6 * p.g
    with pytest.raises(DomainError):
        decay_rate(MemoryParams(64), m)


def test_analytic_storage_fidelity():
    g = 0.3
    t = np.linspace(0, 40, 101)
    assert np.allclose(analytic_storage_fidelity(t, 0.0, g), 1.0)
    assert analytic_storage_fidelity(0.0, 0.01, g) == pytest.approx(1.0)
    val = analytic_storage_fidelity(pi / (2 * g), g / 50, g)
    assert abs(val - (1 - pi / 400)) < 1e-3
    with pytest.raises(RegimeError):
        analytic_storage_fidelity(1.0, g, g)


def _random_density(rng, pure):
    v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    v /= np.linalg.norm(v)
    rho = np.outer(v, v.conj())
    if not pure:
        p = rng.uniform(0, 1)
        rho = p * rho + (1 - p) * np.eye(2) / 2
    return rho


def test_storage_map_examples():
    p = MemoryParams(10, lam=0.4)
    diag = simulate_storage_map(p, np.diag([0.3, 0.7]))
    assert np.allclose(diag.w, np.diag([0.3, 0.7]), atol=1e-12)
    full = simulate_storage_map(p, np.diag([0.0, 1.0]))
    assert np.abs(full.w - np.diag([0.0, 1.0])).max() < 1e-10
    half = simulate_storage_map(p, np.full((2, 2), 0.5))
    assert abs(half.w[0, 1] - 0.5 * np.exp(0.5j * pi)) < 1e-10
    assert half.fidelity == pytest.approx(1.0, abs=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.booleans(), st.integers(3, 40))
def test_storage_map_properties(seed, pure, N):
    rho = _random_density(np.random.default_rng(seed), pure)
    r = simulate_storage_map(MemoryParams(N, lam=0.8, J=0.3), rho)
    assert r.residual < 1e-10 and r.decode_residual < 1e-10
    assert abs(np.trace(r.w) - 1) < 1e-12
    ev = np.linalg.eigvalsh(r.w)
    assert ev.min() > -1e-12 and ev.max() < 1 + 1e-12


def test_storage_map_rejects():
    p = MemoryParams(6)
    with pytest.raises(DomainError):
        simulate_storage_map(p, np.eye(2))
    with pytest.raises(DomainError):
        simulate_storage_map(p, np.diag([0.5, 0.5]), gaussian_lambda_profile(6, 1.0))
    with pytest.raises(DomainError):
        simulate_storage_map(MemoryParams(6, B0=1.0), np.diag([0.5, 0.5]))


def test_encoding_is_fixed_unitary():
    W = encoding_unitary()
    assert np.allclose(W @ W.conj().T, np.eye(2))
    rho = np.array([[0.4, 0.1 + 0.2j], [0.1 - 0.2j, 0.6]])
    assert np.allclose(decode(W @ rho @ W.conj().T), rho)


def test_inhomogeneous_examples():
    N = 64
    p = MemoryParams(N, J=0.1)
    t = np.linspace(0, 3 * p.storage_time, 121)
    zero = ModeCouplings(np.zeros(N - 1), np.ones(N))
    assert np.allclose(simulate_inhomogeneous(p, zero, t).values, 1.0)
    weak = chi_profile(gaussian_lambda_profile(N, 2.0))
    tr = simulate_inhomogeneous(p, weak, [p.storage_time])
    assert tr.values[0] > 0.99


def test_ring_validation():
    p = MemoryParams(8, J=1.0, lam=0.1)
    r = exact_ring_validation(p)
    assert r.dispersion_error < 1e-10 and r.storage_residual < 1e-2 and not r.flagged
    assert exact_ring_validation(MemoryParams(2)).flagged
    with pytest.raises(CapacityError):
        exact_ring_validation(MemoryParams(13))
    with pytest.raises(DomainError):
        exact_ring_validation(MemoryParams(6, s=1.0))


def test_mode_table(tmp_path):
    p = MemoryParams(5)
    m = chi_profile(gaussian_lambda_profile(5, 1.0))
    write_mode_table(tmp_path / "modes.csv", p, m)
    lines = (tmp_path / "modes.csv").read_text().splitlines()
    assert lines[0] == "k,omega_k,re_chi,im_chi,abs_chi"
    assert len(lines) == 5
    assert lines[1].startswith("1,")
