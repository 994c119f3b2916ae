import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spinbus.basis import enumerate_sector
from spinbus.errors import CapacityError, DomainError
from spinbus.ladder import (
    bare_ladder_gap,
    exact_spin_gap,
    jeff_scaling_fit,
    lieb_ground_spin,
    lieb_prediction,
    low_states,
    perturbative_jeff,
    reduced_coefficients,
)
from spinbus.models import LadderSpec


def test_plaquette_couplings():
    J0, J = 0.7, 3.0
    assert perturbative_jeff(LadderSpec(2, J, J0, "diagonal")).J_eff == pytest.approx(-(J0**2) / (4 * J), abs=1e-12)
    assert perturbative_jeff(LadderSpec(2, J, J0, "adjacent")).J_eff == pytest.approx(J0**2 / (3 * J), abs=1e-12)


def test_zero_coupling_gives_zero():
    r = perturbative_jeff(LadderSpec(3, 1.0, 0.0))
    assert r.J_eff == 0 and r.epsilon == 0


@pytest.mark.parametrize("N", [2, 3, 5])
@pytest.mark.parametrize("connection", ["type_a", "type_b"])
def test_dense_and_sparse_perturbation_agree(N, connection):
    spec = LadderSpec(N, 10.0, 1.0, connection)
    a = perturbative_jeff(spec, "dense")
    b = perturbative_jeff(spec, "sparse")
    assert b.J_eff == pytest.approx(a.J_eff, rel=1e-9)
    assert b.epsilon == pytest.approx(a.epsilon, rel=1e-9)


def test_perturbative_capacity():
    with pytest.raises(CapacityError):
        perturbative_jeff(LadderSpec(8, 1, 1), "dense")
    with pytest.raises(CapacityError):
        perturbative_jeff(LadderSpec(9, 1, 1))
    with pytest.raises(DomainError):
        perturbative_jeff(LadderSpec(2, 1, 1), "magic")


def test_exact_gap_plaquette():
    r = exact_spin_gap(LadderSpec(2, 40.0, 1.0, "diagonal"))
    assert abs(r.meta["gap"] - 1 / 160) / (1 / 160) < 0.15
    assert r.meta["ground_spin"] == 1 and r.J_eff < 0


def test_exact_gap_vanishes_without_coupling():
    r = exact_spin_gap(LadderSpec(2, 1.0, 0.0))
    assert r.meta["gap"] < 1e-10


def test_capacity_cap():
    with pytest.raises(CapacityError):
        exact_spin_gap(LadderSpec(9, 1, 1))


@pytest.mark.parametrize("N", [2, 3, 4])
@pytest.mark.parametrize("connection", ["type_a", "type_b"])
def test_lieb_rule(N, connection):
    spec = LadderSpec(N, 20.0, 1.0, connection)
    gs = lieb_ground_spin(spec)
    assert not gs.ambiguous
    assert gs.spin == lieb_prediction(spec)
    assert exact_spin_gap(spec).meta["ground_spin"] == gs.spin


def test_lieb_needs_coupling():
    with pytest.raises(DomainError):
        lieb_ground_spin(LadderSpec(2, 1, 0))


@pytest.mark.parametrize("N", [2, 3, 4, 5])
def test_bare_ladder_has_gap(N):
    assert bare_ladder_gap(N, 1.0) > 0.3


def test_gap_scales_as_j0_squared():
    spec = lambda J0: LadderSpec(3, 20.0, J0, "type_b")
    g1 = exact_spin_gap(spec(0.5)).meta["gap"]
    g2 = exact_spin_gap(spec(1.0)).meta["gap"]
    assert g2 / g1 == pytest.approx(4.0, rel=0.10)


def test_reduced_coefficients_singlet_product():
    # singlet on (A, B) = sites 0 and 3, anything on sites 1, 2
    b = enumerate_sector(4, 2)
    psi = np.zeros(b.dim)
    psi[b.index_of(0b0011)] = 1 / np.sqrt(2)  # A up, site 1 up
    psi[b.index_of(0b1010)] = -1 / np.sqrt(2)  # B up, site 1 up
    r = reduced_coefficients(psi, b)
    assert r.c00 == pytest.approx(1) and r.c10 == pytest.approx(0, abs=1e-14) and r.c11 == pytest.approx(0)


def test_reduced_coefficients_rejects_bad_input():
    b = enumerate_sector(4, 3)
    with pytest.raises(DomainError):
        reduced_coefficients(np.ones(b.dim) / 2, b)
    b = enumerate_sector(4, 2)
    with pytest.raises(DomainError):
        reduced_coefficients(np.ones(b.dim), b)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_reduced_coefficients_complete(seed):
    b = enumerate_sector(6, 3)
    psi = np.random.default_rng(seed).standard_normal(b.dim)
    psi /= np.linalg.norm(psi)
    r = reduced_coefficients(psi, b)
    assert 2 * r.c11 + r.c00 + r.c10 == pytest.approx(1, abs=1e-10)
    assert min(r.c00, r.c10, r.c11) > -1e-12


def test_low_pair_is_singlet_and_triplet():
    for N in (3, 4):
        for connection in ("type_a", "type_b"):
            spec = LadderSpec(N, 20.0, 1.0, connection)
            sector, pairs = low_states(spec, 2)
            r0 = reduced_coefficients(pairs.vectors[:, 0], sector)
            r1 = reduced_coefficients(pairs.vectors[:, 1], sector)
            singlet, triplet = (r0, r1) if lieb_prediction(spec) == 0 else (r1, r0)
            assert singlet.c00 > 0.9 and triplet.c10 > 0.9


def test_perturbative_and_exact_agree_at_weak_coupling():
    for N in (3, 4):
        spec = LadderSpec(N, 20.0, 1.0)
        ex = exact_spin_gap(spec).J_eff
        pt = perturbative_jeff(spec).J_eff
        assert np.sign(ex) == np.sign(pt)
        assert abs(ex - pt) / abs(pt) < 0.1


def test_scaling_fit_structure():
    f = jeff_scaling_fit([3, 4, 5], 20.0, 1.0, "type_b")
    assert f.exponent < 0 and 0 < f.r_squared <= 1
    assert f.gaps.shape == (3,)
    with pytest.raises(DomainError):
        jeff_scaling_fit([3, 4])
