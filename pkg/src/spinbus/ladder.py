"""Effective exchange between two qubits coupled through a gapped spin ladder.

Second-order perturbation theory in the qubit-ladder exchange ``J0`` maps
the system onto ``J_eff S_A . S_B``.  The same coupling is read off exactly
as the splitting of the two lowest states in the ``S^z = 0`` sector.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse.linalg as spla

from .basis import enumerate_sector
from .errors import CapacityError, ConvergenceError, DomainError
from .models import (
    LadderSpec,
    bare_ladder_hamiltonian,
    heisenberg_ladder_hamiltonian,
    ladder_geometry,
    sector_operator,
    total_spin_squared,
)
from .spectral import dense_spectrum, lowest_eigenpairs

__all__ = [
    "MAX_LADDER_SPINS",
    "MAX_PERTURBATIVE_SITES",
    "EffectiveCouplingReport",
    "GroundSpin",
    "ReducedStateReport",
    "ScalingFit",
    "perturbative_jeff",
    "exact_spin_gap",
    "bare_ladder_gap",
    "lieb_prediction",
    "lieb_ground_spin",
    "reduced_coefficients",
    "low_states",
    "jeff_scaling_fit",
]

#: Qubits plus ladder; 18 spins is L = 9 at most.
MAX_LADDER_SPINS = 18
#: Bare-ladder size for full dense diagonalization.
MAX_PERTURBATIVE_SITES = 14


@dataclass
class EffectiveCouplingReport:
    J_eff: float
    epsilon: float
    method: str
    spec: LadderSpec
    meta: dict = field(default_factory=dict)

    def to_dict(self):
        return {"J_eff": self.J_eff, "epsilon": self.epsilon, "method": self.method, "spec": self.spec.to_dict(), **self.meta}

    def to_json(self, **kw):
        return json.dumps(self.to_dict(), **kw)


@dataclass
class GroundSpin:
    spin: int
    s_squared: float
    ambiguous: bool = False


@dataclass
class ReducedStateReport:
    c00: float
    c10: float
    c11: float
    c1m1: float
    label: str = ""

    def to_dict(self):
        return {"c00": self.c00, "c10": self.c10, "c11": self.c11, "c1-1": self.c1m1, "label": self.label}


@dataclass
class ScalingFit:
    exponent: float
    prefactor: float
    r_squared: float
    L: np.ndarray
    gaps: np.ndarray
    J: float
    J0: float


def _check_capacity(spec):
    if spec.n_sites > MAX_LADDER_SPINS:
        raise CapacityError(
            f"ladder with L = {spec.L} has {spec.n_sites} spins; the cap is {MAX_LADDER_SPINS}"
        )


def _bare_sites(spec):
    geo = ladder_geometry(spec)
    return geo["L"] - 1, geo["R"] - 1


def _reduced_resolvent(H, E_g, g, rhs, tol):
    """``Q (E_g - H)^{-1} Q rhs`` with ``Q = 1 - |g><g|``, by MINRES."""
    rhs = rhs - g * (g @ rhs)
    A = spla.LinearOperator(H.shape, matvec=lambda v: E_g * v - H @ v, dtype=float)
    x, info = spla.minres(A, rhs, rtol=tol, maxiter=20 * H.shape[0])
    if info != 0:
        raise ConvergenceError("reduced resolvent did not converge", float(np.linalg.norm(A @ x - rhs)))
    return x - g * (g @ x)


def perturbative_jeff(spec, method="auto"):
    """``J_eff`` and the energy shift ``epsilon`` to second order in ``J0``.

    With the bare-ladder eigenstates ``|a>`` in the ``S^z = 0`` sector,

        J_eff   = sum_a J0^2 [L(a) R(a)* + R(a) L(a)*] / (E_g - E_a)
        epsilon = sum_a 3 J0^2 [|L(a)|^2 + |R(a)|^2] / (4 (E_g - E_a))

    with ``K(a) = <g| S^z_K |a>`` for the attachment sites ``K = L, R``.
    Only states reachable from the ground state contribute, which selects
    the spin-1 tower automatically.  ``method="dense"`` sums over the full
    spectrum; ``"sparse"`` applies the reduced resolvent to ``S^z_K |g>``
    instead, which reaches larger ladders.  ``"auto"`` picks dense up to
    ``MAX_PERTURBATIVE_SITES`` bare sites.
    """
    n = 2 * spec.n_rungs
    if method == "auto":
        method = "dense" if n <= MAX_PERTURBATIVE_SITES else "sparse"
    if method not in ("dense", "sparse"):
        raise DomainError(f"unknown method {method!r}")
    if method == "dense" and n > MAX_PERTURBATIVE_SITES:
        raise CapacityError(f"bare ladder of {n} sites exceeds the dense limit {MAX_PERTURBATIVE_SITES}")
    if n + 2 > MAX_LADDER_SPINS:
        raise CapacityError(f"bare ladder of {n} sites exceeds the cap {MAX_LADDER_SPINS - 2}")
    sector = enumerate_sector(n, spec.n_rungs)
    H = bare_ladder_hamiltonian(spec, sector)
    l_site, r_site = _bare_sites(spec)
    J0sq = spec.J0**2
    if method == "dense":
        values, vectors = dense_spectrum(H)
        if values.size > 1 and values[1] - values[0] < 1e-9 * max(1.0, abs(values[0])):
            raise DomainError("bare ladder ground state is degenerate")
        g = vectors[:, 0]
        Lm = (vectors.T @ (sector.site_sz(l_site) * g))[1:]
        Rm = (vectors.T @ (sector.site_sz(r_site) * g))[1:]
        denom = values[0] - values[1:]
        J_eff = float(J0sq * np.sum(2 * Lm * Rm / denom))
        eps = float(J0sq * np.sum(3 * (Lm**2 + Rm**2) / (4 * denom)))
        E_g, gap = float(values[0]), float(values[1] - values[0])
    else:
        pairs = lowest_eigenpairs(H, 2, tol=1e-12)
        E_g, gap = float(pairs.values[0]), float(pairs.values[1] - pairs.values[0])
        if gap < 1e-9 * max(1.0, abs(E_g)):
            raise DomainError("bare ladder ground state is degenerate")
        g = pairs.vectors[:, 0]
        M = H.tocsr()
        sl = sector.site_sz(l_site) * g
        sr = sector.site_sz(r_site) * g
        xl = _reduced_resolvent(M, E_g, g, sl, 1e-13)
        xr = _reduced_resolvent(M, E_g, g, sr, 1e-13)
        J_eff = float(2 * J0sq * (sr @ xl))
        eps = float(3 * J0sq * (sl @ xl + sr @ xr) / 4)
    return EffectiveCouplingReport(J_eff, eps, "perturbative", spec, {"ladder_gap": gap, "E_g": E_g})


def low_states(spec, count=4, tol=1e-10):
    """Lowest eigenpairs of the full qubit + ladder system in ``S^z = 0``."""
    _check_capacity(spec)
    sector = enumerate_sector(spec.n_sites, spec.n_sites // 2)
    H = heisenberg_ladder_hamiltonian(spec, sector)
    return sector, lowest_eigenpairs(H, min(count, sector.dim), tol=tol)


def _spin_from_s2(s2):
    return 0.5 * (np.sqrt(1.0 + 4.0 * s2) - 1.0)


def exact_spin_gap(spec, tol=1e-10):
    """Splitting of the two lowest ``S^z = 0`` states of the full system.

    ``|J_eff|`` is the gap; the sign is positive when the lowest state is a
    singlet and negative when it is a triplet.
    """
    sector, pairs = low_states(spec, 4, tol)
    S2 = total_spin_squared(sector)
    g = pairs.vectors[:, 0]
    s2 = float(g @ (S2 @ g))
    spin = int(round(_spin_from_s2(s2)))
    gap = float(pairs.values[1] - pairs.values[0])
    sign = 1.0 if spin == 0 else -1.0
    return EffectiveCouplingReport(
        sign * gap,
        float(pairs.values[0]),
        "exact_gap",
        spec,
        {"gap": gap, "ground_spin": spin, "energies": [float(e) for e in pairs.values]},
    )


def bare_ladder_gap(n_rungs, J=1.0):
    """``E_1 - E_g`` of the ladder alone, from its ``S^z = 0`` sector."""
    spec = LadderSpec(n_rungs, J, 0.0)
    n = 2 * n_rungs
    if n + 2 > MAX_LADDER_SPINS:
        raise CapacityError("ladder too large")
    sector = enumerate_sector(n, n_rungs)
    pairs = lowest_eigenpairs(bare_ladder_hamiltonian(spec, sector), min(3, sector.dim))
    return float(pairs.values[1] - pairs.values[0])


def lieb_prediction(spec):
    """Ground-state spin from the sublattice imbalance of the bipartite lattice."""
    even = spec.n_rungs % 2 == 0
    if spec.geometry == "type_a":
        return 0 if even else 1
    return 1 if even else 0


def lieb_ground_spin(spec, tol=1e-10):
    """Total spin of the ground state, from ``<S^2> = s(s+1)``."""
    if not spec.J0 > 0:
        raise DomainError("the ground spin is only fixed for J0 > 0")
    sector, pairs = low_states(spec, 3, tol)
    S2 = total_spin_squared(sector)
    spins = []
    for cl in pairs.clusters[:1]:
        for i in cl:
            v = pairs.vectors[:, i]
            spins.append(float(v @ (S2 @ v)))
    s2 = spins[0]
    s = _spin_from_s2(s2)
    ambiguous = abs(s - round(s)) > 1e-6 or len({round(_spin_from_s2(x)) for x in spins}) > 1
    return GroundSpin(int(round(s)), s2, ambiguous)


def reduced_coefficients(psi, basis, a=0, b=None, label=""):
    """Weights ``|c_jm|^2`` of the qubit pair (sites ``a``, ``b``) in ``psi``.

    ``|c_11|^2 = |c_1-1|^2 = <1/4 + S^z_a S^z_b>``,
    ``|c_00|^2 = <1/4 - S_a . S_b>`` and ``|c_10|^2`` from completeness.
    """
    if b is None:
        b = basis.n_sites - 1
    if 2 * basis.n_up != basis.n_sites:
        raise DomainError("reduced coefficients are defined in the S^z = 0 sector")
    psi = np.asarray(psi)
    if psi.shape != (basis.dim,):
        raise DomainError("state does not match the basis")
    norm = float(np.vdot(psi, psi).real)
    if abs(norm - 1) > 1e-8:
        raise DomainError("state must be normalized")
    zz = float(np.vdot(psi, basis.site_sz(a) * basis.site_sz(b) * psi).real)
    dot = sector_operator(basis, [(a, b, 0.5, 1.0)])
    sab = float(np.vdot(psi, dot @ psi).real)
    c11 = 0.25 + zz
    c00 = 0.25 - sab
    c10 = 1.0 - 2.0 * c11 - c00
    return ReducedStateReport(c00, c10, c11, c11, label)


def jeff_scaling_fit(L_values, J=20.0, J0=1.0, connection="type_a"):
    """Power-law fit ``gap = A * L^p`` over qubit separations ``L = N + 1``."""
    L_values = sorted(int(L) for L in L_values)
    if len(L_values) < 3:
        raise DomainError("need at least three separations")
    gaps = []
    for L in L_values:
        if L < 2:
            raise DomainError("L must be at least 2")
        gaps.append(exact_spin_gap(LadderSpec(L - 1, J, J0, connection)).meta["gap"])
    x = np.log(L_values)
    y = np.log(gaps)
    p, c = np.polyfit(x, y, 1)
    fit = p * x + c
    ss_res = float(np.sum((y - fit) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return ScalingFit(float(p), float(np.exp(c)), r2, np.array(L_values), np.array(gaps), J, J0)
