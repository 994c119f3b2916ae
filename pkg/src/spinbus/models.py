"""Hamiltonian builders.

Spin operators follow ``S = sigma/2`` throughout and hbar = 1.  Many-body
models are assembled over a :class:`~spinbus.basis.SectorBasis` from a list
of two-site terms

    t * (S+_i S-_j + S-_i S+_j) + zz * S^z_i S^z_j

plus on-site fields ``h_i S^z_i``; every such term conserves total ``S^z``,
so the matrix never leaves the sector.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from math import sqrt

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .basis import SectorBasis, enumerate_sector
from .errors import DomainError

__all__ = [
    "DENSE_MAX_DIM",
    "CouplingProfile",
    "FieldProfile",
    "LadderSpec",
    "MemoryParams",
    "HamiltonianMatrix",
    "engineered_couplings",
    "parabolic_field",
    "xy_chain_single_excitation",
    "parabolic_chain_single_excitation",
    "ladder_geometry",
    "ladder_bonds",
    "heisenberg_ladder_hamiltonian",
    "bare_ladder_hamiltonian",
    "ring_with_central_spin_hamiltonian",
    "magnon_mode_hamiltonian",
    "sector_operator",
    "total_spin_squared",
]

#: Matrices up to this dimension are stored dense.
DENSE_MAX_DIM = 64


# ---------------------------------------------------------------------------
# Model specifications
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CouplingProfile:
    """Nearest-neighbour XY couplings ``J_1 ... J_{N-1}`` of an ``N``-site chain."""

    N: int
    k: int
    couplings: tuple

    def __post_init__(self):
        if len(self.couplings) != self.N - 1:
            raise DomainError("need N - 1 couplings")
        if any(c <= 0 for c in self.couplings):
            raise DomainError("couplings must be positive")

    def to_dict(self):
        return {"N": self.N, "k": self.k, "couplings": list(self.couplings)}


@dataclass(frozen=True)
class FieldProfile:
    """Parabolic field ``B(i) = 2 B0 (i - N - 1)^2`` on ``2N + 1`` sites (``i`` 1-based)."""

    n_sites: int
    B0: float

    def __post_init__(self):
        if self.n_sites < 1 or self.n_sites % 2 == 0:
            raise DomainError("parabolic field needs an odd number of sites")

    @property
    def values(self):
        half = (self.n_sites - 1) // 2
        i = np.arange(1, self.n_sites + 1)
        return 2.0 * self.B0 * (i - half - 1.0) ** 2

    def to_dict(self):
        return {"n_sites": self.n_sites, "B0": self.B0}


_CONNECTIONS = ("type_a", "type_b", "adjacent", "diagonal")


@dataclass(frozen=True)
class LadderSpec:
    """Two qubits A, B attached to the ends of a ``2 x n_rungs`` Heisenberg ladder.

    ``connection`` is ``"type_a"`` (A and B on the two ends of the same leg)
    or ``"type_b"`` (diagonally opposite ends).  For the two-rung plaquette
    the aliases ``"adjacent"`` and ``"diagonal"`` name the same geometries.
    """

    n_rungs: int
    J: float = 1.0
    J0: float = 0.0
    connection: str = "type_a"

    def __post_init__(self):
        if self.n_rungs < 1:
            raise DomainError("ladder needs at least one rung")
        if not self.J > 0:
            raise DomainError("ladder exchange J must be positive")
        if self.J0 < 0:
            raise DomainError("qubit coupling J0 must be non-negative")
        if self.connection not in _CONNECTIONS:
            raise DomainError(f"connection must be one of {_CONNECTIONS}")
        if self.connection in ("adjacent", "diagonal") and self.n_rungs != 2:
            raise DomainError("'adjacent'/'diagonal' only describe the two-rung plaquette")

    @property
    def n_sites(self):
        return 2 * self.n_rungs + 2

    @property
    def L(self):
        """Qubit separation ``L = N + 1``."""
        return self.n_rungs + 1

    @property
    def geometry(self):
        return {"adjacent": "type_a", "diagonal": "type_b"}.get(self.connection, self.connection)

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class MemoryParams:
    """Electron spin at the centre of a ferromagnetic ring of ``N`` nuclear spins.

    Attributes
    ----------
    N : int
        Ring size.
    J : float
        Ferromagnetic exchange (``-J S_l . S_{l+1}``), ``J > 0``.
    lam : float
        Hyperfine scale; the collective coupling is ``g = lam * sqrt(s / 2N)``.
    s : float
        Spin per ring site (the exact many-body model needs ``s = 1/2``).
    B0 : float
        External field.
    nuclear_zeeman : float
        ``g_n mu_n``; the storage mode frequency is ``omega_N = nuclear_zeeman * B0``.
    detuning : float
        ``Omega - omega_N``.  Zero keeps the electron on resonance.
    sigma : float or None
        Width of a Gaussian hyperfine profile, if one is used.
    """

    N: int
    J: float = 1.0
    lam: float = 1.0
    s: float = 0.5
    B0: float = 0.0
    nuclear_zeeman: float = 1.0
    detuning: float = 0.0
    sigma: float | None = None

    def __post_init__(self):
        if self.N < 2:
            raise DomainError("ring needs N >= 2")
        if not self.J > 0:
            raise DomainError("J must be positive")
        if not self.lam > 0:
            raise DomainError("lam must be positive")
        if not self.s > 0:
            raise DomainError("s must be positive")
        if self.sigma is not None and not self.sigma > 0:
            raise DomainError("sigma must be positive")

    @property
    def g(self):
        return self.lam * sqrt(self.s / (2 * self.N))

    @property
    def omega_N(self):
        return self.nuclear_zeeman * self.B0

    @property
    def Omega(self):
        """Electron level splitting; equals ``omega_N`` unless detuned."""
        return self.omega_N + self.detuning

    @property
    def storage_time(self):
        """``T = (pi/lam) sqrt(N/2s)``, the JC half Rabi period ``pi/(2g)``."""
        return np.pi / self.lam * sqrt(self.N / (2 * self.s))

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True, eq=False)
class HamiltonianMatrix:
    """A Hermitian operator with its basis and provenance.

    ``matrix`` is a dense ``ndarray`` or a CSR matrix.  ``basis`` is the
    sector the rows refer to, or ``None`` for analytic single-particle forms.
    """

    matrix: object = field(repr=False)
    basis: SectorBasis | None = field(default=None, repr=False)
    model_tag: dict = field(default_factory=dict)

    def __post_init__(self):
        shape = self.matrix.shape
        if shape[0] != shape[1]:
            raise DomainError("Hamiltonian must be square")
        if self.basis is not None and self.basis.dim != shape[0]:
            raise DomainError("matrix dimension does not match the basis")

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def is_sparse(self):
        return sp.issparse(self.matrix)

    @property
    def dtype(self):
        return self.matrix.dtype

    def toarray(self):
        return self.matrix.toarray() if self.is_sparse else np.asarray(self.matrix)

    def tocsr(self):
        return self.matrix.tocsr() if self.is_sparse else sp.csr_matrix(self.matrix)

    def norm(self):
        """Frobenius norm (an upper bound on the spectral norm)."""
        if self.is_sparse:
            return float(spla.norm(self.matrix))
        return float(np.linalg.norm(self.matrix))

    def asymmetry(self):
        """``||H - H^dagger|| / ||H||``; zero for a valid Hamiltonian."""
        diff = self.matrix - self.matrix.conj().T
        d = spla.norm(diff) if self.is_sparse else np.linalg.norm(diff)
        n = self.norm()
        return float(d / n) if n > 0 else float(d)

    def matvec(self, v):
        return self.matrix @ v

    def to_json(self):
        """Model description (not the matrix) as a JSON string."""
        return json.dumps({"dim": self.dim, "model": self.model_tag}, sort_keys=True)


def _wrap(matrix, basis, tag):
    if matrix.shape[0] <= DENSE_MAX_DIM:
        matrix = matrix.toarray() if sp.issparse(matrix) else np.asarray(matrix)
    elif not sp.issparse(matrix):
        matrix = sp.csr_matrix(matrix)
    return HamiltonianMatrix(matrix, basis, tag)


# ---------------------------------------------------------------------------
# Single-excitation chains
# ---------------------------------------------------------------------------


def engineered_couplings(N, k=0):
    """Couplings of the ``k``-th perfect-transfer family on ``N`` sites.

    ``J_i = sqrt(i (N - i))`` for even ``i`` and ``sqrt((i + 2k)(N - i + 2k))``
    for odd ``i`` (``i = 1 ... N-1``).  Families with ``k > 0`` exist for
    even ``N`` only.
    """
    N, k = int(N), int(k)
    if N < 2:
        raise DomainError("engineered chain needs N >= 2")
    if k < 0:
        raise DomainError("family index k must be non-negative")
    if k and N % 2:
        # for odd N the two branches swap under i -> N - i, breaking mirror symmetry
        raise DomainError("families with k > 0 need an even chain length")
    couplings = []
    for i in range(1, N):
        if i % 2 == 0:
            couplings.append(sqrt(i * (N - i)))
        else:
            couplings.append(sqrt((i + 2 * k) * (N - i + 2 * k)))
    return CouplingProfile(N, k, tuple(couplings))


def parabolic_field(n_sites, B0):
    return FieldProfile(int(n_sites), float(B0))


def _single_excitation_basis(n):
    # canonical order of the one-up sector is site order, so no lookup is needed
    return enumerate_sector(n, 1) if n <= 62 else None


def xy_chain_single_excitation(profile):
    """Tridiagonal hopping matrix with off-diagonal ``J_i`` and zero diagonal."""
    n = profile.N
    J = np.asarray(profile.couplings, dtype=float)
    H = sp.diags([J, J], [-1, 1], shape=(n, n), format="csr")
    tag = {"model": "xy_chain", "sector": "single_excitation", **profile.to_dict()}
    return _wrap(H, _single_excitation_basis(n), tag)


def parabolic_chain_single_excitation(n_sites, J, field):
    """Hopping ``-J/2`` between neighbours plus on-site energy ``B(i)/2``."""
    if field.n_sites != n_sites:
        raise DomainError(f"field covers {field.n_sites} sites, chain has {n_sites}")
    if not J > 0:
        raise DomainError("J must be positive")
    off = np.full(n_sites - 1, -0.5 * J)
    H = sp.diags([off, field.values / 2.0, off], [-1, 0, 1], shape=(n_sites, n_sites), format="csr")
    tag = {"model": "parabolic_chain", "sector": "single_excitation", "n_sites": n_sites, "J": J, "B0": field.B0}
    return _wrap(H, _single_excitation_basis(n_sites), tag)


# ---------------------------------------------------------------------------
# Many-body sector operators
# ---------------------------------------------------------------------------


def sector_operator(basis, bonds=(), fields=None, constant=0.0):
    """Assemble a spin-conserving operator over ``basis``.

    Parameters
    ----------
    basis : SectorBasis
    bonds : iterable of (i, j, t, zz)
        0-based sites with flip-flop amplitude ``t`` and Ising coefficient ``zz``.
    fields : sequence of float, optional
        Coefficient of ``S^z_i`` per site.
    constant : float
        Added to the diagonal.

    Returns
    -------
    scipy.sparse.csr_matrix
    """
    states = basis.states
    dim = basis.dim
    diag = np.full(dim, float(constant))
    rows, cols, vals = [], [], []
    for i, j, t, zz in bonds:
        if i == j:
            raise DomainError("bond endpoints must differ")
        si = ((states >> i) & 1) - 0.5
        sj = ((states >> j) & 1) - 0.5
        if zz:
            diag += zz * si * sj
        if t:
            mask = si != sj
            src = np.nonzero(mask)[0]
            flipped = states[src] ^ ((np.int64(1) << i) | (np.int64(1) << j))
            dst = basis.index_of(flipped)
            # exchange keeps popcount, so every target is in the sector
            assert np.all(dst >= 0)
            rows.append(dst)
            cols.append(src)
            vals.append(np.full(src.size, float(t)))
    if fields is not None:
        for i, h in enumerate(fields):
            if h:
                diag += h * (((states >> i) & 1) - 0.5)
    rows.append(np.arange(dim))
    cols.append(np.arange(dim))
    vals.append(diag)
    M = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(dim, dim)
    ).tocsr()
    M.sum_duplicates()
    M.eliminate_zeros()
    return M


def heisenberg_bonds(pairs, J):
    """``J S_i . S_j`` for each pair, in ``sector_operator`` bond form."""
    return [(i, j, J / 2.0, J) for i, j in pairs]


def total_spin_squared(basis):
    """``S^2`` of all sites in the sector as a sparse matrix."""
    n = basis.n_sites
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    # S^2 = 3n/4 + 2 sum_{i<j} S_i . S_j
    return sector_operator(basis, heisenberg_bonds(pairs, 2.0), constant=0.75 * n)


# ---------------------------------------------------------------------------
# Spin ladder with end qubits
# ---------------------------------------------------------------------------


def ladder_geometry(spec):
    """Site labels of the qubit + ladder system.

    Site 0 is qubit A, site ``2N + 1`` is qubit B, and ladder site
    ``(leg, rung)`` sits at ``1 + leg * N + rung``.  Returns a dict with the
    rung bonds, leg bonds and the attachment sites ``L``, ``R``.
    """
    N = spec.n_rungs

    def site(leg, rung):
        return 1 + leg * N + rung

    rungs = [(site(0, r), site(1, r)) for r in range(N)]
    legs = [(site(leg, r), site(leg, r + 1)) for leg in (0, 1) for r in range(N - 1)]
    L = site(0, 0)
    R = site(0, N - 1) if spec.geometry == "type_a" else site(1, N - 1)
    return {"A": 0, "B": 2 * N + 1, "L": L, "R": R, "rungs": rungs, "legs": legs, "site": site}


def ladder_bonds(spec):
    geo = ladder_geometry(spec)
    bonds = heisenberg_bonds(geo["rungs"] + geo["legs"], spec.J)
    if spec.J0:
        bonds += heisenberg_bonds([(geo["A"], geo["L"]), (geo["B"], geo["R"])], spec.J0)
    return bonds


def heisenberg_ladder_hamiltonian(spec, sector):
    """``H_M + H_q`` for the ladder with qubits A and B, restricted to ``sector``."""
    if sector.n_sites != spec.n_sites:
        raise DomainError(f"sector has {sector.n_sites} sites, ladder system needs {spec.n_sites}")
    M = sector_operator(sector, ladder_bonds(spec))
    tag = {"model": "ladder", "n_up": sector.n_up, **spec.to_dict()}
    return _wrap(M, sector, tag)


def bare_ladder_hamiltonian(spec, sector):
    """``H_M`` alone on the ``2N`` ladder sites (qubits removed).

    Ladder site ``(leg, rung)`` is relabelled to ``leg * N + rung``.
    """
    N = spec.n_rungs
    if sector.n_sites != 2 * N:
        raise DomainError(f"bare ladder needs a {2 * N}-site sector")
    geo = ladder_geometry(spec)
    pairs = [(i - 1, j - 1) for i, j in geo["rungs"] + geo["legs"]]
    M = sector_operator(sector, heisenberg_bonds(pairs, spec.J))
    tag = {"model": "bare_ladder", "n_up": sector.n_up, "n_rungs": N, "J": spec.J}
    return _wrap(M, sector, tag)


# ---------------------------------------------------------------------------
# Magnon memory
# ---------------------------------------------------------------------------


def ring_with_central_spin_hamiltonian(params, sector, lambda_profile=None):
    """Exact spin model of the storage element.

    Sites ``0 ... N-1`` form the periodic ring, site ``N`` is the electron.
    The operator is

        (Omega/2) sigma^z + omega_N sum S^z_l - J sum S_l . S_{l+1}
        + sum_l (lam_l / 2N) (sigma^+ S^-_l + h.c.)

    with spin-1/2 ring sites.  ``lambda_profile`` defaults to the uniform
    ``lam``.
    """
    N = params.N
    if sector.n_sites != N + 1:
        raise DomainError(f"sector has {sector.n_sites} sites, ring + electron needs {N + 1}")
    lam = np.full(N, params.lam) if lambda_profile is None else np.asarray(lambda_profile, float)
    if lam.shape != (N,):
        raise DomainError("lambda_profile must have one entry per ring site")
    e = N
    # for N = 2 the two ring bonds coincide and the exchange doubles
    ring = [(l, (l + 1) % N) for l in range(N)]
    bonds = heisenberg_bonds(ring, -params.J)
    bonds += [(e, l, lam[l] / (2 * N), 0.0) for l in range(N)]
    fields = [params.omega_N] * N + [params.Omega]
    M = sector_operator(sector, bonds, fields)
    tag = {"model": "ring_central_spin", "n_up": sector.n_up, **params.to_dict()}
    return _wrap(M, sector, tag)


def magnon_mode_hamiltonian(params, lambda_profile=None, chi=None):
    """Single-excitation block of ``H_T + V`` in the magnon-mode basis.

    Basis order: ``|+, vac>, |-, 1_1>, ..., |-, 1_{N-1}>, |-, 1_N>``; the
    diagonal is ``Omega/2`` then ``-Omega/2 + omega_k``.  The storage mode couples with ``g``, mode ``k``
    with ``g |chi_k|``; the phase of ``chi_k`` is absorbed into ``|1_k>``,
    which leaves every quantity built from ``|+, vac>`` and ``|-, 1_N>``
    unchanged and keeps the matrix real.
    """
    from .memory import chi_profile, dispersion

    N = params.N
    if chi is None:
        if lambda_profile is None:
            chi = np.zeros(N - 1)
        else:
            lp = np.asarray(lambda_profile, float)
            if lp.shape != (N,):
                raise DomainError(f"lambda_profile has {lp.size} entries, ring has {N}")
            chi = chi_profile(lp, params.lam).chi
    chi = np.asarray(chi)
    if chi.shape != (N - 1,):
        raise DomainError("need one chi_k per non-storage mode")
    H = np.zeros((N + 1, N + 1))
    H[0, 0] = params.Omega / 2
    ks = np.arange(1, N + 1)
    H[ks, ks] = dispersion(params, ks) - params.Omega / 2
    couplings = params.g * np.concatenate([np.abs(chi), [1.0]])
    H[0, 1:] = couplings
    H[1:, 0] = couplings
    tag = {"model": "magnon_modes", "sector": "single_excitation", **params.to_dict()}
    return _wrap(H, None, tag)
