"""Fixed-magnetization sectors of a spin-1/2 register.

A configuration is an integer whose bit ``i`` is 1 when site ``i`` (0-based)
carries an up spin.  A sector collects every configuration with the same
number of up spins, stored in ascending bit-pattern order so that matrix
layouts are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .errors import CapacityError, DomainError

__all__ = [
    "MAX_SECTOR_STATES",
    "SpinConfiguration",
    "SectorBasis",
    "enumerate_sector",
    "mirror_permutation",
    "popcount",
]

#: Hard cap on sector size; ~160 MB of int64 states plus index work.
MAX_SECTOR_STATES = 20_000_000

# int64 bit patterns; one bit is left free so shifts never overflow.
_MAX_SITES = 62


def popcount(bits):
    """Number of set bits, elementwise for arrays."""
    return np.bitwise_count(np.asarray(bits, dtype=np.int64))


@dataclass(frozen=True)
class SpinConfiguration:
    """A single basis configuration (bit ``i`` = 1 means site ``i`` is up)."""

    bits: int
    n_sites: int

    def __post_init__(self):
        if self.n_sites < 1:
            raise DomainError("n_sites must be positive")
        if self.bits < 0 or self.bits >> self.n_sites:
            raise DomainError(f"bit pattern {self.bits:#b} does not fit in {self.n_sites} sites")

    @property
    def n_up(self):
        return int(self.bits).bit_count()

    def spins(self):
        """Occupations ``s_1 ... s_N`` as a tuple of 0/1, site 1 first."""
        return tuple((self.bits >> i) & 1 for i in range(self.n_sites))

    def reversed(self):
        """Configuration with the site order reversed."""
        return SpinConfiguration(_reverse_bits(np.int64(self.bits), self.n_sites).item(), self.n_sites)


@dataclass(frozen=True, eq=False)
class SectorBasis:
    """Ordered basis of all configurations with ``n_up`` up spins.

    Attributes
    ----------
    n_sites : int
        Number of spin-1/2 sites.
    n_up : int
        Number of up spins shared by every configuration.
    states : numpy.ndarray
        Strictly increasing int64 bit patterns, length ``C(n_sites, n_up)``.
    """

    n_sites: int
    n_up: int
    states: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.states.setflags(write=False)

    def __len__(self):
        return self.states.shape[0]

    @property
    def dim(self):
        return self.states.shape[0]

    @property
    def sz(self):
        """Total z-magnetization of the sector."""
        return self.n_up - self.n_sites / 2

    def index_of(self, bits):
        """Position of one or many bit patterns; ``-1`` where absent."""
        bits = np.asarray(bits, dtype=np.int64)
        pos = np.searchsorted(self.states, bits)
        pos = np.minimum(pos, self.dim - 1)
        found = self.states[pos] == bits
        out = np.where(found, pos, -1)
        return out.item() if out.ndim == 0 else out

    def configuration(self, i):
        return SpinConfiguration(int(self.states[i]), self.n_sites)

    def occupations(self):
        """``(dim, n_sites)`` array of 0/1 site occupations."""
        shifts = np.arange(self.n_sites, dtype=np.int64)
        return ((self.states[:, None] >> shifts) & 1).astype(np.int8)

    def site_sz(self, site):
        """Diagonal of ``S^z`` on a 0-based site, as +-1/2 per state."""
        return ((self.states >> site) & 1) - 0.5

    def basis_vector(self, bits):
        """Unit vector for a configuration given as an int or an iterable of up-sites (0-based)."""
        if not isinstance(bits, (int, np.integer)):
            bits = sum(1 << int(s) for s in bits)
        i = self.index_of(bits)
        if i < 0:
            raise DomainError(f"configuration {bits:#b} is not in the sector")
        v = np.zeros(self.dim)
        v[i] = 1.0
        return v


def enumerate_sector(n_sites, n_up, *, max_states=MAX_SECTOR_STATES):
    """Build the canonical basis of ``n_up`` up spins on ``n_sites`` sites.

    States are generated by the recursion ``S(n, k) = S(n-1, k) ++ (S(n-1, k-1) | 2**(n-1))``,
    which yields ascending order without sorting.

    Raises
    ------
    DomainError
        If ``n_up`` is outside ``[0, n_sites]``.
    CapacityError
        If the sector holds more than ``max_states`` configurations.
    """
    n_sites, n_up = int(n_sites), int(n_up)
    if n_sites < 1 or n_sites > _MAX_SITES:
        raise DomainError(f"n_sites must be in [1, {_MAX_SITES}], got {n_sites}")
    if not 0 <= n_up <= n_sites:
        raise DomainError(f"n_up must be in [0, {n_sites}], got {n_up}")
    size = comb(n_sites, n_up)
    if size > max_states:
        raise CapacityError(f"sector C({n_sites},{n_up}) = {size} exceeds the cap of {max_states} states")

    # rows[k] holds S(m, k) for the current number of sites m
    rows = [np.zeros(1, dtype=np.int64)] + [np.zeros(0, dtype=np.int64)] * n_up
    for m in range(1, n_sites + 1):
        top = np.int64(1) << (m - 1)
        lo = max(0, n_up - (n_sites - m))
        new = list(rows)
        for k in range(min(m, n_up), lo - 1, -1):
            if k == 0:
                continue
            new[k] = np.concatenate([rows[k], rows[k - 1] | top])
        rows = new
    states = rows[n_up]
    return SectorBasis(n_sites, n_up, states)


def _reverse_bits(states, n_sites):
    states = np.asarray(states, dtype=np.int64)
    out = np.zeros_like(states)
    for i in range(n_sites):
        out |= ((states >> i) & 1) << (n_sites - 1 - i)
    return out


def mirror_permutation(basis):
    """Index permutation induced by reversing the site order.

    Returns an integer array ``perm`` with ``perm[i]`` the position of the
    mirror image of ``basis.states[i]``.  The permutation is an involution.
    """
    return basis.index_of(_reverse_bits(basis.states, basis.n_sites))


def site_permutation(basis, site_map):
    """Index permutation induced by an arbitrary site relabelling.

    ``site_map[i]`` is the new (0-based) position of site ``i``.
    """
    site_map = np.asarray(site_map)
    if sorted(site_map.tolist()) != list(range(basis.n_sites)):
        raise DomainError("site_map must be a permutation of the sites")
    out = np.zeros_like(basis.states)
    for i, j in enumerate(site_map):
        out |= ((basis.states >> i) & 1) << int(j)
    return basis.index_of(out)
