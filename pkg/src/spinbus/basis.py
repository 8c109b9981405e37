"""Computational bases for collections of spin-1/2 sites.

Configurations are bit-encoded integers: bit k is site k (site 0 in the
least significant position) and a set bit means spin-up.  A basis is either
the full 2^n space or the slice with fixed total S_z, in which case the
state list holds exactly the configurations with the matching number of
up-spins, in ascending integer order.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels


@dataclass(frozen=True)
class SpinBasis:
    """Ordered basis of bit-encoded spin configurations.

    Attributes
    ----------
    n_sites : number of spin-1/2 sites.
    sector : total S_z of the slice, or None for the full space.
    states : int64 array of configurations, strictly ascending.
    """

    n_sites: int
    sector: float | None
    states: np.ndarray = field(repr=False)

    @property
    def dim(self):
        return self.states.shape[0]

    def index_of(self, config):
        """Ordinal of a configuration; raises KeyError if absent."""
        pos = int(np.searchsorted(self.states, config))
        if pos == self.dim or self.states[pos] != config:
            raise KeyError(f"configuration {config:#x} not in basis")
        return pos

    def positions_of(self, configs):
        """Vectorized index_of for an array of member configurations."""
        pos = np.searchsorted(self.states, configs)
        if np.any(pos >= self.dim) or np.any(self.states[pos] != configs):
            raise KeyError("configuration not in basis")
        return pos


def build_basis(n_sites, sector=None):
    """Basis of n_sites spins, optionally restricted to total S_z = sector."""
    if n_sites < 1:
        raise ValueError("n_sites must be >= 1")
    if sector is None:
        states = np.arange(1 << n_sites, dtype=np.int64)
        return SpinBasis(n_sites, None, states)
    n_up = sector + n_sites / 2
    if abs(n_up - round(n_up)) > 1e-9 or not 0 <= round(n_up) <= n_sites:
        raise ValueError(
            f"S_z = {sector} is not reachable with {n_sites} spin-1/2 sites"
        )
    states = _kernels.sector_basis(n_sites, int(round(n_up)))
    return SpinBasis(n_sites, sector, states)


@dataclass
class Statevector:
    """Normalized amplitude vector over a SpinBasis."""

    basis: SpinBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (self.basis.dim,):
            raise ValueError("amplitude count does not match basis dimension")

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def overlap(self, other):
        """<self|other>; bases must describe the same space."""
        if self.basis.dim != other.basis.dim:
            raise ValueError("dimension mismatch")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def to_full(self):
        """Embed a sector statevector into the full 2^n space."""
        if self.basis.sector is None:
            return self.amplitudes.copy()
        out = np.zeros(1 << self.basis.n_sites, dtype=complex)
        out[self.basis.states] = self.amplitudes
        return out


def basis_state(basis, config):
    """Computational basis state |config> as a Statevector."""
    amps = np.zeros(basis.dim, dtype=complex)
    amps[basis.index_of(config)] = 1.0
    return Statevector(basis, amps)
