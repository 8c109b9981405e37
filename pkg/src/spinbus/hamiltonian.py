"""Sparse Hamiltonians for spin chains, Zeeman terms, and attached qubits.

All operators here are real symmetric in the bit basis and commute with
total S_z, so they can be assembled either on the full 2^n space or inside
a single S_z sector.  Storage is coalesced COO with real values; a CSR view
is derived lazily for the compiled mat-vec kernel.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .basis import SpinBasis, Statevector, build_basis


@dataclass(frozen=True)
class ChainSpec:
    """An odd-length open Heisenberg chain acting as the bus.

    J_b is either one number (uniform bonds) or a sequence of N-1 per-bond
    values; every bond must be antiferromagnetic (positive).  B is a uniform
    Zeeman field applied to every spin of the system the chain is part of.
    """

    N: int
    J_b: float | tuple = 1.0
    B: float = 0.0

    def __post_init__(self):
        if self.N < 1 or self.N % 2 == 0:
            raise ValueError("bus length N must be odd (even chains have no "
                             "ground doublet)")
        bonds = self.bond_couplings()
        if self.N > 1 and bonds.shape[0] != self.N - 1:
            raise ValueError(f"expected {self.N - 1} bond couplings")
        if np.any(bonds <= 0):
            raise ValueError("bus bonds must be antiferromagnetic (J > 0)")

    def bond_couplings(self):
        if np.isscalar(self.J_b):
            return np.full(max(self.N - 1, 0), float(self.J_b))
        return np.asarray(self.J_b, dtype=float)


@dataclass(frozen=True)
class QubitCoupling:
    """One external qubit exchange-coupled to a bus node.

    node is 1-based.  schedule lists disjoint, ordered (start, end) windows
    during which the coupling is switched on; an empty schedule means the
    coupling is always on.
    """

    node: int
    J: float
    schedule: tuple = ()

    def __post_init__(self):
        last = -np.inf
        for t0, t1 in self.schedule:
            if t0 >= t1 or t0 < last:
                raise ValueError("schedule windows must be ordered and disjoint")
            last = t1

    def active_at(self, t):
        if not self.schedule:
            return True
        return any(t0 <= t < t1 for t0, t1 in self.schedule)


class SparseHamiltonian:
    """Real symmetric operator as coalesced COO triplets."""

    def __init__(self, basis, rows, cols, vals):
        order = np.lexsort((cols, rows))
        rows, cols, vals = rows[order], cols[order], vals[order]
        # coalesce duplicates (e.g. exchange diagonal + Zeeman diagonal)
        key = rows * basis.dim + cols
        first = np.ones(key.shape[0], dtype=bool)
        first[1:] = key[1:] != key[:-1]
        starts = np.nonzero(first)[0]
        rows = rows[starts]
        cols = cols[starts]
        vals = np.add.reduceat(vals, starts) if vals.size else vals
        keep = vals != 0.0
        self.rows = rows[keep]
        self.cols = cols[keep]
        self.vals = vals[keep]
        self.basis = basis
        self._csr = None

    @property
    def dim(self):
        return self.basis.dim

    @property
    def entries(self):
        """(row, col, value) triplets, row-major sorted."""
        return list(zip(self.rows.tolist(), self.cols.tolist(), self.vals.tolist()))

    def csr(self):
        if self._csr is None:
            indptr = np.zeros(self.dim + 1, dtype=np.int64)
            np.add.at(indptr, self.rows + 1, 1)
            np.cumsum(indptr, out=indptr)
            self._csr = (indptr, self.cols.copy(), self.vals.copy())
        return self._csr

    def to_dense(self):
        out = np.zeros((self.dim, self.dim))
        out[self.rows, self.cols] = self.vals
        return out

    def norm_bound(self):
        """Gershgorin upper bound on the spectral norm."""
        return float(np.max(np.bincount(self.rows, weights=np.abs(self.vals),
                                        minlength=self.dim)))

    def matvec(self, x):
        return _kernels.csr_matvec(self, x)


def _zeeman_diag(basis, B):
    sz_total = _kernels.popcount(basis.states) - basis.n_sites / 2
    idx = np.arange(basis.dim, dtype=np.int64)
    return idx, idx, B * sz_total


def pair_hamiltonian(basis, pairs, couplings, B=0.0):
    """sum_k J_k s_i.s_j over site pairs, plus B * total S_z."""
    pairs = [(int(i), int(j)) for i, j in pairs]
    for i, j in pairs:
        if not (0 <= i < basis.n_sites and 0 <= j < basis.n_sites) or i == j:
            raise ValueError(f"site pair ({i}, {j}) out of range")
    if len(couplings) != len(pairs):
        raise ValueError("one coupling constant per pair")
    pi = np.array([p[0] for p in pairs], dtype=np.int64)
    pj = np.array([p[1] for p in pairs], dtype=np.int64)
    rows, cols, vals = _kernels.heisenberg_entries(
        basis.states, pi, pj, np.asarray(couplings, dtype=float))
    if B:
        zr, zc, zv = _zeeman_diag(basis, B)
        rows = np.concatenate([rows, zr])
        cols = np.concatenate([cols, zc])
        vals = np.concatenate([vals, zv])
    return SparseHamiltonian(basis, rows, cols, vals)


def heisenberg_hamiltonian(spec, basis):
    """Open-chain bus Hamiltonian sum_i J_i s_i.s_{i+1} + B sum_i s_iz."""
    if basis.n_sites != spec.N:
        raise ValueError("basis was built for a different site count")
    bonds = [(i, i + 1) for i in range(spec.N - 1)]
    return pair_hamiltonian(basis, bonds, spec.bond_couplings(), B=spec.B)


def coupled_hamiltonian(spec, couplings, t=None, sector=None):
    """Bus chain plus external qubits, as one operator.

    Qubit k of ``couplings`` occupies bit N+k.  Each active coupling
    contributes J s_node.s_qubit; a coupling is active when t is None or
    its schedule covers t.  The Zeeman field of ``spec`` acts on every
    spin, qubits included.  With an empty coupling list this is exactly
    the bare chain Hamiltonian.
    """
    for c in couplings:
        if not 1 <= c.node <= spec.N:
            raise ValueError(f"bus node {c.node} outside chain of length {spec.N}")
    n_sites = spec.N + len(couplings)
    basis = build_basis(n_sites, sector)
    pairs = [(i, i + 1) for i in range(spec.N - 1)]
    vals = list(spec.bond_couplings())
    for k, c in enumerate(couplings):
        if c.J != 0.0 and (t is None or c.active_at(t)):
            pairs.append((c.node - 1, spec.N + k))
            vals.append(c.J)
    return pair_hamiltonian(basis, pairs, vals, B=spec.B)


def apply(H, v):
    """H @ v for a Statevector or a plain amplitude array."""
    if isinstance(v, Statevector):
        if v.basis.dim != H.dim:
            raise ValueError("dimension mismatch")
        return Statevector(v.basis, H.matvec(v.amplitudes))
    v = np.asarray(v)
    if v.shape != (H.dim,):
        raise ValueError("dimension mismatch")
    return H.matvec(v)
