"""Hot kernels: sector enumeration, Hamiltonian assembly, sparse mat-vec.

Every kernel has a numpy implementation (``*_numpy``) and, when numba is
importable, a compiled twin (``*_numba``).  The unsuffixed names dispatch
to the backend chosen in :mod:`spinbus._backend`.  Both variants produce
identical arrays, entry for entry, so results never depend on the backend.
"""

import numpy as np

from ._backend import USE_NUMBA

__all__ = [
    "popcount",
    "sector_basis",
    "heisenberg_entries",
    "csr_matvec",
    "sector_basis_numpy",
    "heisenberg_entries_numpy",
    "coo_matvec_numpy",
]


def popcount(x):
    """Vectorized 64-bit popcount (SWAR); x: int64 ndarray, non-negative."""
    x = x.astype(np.uint64, copy=True)
    x -= (x >> np.uint64(1)) & np.uint64(0x5555555555555555)
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return ((x * np.uint64(0x0101010101010101)) >> np.uint64(56)).astype(np.int64)


# ---------------------------------------------------------------- numpy path

def sector_basis_numpy(n_sites, n_up):
    """All n_sites-bit configurations with exactly n_up set bits, ascending."""
    allstates = np.arange(1 << n_sites, dtype=np.int64)
    return allstates[popcount(allstates) == n_up]


def heisenberg_entries_numpy(states, pairs_i, pairs_j, couplings):
    """COO entries of sum_k J_k s_i(k).s_j(k) restricted to ``states``.

    Exchange convention on the bit basis: parallel pair bits give +J/4 on
    the diagonal, antiparallel give -J/4 plus a J/2 entry flipping both
    bits.  ``states`` must be sorted ascending; flip targets are located by
    binary search so sector-restricted bases work unchanged.
    """
    n_states = states.shape[0]
    diag = np.zeros(n_states)
    rows = [np.arange(n_states, dtype=np.int64)]
    cols = [np.arange(n_states, dtype=np.int64)]
    vals = [diag]
    for i, j, J in zip(pairs_i, pairs_j, couplings):
        bi = (states >> np.int64(i)) & 1
        bj = (states >> np.int64(j)) & 1
        parallel = bi == bj
        diag += np.where(parallel, 0.25 * J, -0.25 * J)
        src = np.nonzero(~parallel)[0]
        targets = states[src] ^ np.int64((1 << i) | (1 << j))
        tgt = np.searchsorted(states, targets)
        rows.append(tgt.astype(np.int64))
        cols.append(src.astype(np.int64))
        vals.append(np.full(src.shape[0], 0.5 * J))
    return np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)


def coo_matvec_numpy(rows, cols, vals, x, dim):
    """y = H x from coalesced real COO triplets; x real or complex."""
    w = vals * x[cols]
    if np.iscomplexobj(x):
        return (np.bincount(rows, weights=w.real, minlength=dim)
                + 1j * np.bincount(rows, weights=w.imag, minlength=dim))
    return np.bincount(rows, weights=w, minlength=dim)


# ---------------------------------------------------------------- numba path

try:
    import numba as nb
    HAVE_NUMBA = True
except ImportError:  # numpy-only install
    HAVE_NUMBA = False

if HAVE_NUMBA:

    @nb.njit(cache=True)
    def sector_basis_numba(n_sites, n_up, n_states):
        out = np.empty(n_states, dtype=np.int64)
        if n_up == 0:
            out[0] = 0
            return out
        v = (1 << n_up) - 1
        last = v << (n_sites - n_up)
        k = 0
        while True:
            out[k] = v
            k += 1
            if v == last:
                break
            # Gosper's hack: next integer with the same popcount
            t = v | (v - 1)
            v = (t + 1) | (((~t & -(~t)) - 1) >> (_trailing_zeros(v) + 1))
        return out

    @nb.njit(cache=True, inline="always")
    def _trailing_zeros(v):
        n = 0
        while v & 1 == 0:
            v >>= 1
            n += 1
        return n

    @nb.njit(cache=True)
    def heisenberg_entries_numba(states, pairs_i, pairs_j, couplings):
        n_states = states.shape[0]
        n_pairs = pairs_i.shape[0]
        cap = n_states * (n_pairs + 1)
        rows = np.empty(cap, dtype=np.int64)
        cols = np.empty(cap, dtype=np.int64)
        vals = np.empty(cap)
        # diagonal block first, accumulated in pair order to match numpy
        for k in range(n_states):
            s = states[k]
            d = 0.0
            for p in range(n_pairs):
                same = ((s >> pairs_i[p]) & 1) == ((s >> pairs_j[p]) & 1)
                d += 0.25 * couplings[p] if same else -0.25 * couplings[p]
            rows[k] = k
            cols[k] = k
            vals[k] = d
        m = n_states
        for p in range(n_pairs):
            mask = (1 << pairs_i[p]) | (1 << pairs_j[p])
            half = 0.5 * couplings[p]
            for k in range(n_states):
                s = states[k]
                if ((s >> pairs_i[p]) & 1) != ((s >> pairs_j[p]) & 1):
                    t = s ^ mask
                    lo, hi = 0, n_states
                    while lo < hi:
                        mid = (lo + hi) >> 1
                        if states[mid] < t:
                            lo = mid + 1
                        else:
                            hi = mid
                    rows[m] = lo
                    cols[m] = k
                    vals[m] = half
                    m += 1
        return rows[:m], cols[:m], vals[:m]

    @nb.njit(cache=True)
    def _csr_matvec_fill(indptr, indices, data, x, y):
        n = indptr.shape[0] - 1
        for i in range(n):
            acc = y[i]  # zero of the right dtype
            for p in range(indptr[i], indptr[i + 1]):
                acc += data[p] * x[indices[p]]
            y[i] = acc

    def csr_matvec_numba(indptr, indices, data, x):
        y = np.zeros(indptr.shape[0] - 1, dtype=x.dtype)
        _csr_matvec_fill(indptr, indices, data, x, y)
        return y


# ---------------------------------------------------------------- dispatch

def sector_basis(n_sites, n_up):
    if USE_NUMBA:
        from math import comb
        return sector_basis_numba(n_sites, n_up, comb(n_sites, n_up))
    return sector_basis_numpy(n_sites, n_up)


def heisenberg_entries(states, pairs_i, pairs_j, couplings):
    pairs_i = np.asarray(pairs_i, dtype=np.int64)
    pairs_j = np.asarray(pairs_j, dtype=np.int64)
    couplings = np.asarray(couplings, dtype=np.float64)
    if USE_NUMBA:
        return heisenberg_entries_numba(states, pairs_i, pairs_j, couplings)
    return heisenberg_entries_numpy(states, pairs_i, pairs_j, couplings)


def csr_matvec(ham, x):
    """Backend-dispatched mat-vec for a SparseHamiltonian-like object."""
    if USE_NUMBA:
        indptr, indices, data = ham.csr()
        return csr_matvec_numba(indptr, indices, data, x)
    return coo_matvec_numpy(ham.rows, ham.cols, ham.vals, x, ham.dim)
