"""Clebsch-Gordan coefficients, total-spin bases, and block decompositions.

The total-spin basis couples qubits one at a time (1 then 2 then 3 ...);
the degeneracy label lambda ranks the intermediate-spin paths of equal
final j lexicographically.  Any orthonormal convention would give the same
gates; this one pins test output.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "clebsch_gordan", "AngularBasisElement", "total_spin_basis",
    "multiplicity", "BlockMap", "block_map",
]


def _twice(x, what):
    t = 2 * x
    r = round(t)
    if abs(t - r) > 1e-9:
        raise ValueError(f"{what} = {x} is not half-integer")
    return int(r)


def clebsch_gordan(j1, m1, j2, m2, J, M):
    """<j1 m1; j2 m2 | J M> in the Condon-Shortley convention (real).

    Returns 0 for violated selection rules; raises on non-half-integer
    input.  Exact integer factorials keep double precision through j ~ 10.
    """
    tj1, tm1 = _twice(j1, "j1"), _twice(m1, "m1")
    tj2, tm2 = _twice(j2, "j2"), _twice(m2, "m2")
    tJ, tM = _twice(J, "J"), _twice(M, "M")
    for tj, tm in ((tj1, tm1), (tj2, tm2), (tJ, tM)):
        if tj < 0 or abs(tm) > tj or (tj - tm) % 2:
            raise ValueError("m must run over -j..j in integer steps")
    if tm1 + tm2 != tM:
        return 0.0
    if not (abs(tj1 - tj2) <= tJ <= tj1 + tj2) or (tj1 + tj2 + tJ) % 2:
        return 0.0

    f = math.factorial
    # all arguments below are guaranteed integral (in units of twice-spin)
    def fh(t):
        return f(t // 2)

    pref = (tJ + 1) * (
        fh(tj1 + tj2 - tJ) * fh(tj1 - tj2 + tJ) * fh(-tj1 + tj2 + tJ)
        / fh(tj1 + tj2 + tJ + 2)
        * fh(tJ + tM) * fh(tJ - tM)
        * fh(tj1 - tm1) * fh(tj1 + tm1)
        * fh(tj2 - tm2) * fh(tj2 + tm2))

    k_min = max(0, (tj2 - tJ - tm1) // 2, (tj1 + tm2 - tJ) // 2)
    k_max = min((tj1 + tj2 - tJ) // 2, (tj1 - tm1) // 2, (tj2 + tm2) // 2)
    s = 0.0
    for k in range(k_min, k_max + 1):
        term = (f(k)
                * fh(tj1 + tj2 - tJ - 2 * k)
                * fh(tj1 - tm1 - 2 * k)
                * fh(tj2 + tm2 - 2 * k)
                * fh(tJ - tj2 + tm1 + 2 * k)
                * fh(tJ - tj1 - tm2 + 2 * k))
        s += (-1) ** k / term
    return math.sqrt(pref) * s


@dataclass(frozen=True)
class AngularBasisElement:
    """|j, lambda, m> expanded over computational states of n qubits."""
    j: float
    m: float
    lam: int
    vector: np.ndarray

    @property
    def n(self):
        return int(math.log2(self.vector.shape[0]))


@lru_cache(maxsize=32)
def _coupling_paths(n):
    """Sequential-coupling tree; nodes in lexicographic path order.

    Each entry is (path, {m: amplitude vector over 2^k computational states})
    with path the tuple of intermediate total spins after each qubit.
    """
    up = np.array([0.0, 1.0], dtype=complex)    # bit set = spin up
    down = np.array([1.0, 0.0], dtype=complex)
    nodes = [((0.5,), {0.5: up, -0.5: down})]
    for k in range(1, n):
        grown = []
        for path, mvecs in nodes:
            j = path[-1]
            for jn in (j - 0.5, j + 0.5):
                if jn < 0:
                    continue
                new = {}
                for tm in range(-int(2 * jn), int(2 * jn) + 1, 2):
                    mp = tm / 2
                    vec = np.zeros(1 << (k + 1), dtype=complex)
                    for s, bit in ((-0.5, 0), (0.5, 1)):
                        m = mp - s
                        if abs(m) <= j and m in mvecs:
                            c = clebsch_gordan(j, m, 0.5, s, jn, mp)
                            if c:
                                lo = bit << k
                                vec[lo:lo + (1 << k)] += c * mvecs[m]
                    new[mp] = vec
                grown.append((path + (jn,), new))
        nodes = grown
    return tuple(nodes)


def total_spin_basis(n):
    """Complete orthonormal basis of n qubits labeled (j, lambda, m).

    Returned in path order, m ascending inside each (j, lambda) multiplet.
    """
    if n < 1:
        raise ValueError("need at least one qubit")
    lam_count = {}
    out = []
    for path, mvecs in _coupling_paths(n):
        j = path[-1]
        lam = lam_count.get(j, 0)
        lam_count[j] = lam + 1
        for tm in range(-int(2 * j), int(2 * j) + 1, 2):
            m = tm / 2
            out.append(AngularBasisElement(j, m, lam, mvecs[m]))
    return out


def multiplicity(n, j):
    """Number of sequential-coupling paths of n spins-1/2 reaching total j."""
    k = n / 2 - j
    if k < 0 or abs(k - round(k)) > 1e-9:
        return 0
    k = int(round(k))
    second = math.comb(n, k - 1) if k >= 1 else 0
    return math.comb(n, k) - second


@dataclass(frozen=True)
class BlockMap:
    """Invariant 1x1 / 2x2 sectors of one extra spin joined to n qubits.

    The extra (bus) spin sits at bit 0; qubit i occupies bit i.  singles
    holds the stretched states (bus_bit, element) that no flip connects;
    pairs holds ordered tuples (element_m_plus_1, element_m) spanning the
    2x2 block {|0>|j,lam,m+1>, |1>|j,lam,m>}.
    """
    n: int
    singles: tuple
    pairs: tuple

    def basis_matrix(self):
        """Columns: singles first, then each pair contributes two columns."""
        cols = []
        for b, el in self.singles:
            cols.append(_with_bus(el.vector, b))
        for el_up, el_dn in self.pairs:
            cols.append(_with_bus(el_up.vector, 0))
            cols.append(_with_bus(el_dn.vector, 1))
        return np.stack(cols, axis=1)

    def block_slices(self):
        """(start, size) per block, matching basis_matrix column order."""
        out = [(i, 1) for i in range(len(self.singles))]
        base = len(self.singles)
        out.extend((base + 2 * k, 2) for k in range(len(self.pairs)))
        return out


def _with_bus(qubit_vec, bus_bit):
    bus = np.zeros(2, dtype=complex)
    bus[bus_bit] = 1.0
    return np.kron(qubit_vec, bus)  # qubits on high bits, bus at bit 0


def block_map(n):
    elements = total_spin_basis(n)
    by_jlam = {}
    for el in elements:
        by_jlam.setdefault((el.j, el.lam), {})[el.m] = el
    singles = []
    pairs = []
    for (j, lam) in sorted(by_jlam, key=lambda t: (-t[0], t[1])):
        ms = by_jlam[(j, lam)]
        singles.append((1, ms[j]))
        singles.append((0, ms[-j]))
        tm = -int(2 * j)
        while tm < int(2 * j):
            m = tm / 2
            pairs.append((ms[m + 1], ms[m]))
            tm += 2
    return BlockMap(n, tuple(singles), tuple(pairs))
