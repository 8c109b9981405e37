"""Monte Carlo coupling-error propagation: SWAP chains versus the bus.

Every gate keeps its calibrated duration while its coupling is off by a
random factor (1 + sigma delta), so gate k applies theta_eff = pi (1 +
sigma_k delta) against a nominal pi.  Errors compound over the 2N-3 gate
chain like a random walk; the three-gate serial bus protocol sees no N
dependence at all.  All operators conserve excitation number, so spectral
norms are taken blockwise per popcount sector.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .dynamics import apply_pair_gate, chain_swap_unitary, pair_gate
from .spectral import PowerLawFit, fit_power_law
from .wstate import ClaimViolation

__all__ = [
    "ErrorScanConfig", "ScalingResult", "unitary_diff_norm",
    "chain_error_sample", "chain_error_scan", "bus_serial_error",
]

_DISTRIBUTIONS = ("rademacher", "uniform")


@dataclass(frozen=True)
class ErrorScanConfig:
    N_list: tuple
    delta: float = 1e-3
    trials: int = 200
    seed: int = 12345
    distribution: str = "rademacher"

    def __post_init__(self):
        object.__setattr__(self, "N_list", tuple(int(n) for n in self.N_list))
        if any(n < 2 for n in self.N_list):
            raise ValueError("chains need N >= 2")
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if self.trials < 1:
            raise ValueError("need at least one trial")
        if self.distribution not in _DISTRIBUTIONS:
            raise ValueError(f"distribution must be one of {_DISTRIBUTIONS}")


@dataclass
class ScalingResult:
    config: ErrorScanConfig
    gates: np.ndarray
    mean_eps: np.ndarray
    stderr: np.ndarray
    fit: PowerLawFit
    large_residual: bool

    @property
    def exponent(self):
        return self.fit.exponent


def _sectors(n):
    pops = _kernels.popcount(np.arange(1 << n, dtype=np.int64))
    return [np.nonzero(pops == k)[0] for k in range(n + 1)]


def unitary_diff_norm(U, V, n_qubits=None):
    """Spectral norm of U - V, blockwise when both conserve popcount."""
    D = U - V
    if n_qubits is None:
        n_qubits = int(round(math.log2(D.shape[0])))
    best = 0.0
    for s in _sectors(n_qubits):
        block = D[np.ix_(s, s)]
        best = max(best, float(np.linalg.svd(block, compute_uv=False)[0]))
    return best


def _draw(rng, K, delta, distribution):
    if distribution == "rademacher":
        return (rng.integers(0, 2, size=K) * 2 - 1) * delta
    return rng.uniform(-1.0, 1.0, size=K) * delta


_perfect_cache = {}


def _perfect_chain(N):
    if N not in _perfect_cache:
        _perfect_cache[N] = chain_swap_unitary(N)
    return _perfect_cache[N]


def chain_error_sample(N, delta, rng, distribution="rademacher"):
    """One realization of the miscalibrated (2N-3)-gate SWAP chain."""
    if N < 2:
        raise ValueError("chains need N >= 2")
    if delta < 0 or distribution not in _DISTRIBUTIONS:
        raise ValueError("need delta >= 0 and a known distribution")
    K = 2 * N - 3
    kicks = _draw(rng, K, delta, distribution)
    Ut = chain_swap_unitary(N, 1.0 + kicks)
    return unitary_diff_norm(Ut, _perfect_chain(N), N)


def chain_error_scan(config):
    """Mean epsilon per N and the log-log fit of epsilon vs gate count.

    Trials use per-point derived seeds (seed, N, trial), so any execution
    order, or a parallel map, reproduces the same numbers bit for bit.
    """
    if len(set(config.N_list)) < 3:
        raise ValueError("need at least 3 distinct chain sizes to fit")
    means = np.empty(len(config.N_list))
    errs = np.empty(len(config.N_list))
    gates = np.array([2 * n - 3 for n in config.N_list], dtype=float)
    for a, N in enumerate(config.N_list):
        eps = np.empty(config.trials)
        for trial in range(config.trials):
            rng = np.random.default_rng([config.seed, N, trial])
            eps[trial] = chain_error_sample(N, config.delta, rng,
                                            config.distribution)
        means[a] = eps.mean()
        errs[a] = eps.std() / math.sqrt(config.trials)
    fit = fit_power_law(gates, means)
    return ScalingResult(config, gates, means, errs, fit,
                         large_residual=fit.log_rms > 0.05)


def bus_serial_error(N_list, delta, trials, seed=12345,
                     distribution="rademacher"):
    """Mean epsilon of the 3-gate serial protocol for each bus size.

    The effective couplings J* differ per N, but a relative miscalibration
    shifts every gate angle by the same factor whatever J* is, so the means
    must agree across N; a spread beyond max/min = 1.05 raises.
    Returns {N: mean epsilon} in input order.
    """
    if delta < 0 or trials < 1 or distribution not in _DISTRIBUTIONS:
        raise ValueError("need delta >= 0, trials >= 1, known distribution")
    nom = np.array([math.pi, math.pi / 2, math.pi])
    pairs = ((1, 0), (0, 2), (1, 0))

    def product(thetas):
        U = np.eye(8, dtype=complex)
        for k in range(3):
            U = apply_pair_gate(U, pair_gate(thetas[k], nom[k]), *pairs[k], 3)
        return U

    perfect = product(nom)
    out = {}
    for N in (int(n) for n in N_list):
        eps = np.empty(trials)
        for trial in range(trials):
            rng = np.random.default_rng([seed, N, trial])
            kicks = _draw(rng, 3, delta, distribution)
            eps[trial] = unitary_diff_norm(product(nom * (1 + kicks)),
                                           perfect, 3)
        out[N] = float(eps.mean())
    if delta > 0 and max(out.values()) > 1.05 * min(out.values()):
        raise ClaimViolation("serial-protocol error varies with N beyond 5%")
    return out
