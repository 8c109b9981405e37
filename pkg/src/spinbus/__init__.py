"""Exact simulation of a spin-chain quantum bus and its qubit protocols.

A finite antiferromagnetic Heisenberg chain of odd length acts as a shared
coupler for spin qubits: its ground doublet behaves as one collective
spin-1/2 whose exchange with attached qubits is renormalized node by node.
This package computes the chain spectra and effective couplings exactly,
drives the serial and collective gate protocols, prepares W states by
heralded measurement, and propagates coupling-calibration errors in Monte
Carlo, all with a numba-accelerated kernel path and a pure-numpy fallback
(environment variable SPINBUS_NUMBA).
"""

from ._backend import USE_NUMBA, backend_name
from .basis import SpinBasis, Statevector, basis_state, build_basis
from .hamiltonian import (ChainSpec, QubitCoupling, SparseHamiltonian, apply,
                          coupled_hamiltonian, heisenberg_hamiltonian,
                          pair_hamiltonian)
from .spectral import (DENSE_CUTOFF, K_B_MEV_PER_MK, BusManifold,
                       EigenDecomposition, LanczosError, PowerLawFit,
                       adiabatic_bus_bound, bus_manifold, eig_dense,
                       eig_lowest, fit_power_law, gap_formula, gap_physical,
                       mean_odd_coupling)
from .dynamics import (KrylovError, SerialResult, TimeCompare,
                       apply_pair_gate, apply_pair_to_state,
                       chain_swap_unitary, evolve, pair_gate,
                       protocol_time_compare, serial_effective_unitary,
                       serial_protocol, swap_time)
from .angular import (AngularBasisElement, BlockMap, block_map,
                      clebsch_gordan, multiplicity, total_spin_basis)
from .busgate import (BoundViolation, BusGateReport, FactorizationError,
                      MicroscopicGateReport, StarModel, bus_gate,
                      decoupling_time, gate_fidelity, max_gate_size,
                      microscopic_bus_gate, parity_phase_gate, timing_error,
                      timing_fidelity_check, star_hamiltonian)
from .wstate import (ClaimViolation, MeasurementError, ProtocolResult,
                     closed_form_p, measure, protocol_one, protocol_two,
                     sample_measurement, w_state)
from .errormc import (ErrorScanConfig, ScalingResult, bus_serial_error,
                      chain_error_sample, chain_error_scan,
                      unitary_diff_norm)

__version__ = "0.1.0"
