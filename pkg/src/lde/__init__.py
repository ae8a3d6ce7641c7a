"""Effective probe-probe couplings and long-distance entanglement mediated by gapped spin chains."""

__version__ = "0.1.0"

from .analytic import (CftParams, aklt_chi0_closed, aklt_chi0_integral, cft_chi0,
                       sma_dispersion, sma_structure_factor)
from .effham import EffectiveProbeHamiltonian, build_effective_hamiltonian, validate_against_exact
from .entangle import ProbePairState, entanglement_threshold, negativity, thermal_state
from .lattice import (ChainSpec, CouplingTerm, ProbeSpec, SparseOperator, SpinBasis, build_basis,
                      build_chain_hamiltonian, build_full_hamiltonian, site_operator)
from .response import ResponseValue, chi0_correction_vector, chi0_lehmann
from .solver import GroundState, SpectrumSlice, dense_spectrum, lanczos_ground, solve_shifted
