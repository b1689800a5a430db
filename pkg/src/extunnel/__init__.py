"""extunnel: time-dependent tunneling probabilities for identical-particle
wave packets.

Core pieces: split-step spectral TDSE propagation (1D and 2D configuration
space, separable or Coulomb-coupled potentials), transfer-matrix scattering
amplitudes, two-particle exchange analysis by independent routes, and
N-particle correlation-matrix probabilities.  The `extunnel` CLI drives
declarative scenario configs and emits CSV.
"""

__version__ = "0.1.0"

from .errors import (BracketError, DegenerateStateError, DomainTooSmallError,
                     InteractionNotFinishedError, ResolutionError,
                     SimulationError, UnsupportedEnergyError)
from .exchange import (BOSON, DISTINGUISHABLE, FERMION, ProbabilityTriple,
                       build_two_particle, limit_probabilities,
                       probabilities_2d, probabilities_analytic)
from .grids import (Field1D, Field2D, Grid1D, half_line_overlap,
                    inner_product, load_field, norm, quadrant_norm,
                    save_field)
from .nparticle import (CorrelationMatrix, brute_force_prob,
                        cascade_bound_check, correlation_matrix,
                        correlation_matrix_kspace, permanent,
                        phase_space_distance, phase_space_sweep,
                        prob_all_right)
from .potentials import (BarrierSpec, CoulombSpec, sample_barrier,
                         sample_coulomb, staircase_profile,
                         total_potential_2d)
from .propagate import (PropagatorConfig, evolve_1d, evolve_2d,
                        split_components)
from .scattering import (Profile, ScatteringAmplitudes, find_resonance,
                         integral_identity_check, monoenergetic_probabilities,
                         overlap_I_rt, packet_coefficients,
                         profile_from_sampled, transfer_matrix,
                         transmission_scan)
from .units import GAAS, Constants, constants_for
from .wavepackets import (WavePacketSpec, gaussian, packet_size,
                          sigma_from_size, spectral_amplitude, synthesize)
