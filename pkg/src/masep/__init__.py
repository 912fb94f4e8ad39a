"""Two-sided multi-species exclusion process with long-range right jumps.

Exact dynamics, the two-site scattering algebra, Bethe amplitudes, and the
contour-integral transition probability, with a uniformization oracle and
a Gillespie sampler for cross-checks.
"""

from .algebra import (AmplitudeVector, LocalMatrix, PoleError, apply_local, build_B, build_B1,
                      build_B2, build_R, s_amp, t_amp)
from .amplitudes import amplitude_column, energy, reduced_word
from .contour import (ContourSpec, QuadratureNotConverged, TransitionQuery, default_contour,
                      evaluate_probability, full_distribution, integrand)
from .model import (MarkovState, Transition, apply_left_jump, apply_right_jump,
                    enumerate_transitions, state, validate_state)
from .montecarlo import SimulationPlan, empirical_distribution, sample_path
from .oracle import (UniformizationParams, explore_reachable, single_particle_closed_form,
                     uniformized_distribution)
from .table import Distribution

__version__ = "0.1.0"
