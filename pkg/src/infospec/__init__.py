"""Error exponents and information spectra for general finite-alphabet sources and channels."""
from ._kernels import BACKEND
from .errors import CapacityError, DomainError, InputError, ModelFormatError, UndefinedPointError
from .models import (Alphabet, ChannelModel, JointSourceModel, ModelReference, SourceModel,
                     binary_symmetric_channel, channel_log_prob, doubly_symmetric_source,
                     identity_channel, independent_uniform_pair, induce_joint, joint_log_prob,
                     marginal_y_log_prob, perfectly_correlated_pair, reference_rates,
                     uniform_source, validate_model)
from .spectrum import (SpectrumCdf, TailProbe, entropy_density, epsilon_at, exact_spectrum,
                       information_density, monte_carlo_spectrum, proof_set_diagnostic)
from .exponents import (BoundReport, ExponentCurve, TiltedJoint, channel_exponent, gallager_e0,
                        j0_derivative, rho_n_channel, rho_n_source, solve_rho0, source_exponent,
                        source_j0, tilted_joint, verify_theorem1, verify_theorem2)
from .codingsim import ChannelSimConfig, SimResult, simulate_channel_code, simulate_slepian_wolf

__version__ = "0.1.0"
