"""Opportunistic interference alignment on a two-link MIMO interference channel.

Finite-size simulation (primary water-filling, null-space precoding, UPA and
OPA power allocation, a zero-forcing baseline) and the matching large-system
predictions.
"""

__version__ = "0.1.0"

from .errors import OIAError, InvalidSpecError, NumericalError
from .channel import (Dimensions, PowerNoiseConfig, ChannelSet, SortedSvd,
                      db_to_linear, trial_rng, draw_channel, draw_channel_set,
                      sorted_svd, null_space_basis, hermitian_inv_sqrt)
from .primary import (PrimaryTransceiver, WaterfillSolution, primary_transceiver,
                      waterfill, waterfill_batch, used_dimensions,
                      transmit_opportunities, primary_rate)
from .oia import (PrecoderKind, EffectiveCrossChannel, PrecoderSolution,
                  PrimaryInterferenceCov, effective_cross_channel, oia_precoder,
                  zfbf_precoder, primary_interference_cov, verify_ia_condition,
                  kernel_nesting_residual)
from .secondary import (SecondaryNoiseCov, EquivalentChannel, SecondaryPa,
                        cci_covariance, equivalent_channel, secondary_rate, upa, opa)
from .asymptotics import (MpLaw, AsymptoticModel, LimitingPowerDistribution,
                          mp_expectation, asymptotic_waterlevel, asymptotic_m1,
                          asymptotic_S, asymptotic_L2, asymptotic_model,
                          primary_power_distribution, upa_power_distribution,
                          point_mass, stieltjes_g_h, solve_GM1, solve_GM,
                          asymptotic_rate, opportunistic_rate_upa,
                          asymptotic_primary_rate)
