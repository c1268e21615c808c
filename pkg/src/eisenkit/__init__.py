"""Numerical toolkit for half-integral weight Eisenstein series on Gamma0(4N).

Layers, bottom up: exact character arithmetic (arith), complex special
functions (specfun), group combinatorics (modgroup), the weight-l automorphy
phases and multiplier systems (automorphy), truncated cusp series and
Fourier extraction (eisenstein), character twists and completed series
(lfunc), and the reconstruction-and-certification pipeline (converse).
"""

from .arith import (DirichletCharacter, dual_character, enumerate_characters,
                    epsilon_factor, gauss_sum, kronecker, principal_character)
from .automorphy import (MultiplierSystem, j_factor, r_closed, r_direct,
                         theta_multiplier, theta_series_oracle)
from .converse import (NiceFamilyDataset, build_f, dataset_from_eisenstein,
                       fit_A, mellin_invert, residue_term, validate_nice_family)
from .eisenstein import (EisensteinSeries, FourierExpansion, SpectralContext,
                         fourier_coefficients, scattering_entry, scattering_matrix)
from .lfunc import (CompletedLValue, LambdaData, TwistedExpansion, c_tensor,
                    check_function, h_factor, l_series, lambda_completed, twist,
                    twist_evaluator)
from .modgroup import Cusp, ModularMatrix, ScalingMatrix, coset_reps, cusps, generators, scaling_matrix
from .report import VerificationReport
from .specfun import PrecisionBudget, gamma, half_power, hyp2f1, whittaker_w

__version__ = "0.1.0"
