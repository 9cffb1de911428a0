"""Tensor dynamic mode decomposition on third-order tensors under the T-product."""
from .dmd import DmdModel, dmd_fit, dmd_reconstruct, dmd_separate
from .dynsys import (TrajectoryDataset, random_system, random_trajectory, simulate,
                     synth_video)
from .factor import TevdFactors, TsvdFactors, tevd, truncation_error, tsvd, tubal_rank
from .spectral import SpectralStack, dft3, idft3
from .tdmd import (SeparationResult, TdmdModel, identifiability_check,
                   parameter_counts, separate, tdmd_fit, tdmd_reconstruct)
from .tensor_core import (bcirc, concat_mode2, fold, fro_norm, t_identity, tube_norm,
                          un_bcirc, unfold)
from .tprod import (is_t_orthogonal, t_inverse, t_pinv, t_transpose, tprod,
                    tprod_power)

__version__ = "0.1.0"
