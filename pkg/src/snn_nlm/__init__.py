"""Patch-based image denoising with statistical neighbor selection.

Non-Local Means averages similar patches gathered in a search window.
Selecting the nearest patches biases the average toward the noisy
reference (neighbors tend to share its noise); this package also offers
selection centered on the expected noisy-replica distance, which trades
that bias for a small variance increase and removes noise markedly
better with few neighbors.  The ``toymodel`` module quantifies the
trade-off analytically for single-pixel patches, with Monte-Carlo
validation.
"""

from .core import NlmParams, PatchRef, pad_mirror, patch_sq_distance
from .filtering import PatchEstimate, denoise_image, denoise_patch, nlm_weight
from .metrics import QualityReport, psnr, ssim
from .noise import (
    NoiseSpec,
    RgbSigma,
    add_white_noise,
    colored_noise_pipeline,
    demosaic_malvar,
    mosaic_bayer,
    propagate_sigma_rgb,
)
from .search import NeighborSet, collect_nn, collect_snn
from .toymodel import (
    EstimatorMoments,
    PredictionError,
    ToyScenario,
    expected_distance_fischer,
    mc_oracle,
    mc_truncated_moments,
    nn_moments,
    prediction_error,
    snn_moments,
    solve_d_nn,
    solve_d_snn,
)

__version__ = "0.1.0"

__all__ = [
    "NlmParams",
    "PatchRef",
    "pad_mirror",
    "patch_sq_distance",
    "NeighborSet",
    "collect_nn",
    "collect_snn",
    "PatchEstimate",
    "nlm_weight",
    "denoise_patch",
    "denoise_image",
    "ToyScenario",
    "EstimatorMoments",
    "PredictionError",
    "solve_d_nn",
    "solve_d_snn",
    "nn_moments",
    "snn_moments",
    "prediction_error",
    "mc_oracle",
    "mc_truncated_moments",
    "expected_distance_fischer",
    "NoiseSpec",
    "RgbSigma",
    "add_white_noise",
    "mosaic_bayer",
    "demosaic_malvar",
    "propagate_sigma_rgb",
    "colored_noise_pipeline",
    "QualityReport",
    "psnr",
    "ssim",
]
