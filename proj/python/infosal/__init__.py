"""Information-theoretic saliency maps and their evaluation metrics.

Images are 2-D float arrays (height, width) with values in [0, 1]; frame
stacks are 3-D (frames, height, width), oldest first.
"""

from ._core import (
    AdmissibilityError,
    Error,
    FormatError,
    InputError,
    IoError,
    UndefinedError,
    auc,
    bias_ratio,
    cas,
    conditional_entropy,
    dct_ii,
    idct_ii,
    joint_entropy,
    kl_divergence,
    msf_denoised,
    msf_filter,
    normxcorr,
    nsv,
    read_image,
    read_map,
    spatial_saliency,
    spatiotemporal_saliency,
    temporal_saliency,
    write_saliency,
)

__all__ = [
    "AdmissibilityError",
    "Error",
    "FormatError",
    "InputError",
    "IoError",
    "UndefinedError",
    "auc",
    "bias_ratio",
    "cas",
    "conditional_entropy",
    "dct_ii",
    "idct_ii",
    "joint_entropy",
    "kl_divergence",
    "msf_denoised",
    "msf_filter",
    "normxcorr",
    "nsv",
    "read_image",
    "read_map",
    "spatial_saliency",
    "spatiotemporal_saliency",
    "temporal_saliency",
    "write_saliency",
]
