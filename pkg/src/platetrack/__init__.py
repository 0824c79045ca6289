"""License plate detection, recognition and vehicle sighting tracking.

The post-processing hot path (map decoding, rotated-box IoU, suppression,
component labelling) runs on a compiled extension when available and falls
back to pure Python otherwise; ``KERNEL_BACKEND`` names the active choice.
"""

from ._kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
