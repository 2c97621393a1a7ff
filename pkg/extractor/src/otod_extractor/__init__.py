"""Feature/logit export tool producing otod bundle manifests.

This package shares no code with otod; the bundle file format is the whole
interface between the two.
"""

from .datasets import DatasetReadError, DatasetSpec
from .extract import ExtractJob, extract
from .models import ARCHS, ModelBuildError, build_model

__version__ = "0.1.0"

__all__ = [
    "ARCHS",
    "DatasetReadError",
    "DatasetSpec",
    "ExtractJob",
    "ModelBuildError",
    "build_model",
    "extract",
    "__version__",
]
