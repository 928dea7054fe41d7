"""Exact computations on Keane's non-uniquely ergodic 4-interval exchanges."""

__version__ = "0.1.0"

from .iet import IetMap, InducedMap, build_iet, induce  # noqa: E402
from .keane import ParamSeq, generate, keane_matrix  # noqa: E402

__all__ = ["IetMap", "InducedMap", "ParamSeq", "build_iet", "generate", "induce",
           "keane_matrix", "__version__"]
