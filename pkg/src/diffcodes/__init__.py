"""Diffusion codes: SWAP-network LDPC codes on the cycle graph, their
expansion/confinement audits, hypergraph-product CSS codes, decoding
benchmarks and thermal (self-correction) experiments."""

from ._kernels import BACKEND as kernel_backend, compiled_available
from .gf2 import BitMatrix
from .tanner import TannerGraph
from .diffusion import DiffusionParams, Permutation, build_diffusion_code
from .sep import GapVector, SepState

__version__ = "0.1.0"

__all__ = [
    "BitMatrix",
    "TannerGraph",
    "DiffusionParams",
    "Permutation",
    "build_diffusion_code",
    "GapVector",
    "SepState",
    "kernel_backend",
    "compiled_available",
    "__version__",
]
