"""Projective image warping with interpolation kernels and anti-aliasing samplers."""

from .engine import (ChainResult, Prefilter, TapStats, WarpRequest, reference_resample,
                     run_chain, warp, warp_chain)
from .geometry import (Homography, JacobianEstimate, ScanlineDecomposition, compose, decompose,
                       invert, jacobian, map_point, project, random_composed_triple)
from .kernels import (ALL_KERNELS, Kernel, KernelLUT, build_lut, eval_kernel, interpolate2d,
                      parse_kernel, support_radius)
from .pyramids import MipPyramid, RipMap, build_mipmap, build_ripmap, sample_mip, sample_rip
from .samplers import (FootprintEstimate, SamplerConfig, footprint, parse_sampler, sample_fast,
                       sample_mipmap_prefiltered, sample_point, sample_ripmap_prefiltered,
                       sample_supersample)

__version__ = "0.1.0"
