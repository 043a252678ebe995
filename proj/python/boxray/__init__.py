"""Box-spline x-ray projection: forward/adjoint operators, profiles and CG reconstruction."""

from ._core import (
    adjoint,
    adjoint_dot_test,
    cg_solve,
    fanbeam_rays,
    forward,
    generator_names,
    parallel_rays,
    phantom_raster,
    phantom_sinogram,
    profile,
    psnr,
    resample,
    ssim,
)

__all__ = [
    "adjoint",
    "adjoint_dot_test",
    "cg_solve",
    "fanbeam_rays",
    "forward",
    "generator_names",
    "parallel_rays",
    "phantom_raster",
    "phantom_sinogram",
    "profile",
    "psnr",
    "resample",
    "ssim",
]
