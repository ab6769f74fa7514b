"""Weak-symmetry analysis of 2D (quasi)periodic grayscale images.

The package measures how far an image's Fourier-space structure is from
being indistinguishable under candidate point-group operations, classifies
the resulting group, and tests whether the phase functions can be gauged
away (symmorphic) or not.
"""

from .image import GrayscaleImage, load_image, save_image, degrade, cyclic_shift
from .spectral import (
    Peak,
    SpectralSample,
    SpectrumSampler,
    dft_at,
    dft_many,
    fft_grid,
    grid_frequencies,
    detect_peaks,
    refine_peak,
    heatmap_array,
)
from .tilings import TilingSpec, generate_tiling, basis_guesses, recommended_fl

__version__ = "0.1.0"
