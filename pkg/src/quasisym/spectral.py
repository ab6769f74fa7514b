"""Fourier coefficients at arbitrary real frequencies, grid transform, peaks.

Conventions: frequencies are in cycles per image width, so integer k land on
FFT bins.  The coefficient of an n x n image at k = (k_x, k_y) is

    rho_hat(k) = (1/n^2) * sum_{i,j=1..n} rho_ij * exp(-2*pi*1j*(k_x*j + k_y*i)/n)

with i the row and j the column index, both 1-based.  The 1-based origin is
a fixed phase twist relative to numpy's 0-based FFT and is applied exactly.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .image import GrayscaleImage

__all__ = [
    "SpectralSample",
    "Peak",
    "dft_at",
    "dft_many",
    "fft_grid",
    "grid_frequencies",
    "detect_peaks",
    "refine_peak",
    "heatmap_array",
    "SpectrumSampler",
    "thread_count",
]

_CHUNK = 512  # frequencies per matmul batch; keeps working set small


def thread_count() -> int:
    """Worker cap for batched evaluations; QUASISYM_THREADS overrides."""
    env = os.environ.get("QUASISYM_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(4, os.cpu_count() or 1)


@dataclass(frozen=True)
class SpectralSample:
    """Fourier coefficient at one frequency, with amplitude/phase split."""

    k: tuple[float, float]
    value: complex

    @property
    def amplitude(self) -> float:
        return abs(self.value)

    @property
    def phase(self) -> float:
        # Phase in cycles, reduced to [0, 1).
        return (np.angle(self.value) / (2.0 * np.pi)) % 1.0


@dataclass(frozen=True)
class Peak:
    k: tuple[float, float]
    amplitude: float
    refined: bool = False
    is_dc: bool = False


def _phase_vectors(n: int, ks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Column/row phase factors for 1-based pixel indices 1..n."""
    idx = np.arange(1, n + 1)
    # cols[b, m] = exp(-2i*pi*k_x[m]*(b+1)/n), rows likewise with k_y.
    cols = np.exp((-2j * np.pi / n) * np.outer(idx, ks[:, 0]))
    rows = np.exp((-2j * np.pi / n) * np.outer(idx, ks[:, 1]))
    return cols, rows


def dft_many(img: GrayscaleImage, ks: np.ndarray, threads: int | None = None) -> np.ndarray:
    """Fourier coefficients at an (m, 2) array of real frequencies.

    Separable evaluation: one n x m matmul plus a weighted row sum per chunk,
    exact per the defining sum.  Chunks are independent, so optional threading
    cannot change results.
    """
    ks = np.atleast_2d(np.asarray(ks, dtype=np.float64))
    if ks.ndim != 2 or ks.shape[1] != 2:
        raise ValueError(f"expected (m, 2) frequency array, got {ks.shape}")
    if not np.isfinite(ks).all():
        raise ValueError("non-finite frequency")
    n = img.n
    px = img.pixels
    out = np.empty(ks.shape[0], dtype=np.complex128)

    def run(start: int, stop: int) -> None:
        cols, rows = _phase_vectors(n, ks[start:stop])
        t = px @ cols  # (n, chunk)
        out[start:stop] = np.einsum("am,am->m", rows, t) / (n * n)

    spans = [(s, min(s + _CHUNK, ks.shape[0])) for s in range(0, ks.shape[0], _CHUNK)]
    workers = threads if threads is not None else thread_count()
    if workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(lambda sp: run(*sp), spans))
    else:
        for sp in spans:
            run(*sp)
    return out


def dft_at(img: GrayscaleImage, k: tuple[float, float]) -> SpectralSample:
    """Fourier coefficient at a single arbitrary real frequency."""
    value = dft_many(img, np.array([k], dtype=np.float64), threads=1)[0]
    return SpectralSample(k=(float(k[0]), float(k[1])), value=complex(value))


def grid_frequencies(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Integer frequencies (k_x, k_y) in (-n/2, n/2] for each FFT bin index."""
    m = np.arange(n)
    # Bin n/2 (even n) represents +n/2 under the (-n/2, n/2] convention.
    k = np.where(m <= n // 2, m, m - n)
    return k, k


def fft_grid(img: GrayscaleImage) -> np.ndarray:
    """Complex coefficient grid; entry [b_y, b_x] is rho_hat at integer bins.

    Equals dft_at at every integer frequency: numpy's 0-based FFT twisted by
    exp(-2i*pi*(k_x + k_y)/n) for the 1-based pixel origin, then / n^2.
    """
    n = img.n
    f = np.fft.fft2(img.pixels)
    kx, ky = grid_frequencies(n)
    twist = np.exp((-2j * np.pi / n) * (kx[None, :] + ky[:, None]))
    return f * twist / (n * n)


def detect_peaks(grid: np.ndarray, thd: float) -> list[Peak]:
    """Strict 8-neighbour local maxima of |grid| with amplitude >= thd.

    Neighbourhoods wrap cyclically (the FFT grid is a torus).  The DC entry is
    returned flagged when it qualifies.  Sorted by descending amplitude, ties
    by frequency for determinism.
    """
    if thd <= 0:
        raise ValueError("thd must be > 0")
    amp = np.abs(grid)
    n = amp.shape[0]
    strict_max = np.ones_like(amp, dtype=bool)
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dy == 0 and dx == 0:
                continue
            strict_max &= amp > np.roll(amp, shift=(dy, dx), axis=(0, 1))
    mask = strict_max & (amp >= thd)
    kx, ky = grid_frequencies(n)
    by, bx = np.nonzero(mask)
    peaks = [
        Peak(
            k=(float(kx[x]), float(ky[y])),
            amplitude=float(amp[y, x]),
            is_dc=(kx[x] == 0 and ky[y] == 0),
        )
        for y, x in zip(by, bx)
    ]
    peaks.sort(key=lambda p: (-p.amplitude, p.k))
    return peaks


def refine_peak(
    img: GrayscaleImage,
    k_guess: tuple[float, float],
    radius: float = 2.0,
    tol: float = 1e-4,
    sampler: "SpectrumSampler | None" = None,
) -> Peak:
    """Locate the amplitude maximum near k_guess by nested 3x3 grid search.

    Step starts at radius/2 and halves whenever no neighbour improves, until
    step < tol.  Candidates are confined to the closed ball of the given
    radius around the guess, so the result cannot drift to another peak.
    """
    g = np.asarray(k_guess, dtype=np.float64)
    if not np.isfinite(g).all():
        raise ValueError("non-finite guess")
    if radius <= 0 or tol <= 0:
        raise ValueError("radius and tol must be > 0")
    nyq = img.n / 2
    if np.abs(g).max() + radius > nyq + 1e-9:
        raise ValueError(f"search ball exceeds the Nyquist bound {nyq}")

    sampler = sampler or SpectrumSampler(img)
    offsets = np.array(
        [(dx, dy) for dy in (-1, 0, 1) for dx in (-1, 0, 1) if (dx, dy) != (0, 0)],
        dtype=np.float64,
    )

    best = g.copy()
    best_amp = abs(sampler.sample(tuple(best)))
    step = radius / 2.0
    evals = 0
    while step >= tol and evals < 20000:
        cand = best[None, :] + offsets * step
        inside = np.linalg.norm(cand - g[None, :], axis=1) <= radius + 1e-12
        cand = cand[inside]
        if len(cand) == 0:
            step *= 0.5
            continue
        amps = np.abs(sampler.sample_many(cand))
        evals += len(cand)
        i = int(np.argmax(amps))
        if amps[i] > best_amp:
            best = cand[i]
            best_amp = float(amps[i])
        else:
            step *= 0.5
    return Peak(k=(float(best[0]), float(best[1])), amplitude=best_amp, refined=True)


class SpectrumSampler:
    """Caching evaluator of Fourier coefficients for one image.

    Frequencies are cached by their exact float pair, so repeated generator
    tests over overlapping frequency sets reuse earlier batches.
    """

    def __init__(self, img: GrayscaleImage, threads: int | None = None):
        self.img = img
        self.threads = threads
        self._cache: dict[tuple[float, float], complex] = {}

    def sample(self, k: tuple[float, float]) -> complex:
        return self.sample_many(np.array([k], dtype=np.float64))[0]

    def sample_many(self, ks: np.ndarray) -> np.ndarray:
        ks = np.atleast_2d(np.asarray(ks, dtype=np.float64))
        keys = [(float(k[0]), float(k[1])) for k in ks]
        missing = [i for i, key in enumerate(keys) if key not in self._cache]
        if missing:
            vals = dft_many(self.img, ks[missing], threads=self.threads)
            for i, v in zip(missing, vals):
                self._cache[keys[i]] = complex(v)
        return np.array([self._cache[key] for key in keys], dtype=np.complex128)


def heatmap_array(grid: np.ndarray, thd: float = 0.01) -> np.ndarray:
    """Log-amplitude map log(1 + |rho_hat|/thd), fftshifted, scaled to [0, 1]."""
    amp = np.abs(np.fft.fftshift(grid))
    scaled = np.log1p(amp / thd)
    top = scaled.max()
    return scaled / top if top > 0 else scaled
