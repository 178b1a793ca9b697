"""Subspace DOA estimators over the smoothed coarray matrix.

Both estimators consume the noise subspace of the smoothed matrix and
the coarray steering convention a(theta)[m] = exp(+j*pi*m*theta) over
the reference-window lags 0..M-1.
"""

import time
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .coarray import SmoothedMatrix, coarray_signal, vws_smooth
from .geometry import ArrayGeometry
from .numerics import hermitian_evd, polynomial_roots

__all__ = [
    "SubspacePair",
    "Spectrum",
    "EstimationResult",
    "default_grid",
    "noise_subspace",
    "music_spectrum",
    "pick_peaks",
    "root_music",
    "estimate_music",
    "estimate_root_music",
    "estimate_doas",
    "save_spectrum_csv",
]

_DENOM_FLOOR = 1e-18


@dataclass(frozen=True)
class SubspacePair:
    """Signal/noise eigenvector split by descending eigenvalue."""

    signal: np.ndarray
    noise: np.ndarray


@dataclass(frozen=True)
class Spectrum:
    grid: np.ndarray
    values: np.ndarray


@dataclass(frozen=True)
class EstimationResult:
    """Estimated sine-directions (ascending) plus diagnostics.

    ``fill_count`` counts estimates not backed by a proper peak
    (MUSIC) or taken from outside the unit circle (root variant).
    """

    thetas: np.ndarray
    method: str
    peaks_found: int = 0
    fill_count: int = 0
    root_moduli: Optional[np.ndarray] = None


def default_grid(size: int = 2000) -> np.ndarray:
    """Uniform grid over [-1, 1) with ``size`` points."""
    if size < 1:
        raise ValueError("grid size must be >= 1")
    return -1.0 + 2.0 * np.arange(size) / size


@lru_cache(maxsize=32)
def _cached_grid_steering(m: int, size: int):
    grid = default_grid(size)
    return grid, np.exp(1j * np.pi * np.outer(np.arange(m), grid))


def _values(r) -> np.ndarray:
    return r.values if isinstance(r, SmoothedMatrix) else np.asarray(r)


def noise_subspace(r, d: int) -> SubspacePair:
    """EVD split: d largest eigenvalues span the signal subspace."""
    values = _values(r)
    m = values.shape[0]
    if not 0 <= d < m:
        raise ValueError(f"need 0 <= d < M, got d={d}, M={m}")
    evd = hermitian_evd(values)
    return SubspacePair(signal=evd.eigenvectors[:, :d],
                        noise=evd.eigenvectors[:, d:])


def music_spectrum(noise: np.ndarray, grid,
                   steering: Optional[np.ndarray] = None) -> Spectrum:
    """Pseudospectrum 1 / ||U_N^H a(theta)||^2 over the grid.

    Denominators below 1e-18 are clamped there, so exact nulls give a
    large finite value instead of dividing by zero.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("grid must be nonempty")
    noise = np.asarray(noise)
    if steering is None:
        steering = np.exp(1j * np.pi * np.outer(np.arange(noise.shape[0]), grid))
    proj = noise.conj().T @ steering
    denom = np.einsum("ij,ij->j", proj, proj.conj()).real
    return Spectrum(grid, 1.0 / np.maximum(denom, _DENOM_FLOOR))


def pick_peaks(s: Spectrum, d: int) -> EstimationResult:
    """Take the d largest local maxima of the spectrum.

    Endpoints use one-sided comparison.  Ties break toward the smaller
    angle.  If fewer than d maxima exist, the shortfall is filled from
    the largest remaining grid values and counted in ``fill_count``.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    v = s.values
    n = v.size
    if n == 1:
        is_max = np.array([True])
    else:
        is_max = np.empty(n, dtype=bool)
        is_max[0] = v[0] > v[1]
        is_max[-1] = v[-1] > v[-2]
        is_max[1:-1] = (v[1:-1] > v[:-2]) & (v[1:-1] > v[2:])
    peak_idx = np.flatnonzero(is_max)
    order = peak_idx[np.lexsort((s.grid[peak_idx], -v[peak_idx]))]
    chosen = list(order[:d])
    fill = 0
    if len(chosen) < d:
        rest = np.flatnonzero(~is_max)
        rest = rest[np.lexsort((s.grid[rest], -v[rest]))]
        need = d - len(chosen)
        chosen.extend(rest[:need])
        fill = need
    thetas = np.sort(s.grid[np.asarray(chosen, dtype=int)])
    return EstimationResult(thetas=thetas, method="vws-ca-music",
                            peaks_found=peak_idx.size, fill_count=fill)


def root_music(noise: np.ndarray, d: int) -> EstimationResult:
    """Search-free estimate from the roots of the noise-subspace
    Laurent polynomial.

    With C = U_N U_N^H, the coefficient of z^(k+M-1) is the sum of the
    k-th superdiagonal of C.  The d roots inside and closest to the
    unit circle give theta = angle(z)/pi; if fewer than d lie strictly
    inside, the remainder come from outside by the same closeness
    metric and are counted in ``fill_count``.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    noise = np.asarray(noise)
    m = noise.shape[0]
    if m < 2:
        raise ValueError("need M >= 2")
    c = noise @ noise.conj().T
    coeffs = np.array([np.trace(c, offset=k) for k in range(-(m - 1), m)])
    roots = polynomial_roots(coeffs)
    moduli = np.abs(roots)
    inside = roots[moduli < 1.0]
    outside = roots[moduli >= 1.0]
    inside = inside[np.argsort(np.abs(1.0 - np.abs(inside)), kind="stable")]
    picked = list(inside[:d])
    fill = 0
    if len(picked) < d:
        outside = outside[np.argsort(np.abs(1.0 - np.abs(outside)), kind="stable")]
        need = d - len(picked)
        picked.extend(outside[:need])
        fill = need
    picked = np.asarray(picked)
    thetas = np.angle(picked) / np.pi
    thetas = (thetas + 1.0) % 2.0 - 1.0          # fold angle pi onto -1
    order = np.argsort(thetas)
    return EstimationResult(thetas=thetas[order], method="vws-ca-rmusic",
                            fill_count=fill, root_moduli=np.abs(picked)[order])


def estimate_music(r, d: int, grid_size: int = 2000) -> EstimationResult:
    """MUSIC on the default grid, with the steering matrix cached per
    (window size, grid size)."""
    sub = noise_subspace(r, d)
    m = sub.noise.shape[0]
    grid, steering = _cached_grid_steering(m, grid_size)
    return pick_peaks(music_spectrum(sub.noise, grid, steering), d)


def estimate_root_music(r, d: int) -> EstimationResult:
    return root_music(noise_subspace(r, d).noise, d)


def estimate_doas(r: np.ndarray, geom: ArrayGeometry, d: int, a: int,
                  method: str = "vws-ca-rmusic",
                  grid_size: int = 2000) -> tuple[EstimationResult, float]:
    """Full pipeline from an N x N covariance to DOA estimates.

    Returns the estimate and the wall time of the subspace EVD step
    (the dominant cost, cubic in the window size).
    """
    x = coarray_signal(r, geom)
    sm = vws_smooth(x, a)
    t0 = time.perf_counter()
    sub = noise_subspace(sm, d)
    evd_time = time.perf_counter() - t0
    if method == "vws-ca-music":
        m = sub.noise.shape[0]
        grid, steering = _cached_grid_steering(m, grid_size)
        result = pick_peaks(music_spectrum(sub.noise, grid, steering), d)
    elif method == "vws-ca-rmusic":
        result = root_music(sub.noise, d)
    else:
        raise ValueError(f"unknown method {method!r}")
    return result, evd_time


def save_spectrum_csv(s: Spectrum, path) -> None:
    """Export as CSV rows ``theta,value``."""
    with open(path, "w") as fh:
        fh.write("theta,value\n")
        for th, v in zip(s.grid, s.values):
            fh.write(f"{float(th)!r},{float(v)!r}\n")
