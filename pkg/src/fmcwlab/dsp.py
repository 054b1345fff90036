"""Short-time Fourier analysis and interference detectors.

The STFT convention used throughout: the input vector is padded with
window_length/2 reflected samples on both ends, frames start every hop
samples in the padded signal so that column t is centered on input sample
t * hop, and each column is the windowed full-length FFT of its frame.
The inverse is a weighted overlap-add (synthesis window equal to the
analysis window, normalized by the accumulated squared window), which
reconstructs any unmodified transform to machine precision.

Detectors map a non-negative magnitude vector to a per-cell threshold:

* cell-averaging CFAR: scale times the mean of the training cells on both
  sides of the cell, excluding a guard interval, with the training window
  shrunk at the vector edges;
* median + MAD: a single robust level, median + k * 1.4826 * MAD,
  broadcast across the vector;
* fixed: an absolute level for receivers that know their quiescent
  amplitude scale a priori.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.signal import check_COLA, get_window

from .errors import EmptyInput, InconsistentDimensions, SignalTooShort

# Consistent MAD-to-sigma factor for Gaussian-comparable scaling.
MAD_SCALE = 1.4826


@dataclass(frozen=True)
class StftConfig:
    """Analysis window length, hop, and window kind.

    hop must not exceed half the window so the padded frame set covers
    every input sample, and (window, hop) must satisfy constant
    overlap-add so the weighted inverse is exact.
    """

    window_length: int = 64
    hop: int = 16
    window: str = "hann"

    def __post_init__(self):
        if self.window_length < 2:
            raise ValueError("window_length must be at least 2")
        if not 0 < self.hop <= self.window_length // 2:
            raise ValueError("hop must lie in (0, window_length // 2]")
        w = analysis_window(self.window, self.window_length)
        if not check_COLA(w, self.window_length, self.window_length - self.hop):
            raise ValueError(
                f"window {self.window!r} with hop {self.hop} fails overlap-add")

    def columns_for(self, n_samples: int) -> int:
        return -(-n_samples // self.hop)  # ceil


@dataclass(frozen=True)
class TfMatrix:
    """Time-frequency matrix: window_length frequency rows by
    ceil(n/hop) time columns, plus the config and original length needed
    to invert it."""

    data: np.ndarray
    config: StftConfig
    original_length: int


@dataclass(frozen=True)
class DetectorConfig:
    """Interference detector selection.  kind is one of "ca_cfar",
    "median_mad", or "fixed"."""

    kind: str = "median_mad"
    cfar_training: int = 16
    cfar_guard: int = 4
    cfar_scale: float = 10.0
    mad_k: float = 6.0
    fixed_level: float = 0.0

    def __post_init__(self):
        if self.kind not in ("ca_cfar", "median_mad", "fixed"):
            raise ValueError(f"unknown detector kind {self.kind!r}")
        if self.cfar_training < 1 or self.cfar_guard < 0:
            raise ValueError("cfar_training must be >= 1 and cfar_guard >= 0")
        if self.cfar_scale <= 1.0:
            raise ValueError("cfar_scale must exceed 1")
        if self.mad_k <= 0.0:
            raise ValueError("mad_k must be positive")
        if self.kind == "fixed" and self.fixed_level <= 0.0:
            raise ValueError("fixed detector needs a positive fixed_level")


@lru_cache(maxsize=32)
def analysis_window(kind: str, length: int) -> np.ndarray:
    """Periodic analysis window; cached and treated as read-only."""
    w = get_window(kind, length, fftbins=True).astype(np.float64)
    w.setflags(write=False)
    return w


def stft(x: np.ndarray, cfg: StftConfig) -> TfMatrix:
    """Windowed FFT frames of a complex vector (see module docstring)."""
    x = np.asarray(x)
    n = x.shape[-1]
    if x.ndim != 1:
        raise InconsistentDimensions("stft expects a 1-D vector")
    w = cfg.window_length
    if n < w:
        raise SignalTooShort(f"need at least {w} samples, got {n}")
    half = w // 2
    padded = np.pad(x.astype(np.complex128, copy=False), half, mode="reflect")
    n_cols = cfg.columns_for(n)
    frames = np.lib.stride_tricks.sliding_window_view(padded, w)[::cfg.hop]
    frames = frames[:n_cols] * analysis_window(cfg.window, w)
    return TfMatrix(data=np.fft.fft(frames, axis=1).T.copy(),
                    config=cfg, original_length=n)


def interior_columns(cfg: StftConfig, n_samples: int) -> np.ndarray:
    """Boolean mask over STFT columns whose analysis frame lies entirely
    inside the signal (no reflected edge padding).  Excision is restricted
    to these columns: edge frames mix real and synthetic samples, so
    zeroing them would corrupt the reconstruction near the boundaries."""
    cols = np.arange(cfg.columns_for(n_samples))
    start = cols * cfg.hop - cfg.window_length // 2
    return (start >= 0) & (start + cfg.window_length <= n_samples)


def istft(tf: TfMatrix) -> np.ndarray:
    """Weighted overlap-add inverse of stft().

    Exact (to rounding) for unmodified matrices; after cells are zeroed it
    returns the least-squares signal consistent with the remaining frames.
    """
    cfg = tf.config
    w = cfg.window_length
    n = tf.original_length
    n_cols = cfg.columns_for(n)
    if tf.data.shape != (w, n_cols):
        raise InconsistentDimensions(
            f"expected shape {(w, n_cols)}, got {tf.data.shape}")
    win = analysis_window(cfg.window, w)
    frames = np.fft.ifft(tf.data.T, axis=1)
    acc = np.zeros(n + 2 * (w // 2), dtype=np.complex128)
    den = np.zeros(acc.shape[0], dtype=np.float64)
    for t in range(n_cols):
        start = t * cfg.hop
        acc[start:start + w] += win * frames[t]
        den[start:start + w] += win * win
    den[den == 0.0] = 1.0
    half = w // 2
    return (acc / den)[half:half + n]


def detector_threshold(mag: np.ndarray, cfg: DetectorConfig) -> np.ndarray:
    """Per-cell detection threshold for a magnitude vector.

    Also accepts a 2-D array and thresholds each row independently along
    the last axis.
    """
    mag = np.asarray(mag, dtype=np.float64)
    if mag.size == 0:
        raise EmptyInput("cannot threshold an empty magnitude vector")
    if cfg.kind == "ca_cfar":
        return _cfar_threshold(mag, cfg.cfar_training, cfg.cfar_guard,
                               cfg.cfar_scale)
    if cfg.kind == "median_mad":
        med = np.median(mag, axis=-1, keepdims=True)
        mad = np.median(np.abs(mag - med), axis=-1, keepdims=True)
        return np.broadcast_to(med + cfg.mad_k * MAD_SCALE * mad,
                               mag.shape).copy()
    return np.full(mag.shape, cfg.fixed_level)


def _cfar_threshold(mag: np.ndarray, training: int, guard: int,
                    scale: float) -> np.ndarray:
    """Sliding-mean CFAR along the last axis via cumulative sums.

    For cell i the training sets are [i-g-t, i-g) and [i+g+1, i+g+1+t),
    clipped to the vector; the threshold is scale * mean over both.  Cells
    with no training cells at all (tiny vectors) get an infinite threshold.
    """
    n = mag.shape[-1]
    csum = np.concatenate(
        [np.zeros(mag.shape[:-1] + (1,)), np.cumsum(mag, axis=-1)], axis=-1)
    idx = np.arange(n)
    left_lo = np.clip(idx - guard - training, 0, n)
    left_hi = np.clip(idx - guard, 0, n)
    right_lo = np.clip(idx + guard + 1, 0, n)
    right_hi = np.clip(idx + guard + 1 + training, 0, n)
    sums = (csum[..., left_hi] - csum[..., left_lo]
            + csum[..., right_hi] - csum[..., right_lo])
    counts = (left_hi - left_lo) + (right_hi - right_lo)
    with np.errstate(divide="ignore", invalid="ignore"):
        thr = scale * sums / counts
    thr[..., counts == 0] = math.inf
    return thr
