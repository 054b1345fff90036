"""Range-Doppler processing and target-cell bookkeeping.

The RD transform uses the conjugate-kernel DFT (scaled inverse FFT) on
both axes so that a target entry exp(-j2pi f_r n) exp(-j2pi f_d m) peaks
at range bin round(f_r N) and, after centering the Doppler axis, at
Doppler bin round(M/2 + f_d M) mod M.  Detection follows a two-pass
protocol: the interference-free map defines which target bins are
nominally detectable (with a small selection headroom so borderline bins
are excluded), and later maps are scored against a threshold built from
their own median-estimated noise floor at the same false-alarm rate.
"""

import math
from dataclasses import dataclass

import numpy as np

from .dsp import analysis_window
from .errors import (DegenerateNoiseEstimate, DimensionMismatch,
                     InvalidProbability)
from .rfconfig import RadarConfig, SPEED_OF_LIGHT, chirp_slope
from .scene import Scene
from .synth import AdcFrame

RD_WINDOWS = ("hann", "boxcar")


@dataclass(frozen=True, eq=False)
class RdMap:
    """Complex range-Doppler map: row i is Doppler (centered), column j
    is range."""

    data: np.ndarray
    window: str

    def __post_init__(self):
        if np.asarray(self.data).ndim != 2:
            raise DimensionMismatch("RD map must be a 2-D array")

    @property
    def power(self) -> np.ndarray:
        return np.abs(self.data) ** 2


@dataclass(frozen=True)
class TargetBinSet:
    """Sorted unique (doppler_bin, range_bin) pairs with the indices of
    the source targets that land on each bin."""

    bins: tuple
    sources: tuple
    shape: tuple

    def __post_init__(self):
        if len(self.bins) != len(set(self.bins)):
            raise ValueError("duplicate bins")
        if len(self.sources) != len(self.bins):
            raise ValueError("sources must align with bins")
        for i, j in self.bins:
            if not (0 <= i < self.shape[0] and 0 <= j < self.shape[1]):
                raise ValueError(f"bin ({i}, {j}) outside map {self.shape}")

    def __len__(self):
        return len(self.bins)

    def __iter__(self):
        return iter(self.bins)

    def __contains__(self, bin_pair):
        return bin_pair in set(self.bins)

    def mask(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=bool)
        for i, j in self.bins:
            out[i, j] = True
        return out

    def index_arrays(self) -> tuple:
        if not self.bins:
            return np.array([], dtype=int), np.array([], dtype=int)
        arr = np.array(self.bins, dtype=int)
        return arr[:, 0], arr[:, 1]


def _make_bin_set(pairs_with_sources, shape) -> TargetBinSet:
    merged = {}
    for pair, src in pairs_with_sources:
        merged.setdefault(pair, []).append(src)
    ordered = sorted(merged)
    return TargetBinSet(
        bins=tuple(ordered),
        sources=tuple(tuple(merged[b]) for b in ordered),
        shape=shape)


def range_doppler_map(frame: AdcFrame, window: str = "hann") -> RdMap:
    """Windowed 2-D conjugate-kernel DFT of an ADC frame, Doppler axis
    centered.  window may be "hann" (default) or "boxcar" (analysis /
    test mode)."""
    if window not in RD_WINDOWS:
        raise ValueError(f"window must be one of {RD_WINDOWS}")
    m, n = frame.data.shape
    data = frame.data
    if window != "boxcar":
        data = data * np.outer(analysis_window(window, m),
                               analysis_window(window, n))
    rd = np.fft.ifft2(data) * (m * n)
    return RdMap(np.fft.fftshift(rd, axes=0), window)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def expected_target_bins(scene: Scene, cfg: RadarConfig) -> TargetBinSet:
    """Predicted RD bin for every scene target; colliding targets share
    one bin and both identities are kept."""
    m, n = cfg.chirps_per_frame, cfg.samples_per_chirp
    alpha = chirp_slope(cfg)
    pairs = []
    for idx, target in enumerate(scene.targets):
        f_r = 2.0 * target.range_m * alpha * cfg.sample_period_s / SPEED_OF_LIGHT
        f_d = 2.0 * target.radial_velocity_mps * cfg.pri_s / cfg.wavelength_m
        range_bin = _round_half_up(f_r * n) % n
        doppler_bin = _round_half_up(m / 2 + f_d * m) % m
        pairs.append(((doppler_bin, range_bin), idx))
    return _make_bin_set(pairs, (m, n))


def estimate_noise_power(rdmap: RdMap, exclude: TargetBinSet) -> float:
    """Per-bin noise power from the median power of bins outside the
    excluded set (median / ln 2 inverts the exponential-power median)."""
    keep = ~exclude.mask() if len(exclude) else np.ones(rdmap.data.shape, bool)
    if keep.sum() < rdmap.data.size / 2:
        raise DegenerateNoiseEstimate(
            "excluded bins cover at least half the map")
    return float(np.median(rdmap.power[keep]) / math.log(2.0))


@dataclass(frozen=True)
class ThresholdModel:
    """Detection protocol state fixed by the nominal (clean-map) pass:
    the false-alarm rate, the clean noise floor, and the bin set excluded
    from floor estimation."""

    pfa: float
    clean_noise_power: float
    exclude_bins: TargetBinSet

    def threshold_for(self, noise_power: float) -> float:
        return -noise_power * math.log(self.pfa)


def nominal_threshold_model(clean_map: RdMap, expected: TargetBinSet,
                            pfa: float) -> ThresholdModel:
    if not 0.0 < pfa <= 1.0:
        raise InvalidProbability(f"pfa must lie in (0, 1], got {pfa}")
    noise = estimate_noise_power(clean_map, expected)
    return ThresholdModel(pfa=pfa, clean_noise_power=noise,
                          exclude_bins=expected)


def nominal_detectable_set(clean_map: RdMap, expected: TargetBinSet,
                           pfa: float,
                           selection_margin_db: float = 1.0) -> TargetBinSet:
    """Subset of expected bins whose clean-map power clears the
    false-alarm threshold with selection_margin_db of headroom.

    The headroom keeps bins that merely graze the threshold out of the
    nominal set, so near-identity processing of a clean frame cannot flip
    them; detection itself applies the un-margined threshold.
    """
    model = nominal_threshold_model(clean_map, expected, pfa)
    cutoff = model.threshold_for(model.clean_noise_power)
    cutoff *= 10.0 ** (selection_margin_db / 10.0)
    power = clean_map.power
    pairs = []
    for pair, srcs in zip(expected.bins, expected.sources):
        if power[pair] > cutoff:
            for src in srcs:
                pairs.append((pair, src))
    return _make_bin_set(pairs, expected.shape)


MAP_MAGIC = "fmcwrdmap"


def write_map(rdmap: RdMap, path) -> None:
    """Binary RD-map export in the frame layout: one ASCII header line
    "fmcwrdmap M N window", then row-major interleaved re/im float64
    little-endian."""
    m, n = rdmap.data.shape
    interleaved = np.empty((m, n, 2), dtype="<f8")
    interleaved[:, :, 0] = rdmap.data.real
    interleaved[:, :, 1] = rdmap.data.imag
    with open(path, "wb") as fh:
        fh.write(f"{MAP_MAGIC} {m} {n} {rdmap.window}\n".encode("ascii"))
        fh.write(interleaved.tobytes())


def read_map(path) -> RdMap:
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").split()
        if len(header) != 4 or header[0] != MAP_MAGIC:
            raise ValueError(f"not an RD map file: {path}")
        m, n, window = int(header[1]), int(header[2]), header[3]
        raw = np.frombuffer(fh.read(), dtype="<f8")
    if raw.size != 2 * m * n:
        raise ValueError("truncated RD map payload")
    interleaved = raw.reshape(m, n, 2)
    return RdMap(interleaved[:, :, 0] + 1j * interleaved[:, :, 1], window)


def detect(rdmap: RdMap, bins: TargetBinSet,
           model: ThresholdModel) -> np.ndarray:
    """Flag each bin whose power exceeds the false-alarm threshold for
    this map's own estimated noise floor.

    The floor is re-estimated per map (same estimator and pfa as the
    nominal pass, same excluded bins) so that interference left in the
    map raises the threshold exactly as it would for a live detector;
    the bin set under test stays fixed for like-for-like comparisons.
    """
    if rdmap.data.shape != model.exclude_bins.shape:
        raise DimensionMismatch("map shape differs from threshold model")
    noise = estimate_noise_power(rdmap, model.exclude_bins)
    cutoff = model.threshold_for(noise)
    ii, jj = bins.index_arrays()
    return rdmap.power[ii, jj] > cutoff
