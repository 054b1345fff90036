"""Evaluation metrics over range-Doppler maps.

All three metrics are computed on a fixed set of nominally detectable
target bins so that mitigation methods are compared like-for-like:
probability of detection (fraction of those bins still flagged), SINR
(mean bin power over the median-estimated map noise floor), and the
distribution of per-bin phase errors against the interference-free
reference map, folded to [0, 180) degrees.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EmptyBinSet, EmptyDetectableSet
from .rdproc import (RdMap, TargetBinSet, ThresholdModel, detect,
                     estimate_noise_power)

DEFAULT_ERROR_GRID_DEG = np.arange(0.0, 180.0, 0.5)
DEFAULT_ERROR_GRID_DEG.setflags(write=False)


@dataclass(frozen=True, eq=False)
class TrialMetrics:
    """One method's scores for one Monte Carlo trial."""

    method: str
    p_interference: float
    pd: float
    sinr_db: float
    phase_error_deg: np.ndarray
    detectable_count: int

    def __post_init__(self):
        if not 0.0 <= self.pd <= 1.0:
            raise ValueError(f"pd must lie in [0, 1], got {self.pd}")
        err = np.asarray(self.phase_error_deg)
        if err.size and not ((err >= 0.0) & (err < 180.0)).all():
            raise ValueError("phase errors must lie in [0, 180)")


def probability_of_detection(rdmap: RdMap, detectable: TargetBinSet,
                             model: ThresholdModel) -> float:
    """Fraction of the detectable bins the detector still flags on this
    map."""
    if len(detectable) == 0:
        raise EmptyDetectableSet("no detectable bins to score")
    flags = detect(rdmap, detectable, model)
    return float(flags.sum()) / float(len(detectable))


def sinr_db(rdmap: RdMap, detectable: TargetBinSet) -> float:
    """Mean detectable-bin power against the map's median-estimated noise
    floor, in dB."""
    if len(detectable) == 0:
        raise EmptyDetectableSet("no detectable bins to score")
    ii, jj = detectable.index_arrays()
    signal = float(np.mean(rdmap.power[ii, jj]))
    noise = estimate_noise_power(rdmap, detectable)
    return 10.0 * math.log10(signal / noise)


def phase_errors_deg(reference: RdMap, mitigated: RdMap,
                     bins: TargetBinSet) -> np.ndarray:
    """Absolute per-bin phase difference between the two maps, folded to
    [0, 180) degrees."""
    if reference.data.shape != mitigated.data.shape:
        raise DimensionMismatch("maps must share dimensions")
    if len(bins) == 0:
        raise EmptyBinSet("no bins to compare")
    ii, jj = bins.index_arrays()
    diff = (np.angle(reference.data[ii, jj])
            - np.angle(mitigated.data[ii, jj]))
    wrapped = np.abs((diff + math.pi) % (2.0 * math.pi) - math.pi)
    err = np.degrees(wrapped)
    # wrapped == pi maps to exactly 180; fold it just inside the interval
    return np.minimum(err, np.nextafter(180.0, 0.0))


def cdf_from_samples(samples: np.ndarray, e_grid: np.ndarray) -> np.ndarray:
    """Empirical CDF of the samples evaluated at each grid point."""
    e_grid = np.asarray(e_grid, dtype=np.float64)
    if e_grid.ndim != 1 or e_grid.size == 0 or np.any(np.diff(e_grid) <= 0):
        raise ValueError("e_grid must be a non-empty ascending vector")
    samples = np.sort(np.asarray(samples, dtype=np.float64))
    if samples.size == 0:
        return np.zeros(e_grid.shape)
    counts = np.searchsorted(samples, e_grid, side="right")
    return counts / float(samples.size)


def phase_error_cdf(reference: RdMap, mitigated: RdMap, bins: TargetBinSet,
                    e_grid: np.ndarray = DEFAULT_ERROR_GRID_DEG) -> np.ndarray:
    """CDF of the per-bin phase errors on the given degree grid."""
    return cdf_from_samples(phase_errors_deg(reference, mitigated, bins),
                            e_grid)
