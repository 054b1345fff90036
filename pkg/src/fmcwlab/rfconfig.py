"""Victim radar parameters, interferer waveform parameters, and the
interference taxonomy.

The victim transmits a sawtooth FMCW sequence: chirps of bandwidth B over
an active time T_a, repeated every T_PRI, sampled at T_s after dechirping.
An interferer is summarized by its chirp slope offset, expressed through a
dimensionless decorrelation factor gamma: the post-mix beat of the
interferer sweeps through gamma * f_s of intermediate frequency within one
victim active time.  Small gamma therefore means the interference lingers
inside the receiver band (highly correlated with the victim waveform);
large gamma means it flashes through as a short burst (uncorrelated).
"""

import hashlib
import math
from dataclasses import dataclass
from enum import Enum

from .errors import GammaOutOfRange, ZeroSlopeDifference

SPEED_OF_LIGHT = 299_792_458.0  # m/s, exact by definition

# Supported decorrelation factor interval (dimensionless, fraction of f_s
# swept per active time).  Open at the bottom, closed at the top.
GAMMA_MIN = 0.1
GAMMA_MAX = 10.0


class InterferenceCategory(str, Enum):
    UNCORRELATED = "uncorrelated"
    SEMI_CORRELATED = "semi_correlated"
    HIGHLY_CORRELATED = "highly_correlated"


# Half-open gamma bands (lo, hi].  A boundary value belongs to the band it
# closes, i.e. to the lower-gamma category.
CATEGORY_BANDS = {
    InterferenceCategory.HIGHLY_CORRELATED: (GAMMA_MIN, 0.75),
    InterferenceCategory.SEMI_CORRELATED: (0.75, 2.0),
    InterferenceCategory.UNCORRELATED: (2.0, GAMMA_MAX),
}


@dataclass(frozen=True)
class RadarConfig:
    """Victim radar waveform and sampling parameters.

    samples_per_chirp must equal active_time_s / sample_period_s to one
    part in 1e9; the chirp repetition interval must leave a non-empty dead
    time after the active sweep.
    """

    carrier_freq_hz: float
    sweep_bandwidth_hz: float
    active_time_s: float
    pri_s: float
    sample_period_s: float
    samples_per_chirp: int
    chirps_per_frame: int
    noise_variance: float = 1.0

    def __post_init__(self):
        for name in ("carrier_freq_hz", "sweep_bandwidth_hz", "active_time_s",
                     "pri_s", "sample_period_s"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.samples_per_chirp < 1 or self.chirps_per_frame < 1:
            raise ValueError("frame dimensions must be at least 1")
        if self.noise_variance < 0:
            raise ValueError("noise_variance must be non-negative")
        if self.pri_s <= self.active_time_s:
            raise ValueError("pri_s must exceed active_time_s (dead time required)")
        ratio = self.active_time_s / self.sample_period_s
        if abs(ratio - self.samples_per_chirp) > 1e-9 * max(1.0, ratio):
            raise ValueError(
                "samples_per_chirp must equal active_time_s / sample_period_s "
                f"(got {self.samples_per_chirp} vs {ratio!r})")

    @property
    def sample_rate_hz(self) -> float:
        return 1.0 / self.sample_period_s

    @property
    def wavelength_m(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_freq_hz

    @property
    def dead_time_s(self) -> float:
        return self.pri_s - self.active_time_s

    @property
    def max_unambiguous_range_m(self) -> float:
        """Range whose beat frequency reaches the sampling rate (bin N)."""
        return SPEED_OF_LIGHT / (2.0 * chirp_slope(self) * self.sample_period_s)

    @property
    def max_unambiguous_speed_mps(self) -> float:
        """Radial speed whose Doppler reaches half a cycle per chirp."""
        return self.wavelength_m / (4.0 * self.pri_s)


def default_radar_config(noise_variance: float = 1.0) -> RadarConfig:
    """77 GHz automotive reference setup: 200 MHz sweep in 25.6 us, 40 us
    chirp interval, 20 MHz complex sampling, 512 x 128 frame."""
    return RadarConfig(
        carrier_freq_hz=77.0e9,
        sweep_bandwidth_hz=200.0e6,
        active_time_s=25.6e-6,
        pri_s=40.0e-6,
        sample_period_s=50.0e-9,
        samples_per_chirp=512,
        chirps_per_frame=128,
        noise_variance=noise_variance,
    )


@dataclass(frozen=True)
class InterfererWaveform:
    """Interfering radar waveform relative to the victim.

    gamma and slope_sign fix the interferer chirp slope through
    interferer_slope(); pri_s is the interferer chirp repetition interval
    and start_offset_s the first chirp start relative to the victim frame
    origin.  Carrier equality with the victim is assumed (worst case).
    """

    gamma: float
    slope_sign: int
    pri_s: float
    start_offset_s: float
    category: InterferenceCategory | None = None

    def __post_init__(self):
        _check_gamma(self.gamma)
        if self.slope_sign not in (-1, 1):
            raise ValueError("slope_sign must be +1 or -1")
        if self.pri_s <= 0:
            raise ValueError("pri_s must be positive")
        if not 0.0 <= self.start_offset_s < self.pri_s:
            raise ValueError("start_offset_s must lie in [0, pri_s)")
        derived = classify_interference(self.gamma)
        if self.category is None:
            object.__setattr__(self, "category", derived)
        elif self.category is not derived:
            raise ValueError(
                f"category {self.category} inconsistent with gamma {self.gamma}")


def _check_gamma(gamma: float):
    if not GAMMA_MIN < gamma <= GAMMA_MAX:
        raise GammaOutOfRange(
            f"gamma must lie in ({GAMMA_MIN}, {GAMMA_MAX}], got {gamma}")


def chirp_slope(cfg: RadarConfig) -> float:
    """Victim chirp slope B / T_a in Hz/s."""
    return cfg.sweep_bandwidth_hz / cfg.active_time_s


def interferer_slope(victim_slope_hz_s: float, gamma: float, slope_sign: int,
                     sample_rate_hz: float, samples_per_chirp: int) -> float:
    """Interferer chirp slope offset from the victim's by
    slope_sign * (f_s^2 / N) * gamma.

    With N = f_s * T_a this makes the post-mix beat sweep through
    gamma * f_s during one victim active time.
    """
    _check_gamma(gamma)
    if slope_sign not in (-1, 1):
        raise ValueError("slope_sign must be +1 or -1")
    return victim_slope_hz_s + slope_sign * (
        sample_rate_hz * sample_rate_hz / samples_per_chirp) * gamma


def interference_duration(slope_diff_abs_hz_s: float,
                          sample_period_s: float) -> float:
    """Dwell time of the post-mix interference inside the receiver band:
    1 / (T_s * |slope difference|)."""
    if slope_diff_abs_hz_s == 0:
        raise ZeroSlopeDifference("equal slopes give unbounded dwell time")
    return 1.0 / (sample_period_s * abs(slope_diff_abs_hz_s))


def corrupted_fraction(gamma: float) -> float:
    """Fraction of one chirp's samples a single full-overlap event corrupts,
    min(1, 1/gamma)."""
    _check_gamma(gamma)
    return min(1.0, 1.0 / gamma)


def classify_interference(gamma: float) -> InterferenceCategory:
    """Map gamma to its taxonomy band; boundary values fall into the
    lower-gamma category."""
    _check_gamma(gamma)
    for category, (lo, hi) in CATEGORY_BANDS.items():
        if lo < gamma <= hi:
            return category
    raise GammaOutOfRange(f"gamma {gamma} matched no band")  # unreachable


def config_digest(cfg: RadarConfig) -> str:
    """Short stable hash of a radar config, used to tag exported frames."""
    text = ",".join(
        f"{k}={getattr(cfg, k)!r}" for k in (
            "carrier_freq_hz", "sweep_bandwidth_hz", "active_time_s", "pri_s",
            "sample_period_s", "samples_per_chirp", "chirps_per_frame",
            "noise_variance"))
    return hashlib.sha256(text.encode()).hexdigest()[:16]
