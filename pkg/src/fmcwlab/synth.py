"""Dechirped ADC frame synthesis.

Builds the victim radar's M x N post-mix sample matrix as the sum of
three parts: target echoes, mutual interference from other radars, and
receiver noise.  All synthesis is closed-form at the ADC rate; no RF-rate
oversampling is involved.

Target echoes are separable in slow and fast time: each scatterer
contributes a * exp(-j2pi f_c 2r/c) * exp(-j2pi f_r n) * exp(-j2pi f_d m)
with normalized range frequency f_r = 2 r alpha T_s / c and normalized
Doppler frequency f_d = 2 rdot T_PRI / lambda.

Interference is the phase difference of two piecewise-quadratic chirp
trains (the interferer's transmit phase minus the victim's reference
phase), gated by an ideal brick-wall low-pass at +-f_s/2 on the
instantaneous beat frequency and by both radars' active windows.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import AliasedTarget, DimensionMismatch
from .rfconfig import (RadarConfig, SPEED_OF_LIGHT, chirp_slope, config_digest,
                       interferer_slope)
from .scene import Interferer, Scene, Target

FRAME_MAGIC = "fmcwframe"


@dataclass(frozen=True, eq=False)
class AdcFrame:
    """One frame of dechirped ADC samples.

    data is (M, N) complex: row m is a chirp (slow time), column n a
    fast-time sample.  clean optionally carries the interference-free
    version of the same frame (targets + noise) for reference metrics.
    """

    data: np.ndarray
    config: RadarConfig
    clean: np.ndarray = None

    def __post_init__(self):
        m, n = self.config.chirps_per_frame, self.config.samples_per_chirp
        arr = np.asarray(self.data)
        if arr.shape != (m, n):
            raise DimensionMismatch(
                f"frame shape {arr.shape} does not match config ({m}, {n})")
        if not np.isfinite(arr).all():
            raise ValueError("frame contains non-finite entries")
        if self.clean is not None and np.asarray(self.clean).shape != (m, n):
            raise DimensionMismatch("clean frame shape mismatch")


def _target_params(cfg: RadarConfig, targets) -> tuple:
    """Vectorized (f_r, f_d, complex amplitude) for a target list."""
    alpha = chirp_slope(cfg)
    r = np.array([t.range_m for t in targets], dtype=np.float64)
    rdot = np.array([t.radial_velocity_mps for t in targets], dtype=np.float64)
    amp = np.array([t.amplitude for t in targets], dtype=np.complex128)
    f_r = 2.0 * r * alpha * cfg.sample_period_s / SPEED_OF_LIGHT
    f_d = 2.0 * rdot * cfg.pri_s / cfg.wavelength_m
    bad_r = np.nonzero(f_r >= 1.0)[0]
    if bad_r.size:
        raise AliasedTarget(
            f"target range {r[bad_r[0]]:.1f} m gives f_r >= 1")
    bad_d = np.nonzero(np.abs(f_d) >= 0.5)[0]
    if bad_d.size:
        raise AliasedTarget(
            f"radial velocity {rdot[bad_d[0]]:.2f} m/s gives |f_d| >= 0.5")
    # Round-trip carrier phase, reduced modulo one cycle before the
    # complex exponential to keep precision at 77 GHz scales.
    cycles = cfg.carrier_freq_hz * 2.0 * r / SPEED_OF_LIGHT
    amp = amp * np.exp(-2j * math.pi * np.mod(cycles, 1.0))
    return f_r, f_d, amp


def synth_targets(cfg: RadarConfig, targets) -> AdcFrame:
    """Sum of all target echo entries, computed as two matrix products
    over the separable slow-time and fast-time phase factors."""
    m_count, n_count = cfg.chirps_per_frame, cfg.samples_per_chirp
    if len(targets) == 0:
        return AdcFrame(np.zeros((m_count, n_count), dtype=np.complex128), cfg)
    f_r, f_d, amp = _target_params(cfg, targets)
    m = np.arange(m_count, dtype=np.float64)
    n = np.arange(n_count, dtype=np.float64)
    slow = np.exp(-2j * math.pi * np.outer(m, f_d))
    fast = np.exp(-2j * math.pi * np.outer(f_r, n))
    return AdcFrame(slow @ (amp[:, None] * fast), cfg)


def synth_target(cfg: RadarConfig, target: Target) -> AdcFrame:
    """Single-scatterer echo frame."""
    return synth_targets(cfg, [target])


def _interference_geometry(cfg: RadarConfig, interferer: Interferer) -> tuple:
    """Per-sample interferer chirp timing over the frame grid.

    Returns (dt, u, gate, slope) where dt is time since the covering
    interferer chirp's start, u the time since the covering victim
    chirp's start, and gate the boolean pass mask of the brick-wall
    low-pass and both active windows.
    """
    wf = interferer.waveform
    alpha = chirp_slope(cfg)
    alpha_i = interferer_slope(alpha, wf.gamma, wf.slope_sign,
                               cfg.sample_rate_hz, cfg.samples_per_chirp)
    m = np.arange(cfg.chirps_per_frame, dtype=np.float64)[:, None]
    n = np.arange(cfg.samples_per_chirp, dtype=np.float64)[None, :]
    u = n * cfg.sample_period_s
    t = m * cfg.pri_s + u
    active_i = wf.pri_s * (cfg.active_time_s / cfg.pri_s)
    k = np.floor((t - wf.start_offset_s) / wf.pri_s)
    dt = t - wf.start_offset_s - k * wf.pri_s
    beat = alpha_i * dt - alpha * u
    gate = (dt < active_i) & (np.abs(beat) <= 0.5 * cfg.sample_rate_hz)
    return dt, u, gate, alpha_i, k


def interference_gate(cfg: RadarConfig, interferer: Interferer) -> np.ndarray:
    """Boolean (M, N) mask of samples the interferer corrupts."""
    return _interference_geometry(cfg, interferer)[2]


def corrupted_sample_counts(cfg: RadarConfig,
                            interferer: Interferer) -> np.ndarray:
    """Diagnostic: corrupted-sample count per chirp, length M."""
    return interference_gate(cfg, interferer).sum(axis=1)


def synth_interference(cfg: RadarConfig, interferer: Interferer) -> AdcFrame:
    """Dechirped interference frame for one interfering radar.

    The entry phase is the quadratic transmit phase of the covering
    interferer chirp minus the victim's reference chirp phase; the
    residual carrier term depends only on the two chirps' start-time
    difference and is reduced modulo one cycle before exponentiation.
    """
    dt, u, gate, alpha_i, k = _interference_geometry(cfg, interferer)
    wf = interferer.waveform
    m = np.arange(cfg.chirps_per_frame, dtype=np.float64)[:, None]
    start_diff = m * cfg.pri_s - (wf.start_offset_s + k * wf.pri_s)
    carrier = np.mod(cfg.carrier_freq_hz * start_diff, 1.0)
    phase = (math.pi * alpha_i * dt * dt - math.pi * chirp_slope(cfg) * u * u
             + 2.0 * math.pi * carrier)
    data = interferer.amplitude * np.exp(1j * phase)
    data[~gate] = 0.0
    return AdcFrame(data, cfg)


def synth_noise(cfg: RadarConfig, seed) -> AdcFrame:
    """I.i.d. circularly-symmetric complex Gaussian frame with per-sample
    variance equal to the config's noise_variance; deterministic per seed."""
    m, n = cfg.chirps_per_frame, cfg.samples_per_chirp
    if cfg.noise_variance == 0.0:
        return AdcFrame(np.zeros((m, n), dtype=np.complex128), cfg)
    rng = np.random.default_rng(seed)
    draws = rng.standard_normal((2, m, n))
    scale = math.sqrt(cfg.noise_variance / 2.0)
    return AdcFrame(scale * (draws[0] + 1j * draws[1]), cfg)


def assemble(targets, interference, noise: AdcFrame) -> AdcFrame:
    """Entrywise sum of all parts.  The returned frame's clean field
    holds the interference-free sum (targets + noise) for reference
    metrics."""
    cfg = noise.config
    shape = noise.data.shape
    for frame in list(targets) + list(interference):
        if frame.data.shape != shape:
            raise DimensionMismatch(
                f"component shape {frame.data.shape} != {shape}")
    clean = noise.data.copy()
    for frame in targets:
        clean += frame.data
    full = clean.copy()
    for frame in interference:
        full += frame.data
    return AdcFrame(full, cfg, clean=clean)


def synthesize_frame(scene: Scene, cfg: RadarConfig, noise_seed) -> AdcFrame:
    """Full frame for a scene: batched target echoes, per-interferer
    interference, and seeded noise, with the clean sum retained."""
    target_frame = synth_targets(cfg, scene.targets)
    interference = [synth_interference(cfg, i) for i in scene.interferers]
    noise = synth_noise(cfg, noise_seed)
    return assemble([target_frame], interference, noise)


def write_frame(frame: AdcFrame, path) -> None:
    """Flat binary export: one ASCII header line "fmcwframe M N digest"
    then row-major interleaved real/imaginary float64, little-endian."""
    m, n = frame.data.shape
    header = f"{FRAME_MAGIC} {m} {n} {config_digest(frame.config)}\n"
    interleaved = np.empty((m, n, 2), dtype="<f8")
    interleaved[:, :, 0] = frame.data.real
    interleaved[:, :, 1] = frame.data.imag
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        fh.write(interleaved.tobytes())


def read_frame(path, cfg: RadarConfig) -> AdcFrame:
    """Inverse of write_frame.  The header digest is checked against cfg."""
    with open(path, "rb") as fh:
        header = fh.readline().decode("ascii").split()
        if len(header) != 4 or header[0] != FRAME_MAGIC:
            raise ValueError(f"not a frame file: {path}")
        m, n, digest = int(header[1]), int(header[2]), header[3]
        if digest != config_digest(cfg):
            raise ValueError("frame written under a different radar config")
        raw = np.frombuffer(fh.read(), dtype="<f8")
    if raw.size != 2 * m * n:
        raise ValueError("truncated frame payload")
    interleaved = raw.reshape(m, n, 2)
    return AdcFrame(interleaved[:, :, 0] + 1j * interleaved[:, :, 1], cfg)
