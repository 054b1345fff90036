"""PD, SINR, and phase-error CDF scoring."""

import math

import numpy as np
import pytest

from fmcwlab.errors import (DimensionMismatch, EmptyBinSet,
                            EmptyDetectableSet)
from fmcwlab.metrics import (DEFAULT_ERROR_GRID_DEG, TrialMetrics,
                             cdf_from_samples, phase_error_cdf,
                             phase_errors_deg, probability_of_detection,
                             sinr_db)
from fmcwlab.rdproc import (RdMap, TargetBinSet, nominal_detectable_set,
                            nominal_threshold_model, range_doppler_map)
from fmcwlab.rfconfig import default_radar_config
from fmcwlab.scene import Target, TargetKind
from fmcwlab.synth import AdcFrame, synth_noise, synth_target

CFG = default_radar_config()
SHAPE = (CFG.chirps_per_frame, CFG.samples_per_chirp)


def bin_set(*pairs):
    return TargetBinSet(bins=tuple(pairs),
                        sources=tuple((i,) for i in range(len(pairs))),
                        shape=SHAPE)


def reference_setup(seed=0, amp=1.0):
    tgt = synth_target(CFG, Target(range_m=48.0, radial_velocity_mps=0.0,
                                   amplitude=amp, kind=TargetKind.VEHICLE))
    noisy = AdcFrame(tgt.data + synth_noise(CFG, seed).data, CFG)
    rd = range_doppler_map(noisy, window="boxcar")
    expected = bin_set((64, 64))
    model = nominal_threshold_model(rd, expected, 0.001)
    detectable = nominal_detectable_set(rd, expected, 0.001)
    return rd, detectable, model


def test_pd_trivial_cases():
    rd, detectable, model = reference_setup()
    assert probability_of_detection(rd, detectable, model) == 1.0
    zero = RdMap(np.zeros(SHAPE, np.complex128), "boxcar")
    assert probability_of_detection(zero, detectable, model) == 0.0
    with pytest.raises(EmptyDetectableSet):
        probability_of_detection(rd, bin_set(), model)


def test_pd_half_nulled_map():
    rng = np.random.default_rng(1)
    data = (rng.standard_normal(SHAPE) + 1j * rng.standard_normal(SHAPE)) \
        / math.sqrt(2.0)
    bins = bin_set((10, 10), (20, 20), (30, 30), (40, 40),
                   (50, 50), (60, 60), (70, 70), (80, 80))
    ii, jj = bins.index_arrays()
    data[ii, jj] = 100.0
    model = nominal_threshold_model(RdMap(data, "hann"), bins, 0.001)
    nulled = data.copy()
    nulled[ii[:4], jj[:4]] = 0.0
    assert probability_of_detection(RdMap(nulled, "hann"), bins,
                                    model) == 0.5


def test_sinr_single_target_coherent_gain():
    # unit target, unit noise, rectangular windows: ~ 10 log10(M N)
    rd, detectable, _ = reference_setup(seed=2)
    m, n = SHAPE
    assert sinr_db(rd, detectable) == pytest.approx(
        10 * math.log10(m * n), abs=0.5)


def test_sinr_amplitude_doubling_adds_6db():
    rd1, detectable, _ = reference_setup(seed=3, amp=1.0)
    rd2, _, _ = reference_setup(seed=3, amp=2.0)
    gain = sinr_db(rd2, detectable) - sinr_db(rd1, detectable)
    assert gain == pytest.approx(20 * math.log10(2.0), abs=0.1)


def test_sinr_raised_floor_drops_10db():
    rd, detectable, _ = reference_setup(seed=4)
    raised = rd.data * math.sqrt(10.0)
    ii, jj = detectable.index_arrays()
    raised[ii, jj] = rd.data[ii, jj]  # targets unchanged
    drop = sinr_db(RdMap(raised, "boxcar"), detectable) \
        - sinr_db(rd, detectable)
    assert drop == pytest.approx(-10.0, abs=1.0)


def test_sinr_requires_bins():
    rd, _, _ = reference_setup(seed=5)
    with pytest.raises(EmptyDetectableSet):
        sinr_db(rd, bin_set())


def test_phase_errors_basic():
    rng = np.random.default_rng(6)
    data = rng.standard_normal(SHAPE) + 1j * rng.standard_normal(SHAPE)
    ref = RdMap(data, "hann")
    bins = bin_set((5, 5), (6, 6), (7, 7))
    assert np.all(phase_errors_deg(ref, ref, bins) == 0.0)
    rotated = RdMap(data * np.exp(1j * math.pi / 2.0), "hann")
    err = phase_errors_deg(ref, rotated, bins)
    np.testing.assert_allclose(err, 90.0, atol=1e-9)


def test_phase_errors_fold_into_half_turn():
    data = np.ones(SHAPE, np.complex128)
    ref = RdMap(data, "hann")
    # 270 degrees wraps to 90; exactly 180 folds just below 180
    r270 = RdMap(data * np.exp(1.5j * math.pi), "hann")
    np.testing.assert_allclose(phase_errors_deg(ref, r270, bin_set((0, 0))),
                               90.0, atol=1e-9)
    r180 = RdMap(data * np.exp(1j * math.pi), "hann")
    err = phase_errors_deg(ref, r180, bin_set((0, 0)))
    assert err[0] < 180.0
    assert err[0] == pytest.approx(180.0, abs=1e-9)


def test_phase_errors_symmetry_and_guards():
    rng = np.random.default_rng(7)
    a = RdMap(rng.standard_normal(SHAPE) + 1j * rng.standard_normal(SHAPE),
              "hann")
    b = RdMap(rng.standard_normal(SHAPE) + 1j * rng.standard_normal(SHAPE),
              "hann")
    bins = bin_set((1, 1), (2, 2), (3, 3), (4, 4))
    np.testing.assert_allclose(phase_errors_deg(a, b, bins),
                               phase_errors_deg(b, a, bins), atol=1e-12)
    with pytest.raises(EmptyBinSet):
        phase_errors_deg(a, b, bin_set())
    small = RdMap(np.ones((2, 2), np.complex128), "hann")
    with pytest.raises(DimensionMismatch):
        phase_errors_deg(a, small, bins)


def test_global_rotation_invariance():
    # PD, SINR, and phase errors ignore a unit-modulus scaling of both maps
    rd, detectable, model = reference_setup(seed=8)
    spun = RdMap(rd.data * np.exp(0.77j), "boxcar")
    assert probability_of_detection(spun, detectable, model) == \
        probability_of_detection(rd, detectable, model)
    assert sinr_db(spun, detectable) == pytest.approx(
        sinr_db(rd, detectable), rel=1e-12)
    np.testing.assert_allclose(phase_errors_deg(rd, rd, detectable),
                               phase_errors_deg(spun, spun, detectable),
                               atol=1e-9)


def test_cdf_from_samples_oracle():
    cdf = cdf_from_samples(np.array([0.0, 0.4, 1.0]),
                           np.array([0.0, 0.5, 1.0, 1.5]))
    np.testing.assert_allclose(cdf, [1 / 3, 2 / 3, 1.0, 1.0])
    assert np.all(cdf_from_samples(np.empty(0), np.array([0.0, 1.0])) == 0)
    with pytest.raises(ValueError):
        cdf_from_samples(np.array([1.0]), np.array([1.0, 0.5]))
    with pytest.raises(ValueError):
        cdf_from_samples(np.array([1.0]), np.empty(0))


def test_cdf_of_identical_maps_is_one_everywhere():
    rd, detectable, _ = reference_setup(seed=9)
    cdf = phase_error_cdf(rd, rd, detectable)
    assert np.all(cdf == 1.0)


def test_cdf_constant_rotation_steps_at_90():
    rng = np.random.default_rng(10)
    data = rng.standard_normal(SHAPE) + 1j * rng.standard_normal(SHAPE)
    ref = RdMap(data, "hann")
    rot = RdMap(data * np.exp(1j * math.pi / 2.0), "hann")
    bins = bin_set(*[(i, i) for i in range(10)])
    # errors equal 90 deg up to round-off, so bracket the step
    grid = np.array([0.0, 89.999, 90.001, 179.999])
    cdf = phase_error_cdf(ref, rot, bins, grid)
    np.testing.assert_allclose(cdf, [0.0, 0.0, 1.0, 1.0])


def test_cdf_uniform_phases_match_uniform_law():
    rng = np.random.default_rng(11)
    n = 1000
    ii = np.repeat(np.arange(50), 20)
    jj = np.tile(np.arange(20), 50)
    bins = TargetBinSet(bins=tuple(zip(ii.tolist(), jj.tolist())),
                        sources=tuple((k,) for k in range(n)), shape=SHAPE)
    data = np.ones(SHAPE, np.complex128)
    spun = np.ones(SHAPE, np.complex128)
    spun[ii, jj] = np.exp(2j * math.pi * rng.random(n))
    ref, mit = RdMap(data, "hann"), RdMap(spun, "hann")
    grid = np.array([30.0, 60.0, 90.0, 120.0, 150.0, 179.999])
    cdf = phase_error_cdf(ref, mit, bins, grid)
    np.testing.assert_allclose(cdf, np.minimum(grid / 180.0, 1.0), atol=0.03)
    assert cdf[-1] == 1.0


def test_cdf_reaches_one_at_last_default_grid_point():
    assert DEFAULT_ERROR_GRID_DEG.shape == (360,)
    assert DEFAULT_ERROR_GRID_DEG[0] == 0.0
    assert DEFAULT_ERROR_GRID_DEG[-1] < 180.0
    rng = np.random.default_rng(12)
    data = rng.standard_normal(SHAPE) + 1j * rng.standard_normal(SHAPE)
    other = rng.standard_normal(SHAPE) + 1j * rng.standard_normal(SHAPE)
    bins = bin_set(*[(i, 2 * i) for i in range(40)])
    cdf = phase_error_cdf(RdMap(data, "hann"), RdMap(other, "hann"), bins)
    assert np.all(np.diff(cdf) >= 0)


def test_trial_metrics_validation():
    ok = TrialMetrics(method="none", p_interference=0.5, pd=1.0,
                      sinr_db=10.0, phase_error_deg=np.array([0.0, 90.0]),
                      detectable_count=2)
    assert ok.pd == 1.0
    with pytest.raises(ValueError):
        TrialMetrics(method="none", p_interference=0.5, pd=1.5,
                     sinr_db=10.0, phase_error_deg=np.empty(0),
                     detectable_count=0)
    with pytest.raises(ValueError):
        TrialMetrics(method="none", p_interference=0.5, pd=1.0,
                     sinr_db=10.0, phase_error_deg=np.array([180.0]),
                     detectable_count=1)
