"""Highway scene generation: vehicle and guardrail scatterers plus the
interferer assignment process.

Geometry: a straight highway segment ahead of the victim, lane_count lanes
of lane_width_m each, guardrails along both edges.  The victim radar sits
at x = 0 in the center of ego_lane moving at ego_speed_mps in +x; lanes in
the victim's half travel +x, the other half -x.  Scatterer positions are
converted to radial range and range rate relative to the victim; range
rates are folded into the radar's unambiguous Doppler interval, which
leaves the sampled frame unchanged (slow-time phase is periodic in
Doppler) while keeping every stored value synthesizable.

Amplitudes follow point-scatterer budgets anchored at a reference range:
target |a| scales as sqrt(RCS) / r^2 (two-way), interferer |a| as 1 / r
(one-way direct path).  The one-way advantage is what lets interference
dominate the victim's samples.
"""

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np
import yaml

from . import rfconfig
from .errors import InfeasibleGeometry, InvalidProbability
from .rfconfig import (CATEGORY_BANDS, InterfererWaveform, InterferenceCategory,
                       RadarConfig)


class TargetKind(str, Enum):
    VEHICLE = "vehicle"
    GUARDRAIL = "guardrail"


@dataclass(frozen=True)
class Target:
    """Point scatterer in radial coordinates relative to the victim."""

    range_m: float
    radial_velocity_mps: float
    amplitude: complex
    kind: TargetKind

    def __post_init__(self):
        if self.range_m <= 0:
            raise ValueError("range_m must be positive")
        if not (math.isfinite(self.amplitude.real)
                and math.isfinite(self.amplitude.imag)):
            raise ValueError("amplitude must be finite")


@dataclass(frozen=True)
class Interferer:
    """Interfering radar co-located with one vehicle target."""

    range_m: float
    amplitude: complex
    waveform: InterfererWaveform

    def __post_init__(self):
        if self.range_m <= 0:
            raise ValueError("range_m must be positive")


@dataclass(frozen=True)
class ScenarioConfig:
    """Scene statistics and amplitude calibration.

    category_mix orders as (uncorrelated, semi_correlated,
    highly_correlated) and must sum to 1.  ref_snr_db is the per-sample
    SNR of a vehicle_rcs_m2 target at ref_range_m; ref_inr_db the
    per-sample INR of an interferer at ref_range_m.
    """

    lane_count: int = 6
    vehicle_count: int = 34
    guardrail_scatterer_count: int = 74
    category_mix: tuple = (0.90, 0.05, 0.05)
    highway_length_m: float = 200.0
    lane_width_m: float = 3.5
    min_downrange_m: float = 50.0
    ego_lane: int = 3
    ego_speed_mps: float = 25.0
    speed_min_mps: float = 15.0
    speed_max_mps: float = 40.0
    vehicle_rcs_m2: float = 10.0
    guardrail_rcs_m2: float = 1.0
    ref_range_m: float = 100.0
    ref_snr_db: float = -30.0
    ref_inr_db: float = 38.0

    def __post_init__(self):
        if self.lane_count < 1 or not 1 <= self.ego_lane <= self.lane_count:
            raise ValueError("ego_lane must be one of the lanes")
        if self.vehicle_count < 0 or self.guardrail_scatterer_count < 0:
            raise ValueError("scatterer counts must be non-negative")
        if len(self.category_mix) != 3 or any(w < 0 for w in self.category_mix):
            raise ValueError("category_mix needs 3 non-negative weights")
        if abs(sum(self.category_mix) - 1.0) > 1e-9:
            raise ValueError("category_mix must sum to 1")
        if not 0 < self.min_downrange_m < self.highway_length_m:
            raise ValueError("min_downrange_m must lie inside the highway")
        if self.speed_min_mps > self.speed_max_mps:
            raise ValueError("speed interval is empty")


def scenario_preset(name: str) -> ScenarioConfig:
    """Named scenario presets: "s1" is dominated by uncorrelated
    interferers, "s2" by highly correlated ones."""
    key = name.strip().lower()
    if key == "s1":
        return ScenarioConfig(category_mix=(0.90, 0.05, 0.05))
    if key == "s2":
        return ScenarioConfig(category_mix=(0.05, 0.05, 0.90))
    raise ValueError(f"unknown scenario preset {name!r}")


@dataclass(frozen=True)
class Scene:
    """Concrete scatterer and interferer population for one trial."""

    targets: tuple
    interferers: tuple
    seed: int

    def __post_init__(self):
        vehicles = [t for t in self.targets if t.kind is TargetKind.VEHICLE]
        if len(self.interferers) > len(vehicles):
            raise ValueError("more interferers than vehicles")

    def vehicles(self) -> list:
        return [t for t in self.targets if t.kind is TargetKind.VEHICLE]


def _reference_noise_power(radar: RadarConfig) -> float:
    # Amplitude budgets are anchored to the receiver noise; a noiseless
    # config falls back to unit power so amplitudes stay meaningful.
    return radar.noise_variance if radar.noise_variance > 0 else 1.0


def _target_amplitude_mag(r: float, rcs: float, scenario: ScenarioConfig,
                          radar: RadarConfig) -> float:
    p_ref = _reference_noise_power(radar) * 10.0 ** (scenario.ref_snr_db / 10.0)
    return math.sqrt(p_ref * rcs / scenario.vehicle_rcs_m2) * (
        scenario.ref_range_m / r) ** 2


def _interferer_amplitude_mag(r: float, scenario: ScenarioConfig,
                              radar: RadarConfig) -> float:
    p_ref = _reference_noise_power(radar) * 10.0 ** (scenario.ref_inr_db / 10.0)
    return math.sqrt(p_ref) * (scenario.ref_range_m / r)


def fold_radial_velocity(rdot: float, radar: RadarConfig) -> float:
    """Fold a range rate into the unambiguous Doppler interval.

    The sampled slow-time phase exp(-j 2 pi f_d m) is periodic in f_d with
    period 1, so the folded value synthesizes a bit-identical frame.
    """
    f_d = 2.0 * rdot * radar.pri_s / radar.wavelength_m
    folded = (f_d + 0.5) % 1.0 - 0.5
    if folded == -0.5:
        folded = np.nextafter(-0.5, 0.0)
    return folded * radar.wavelength_m / (2.0 * radar.pri_s)


def generate_scene(scenario: ScenarioConfig, radar: RadarConfig,
                   seed: int) -> Scene:
    """Draw a deterministic scene: vehicles uniform over lanes and
    downrange, guardrail scatterers evenly spaced along both edges.

    Vehicles move at ground speeds uniform in [speed_min, speed_max] with
    direction set by lane side; guardrail scatterers are stationary and
    carry zero radial velocity (ego motion is treated as compensated for
    stationary clutter).  Raises InfeasibleGeometry if any scatterer falls
    beyond the unambiguous range.
    """
    rng = np.random.default_rng(seed)
    y_ego = (scenario.ego_lane - 0.5) * scenario.lane_width_m
    r_max = radar.max_unambiguous_range_m

    targets = []
    n_veh = scenario.vehicle_count
    lanes = rng.integers(1, scenario.lane_count + 1, size=n_veh)
    xs = rng.uniform(scenario.min_downrange_m, scenario.highway_length_m,
                     size=n_veh)
    speeds = rng.uniform(scenario.speed_min_mps, scenario.speed_max_mps,
                         size=n_veh)
    phases = rng.uniform(0.0, 2.0 * math.pi, size=n_veh)
    half = scenario.lane_count / 2.0
    for i in range(n_veh):
        y = (lanes[i] - 0.5) * scenario.lane_width_m
        x = xs[i]
        r = math.hypot(x, y - y_ego)
        if r >= r_max:
            raise InfeasibleGeometry(
                f"vehicle at {r:.1f} m exceeds unambiguous range {r_max:.1f} m")
        direction = 1.0 if lanes[i] <= half else -1.0
        rdot = x * (direction * speeds[i] - scenario.ego_speed_mps) / r
        mag = _target_amplitude_mag(r, scenario.vehicle_rcs_m2, scenario, radar)
        targets.append(Target(
            range_m=r,
            radial_velocity_mps=fold_radial_velocity(rdot, radar),
            amplitude=mag * complex(math.cos(phases[i]), math.sin(phases[i])),
            kind=TargetKind.VEHICLE))

    n_rail = scenario.guardrail_scatterer_count
    n_left = (n_rail + 1) // 2
    rail_phases = rng.uniform(0.0, 2.0 * math.pi, size=n_rail)
    span = scenario.highway_length_m - scenario.min_downrange_m
    edges = ([0.0] * n_left
             + [scenario.lane_count * scenario.lane_width_m] * (n_rail - n_left))
    rail_idx = list(range(n_left)) + list(range(n_rail - n_left))
    per_side = (n_left, n_rail - n_left)
    for j in range(n_rail):
        count = per_side[0] if j < n_left else per_side[1]
        x = scenario.min_downrange_m + (rail_idx[j] + 0.5) * span / count
        r = math.hypot(x, edges[j] - y_ego)
        if r >= r_max:
            raise InfeasibleGeometry(
                f"guardrail at {r:.1f} m exceeds unambiguous range {r_max:.1f} m")
        mag = _target_amplitude_mag(r, scenario.guardrail_rcs_m2, scenario, radar)
        targets.append(Target(
            range_m=r,
            radial_velocity_mps=0.0,
            amplitude=mag * complex(math.cos(rail_phases[j]),
                                    math.sin(rail_phases[j])),
            kind=TargetKind.GUARDRAIL))

    return Scene(targets=tuple(targets), interferers=(), seed=int(seed))


def assign_interferers(scene: Scene, scenario: ScenarioConfig,
                       radar: RadarConfig, p_interference: float,
                       seed: int, mix: tuple = None) -> Scene:
    """Promote each vehicle independently to an interferer host with
    probability p_interference.

    Each interferer draws: category from mix (ordered uncorrelated, semi,
    highly; defaults to scenario.category_mix), gamma uniform inside the
    category band, slope sign equiprobable, chirp interval uniform in
    [0.5, 1.5] x the victim's, start offset uniform in [0, interval), and
    a one-way amplitude at the host vehicle's range per the scenario's
    reference INR.
    """
    if not 0.0 <= p_interference <= 1.0:
        raise InvalidProbability(f"p must lie in [0, 1], got {p_interference}")
    if mix is None:
        mix = scenario.category_mix
    if len(mix) != 3 or any(w < 0 for w in mix) or abs(sum(mix) - 1.0) > 1e-9:
        raise ValueError("mix needs 3 non-negative weights summing to 1")
    rng = np.random.default_rng(seed)
    order = (InterferenceCategory.UNCORRELATED,
             InterferenceCategory.SEMI_CORRELATED,
             InterferenceCategory.HIGHLY_CORRELATED)
    weights = np.asarray(mix, dtype=np.float64)
    weights = weights / weights.sum()

    vehicles = scene.vehicles()
    flags = rng.random(len(vehicles)) < p_interference
    interferers = []
    for vehicle, flagged in zip(vehicles, flags):
        if not flagged:
            continue
        category = order[rng.choice(3, p=weights)]
        lo, hi = CATEGORY_BANDS[category]
        gamma = rng.uniform(lo, hi)
        if gamma <= lo:
            gamma = np.nextafter(lo, hi)
        sign = 1 if rng.random() < 0.5 else -1
        pri = rng.uniform(0.5, 1.5) * radar.pri_s
        offset = rng.uniform(0.0, pri)
        phase = rng.uniform(0.0, 2.0 * math.pi)
        mag = _interferer_amplitude_mag(vehicle.range_m, scenario, radar)
        interferers.append(Interferer(
            range_m=vehicle.range_m,
            amplitude=mag * complex(math.cos(phase), math.sin(phase)),
            waveform=InterfererWaveform(
                gamma=float(gamma), slope_sign=sign, pri_s=float(pri),
                start_offset_s=float(offset), category=category)))
    return replace(scene, interferers=tuple(interferers))


def scene_to_dict(scene: Scene) -> dict:
    """Plain-data form of a scene for debugging and replay."""
    return {
        "seed": int(scene.seed),
        "targets": [
            {"range_m": float(t.range_m),
             "radial_velocity_mps": float(t.radial_velocity_mps),
             "amplitude_re": float(t.amplitude.real),
             "amplitude_im": float(t.amplitude.imag),
             "kind": t.kind.value}
            for t in scene.targets],
        "interferers": [
            {"range_m": float(i.range_m),
             "amplitude_re": float(i.amplitude.real),
             "amplitude_im": float(i.amplitude.imag),
             "gamma": float(i.waveform.gamma),
             "slope_sign": int(i.waveform.slope_sign),
             "pri_s": float(i.waveform.pri_s),
             "start_offset_s": float(i.waveform.start_offset_s),
             "category": i.waveform.category.value}
            for i in scene.interferers],
    }


def scene_from_dict(doc: dict) -> Scene:
    targets = tuple(
        Target(range_m=t["range_m"],
               radial_velocity_mps=t["radial_velocity_mps"],
               amplitude=complex(t["amplitude_re"], t["amplitude_im"]),
               kind=TargetKind(t["kind"]))
        for t in doc["targets"])
    interferers = tuple(
        Interferer(range_m=i["range_m"],
                   amplitude=complex(i["amplitude_re"], i["amplitude_im"]),
                   waveform=InterfererWaveform(
                       gamma=i["gamma"], slope_sign=i["slope_sign"],
                       pri_s=i["pri_s"], start_offset_s=i["start_offset_s"],
                       category=InterferenceCategory(i["category"])))
        for i in doc["interferers"])
    return Scene(targets=targets, interferers=interferers, seed=doc["seed"])


def scene_to_yaml(scene: Scene) -> str:
    return yaml.safe_dump(scene_to_dict(scene), sort_keys=False)


def scene_from_yaml(text: str) -> Scene:
    return scene_from_dict(yaml.safe_load(text))
