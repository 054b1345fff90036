"""Deterministic Monte Carlo harness.

A sweep runs trials_per_point independent trials at each interference
probability in p_grid and scores every configured mitigation method on
the same per-trial frame.  Per-trial seeds are derived from
(master_seed, p, trial_index) through a splittable seed sequence, so any
trial can be reproduced in isolation and parallel scheduling cannot
change a single output byte.

One trial: generate a scene, assign interferers, synthesize the frame,
compute the nominally detectable bin set from the interference-free map,
then per method mitigate, form the RD map, and score PD / SINR / phase
error against the clean reference.
"""

import hashlib
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
import yaml

from . import __version__
from .dsp import DetectorConfig, StftConfig
from .errors import ConfigError
from .metrics import (DEFAULT_ERROR_GRID_DEG, TrialMetrics, cdf_from_samples,
                      phase_errors_deg, probability_of_detection, sinr_db)
from .mitigation import td_th, tfd_th
from .rdproc import (expected_target_bins, nominal_detectable_set,
                     nominal_threshold_model, range_doppler_map)
from .rfconfig import RadarConfig, default_radar_config
from .scene import ScenarioConfig, assign_interferers, generate_scene
from .synth import AdcFrame, synthesize_frame

METHODS = ("none", "td_th", "tfd_th")
DEFAULT_P_GRID = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)

SCENE_ASSUMPTIONS = (
    "victim moves at scenario.ego_speed_mps in lane scenario.ego_lane",
    "guardrail scatterers carry zero radial velocity "
    "(stationary clutter treated as motion-compensated)",
)


# Default thresholds are absolute scalar levels (the algorithms' beta),
# calibrated against the default scenario amplitudes with unit noise power:
# clean frames stay below both levels (|sample| <= ~3.9, |TF cell| <= ~27
# across hundreds of seeded frames) while interference bursts at the
# default INR sit well above them, so p = 0 frames pass through untouched.
def _default_td_detector() -> DetectorConfig:
    return DetectorConfig(kind="fixed", fixed_level=5.0)


def _default_tfd_detector() -> DetectorConfig:
    return DetectorConfig(kind="fixed", fixed_level=32.0)


@dataclass(frozen=True)
class SweepConfig:
    """Full description of a sweep; everything an output depends on."""

    radar: RadarConfig = field(default_factory=default_radar_config)
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    p_grid: tuple = DEFAULT_P_GRID
    trials_per_point: int = 100
    methods: tuple = METHODS
    td_detector: DetectorConfig = field(default_factory=_default_td_detector)
    tfd_detector: DetectorConfig = field(default_factory=_default_tfd_detector)
    stft: StftConfig = field(default_factory=StftConfig)
    pfa: float = 0.001
    selection_margin_db: float = 1.0
    master_seed: int = 1729

    def __post_init__(self):
        grid = tuple(float(p) for p in self.p_grid)
        object.__setattr__(self, "p_grid", grid)
        if not grid or any(not 0.0 <= p <= 1.0 for p in grid):
            raise ConfigError("p_grid must be non-empty within [0, 1]")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("p_grid must be strictly ascending")
        if self.trials_per_point < 1:
            raise ConfigError("trials_per_point must be at least 1")
        methods = tuple(self.methods)
        object.__setattr__(self, "methods", methods)
        if not methods or len(set(methods)) != len(methods):
            raise ConfigError("methods must be non-empty and unique")
        unknown = [m for m in methods if m not in METHODS]
        if unknown:
            raise ConfigError(f"unknown methods {unknown}; choose from "
                              f"{METHODS}")
        if not 0.0 < self.pfa <= 1.0:
            raise ConfigError("pfa must lie in (0, 1]")
        if self.master_seed < 0:
            raise ConfigError("master_seed must be non-negative")


@dataclass(frozen=True, eq=False)
class TrialRecord:
    """All methods' metrics for one (p, trial_index); metrics is empty
    when no bin was nominally detectable."""

    p: float
    trial_index: int
    detectable_count: int
    metrics: tuple


@dataclass(frozen=True, eq=False)
class SweepCell:
    """Aggregate over valid trials for one (p, method)."""

    p: float
    method: str
    mean_pd: float
    mean_sinr_db: float
    trial_count: int
    cdf: np.ndarray


@dataclass(frozen=True, eq=False)
class SweepResult:
    config: "SweepConfig"
    cells: tuple
    e_grid: np.ndarray
    config_digest: str
    skipped_trials: int


def trial_seeds(master_seed: int, p: float, trial_index: int) -> tuple:
    """Independent (scene, assignment, noise) seeds for one trial,
    keyed by the probability's bit pattern and the trial index."""
    p_bits = int(np.float64(p).view(np.uint64))
    ss = np.random.SeedSequence(entropy=int(master_seed),
                                spawn_key=(p_bits, int(trial_index)))
    state = ss.generate_state(3, np.uint64)
    return int(state[0]), int(state[1]), int(state[2])


def mitigate(method: str, frame: AdcFrame, cfg: SweepConfig) -> AdcFrame:
    if method == "none":
        return frame
    if method == "td_th":
        return td_th(frame, cfg.td_detector)
    if method == "tfd_th":
        return tfd_th(frame, cfg.stft, cfg.tfd_detector)
    raise ConfigError(f"unknown method {method!r}")


def run_trial(cfg: SweepConfig, p: float, trial_index: int) -> TrialRecord:
    """One fully deterministic trial; see the module docstring."""
    scene_seed, assign_seed, noise_seed = trial_seeds(cfg.master_seed, p,
                                                      trial_index)
    scene = generate_scene(cfg.scenario, cfg.radar, scene_seed)
    scene = assign_interferers(scene, cfg.scenario, cfg.radar, p, assign_seed)
    frame = synthesize_frame(scene, cfg.radar, noise_seed)
    clean_map = range_doppler_map(AdcFrame(frame.clean, cfg.radar))
    expected = expected_target_bins(scene, cfg.radar)
    model = nominal_threshold_model(clean_map, expected, cfg.pfa)
    detectable = nominal_detectable_set(clean_map, expected, cfg.pfa,
                                        cfg.selection_margin_db)
    if len(detectable) == 0:
        return TrialRecord(p, trial_index, 0, ())
    metrics = []
    for method in cfg.methods:
        rd = range_doppler_map(mitigate(method, frame, cfg))
        metrics.append(TrialMetrics(
            method=method,
            p_interference=p,
            pd=probability_of_detection(rd, detectable, model),
            sinr_db=sinr_db(rd, detectable),
            phase_error_deg=phase_errors_deg(clean_map, rd, detectable),
            detectable_count=len(detectable)))
    return TrialRecord(p, trial_index, len(detectable), tuple(metrics))


def _guarded_trial(args) -> TrialRecord:
    cfg, p, trial_index = args
    try:
        return run_trial(cfg, p, trial_index)
    except Exception as exc:
        seeds = trial_seeds(cfg.master_seed, p, trial_index)
        raise RuntimeError(
            f"trial failed at p={p}, trial_index={trial_index}, "
            f"seeds={seeds}: {exc}") from exc


def run_sweep(cfg: SweepConfig, threads: int = 1) -> SweepResult:
    """All trials for all grid points, aggregated into per-(p, method)
    cells.  threads > 1 distributes trials over worker processes; the
    aggregation order is fixed by (p, trial_index), never by completion
    order."""
    items = [(cfg, p, t) for p in cfg.p_grid
             for t in range(cfg.trials_per_point)]
    if threads <= 1:
        records = [_guarded_trial(item) for item in items]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(_guarded_trial, items, chunksize=1))

    cells = []
    skipped = 0
    offset = 0
    for p in cfg.p_grid:
        batch = records[offset:offset + cfg.trials_per_point]
        offset += cfg.trials_per_point
        valid = [r for r in batch if r.detectable_count > 0]
        skipped += len(batch) - len(valid)
        for mi, method in enumerate(cfg.methods):
            pds = [r.metrics[mi].pd for r in valid]
            sinrs = [r.metrics[mi].sinr_db for r in valid]
            if valid:
                pooled = np.concatenate(
                    [r.metrics[mi].phase_error_deg for r in valid])
                mean_pd = float(np.mean(pds))
                mean_sinr = float(np.mean(sinrs))
            else:
                pooled = np.array([])
                mean_pd = math.nan
                mean_sinr = math.nan
            cells.append(SweepCell(
                p=p, method=method, mean_pd=mean_pd, mean_sinr_db=mean_sinr,
                trial_count=len(valid),
                cdf=cdf_from_samples(pooled, DEFAULT_ERROR_GRID_DEG)))
    return SweepResult(config=cfg, cells=tuple(cells),
                       e_grid=np.asarray(DEFAULT_ERROR_GRID_DEG),
                       config_digest=sweep_config_digest(cfg),
                       skipped_trials=skipped)


# -- configuration serialization ------------------------------------------

def sweep_config_to_dict(cfg: SweepConfig) -> dict:
    """Plain nested dict of the full sweep configuration."""
    r, s = cfg.radar, cfg.scenario
    return {
        "radar": {
            "carrier_freq_hz": r.carrier_freq_hz,
            "sweep_bandwidth_hz": r.sweep_bandwidth_hz,
            "active_time_s": r.active_time_s,
            "pri_s": r.pri_s,
            "sample_period_s": r.sample_period_s,
            "samples_per_chirp": r.samples_per_chirp,
            "chirps_per_frame": r.chirps_per_frame,
            "noise_variance": r.noise_variance,
        },
        "scenario": {
            "lane_count": s.lane_count,
            "vehicle_count": s.vehicle_count,
            "guardrail_scatterer_count": s.guardrail_scatterer_count,
            "category_mix": list(s.category_mix),
            "highway_length_m": s.highway_length_m,
            "lane_width_m": s.lane_width_m,
            "min_downrange_m": s.min_downrange_m,
            "ego_lane": s.ego_lane,
            "ego_speed_mps": s.ego_speed_mps,
            "speed_min_mps": s.speed_min_mps,
            "speed_max_mps": s.speed_max_mps,
            "vehicle_rcs_m2": s.vehicle_rcs_m2,
            "guardrail_rcs_m2": s.guardrail_rcs_m2,
            "ref_range_m": s.ref_range_m,
            "ref_snr_db": s.ref_snr_db,
            "ref_inr_db": s.ref_inr_db,
        },
        "td_detector": _detector_to_dict(cfg.td_detector),
        "tfd_detector": _detector_to_dict(cfg.tfd_detector),
        "stft": {
            "window_length": cfg.stft.window_length,
            "hop": cfg.stft.hop,
            "window": cfg.stft.window,
        },
        "sweep": {
            "p_grid": list(cfg.p_grid),
            "trials_per_point": cfg.trials_per_point,
            "methods": list(cfg.methods),
            "pfa": cfg.pfa,
            "selection_margin_db": cfg.selection_margin_db,
            "master_seed": cfg.master_seed,
        },
    }


def _detector_to_dict(det: DetectorConfig) -> dict:
    return {
        "kind": det.kind,
        "cfar_training": det.cfar_training,
        "cfar_guard": det.cfar_guard,
        "cfar_scale": det.cfar_scale,
        "mad_k": det.mad_k,
        "fixed_level": det.fixed_level,
    }


def _section(doc: dict, name: str) -> dict:
    part = doc.get(name, {})
    if part is None:
        part = {}
    if not isinstance(part, dict):
        raise ConfigError(f"section {name!r} must be a mapping")
    return dict(part)


def _build(section_name: str, part: dict, fields_con: dict, factory):
    """Construct a config object from one section with type coercion;
    unknown keys are an error so typos cannot silently vanish."""
    unknown = set(part) - set(fields_con)
    if unknown:
        raise ConfigError(
            f"unknown keys in section {section_name!r}: {sorted(unknown)}")
    kwargs = {}
    for key, value in part.items():
        conv = fields_con[key]
        try:
            kwargs[key] = conv(value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(
                f"bad value for {section_name}.{key}: {value!r}") from exc
    try:
        return factory(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid section {section_name!r}: {exc}") from exc


def _float_list(value):
    return tuple(float(v) for v in value)


def _str_list(value):
    return tuple(str(v) for v in value)


def sweep_config_from_dict(doc: dict) -> SweepConfig:
    if not isinstance(doc, dict):
        raise ConfigError("configuration document must be a mapping")
    unknown = set(doc) - {"radar", "scenario", "td_detector", "tfd_detector",
                          "stft", "sweep"}
    if unknown:
        raise ConfigError(f"unknown top-level sections: {sorted(unknown)}")
    radar = _build("radar", _section(doc, "radar"), {
        "carrier_freq_hz": float, "sweep_bandwidth_hz": float,
        "active_time_s": float, "pri_s": float, "sample_period_s": float,
        "samples_per_chirp": int, "chirps_per_frame": int,
        "noise_variance": float,
    }, default_radar_config_override)
    scenario = _build("scenario", _section(doc, "scenario"), {
        "lane_count": int, "vehicle_count": int,
        "guardrail_scatterer_count": int, "category_mix": _float_list,
        "highway_length_m": float, "lane_width_m": float,
        "min_downrange_m": float, "ego_lane": int, "ego_speed_mps": float,
        "speed_min_mps": float, "speed_max_mps": float,
        "vehicle_rcs_m2": float, "guardrail_rcs_m2": float,
        "ref_range_m": float, "ref_snr_db": float, "ref_inr_db": float,
    }, ScenarioConfig)
    detector_fields = {
        "kind": str, "cfar_training": int, "cfar_guard": int,
        "cfar_scale": float, "mad_k": float, "fixed_level": float,
    }
    td_part = _section(doc, "td_detector")
    td_detector = (_build("td_detector", td_part, detector_fields,
                          DetectorConfig) if td_part
                   else _default_td_detector())
    tfd_part = _section(doc, "tfd_detector")
    tfd_detector = (_build("tfd_detector", tfd_part, detector_fields,
                           DetectorConfig) if tfd_part
                    else _default_tfd_detector())
    stft_cfg = _build("stft", _section(doc, "stft"), {
        "window_length": int, "hop": int, "window": str,
    }, StftConfig)
    sweep_part = _section(doc, "sweep")
    sweep_fields = {
        "p_grid": _float_list, "trials_per_point": int,
        "methods": _str_list, "pfa": float, "selection_margin_db": float,
        "master_seed": int,
    }
    unknown = set(sweep_part) - set(sweep_fields)
    if unknown:
        raise ConfigError(f"unknown keys in section 'sweep': "
                          f"{sorted(unknown)}")
    kwargs = {k: sweep_fields[k](v) for k, v in sweep_part.items()}
    return SweepConfig(radar=radar, scenario=scenario,
                       td_detector=td_detector, tfd_detector=tfd_detector,
                       stft=stft_cfg, **kwargs)


def default_radar_config_override(**kwargs) -> RadarConfig:
    """Radar config from defaults plus overrides."""
    return replace(default_radar_config(), **kwargs)


def load_config(path) -> SweepConfig:
    """Parse a YAML sweep configuration file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if doc is None:
        doc = {}
    return sweep_config_from_dict(doc)


def sweep_config_digest(cfg: SweepConfig) -> str:
    canon = yaml.safe_dump(sweep_config_to_dict(cfg), sort_keys=True)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()[:16]


# -- persistence -----------------------------------------------------------

SUMMARY_CSV = "sweep_summary.csv"
CDF_CSV = "phase_error_cdf.csv"
METADATA_FILE = "run_metadata.yaml"


def _fmt(x: float) -> str:
    return repr(float(x))


def export(result: SweepResult, out_dir, format: str = "csv") -> dict:
    """Write the summary CSV, the pooled phase-error CDF CSV, and the
    run metadata document.  Returns {name: path}.  All text is UTF-8
    with LF line endings and no timestamps, so identical results export
    to identical bytes."""
    if format != "csv":
        raise ValueError(f"unsupported export format {format!r}")
    os.makedirs(out_dir, exist_ok=True)
    summary_path = os.path.join(out_dir, SUMMARY_CSV)
    lines = ["p,method,mean_pd,mean_sinr_db,trial_count"]
    for cell in result.cells:
        lines.append(f"{_fmt(cell.p)},{cell.method},{_fmt(cell.mean_pd)},"
                     f"{_fmt(cell.mean_sinr_db)},{cell.trial_count}")
    _write_text(summary_path, lines)

    cdf_path = os.path.join(out_dir, CDF_CSV)
    lines = ["p,method,e_deg,cdf"]
    for cell in result.cells:
        for e_deg, value in zip(result.e_grid, cell.cdf):
            lines.append(f"{_fmt(cell.p)},{cell.method},{_fmt(e_deg)},"
                         f"{_fmt(value)}")
    _write_text(cdf_path, lines)

    meta_path = os.path.join(out_dir, METADATA_FILE)
    metadata = {
        "config": sweep_config_to_dict(result.config),
        "config_digest": result.config_digest,
        "package_version": __version__,
        "skipped_trials": result.skipped_trials,
        "assumptions": list(SCENE_ASSUMPTIONS),
    }
    with open(meta_path, "wb") as fh:
        fh.write(yaml.safe_dump(metadata, sort_keys=True).encode("utf-8"))
    return {"summary": summary_path, "cdf": cdf_path, "metadata": meta_path}


def _write_text(path, lines) -> None:
    with open(path, "wb") as fh:
        fh.write(("\n".join(lines) + "\n").encode("utf-8"))


def load_metadata(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return yaml.safe_load(fh)


def metadata_digest_matches(metadata: dict) -> bool:
    """True when the stored digest matches a digest recomputed from the
    stored configuration (round-trip integrity check)."""
    cfg = sweep_config_from_dict(metadata["config"])
    return sweep_config_digest(cfg) == metadata["config_digest"]
