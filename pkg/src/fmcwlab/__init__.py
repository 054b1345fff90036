"""Desk-scale FMCW automotive radar interference laboratory.

Synthesizes dechirped victim-radar ADC frames containing target echoes,
classified mutual interference, and noise; mitigates interference by
time-domain and time-frequency-domain thresholding; and evaluates the
methods with a deterministic Monte Carlo harness (probability of
detection, SINR, and phase-error CDF versus interference probability).
"""

__version__ = "0.1.0"

from .dsp import DetectorConfig, StftConfig, TfMatrix, detector_threshold, istft, stft
from .errors import FmcwLabError
from .metrics import (DEFAULT_ERROR_GRID_DEG, TrialMetrics, phase_error_cdf,
                      probability_of_detection, sinr_db)
from .mitigation import td_th, tfd_th
from .rdproc import (RdMap, TargetBinSet, ThresholdModel, detect,
                     expected_target_bins, nominal_detectable_set,
                     nominal_threshold_model, range_doppler_map)
from .rfconfig import (InterfererWaveform, InterferenceCategory, RadarConfig,
                       chirp_slope, classify_interference, corrupted_fraction,
                       default_radar_config, interference_duration,
                       interferer_slope)
from .scene import (Interferer, ScenarioConfig, Scene, Target, TargetKind,
                    assign_interferers, generate_scene, scenario_preset)
from .synth import (AdcFrame, assemble, read_frame, synth_interference,
                    synth_noise, synth_target, synth_targets,
                    synthesize_frame, write_frame)
from .harness import (SweepConfig, SweepResult, export, load_config,
                      run_sweep, run_trial)
