"""Interference mitigation by thresholding.

Two methods over an ADC frame, both zeroing samples or cells the
detector flags and leaving everything else untouched:

- td_th: per chirp row, threshold the sample magnitudes directly.
- tfd_th: per chirp row, STFT to a time-frequency matrix, threshold each
  frequency row's magnitudes along the time-frame axis, zero exceedances,
  and invert.  Target beat tones sit still in frequency and survive;
  interference sweeps through and is excised where it crosses.
"""

import numpy as np

from .dsp import (DetectorConfig, StftConfig, TfMatrix, detector_threshold,
                  interior_columns, istft, stft)
from .synth import AdcFrame


def td_th(frame: AdcFrame, det: DetectorConfig) -> AdcFrame:
    """Time-domain thresholding: zero samples whose magnitude exceeds the
    per-row detector threshold; all other samples pass through
    bit-identical."""
    mag = np.abs(frame.data)
    thr = detector_threshold(mag, det)
    out = frame.data.copy()
    out[mag > thr] = 0.0
    return AdcFrame(out, frame.config)


def tfd_th(frame: AdcFrame, stft_cfg: StftConfig,
           det: DetectorConfig) -> AdcFrame:
    """Time-frequency-domain thresholding: per chirp row, zero flagged
    time-frequency cells and reconstruct the row by weighted overlap-add."""
    out = np.empty_like(frame.data)
    interior = interior_columns(stft_cfg, frame.data.shape[1])
    for i in range(frame.data.shape[0]):
        tf = stft(frame.data[i], stft_cfg)
        mag = np.abs(tf.data)
        thr = detector_threshold(mag, det)
        cleaned = tf.data.copy()
        cleaned[(mag > thr) & interior[None, :]] = 0.0
        out[i] = istft(TfMatrix(data=cleaned, config=tf.config,
                                original_length=tf.original_length))
    return AdcFrame(out, frame.config)
