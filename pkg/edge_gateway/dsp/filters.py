# Copyright 2023 The EdgeGateway Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Band-pass and moving-average conditioning of raw ECG."""

import numpy as np
import scipy.ndimage
import scipy.signal

from edge_gateway.dsp.ecg_signal import check_not_empty
from edge_gateway.utils.errors import ParameterError


def preprocess(
    signal,
    band_low=0.5,
    band_high=40.0,
    ma_window=5,
    filter_order=5,
):
    """Band-pass filter then smooth an ECG signal.

    A zero-phase Butterworth band-pass removes baseline wander and DC as well
    as mains hum and other out-of-band tones. A centered moving average then
    suppresses residual high-frequency noise. The output has the same length
    and sampling rate as the input.

    Args:
        signal: `EcgSignal`. The raw signal.
        band_low: float. Lower pass-band edge in Hz.
        band_high: float. Upper pass-band edge in Hz. Must be below Nyquist.
        ma_window: int. Width of the moving average in samples. `1` disables
            smoothing.
        filter_order: int. Butterworth order of each band edge.

    Returns:
        A new `EcgSignal`.
    """
    nyquist = signal.sampling_rate / 2
    if not 0 < band_low < band_high < nyquist:
        raise ParameterError(
            "Band edges must satisfy `0 < band_low < band_high < "
            f"sampling_rate / 2`. Received: band_low={band_low}, "
            f"band_high={band_high}, sampling_rate={signal.sampling_rate}"
        )
    if int(ma_window) != ma_window or ma_window < 1:
        raise ParameterError(
            "`ma_window` must be an integer >= 1. "
            f"Received: ma_window={ma_window}"
        )
    if filter_order < 1:
        raise ParameterError(
            "`filter_order` must be >= 1. "
            f"Received: filter_order={filter_order}"
        )
    check_not_empty(signal)

    sos = scipy.signal.butter(
        filter_order,
        [band_low, band_high],
        btype="bandpass",
        fs=signal.sampling_rate,
        output="sos",
    )
    samples = signal.samples
    # `sosfiltfilt` needs the input to be longer than its edge padding.
    padlen = min(3 * (2 * len(sos) + 1), len(samples) - 1)
    filtered = scipy.signal.sosfiltfilt(sos, samples, padlen=padlen)
    if ma_window > 1:
        filtered = scipy.ndimage.uniform_filter1d(
            filtered, size=int(ma_window), mode="nearest"
        )
    return signal.with_samples(np.asarray(filtered, dtype="float64"))
