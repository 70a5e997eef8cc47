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

from edge_gateway.dsp.analysis import SignalAnalysis
from edge_gateway.dsp.analysis import analyze_signal
from edge_gateway.dsp.ecg_signal import EcgSignal
from edge_gateway.dsp.ecg_signal import read_signal_csv
from edge_gateway.dsp.ecg_signal import write_signal_csv
from edge_gateway.dsp.features import BeatFeatures
from edge_gateway.dsp.features import extract_features
from edge_gateway.dsp.features import read_features_csv
from edge_gateway.dsp.features import write_features_csv
from edge_gateway.dsp.filters import preprocess
from edge_gateway.dsp.synthetic import BeatShape
from edge_gateway.dsp.synthetic import Segment
from edge_gateway.dsp.synthetic import synthesize_ecg
from edge_gateway.dsp.synthetic import synthesize_recording
from edge_gateway.dsp.wave_detection import DetectionConfig
from edge_gateway.dsp.wave_detection import WaveMarks
from edge_gateway.dsp.wave_detection import detect_waves
from edge_gateway.dsp.wave_detection import heart_rate
from edge_gateway.dsp.wavelets import WaveletCoeffs
from edge_gateway.dsp.wavelets import coeff_payload_reduction
from edge_gateway.dsp.wavelets import dwt
from edge_gateway.dsp.wavelets import idwt
from edge_gateway.dsp.wavelets import wavelet_denoise
from edge_gateway.dsp.wavelets import wavelet_payload
