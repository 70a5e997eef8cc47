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

from edge_gateway.triage.alerts import AlertEvent
from edge_gateway.triage.alerts import AlertRule
from edge_gateway.triage.alerts import default_rules
from edge_gateway.triage.alerts import raise_alerts
from edge_gateway.triage.feature_scaling import FeatureScaler
from edge_gateway.triage.feature_scaling import features_to_matrix
from edge_gateway.triage.linear_svm import LinearSvmModel
from edge_gateway.triage.linear_svm import svm_predict
from edge_gateway.triage.linear_svm import svm_train
from edge_gateway.triage.naive_bayes import GaussianNbModel
from edge_gateway.triage.naive_bayes import nb_predict
from edge_gateway.triage.naive_bayes import nb_train
from edge_gateway.triage.triage_model import TriageModel
from edge_gateway.triage.triage_model import bootstrap_triage_model
