# Copyright 2026 The Obliv1D Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#   http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Private 1-D CNN inference engine."""

from obliv1d._core import (
    AbortError,
    Model,
    UsageError,
    ValidationError,
    gen_inputs,
    gen_model,
    infer_plain,
    load_input,
    load_model,
    load_test_vectors,
    parse_model,
    requant_from_multiplier,
    secure_infer,
)

__all__ = [
    "AbortError",
    "Model",
    "UsageError",
    "ValidationError",
    "gen_inputs",
    "gen_model",
    "infer_plain",
    "load_input",
    "load_model",
    "load_test_vectors",
    "parse_model",
    "requant_from_multiplier",
    "secure_infer",
]
