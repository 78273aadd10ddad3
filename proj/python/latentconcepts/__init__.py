# Copyright 2026 The latentconcepts Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Latent concept analysis over per-layer token embeddings."""

from ._core import (
    DataError,
    Dendrogram,
    InvariantError,
    LatentcError,
    UsageError,
    adjusted_rand_index,
    read_ecx,
    required_cover,
    run_pipeline,
    synth,
    ward,
    write_ecx,
)

__all__ = [
    "DataError",
    "Dendrogram",
    "InvariantError",
    "LatentcError",
    "UsageError",
    "adjusted_rand_index",
    "read_ecx",
    "required_cover",
    "run_pipeline",
    "synth",
    "ward",
    "write_ecx",
]
