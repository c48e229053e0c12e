// Copyright 2026 The GIR Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <span>

namespace gir {

/// Probability that a random positive outscores a random negative, ties
/// counted as 1/2. Throws InvalidArgument unless both classes are present.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

/// Fraction of equal entries. Throws on empty or mismatched input.
double accuracy(std::span<const int> predictions, std::span<const int> labels);

}  // namespace gir
