// Copyright 2026 The OTAFL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OTAFL_TYPES_H_
#define OTAFL_TYPES_H_

#include <Eigen/Dense>

namespace otafl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Dense parameter-space vector: the unit of upload, aggregation and clipping.
using GradientVector = Eigen::VectorXd;

}  // namespace otafl

#endif  // OTAFL_TYPES_H_
