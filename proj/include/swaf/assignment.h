// Copyright 2026 The SWAF Authors.
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

#ifndef SWAF_ASSIGNMENT_H_
#define SWAF_ASSIGNMENT_H_

#include <vector>

namespace swaf {

struct Assignment {
  double total = 0;
  // row_to_col[r] is the column matched to row r, or -1.
  std::vector<int> row_to_col;
};

// Maximum-weight one-to-one matching on a rows x cols weight matrix (the
// Hungarian method, O(n^3) on the padded square). Rows or columns left over
// when the matrix is rectangular stay unmatched. Weights must be finite.
Assignment MaxWeightAssignment(const std::vector<std::vector<double>> &weights);

}  // namespace swaf

#endif  // SWAF_ASSIGNMENT_H_
