// Copyright 2026 The Carnot Lab Authors
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

#include "carnot/carnot.hpp"

namespace carnot::test {

inline CommutatorBasis heisenberg()
{
  return enumerate_basis({VectorField::parse({"1", "0", "2*x2"}), VectorField::parse({"0", "1", "-2*x1"})}, 2);
}

inline CommutatorBasis grushin() { return enumerate_basis({VectorField::parse({"1", "0"}), VectorField::parse({"0", "x1"})}, 2); }

inline CommutatorBasis step3() { return enumerate_basis({VectorField::parse({"1", "0", "0"}), VectorField::parse({"0", "1", "x1^2"})}, 3); }

inline CommutatorBasis euclidean(int n)
{
  std::vector<VectorField> g;
  for (int k = 0; k < n; ++k) g.push_back(VectorField::coordinate(n, k));
  return enumerate_basis(g, 1);
}

inline Expr expr(std::string_view s) { return parse_expr(s, kMaxDim); }

inline Point pt(std::initializer_list<double> v) { return make_point(v); }

}  // namespace carnot::test
