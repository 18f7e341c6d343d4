// Copyright 2026 The qms Authors
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

#include <cstdint>
#include <string>
#include <vector>

#include "qms/qms.hpp"

namespace qms::testing {

struct ZooEntry {
  std::string name;
  LindbladGenerator gen;
};

inline JumpSet random_jumps(int m, int r, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Operator> j;
  for (int k = 0; k < r; ++k) j.push_back(random_hermitian(rng, m));
  return make_jumpset(m, j);
}

/** Depolarizing on the first factor of M_2 (x) M_2; fixed algebra 1 (x) M_2. */
inline JumpSet local_depolarizing_jumps() {
  std::vector<Operator> j;
  for (const auto& a : depolarizing_jumps(2).jumps) j.push_back(kron(a, identity_op(2)));
  return make_jumpset(4, j);
}

/** Dephasing, depolarizing, random two-jump models and a non-ergodic local model. */
inline std::vector<ZooEntry> zoo() {
  std::vector<ZooEntry> z;
  z.push_back({"dephasing_z", lindblad(make_jumpset(2, {pauli_z()}))});
  z.push_back({"depolarizing_2", lindblad(depolarizing_jumps(2))});
  z.push_back({"depolarizing_3", lindblad(depolarizing_jumps(3))});
  z.push_back({"random2_m2", lindblad(random_jumps(2, 2, 11))});
  z.push_back({"random2_m3", lindblad(random_jumps(3, 2, 12))});
  z.push_back({"random2_m4", lindblad(random_jumps(4, 2, 13))});
  z.push_back({"local_depolarizing_4", lindblad(local_depolarizing_jumps())});
  return z;
}

inline double max_abs_diff(const Operator& a, const Operator& b) { return max_abs(a - b); }

}  // namespace qms::testing
