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

#include <Eigen/QR>

#include "qms/matops.hpp"
#include "qms/rng.hpp"

namespace qms {

/** Matrix with i.i.d. standard complex Gaussian entries. */
inline Operator random_ginibre(Rng& rng, int m) {
  Operator g(m, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) g(i, j) = cplx(rng.normal(), rng.normal());
  return g / std::sqrt(2.0);
}

inline Operator random_operator(Rng& rng, int m) { return random_ginibre(rng, m); }

inline Operator random_hermitian(Rng& rng, int m) {
  return hermitian_part(random_ginibre(rng, m));
}

/** Full-rank random state G G* normalized to tau = 1. */
inline State random_state(Rng& rng, int m) {
  const Operator g = random_ginibre(rng, m);
  Operator r = g * g.adjoint();
  r /= tau(r).real();
  return State(hermitian_part(r));
}

/** Haar-distributed unitary. */
inline Operator random_unitary(Rng& rng, int m) {
  const Operator g = random_ginibre(rng, m);
  Eigen::HouseholderQR<Operator> qr(g);
  Operator q = qr.householderQ() * Operator::Identity(m, m);
  const Operator r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < m; ++i) {
    const double a = std::abs(r(i, i));
    if (a > 0) q.col(i) *= r(i, i) / a;
  }
  return q;
}

/** Random orthogonal projection of the given rank. */
inline Operator random_projection(Rng& rng, int m, int rank) {
  require(rank >= 0 && rank <= m, "random_projection: bad rank");
  const Operator u = random_unitary(rng, m);
  const Operator v = u.leftCols(rank);
  return v * v.adjoint();
}

}  // namespace qms
