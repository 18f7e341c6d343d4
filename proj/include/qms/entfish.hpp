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

#include <cmath>
#include <limits>
#include <vector>

#include "qms/algebra.hpp"
#include "qms/generator.hpp"
#include "qms/matops.hpp"

namespace qms {

namespace detail {

inline Eigh checked_psd_eigh(const Operator& x, const char* who,
                             const Tolerances& tol) {
  const Eigh e = eigh(x);
  const double scale = std::max(1.0, e.values.cwiseAbs().maxCoeff());
  if (e.values(0) < -tol.negative_eig * scale)
    throw Error(std::string(who) + ": negative eigenvalue " +
                std::to_string(e.values(0)));
  return e;
}

inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

}  // namespace detail

/**
 * D(rho || sigma) = tau(rho ln rho) - tau(rho ln sigma), +infinity when
 * supp(rho) is not contained in supp(sigma).
 */
inline double relative_entropy(const Operator& rho, const Operator& sigma,
                               const Tolerances& tol = default_tolerances()) {
  require(rho.rows() == sigma.rows(), "relative_entropy: dimension mismatch");
  const int m = dim_of(rho);
  const Eigh er = detail::checked_psd_eigh(rho, "relative_entropy", tol);
  const Eigh es = detail::checked_psd_eigh(sigma, "relative_entropy", tol);
  double a = 0.0;
  for (Eigen::Index k = 0; k < er.values.size(); ++k)
    if (er.values(k) > tol.eig_clamp) a += detail::xlogx(er.values(k));
  double b = 0.0;
  for (Eigen::Index k = 0; k < es.values.size(); ++k) {
    const CVector v = es.vectors.col(k);
    const double w = (v.adjoint() * rho * v)(0, 0).real();
    if (es.values(k) > tol.eig_clamp) {
      b += w * std::log(es.values(k));
    } else if (w > 1e-10) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return (a - b) / m;
}

/** D_N(rho) = D(rho || E(rho)). */
inline double d_sub(const Operator& rho, const Superop& e,
                    const Tolerances& tol = default_tolerances()) {
  return relative_entropy(rho, hermitian_part(e.apply(rho)), tol);
}

inline double d_sub(const State& rho, const SubAlgebra& n,
                    const Tolerances& tol = default_tolerances()) {
  return d_sub(rho.op(), conditional_expectation(n), tol);
}

/** Which definition of the logarithm produced a Fisher information value. */
enum class FisherBranch { full_rank, support_restricted, eps_shift };

inline const char* to_string(FisherBranch b) {
  switch (b) {
    case FisherBranch::full_rank:
      return "full_rank";
    case FisherBranch::support_restricted:
      return "support_restricted";
    default:
      return "eps_shift";
  }
}

struct FisherValue {
  double value = 0.0;
  FisherBranch branch = FisherBranch::full_rank;
};

/** I_A(rho) = tau(A(rho) ln(rho + eps 1)). */
inline FisherValue fisher(const Superop& a, const Operator& rho,
                          double eps_shift = 0.0,
                          const Tolerances& tol = default_tolerances()) {
  require(eps_shift >= 0.0, "fisher: eps_shift must be nonnegative");
  const Eigh e = detail::checked_psd_eigh(rho, "fisher", tol);
  const Operator arho = a.apply(rho);
  const Eigen::Index n = e.values.size();
  RVector logs(n);
  FisherValue out;
  if (eps_shift > 0.0) {
    for (Eigen::Index k = 0; k < n; ++k)
      logs(k) = std::log(std::max(e.values(k), 0.0) + eps_shift);
    out.branch = FisherBranch::eps_shift;
  } else if (e.values(0) > tol.eig_clamp) {
    logs = e.values.array().log().matrix();
    out.branch = FisherBranch::full_rank;
  } else {
    Operator pker = Operator::Zero(rho.rows(), rho.cols());
    for (Eigen::Index k = 0; k < n; ++k) {
      if (e.values(k) > tol.eig_clamp) {
        logs(k) = std::log(e.values(k));
      } else {
        logs(k) = 0.0;
        pker += e.vectors.col(k) * e.vectors.col(k).adjoint();
      }
    }
    const double leak = max_abs(pker * arho);
    if (leak > 1e-10 * std::max(1.0, max_abs(arho)))
      throw Error("ill-defined Fisher information, supply eps_shift");
    out.branch = FisherBranch::support_restricted;
  }
  out.value = tau(arho * from_eigh(e, logs)).real();
  return out;
}

/** I_N(rho) = I_{I-E}(rho). */
inline FisherValue fisher_n(const Superop& e, const Operator& rho,
                            double eps_shift = 0.0,
                            const Tolerances& tol = default_tolerances()) {
  return fisher(identity_superop(e.dim) - e, rho, eps_shift, tol);
}

inline FisherValue fisher_n(const SubAlgebra& n, const State& rho,
                            double eps_shift = 0.0,
                            const Tolerances& tol = default_tolerances()) {
  return fisher_n(conditional_expectation(n), rho.op(), eps_shift, tol);
}

/** sum_k tau(delta_k(rho)* J_log(delta_k(rho))) for an invertible state. */
inline double fisher_derivation_form(const JumpSet& j, const Operator& rho) {
  auto lg = [](double s) { return std::log(s); };
  auto dlg = [](double s) { return 1.0 / s; };
  double acc = 0.0;
  for (const auto& d : derivation(j, rho))
    acc += tau(d.adjoint() * divided_difference_multiplier(rho, lg, dlg, d)).real();
  return acc;
}

struct DecayTrace {
  std::vector<double> times;
  std::vector<double> d_n;
  std::vector<double> i_a;
  std::vector<double> bound;
  double lambda_used = 0.0;
};

/** 60 geometric points on [1e-3/lambda, 6/lambda]. */
inline std::vector<double> default_grid(double lambda, int points = 60) {
  require(lambda > 0.0, "default_grid: lambda must be positive");
  std::vector<double> g(points);
  const double lo = std::log(1e-3 / lambda), hi = std::log(6.0 / lambda);
  for (int i = 0; i < points; ++i)
    g[i] = std::exp(lo + (hi - lo) * i / (points - 1));
  return g;
}

/** I_A at an evolved state; +infinity when A(rho) leaves supp(rho). */
inline double fisher_or_infinity(const Superop& a, const Operator& rho,
                                 const Tolerances& tol = default_tolerances()) {
  try {
    return fisher(a, rho, 0.0, tol).value;
  } catch (const Error&) {
    return std::numeric_limits<double>::infinity();
  }
}

inline DecayTrace simulate_decay(const Superop& a, const Superop& e,
                                 const State& rho0,
                                 const std::vector<double>& grid, double lambda,
                                 const Tolerances& tol = default_tolerances()) {
  require(lambda >= 0.0, "simulate_decay: lambda must be nonnegative");
  require(!grid.empty(), "simulate_decay: empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require(grid[i] >= 0.0 && std::isfinite(grid[i]),
            "simulate_decay: grid points must be finite and nonnegative");
    if (i > 0)
      require(grid[i] > grid[i - 1], "simulate_decay: grid must be increasing");
  }
  const SuperopSpectrum s = spectrum(a);
  const double d0 = d_sub(rho0.op(), e, tol);
  DecayTrace tr;
  tr.lambda_used = lambda;
  for (double t : grid) {
    const Operator rt = hermitian_part(semigroup(s, t).apply(rho0.op()));
    const Eigh ev = eigh(rt);
    if (ev.values(0) < -1e-8)
      throw NumericalError("simulate_decay: evolved state lost positivity");
    const State st(rt);
    tr.times.push_back(t);
    tr.d_n.push_back(d_sub(st.op(), e, tol));
    tr.i_a.push_back(fisher_or_infinity(a, st.op(), tol));
    tr.bound.push_back(std::exp(-lambda * t) * d0);
  }
  return tr;
}

}  // namespace qms
