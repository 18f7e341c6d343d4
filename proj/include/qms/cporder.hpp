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

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qms/algebra.hpp"
#include "qms/generator.hpp"
#include "qms/matops.hpp"
#include "qms/random.hpp"

namespace qms {

/** Sesquilinear operator-valued form (conjugate-linear in the first slot). */
using Form = std::function<Operator(const Operator&, const Operator&)>;

/**
 * Kernel of a form over an operator basis {e_alpha} and C^m:
 * Q[(alpha,u),(beta,v)] = <u, Gamma(e_alpha, e_beta) v>.
 */
struct FormKernel {
  int dim = 0;         // m
  int basis_size = 0;  // number of basis operators
  Eigen::MatrixXcd q;
};

inline FormKernel make_kernel(int m, int k, Eigen::MatrixXcd q) {
  return {m, k, 0.5 * (q + q.adjoint())};
}

namespace detail {

inline Operator random_in_span(Rng& rng, const std::vector<Operator>& basis) {
  Operator x = Operator::Zero(basis[0].rows(), basis[0].cols());
  for (const auto& b : basis) x += cplx(rng.normal(), rng.normal()) * b;
  return x;
}

}  // namespace detail

/** Largest residual of the sesquilinearity and symmetry probes. */
inline double sesquilinearity_residual(const Form& form,
                                       const std::vector<Operator>& basis,
                                       int probes = 4) {
  Rng rng(0x5e5au);
  double worst = 0.0;
  for (int p = 0; p < probes; ++p) {
    const Operator x1 = detail::random_in_span(rng, basis);
    const Operator x2 = detail::random_in_span(rng, basis);
    const Operator y = detail::random_in_span(rng, basis);
    const cplx c(rng.normal(), rng.normal());
    const Operator f1y = form(x1, y), f2y = form(x2, y);
    const double scale =
        std::max({1.0, max_abs(f1y), max_abs(f2y)}) * (1.0 + std::abs(c));
    const Operator left = form(c * x1 + x2, y) - (std::conj(c) * f1y + f2y);
    const Operator right = form(y, c * x1 + x2) - (c * form(y, x1) + form(y, x2));
    const Operator sym = f1y.adjoint() - form(y, x1);
    worst = std::max({worst, max_abs(left) / scale, max_abs(right) / scale,
                      max_abs(sym) / scale});
  }
  return worst;
}

/** Evaluates the form on all basis pairs; probes sesquilinearity first. */
inline FormKernel form_kernel(const Form& form, int m,
                              const std::vector<Operator>& basis) {
  require(!basis.empty(), "form_kernel: empty basis");
  for (const auto& b : basis) require(dim_of(b) == m, "form_kernel: dimension mismatch");
  if (sesquilinearity_residual(form, basis) > 1e-8)
    throw Error("form_kernel: form is not sesquilinear");
  const int k = static_cast<int>(basis.size());
  Eigen::MatrixXcd q(static_cast<Eigen::Index>(k) * m,
                     static_cast<Eigen::Index>(k) * m);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) q.block(a * m, b * m, m, m) = form(basis[a], basis[b]);
  return make_kernel(m, k, std::move(q));
}

inline FormKernel form_kernel(const Form& form, int m) {
  return form_kernel(form, m, standard_basis(m));
}

/** Kernel of sum_k [a_k, x]* [a_k, y], assembled as sum_k D_k* D_k. */
inline FormKernel jump_kernel(const JumpSet& j) {
  const int m = j.dim;
  const int k = m * m;
  Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(k) * m,
                                              static_cast<Eigen::Index>(k) * m);
  for (const auto& a : j.jumps) {
    Eigen::MatrixXcd d(m, static_cast<Eigen::Index>(k) * m);
    for (int b = 0; b < k; ++b) d.middleCols(b * m, m) = commutator(a, basis_element(m, b));
    q += d.adjoint() * d;
  }
  return make_kernel(m, k, std::move(q));
}

/** Kernel of the gradient form of a *-preserving superoperator. */
inline FormKernel superop_kernel(const Superop& b) {
  const Superop bb = b;
  return form_kernel(
      [bb](const Operator& x, const Operator& y) { return gradient_form_of(bb, x, y); },
      b.dim);
}

/** Kernel of Gamma_{I-T}. */
inline FormKernel i_minus_t_kernel(const Superop& t) {
  const Superop tt = t;
  return form_kernel(
      [tt](const Operator& x, const Operator& y) {
        return gradient_form_i_minus_t(tt, x, y);
      },
      t.dim);
}

inline double psd_threshold(const RVector& eigenvalues, double rel) {
  const double scale = eigenvalues.size() ? eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  return rel * std::max(1.0, scale);
}

inline RVector hermitian_eigenvalues(const Eigen::MatrixXcd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (h + h.adjoint()),
                                                     Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalError("Hermitian eigensolver did not converge");
  return es.eigenvalues();
}

inline bool is_psd(const Eigen::MatrixXcd& h, double rel = 1e-9) {
  const RVector ev = hermitian_eigenvalues(h);
  return ev(0) >= -psd_threshold(ev, rel);
}

/** Q_big - lambda Q_small >= 0 up to the relative PSD threshold. */
inline bool cp_order_holds(const FormKernel& small, const FormKernel& big,
                           double lambda,
                           const Tolerances& tol = default_tolerances()) {
  require(small.q.rows() == big.q.rows(), "cp_order_holds: dimension mismatch");
  return is_psd(big.q - lambda * small.q, tol.psd_rel);
}

struct GammaECertificate {
  double lambda_star = 0.0;
  std::string method = "pencil-bisection";
  double tolerance = 0.0;
  double upper = 0.0;
  std::optional<CVector> witness;
  std::vector<CheckResult> checks;
};

namespace detail {

inline std::pair<double, CVector> min_eigpair(const Eigen::MatrixXcd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (h + h.adjoint()));
  if (es.info() != Eigen::Success)
    throw NumericalError("Hermitian eigensolver did not converge");
  return {es.eigenvalues()(0), es.eigenvectors().col(0)};
}

}  // namespace detail

/** max{lambda >= 0 : lambda Q_small <= Q_big} by bisection. */
inline GammaECertificate best_lambda(const FormKernel& small, const FormKernel& big,
                                     const Tolerances& tol = default_tolerances()) {
  require(small.q.rows() == big.q.rows(), "best_lambda: dimension mismatch");
  if (max_abs(small.q) == 0.0) throw Error("best_lambda: Q_small is zero");
  GammaECertificate cert;
  cert.tolerance = tol.bisect_width;
  auto feasible = [&](double lam) {
    return is_psd(big.q - lam * small.q, tol.psd_rel);
  };
  if (!feasible(0.0)) {
    cert.lambda_star = 0.0;
    cert.witness = detail::min_eigpair(big.q).second;
    cert.checks.push_back({"q_big_psd", false, detail::min_eigpair(big.q).first});
    return cert;
  }
  const RVector es = hermitian_eigenvalues(small.q);
  const double smax = es.cwiseAbs().maxCoeff();
  double smin_pos = 0.0;
  for (Eigen::Index k = 0; k < es.size(); ++k)
    if (es(k) > 1e-9 * smax) {
      smin_pos = es(k);
      break;
    }
  if (smin_pos <= 0.0) throw Error("best_lambda: Q_small has no positive part");
  const RVector eb = hermitian_eigenvalues(big.q);
  const double upper = eb.cwiseAbs().maxCoeff() / smin_pos * (1.0 + 1e-9) + 1e-12;
  cert.upper = upper;
  double lo = 0.0, hi = upper;
  if (feasible(hi)) {
    lo = hi;
  } else {
    while (hi - lo > tol.bisect_width * std::max(1.0, lo)) {
      const double mid = 0.5 * (lo + hi);
      if (feasible(mid)) lo = mid;
      else hi = mid;
    }
  }
  cert.lambda_star = lo;
  const auto [lo_eig, lo_vec] = detail::min_eigpair(big.q - lo * small.q);
  const double probe = lo + 2.0 * tol.bisect_width * std::max(1.0, lo);
  const auto [hi_eig, hi_vec] = detail::min_eigpair(big.q - probe * small.q);
  cert.witness = hi_vec;
  cert.checks.push_back({"q_big_psd", true, eb(0)});
  cert.checks.push_back({"feasible_at_lambda_star", feasible(lo), lo_eig});
  cert.checks.push_back({"infeasible_above_lambda_star", !feasible(probe) || lo == upper,
                         hi_eig});
  return cert;
}

/** Kernel of Gamma_{I-E} for the fixed algebra of gen. */
inline FormKernel ie_kernel(const Generator& g) { return i_minus_t_kernel(g.e_fix); }

namespace detail {

/** The zero generator has N = M; it is reported with lambda* = 0. */
inline GammaECertificate zero_generator_certificate(const Tolerances& tol) {
  GammaECertificate cert;
  cert.tolerance = tol.bisect_width;
  cert.checks.push_back({"nonzero_generator", false, 0.0});
  return cert;
}

}  // namespace detail

inline GammaECertificate gamma_e_constant(const LindbladGenerator& g,
                                          const Tolerances& tol = default_tolerances()) {
  if (max_abs(g.superop.matrix) == 0.0) return detail::zero_generator_certificate(tol);
  return best_lambda(ie_kernel(g), jump_kernel(g.jumps), tol);
}

inline GammaECertificate gamma_e_constant(const Generator& g,
                                          const Tolerances& tol = default_tolerances()) {
  if (max_abs(g.superop.matrix) == 0.0) return detail::zero_generator_certificate(tol);
  return best_lambda(ie_kernel(g), superop_kernel(g.superop), tol);
}

// ---------------------------------------------------------------------------
// Module Choi matrices and the return time

/** Largest residual of T(n1 x n2) - n1 T(x) n2 on sampled triples. */
inline double bimodularity_residual(const Superop& t, const SubAlgebra& n,
                                    int samples = 8) {
  Rng rng(0xb1u);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Operator n1 = detail::random_in_span(rng, n.basis);
    const Operator n2 = detail::random_in_span(rng, n.basis);
    const Operator x = random_operator(rng, t.dim);
    const Operator lhs = t.apply(n1 * x * n2);
    const Operator rhs = n1 * t.apply(x) * n2;
    worst = std::max(worst, max_abs(lhs - rhs) / std::max(1.0, max_abs(lhs)));
  }
  return worst;
}

inline Eigen::MatrixXcd choi_blocks(const Superop& t, const ModuleBasis& mb) {
  const int m = t.dim;
  const int k = mb.size();
  Eigen::MatrixXcd chi(static_cast<Eigen::Index>(k) * m,
                       static_cast<Eigen::Index>(k) * m);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      chi.block(i * m, j * m, m, m) = t.apply(mb.xis[i].adjoint() * mb.xis[j]);
  return chi;
}

/** chi_T = sum_ij |i><j| (x) T(xi_i* xi_j) for an N-bimodule map T. */
inline Eigen::MatrixXcd choi_matrix(const Superop& t, const SubAlgebra& n,
                                    const ModuleBasis& mb) {
  require(t.dim == n.dim_ambient, "choi_matrix: dimension mismatch");
  if (bimodularity_residual(t, n) > 1e-8)
    throw Error("choi_matrix: map is not an N-bimodule map");
  return choi_blocks(t, mb);
}

/** Operator norm of the module Choi matrix. */
inline double choi_norm(const Eigen::MatrixXcd& chi) { return operator_norm(chi); }

struct ReturnTime {
  double t0 = 0.0;
  bool reached = true;  // false: not reached by 1e4/gap, t0 = +infinity
  double gap = 0.0;
};

/** Smallest t with ||chi_{T_t - E}|| <= 1/2. */
inline ReturnTime return_time(const Superop& a, const SubAlgebra& n,
                              const Tolerances& tol = default_tolerances()) {
  const double gap = spectral_gap(a);
  if (gap <= 0.0) throw Error("return_time: spectral gap is zero");
  const Superop e = conditional_expectation(n);
  const ModuleBasis mb = module_basis(n);
  const SuperopSpectrum s = spectrum(a);
  if (bimodularity_residual(semigroup(s, 1.0 / gap), n) > 1e-8)
    throw Error("return_time: semigroup is not N-bimodular");
  auto g = [&](double t) {
    return choi_norm(choi_blocks(semigroup(s, t) - e, mb)) - 0.5;
  };
  ReturnTime rt;
  rt.gap = gap;
  if (g(0.0) <= 0.0) {
    rt.t0 = 0.0;
    return rt;
  }
  double lo = 0.0, hi = 1.0 / gap;
  const double limit = 1e4 / gap;
  while (g(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > limit) {
      if (g(limit) > 0.0) {
        rt.reached = false;
        rt.t0 = std::numeric_limits<double>::infinity();
        return rt;
      }
      hi = limit;
      break;
    }
  }
  while (hi - lo > tol.return_time) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) <= 0.0) hi = mid;
    else lo = mid;
  }
  rt.t0 = hi;
  return rt;
}

inline ReturnTime return_time(const Generator& g,
                              const Tolerances& tol = default_tolerances()) {
  return return_time(g.superop, g.fixed_algebra, tol);
}

}  // namespace qms
