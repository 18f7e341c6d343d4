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

#include <string>
#include <vector>

#include "qms/algebra.hpp"
#include "qms/matops.hpp"

namespace qms {

/** Hermitian jump operators a_1, ..., a_r on M_m. */
struct JumpSet {
  int dim = 0;
  std::vector<Operator> jumps;
};

inline JumpSet make_jumpset(int m, std::vector<Operator> jumps) {
  require(m >= 1, "make_jumpset: m must be positive");
  for (auto& a : jumps) {
    require(dim_of(a) == m, "make_jumpset: jump dimension mismatch");
    const double scale = std::max(max_abs(a), 1e-300);
    if (max_abs(a - a.adjoint()) > 1e-12 * scale)
      throw Error("make_jumpset: jump operator is not Hermitian");
    a = hermitian_part(a);
  }
  return {m, std::move(jumps)};
}

/** x -> sum_k a_k^2 x + x a_k^2 - 2 a_k x a_k. */
inline Operator lindblad_action(const JumpSet& j, const Operator& x) {
  require(dim_of(x) == j.dim, "lindblad_action: dimension mismatch");
  Operator out = Operator::Zero(j.dim, j.dim);
  for (const auto& a : j.jumps) {
    const Operator ax = a * x;
    out += a * ax + x * a * a - 2.0 * ax * a;
  }
  return out;
}

/** A self-adjoint generator together with its fixed-point algebra. */
struct Generator {
  Superop superop;
  SubAlgebra fixed_algebra;
  Superop e_fix;

  int dim() const { return superop.dim; }
};

struct LindbladGenerator : Generator {
  JumpSet jumps;
};

inline LindbladGenerator lindblad(const JumpSet& j) {
  LindbladGenerator g;
  g.jumps = j;
  g.superop = superop_from_action(
      [&j](const Operator& x) { return lindblad_action(j, x); }, j.dim);
  g.superop.cp_semigroup = Check::verified;
  g.fixed_algebra = commutant(j.jumps, j.dim);
  g.e_fix = conditional_expectation(g.fixed_algebra);
  return g;
}

/** Nullspace of a self-adjoint superoperator as a subalgebra. */
inline SubAlgebra kernel_algebra(const Superop& a, double rel = 1e-9) {
  const SuperopSpectrum s = spectrum(a);
  const double scale = std::max(1.0, s.values.cwiseAbs().maxCoeff());
  std::vector<Operator> ops;
  for (Eigen::Index k = 0; k < s.values.size(); ++k)
    if (std::abs(s.values(k)) <= rel * scale)
      ops.push_back(from_coords(s.vectors.col(k), a.dim));
  return subalgebra_from_span(a.dim, ops);
}

/** Wrap a self-adjoint superoperator, taking its nullspace as fixed algebra. */
inline Generator generator_from_superop(const Superop& a) {
  if (a.hs_selfadjoint != Check::verified)
    throw Error("generator_from_superop: superoperator is not self-adjoint");
  Generator g;
  g.superop = a;
  g.fixed_algebra = kernel_algebra(a);
  g.e_fix = conditional_expectation(g.fixed_algebra);
  return g;
}

inline std::vector<Operator> derivation(const JumpSet& j, const Operator& x) {
  require(dim_of(x) == j.dim, "derivation: dimension mismatch");
  std::vector<Operator> d;
  d.reserve(j.jumps.size());
  for (const auto& a : j.jumps) d.push_back(commutator(a, x));
  return d;
}

/** sum_k [a_k, x]* [a_k, y]. */
inline Operator gradient_form(const JumpSet& j, const Operator& x,
                              const Operator& y) {
  require(dim_of(x) == j.dim && dim_of(y) == j.dim,
          "gradient_form: dimension mismatch");
  Operator out = Operator::Zero(j.dim, j.dim);
  for (const auto& a : j.jumps) out += commutator(a, x).adjoint() * commutator(a, y);
  return out;
}

/** 1/2 (B(x)* y + x* B(y) - B(x* y)) for a *-preserving map B. */
inline Operator gradient_form_of(const Superop& b, const Operator& x,
                                 const Operator& y) {
  require(dim_of(x) == b.dim && dim_of(y) == b.dim,
          "gradient_form_of: dimension mismatch");
  return 0.5 * (b.apply(x).adjoint() * y + x.adjoint() * b.apply(y) -
                b.apply(x.adjoint() * y));
}

/** 1/2 (x* y - T(x)* y - x* T(y) + T(x* y)). */
inline Operator gradient_form_i_minus_t(const Superop& t, const Operator& x,
                                        const Operator& y) {
  require(dim_of(x) == t.dim && dim_of(y) == t.dim,
          "gradient_form_i_minus_t: dimension mismatch");
  return 0.5 * (x.adjoint() * y - t.apply(x).adjoint() * y -
                x.adjoint() * t.apply(y) + t.apply(x.adjoint() * y));
}

inline Operator gradient_form_ie(const Superop& e, const Operator& x,
                                 const Operator& y) {
  return gradient_form_i_minus_t(e, x, y);
}

inline Operator gradient_form_ie(const SubAlgebra& n, const Operator& x,
                                 const Operator& y) {
  return gradient_form_i_minus_t(conditional_expectation(n), x, y);
}

/** Block matrix sum_ij E_ij (x) T(E_ij). */
inline Eigen::MatrixXcd standard_choi(const Superop& t) {
  const int m = t.dim;
  Eigen::MatrixXcd c(m * m, m * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      Operator e = Operator::Zero(m, m);
      e(i, j) = 1.0;
      c.block(i * m, j * m, m, m) = t.apply(e);
    }
  return c;
}

inline double min_eigenvalue(const Eigen::MatrixXcd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  const CheckResult& at(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return c;
    throw Error("no check named " + name);
  }
};

/** Self-adjointness, A(1) = 0, positivity and CP of e^{-tA}, t in {0.1, 1, 10}. */
inline ValidationReport validate_generator(const Superop& a) {
  ValidationReport r;
  const double scale = std::max(1.0, max_abs(a.matrix));
  const double asym = max_abs(a.matrix - a.matrix.adjoint());
  r.checks.push_back({"hs_selfadjoint", asym <= 1e-10 * scale, asym});
  const double one = max_abs(a.apply(identity_op(a.dim)));
  r.checks.push_back({"kills_identity", one <= 1e-10 * scale, one});
  if (asym > 1e-10 * scale) {
    r.checks.push_back({"psd", false, std::nan("")});
    for (const char* n : {"cp_t0.1", "cp_t1", "cp_t10"})
      r.checks.push_back({n, false, std::nan("")});
    return r;
  }
  const SuperopSpectrum s = spectrum(a);
  const double smax = std::max(1.0, s.values.cwiseAbs().maxCoeff());
  r.checks.push_back({"psd", s.values(0) >= -1e-10 * smax, s.values(0)});
  const std::pair<const char*, double> times[] = {
      {"cp_t0.1", 0.1}, {"cp_t1", 1.0}, {"cp_t10", 10.0}};
  for (const auto& [name, t] : times) {
    const Eigen::MatrixXcd c = standard_choi(semigroup(s, t));
    const double lo = min_eigenvalue(c);
    const double cs = std::max(1.0, c.cwiseAbs().maxCoeff());
    r.checks.push_back({name, lo >= -1e-9 * cs, lo});
  }
  return r;
}

/** Smallest nonzero eigenvalue; 0 for the zero generator. */
inline double spectral_gap(const Superop& a) {
  const SuperopSpectrum s = spectrum(a);
  const double scale = s.values.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  double gap = 0.0;
  for (Eigen::Index k = 0; k < s.values.size(); ++k) {
    if (s.values(k) > 1e-9 * std::max(1.0, scale)) {
      gap = s.values(k);
      break;
    }
  }
  return gap;
}

// ---------------------------------------------------------------------------
// Model builders

/** Traceless Hermitian tau-orthonormal basis (generalized Gell-Mann). */
inline std::vector<Operator> traceless_hermitian_basis(int m) {
  std::vector<Operator> b;
  const double c = std::sqrt(m / 2.0);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      Operator s = Operator::Zero(m, m), a = Operator::Zero(m, m);
      s(i, j) = s(j, i) = c;
      a(i, j) = cplx(0, -c);
      a(j, i) = cplx(0, c);
      b.push_back(s);
      b.push_back(a);
    }
  for (int k = 1; k < m; ++k) {
    Operator d = Operator::Zero(m, m);
    const double f = std::sqrt(static_cast<double>(m) / (k * (k + 1.0)));
    for (int l = 0; l < k; ++l) d(l, l) = f;
    d(k, k) = -k * f;
    b.push_back(d);
  }
  return b;
}

/** Jumps whose Lindblad generator is I - E_tau on M_m. */
inline JumpSet depolarizing_jumps(int m) {
  std::vector<Operator> j;
  for (const auto& g : traceless_hermitian_basis(m))
    j.push_back(g / (m * std::sqrt(2.0)));
  return make_jumpset(m, j);
}

inline Operator pauli_x() {
  Operator p(2, 2);
  p << 0, 1, 1, 0;
  return p;
}
inline Operator pauli_y() {
  Operator p(2, 2);
  p << 0, cplx(0, -1), cplx(0, 1), 0;
  return p;
}
inline Operator pauli_z() {
  Operator p(2, 2);
  p << 1, 0, 0, -1;
  return p;
}

/** a (x) 1 and 1 (x) b for the jumps of two generators. */
inline JumpSet tensor_jumps(const JumpSet& j1, const JumpSet& j2) {
  const int m = j1.dim * j2.dim;
  if (m > 64) throw Error("tensor_jumps: product dimension exceeds 64");
  std::vector<Operator> j;
  for (const auto& a : j1.jumps) j.push_back(kron(a, identity_op(j2.dim)));
  for (const auto& b : j2.jumps) j.push_back(kron(identity_op(j1.dim), b));
  return make_jumpset(m, j);
}

}  // namespace qms
