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

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "qms/core.hpp"

namespace qms {

// ---------------------------------------------------------------------------
// Operators on M_m

inline int dim_of(const Operator& x) {
  require(x.rows() == x.cols(), "operator must be square");
  return static_cast<int>(x.rows());
}

inline Operator identity_op(int m) { return Operator::Identity(m, m); }

/** Normalized trace tr(x)/m. */
inline cplx tau(const Operator& x) {
  return x.trace() / static_cast<double>(dim_of(x));
}

inline cplx hs_inner(const Operator& x, const Operator& y) {
  require(x.rows() == y.rows() && x.cols() == y.cols(),
          "hs_inner: dimension mismatch");
  return (x.adjoint() * y).trace() / static_cast<double>(x.rows());
}

/** Normalized Hilbert-Schmidt norm tau(x*x)^{1/2}. */
inline double hs_norm(const Operator& x) {
  return x.norm() / std::sqrt(static_cast<double>(x.rows()));
}

inline double max_abs(const Operator& x) {
  return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const Operator& x, double rel = 1e-10) {
  if (x.rows() != x.cols()) return false;
  const double scale = std::max(max_abs(x), std::numeric_limits<double>::min());
  return max_abs(x - x.adjoint()) <= rel * scale;
}

inline Operator hermitian_part(const Operator& x) {
  return 0.5 * (x + x.adjoint());
}

inline Operator commutator(const Operator& a, const Operator& b) {
  return a * b - b * a;
}

inline double operator_norm(const Operator& x) {
  if (x.size() == 0) return 0.0;
  Eigen::JacobiSVD<Operator> svd(x);
  return svd.singularValues()(0);
}

/** Normalized Schatten norm tau(|x|^p)^{1/p}; p = infinity gives the operator norm. */
inline double schatten_norm(const Operator& x, double p) {
  Eigen::JacobiSVD<Operator> svd(x);
  const RVector s = svd.singularValues();
  if (std::isinf(p)) return s.size() ? s(0) : 0.0;
  require(p >= 1.0, "schatten_norm: p must be >= 1");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) acc += std::pow(s(i), p);
  return std::pow(acc / static_cast<double>(x.rows()), 1.0 / p);
}

struct Eigh {
  RVector values;   // ascending
  Operator vectors; // columns
};

/** Eigendecomposition of a Hermitian operator. */
inline Eigh eigh(const Operator& x, double rel = 1e-10) {
  require(x.rows() == x.cols(), "eigh: operator must be square");
  if (!is_hermitian(x, rel)) throw Error("eigh: operator is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Operator> es(hermitian_part(x));
  if (es.info() != Eigen::Success)
    throw NumericalError("eigh: eigendecomposition did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

inline Operator from_eigh(const Eigh& e, const RVector& fvals) {
  return e.vectors * fvals.asDiagonal() * e.vectors.adjoint();
}

/** f(x) for Hermitian x via the spectral decomposition. */
inline Operator matrix_function(const Operator& x,
                                const std::function<double(double)>& f) {
  const Eigh e = eigh(x);
  RVector fv(e.values.size());
  for (Eigen::Index i = 0; i < fv.size(); ++i) {
    fv(i) = f(e.values(i));
    if (!std::isfinite(fv(i)))
      throw Error("matrix_function: function undefined at eigenvalue " +
                  std::to_string(e.values(i)));
  }
  return from_eigh(e, fv);
}

/** Divided difference with the midpoint derivative on near-coincident nodes. */
inline double divided_difference(double s, double t,
                                 const std::function<double(double)>& f,
                                 const std::function<double(double)>& fprime) {
  const double scale = std::max({std::abs(s), std::abs(t), 1.0});
  if (std::abs(s - t) <= 1e-9 * scale) return fprime(0.5 * (s + t));
  return (f(s) - f(t)) / (s - t);
}

/**
 * Schur multiplier sum_{k,l} Df(rho_k, rho_l) e_k y e_l over the spectral
 * projections of rho.
 */
inline Operator divided_difference_multiplier(
    const Operator& rho, const std::function<double(double)>& f,
    const std::function<double(double)>& fprime, const Operator& y) {
  require(rho.rows() == y.rows() && y.rows() == y.cols(),
          "divided_difference_multiplier: dimension mismatch");
  const Eigh e = eigh(rho);
  const Eigen::Index m = e.values.size();
  Operator ty = e.vectors.adjoint() * y * e.vectors;
  for (Eigen::Index k = 0; k < m; ++k)
    for (Eigen::Index l = 0; l < m; ++l)
      ty(k, l) *= divided_difference(e.values(k), e.values(l), f, fprime);
  return e.vectors * ty * e.vectors.adjoint();
}

// ---------------------------------------------------------------------------
// Coordinates over the tau-orthonormal basis e_(i,j) = sqrt(m) E_ij,
// indexed column-major as alpha = i + j m.

inline CVector coords(const Operator& x) {
  const int m = dim_of(x);
  return Eigen::Map<const CVector>(x.data(), static_cast<Eigen::Index>(m) * m) /
         std::sqrt(static_cast<double>(m));
}

inline Operator from_coords(const CVector& c, int m) {
  require(c.size() == static_cast<Eigen::Index>(m) * m,
          "from_coords: size mismatch");
  Operator x = Eigen::Map<const Operator>(c.data(), m, m);
  return x * std::sqrt(static_cast<double>(m));
}

/** The tau-orthonormal basis element with index alpha. */
inline Operator basis_element(int m, int alpha) {
  Operator e = Operator::Zero(m, m);
  e(alpha % m, alpha / m) = std::sqrt(static_cast<double>(m));
  return e;
}

inline std::vector<Operator> standard_basis(int m) {
  std::vector<Operator> b;
  b.reserve(static_cast<std::size_t>(m) * m);
  for (int a = 0; a < m * m; ++a) b.push_back(basis_element(m, a));
  return b;
}

// ---------------------------------------------------------------------------
// Superoperators

/** A linear map on M_m stored as an m^2 x m^2 matrix in basis coordinates. */
struct Superop {
  int dim = 0;
  Eigen::MatrixXcd matrix;
  Check hs_selfadjoint = Check::unchecked;
  Check kills_identity = Check::unchecked;
  Check cp_semigroup = Check::unchecked;

  Operator apply(const Operator& x) const {
    require(dim_of(x) == dim, "Superop::apply: dimension mismatch");
    return from_coords(matrix * coords(x), dim);
  }
  Operator operator()(const Operator& x) const { return apply(x); }
};

inline Superop make_superop(int m, Eigen::MatrixXcd matrix,
                            double herm_tol = 1e-10) {
  require(matrix.rows() == static_cast<Eigen::Index>(m) * m &&
              matrix.cols() == matrix.rows(),
          "make_superop: matrix must be m^2 x m^2");
  Superop s;
  s.dim = m;
  s.matrix = std::move(matrix);
  const double scale = std::max(1.0, max_abs(s.matrix));
  s.hs_selfadjoint = max_abs(s.matrix - s.matrix.adjoint()) <= herm_tol * scale
                         ? Check::verified
                         : Check::failed;
  const double one = max_abs(s.apply(identity_op(m)));
  s.kills_identity = one <= 1e-10 * scale ? Check::verified : Check::failed;
  return s;
}

/** Column alpha of the result is the coordinate vector of action(e_alpha). */
inline Superop superop_from_action(
    const std::function<Operator(const Operator&)>& action, int m) {
  require(m >= 1, "superop_from_action: m must be positive");
  const Eigen::Index n = static_cast<Eigen::Index>(m) * m;
  Eigen::MatrixXcd mat(n, n);
  for (int a = 0; a < n; ++a) mat.col(a) = coords(action(basis_element(m, a)));
  return make_superop(m, std::move(mat));
}

inline Superop identity_superop(int m) {
  const Eigen::Index n = static_cast<Eigen::Index>(m) * m;
  return make_superop(m, Eigen::MatrixXcd::Identity(n, n));
}

inline Superop zero_superop(int m) {
  const Eigen::Index n = static_cast<Eigen::Index>(m) * m;
  return make_superop(m, Eigen::MatrixXcd::Zero(n, n));
}

inline Superop operator+(const Superop& a, const Superop& b) {
  require(a.dim == b.dim, "Superop: dimension mismatch");
  return make_superop(a.dim, a.matrix + b.matrix);
}

inline Superop operator-(const Superop& a, const Superop& b) {
  require(a.dim == b.dim, "Superop: dimension mismatch");
  return make_superop(a.dim, a.matrix - b.matrix);
}

inline Superop operator*(double c, const Superop& a) {
  return make_superop(a.dim, c * a.matrix);
}

/** Composition a o b. */
inline Superop compose(const Superop& a, const Superop& b) {
  require(a.dim == b.dim, "Superop: dimension mismatch");
  return make_superop(a.dim, a.matrix * b.matrix);
}

struct SuperopSpectrum {
  int dim = 0;
  RVector values;
  Eigen::MatrixXcd vectors;
};

inline SuperopSpectrum spectrum(const Superop& a) {
  if (a.hs_selfadjoint != Check::verified)
    throw Error("spectral calculus requires a self-adjoint superoperator");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
      0.5 * (a.matrix + a.matrix.adjoint()));
  if (es.info() != Eigen::Success)
    throw NumericalError("superoperator eigendecomposition did not converge");
  // Rounding noise on the kernel would otherwise grow like e^{t |noise|} for large t.
  RVector v = es.eigenvalues();
  const double noise = 1e-12 * std::max(1.0, v.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v(i)) <= noise) v(i) = 0.0;
  return {a.dim, v, es.eigenvectors()};
}

inline Superop from_spectrum(const SuperopSpectrum& s, const RVector& fvals) {
  return make_superop(s.dim,
                      s.vectors * fvals.asDiagonal() * s.vectors.adjoint());
}

/** f(A) for a self-adjoint superoperator. */
inline Superop superop_function(const Superop& a,
                                const std::function<double(double)>& f) {
  const SuperopSpectrum s = spectrum(a);
  RVector fv(s.values.size());
  for (Eigen::Index i = 0; i < fv.size(); ++i) fv(i) = f(s.values(i));
  return from_spectrum(s, fv);
}

inline Superop semigroup(const SuperopSpectrum& s, double t) {
  require(t >= 0.0, "semigroup: t must be nonnegative");
  RVector fv = (-t * s.values.array()).exp().matrix();
  return from_spectrum(s, fv);
}

/** e^{-tA}. */
inline Superop semigroup(const Superop& a, double t) {
  require(t >= 0.0, "semigroup: t must be nonnegative");
  return semigroup(spectrum(a), t);
}

inline Operator semigroup_apply(const Superop& a, double t, const Operator& x) {
  require(t >= 0.0, "semigroup_apply: t must be nonnegative");
  if (t == 0.0) return x;
  return semigroup(a, t).apply(x);
}

/** The map x -> tau(x) 1. */
inline Superop trace_expectation(int m) {
  return superop_from_action(
      [m](const Operator& x) { return Operator(tau(x) * identity_op(m)); }, m);
}

/** Largest absolute eigenvalue of a self-adjoint superoperator. */
inline double superop_norm(const Superop& a) {
  const SuperopSpectrum s = spectrum(a);
  return s.values.cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// States: positive operators with tau(rho) = 1 (matrix trace m).

class State {
 public:
  /** Validates, clamps small negative eigenvalues and renormalizes. */
  explicit State(const Operator& rho, double neg_tol = 1e-9,
                 double trace_tol = 1e-10) {
    const int m = dim_of(rho);
    require(m >= 1, "State: empty operator");
    const Eigh e = eigh(rho);
    const double scale = std::max(1.0, e.values.cwiseAbs().maxCoeff());
    RVector v = e.values;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (v(i) < -neg_tol * scale)
        throw Error("State: negative eigenvalue " + std::to_string(v(i)));
      if (v(i) < 1e-12 * scale) v(i) = std::max(v(i), 0.0);
    }
    const double t = v.sum() / m;
    if (std::abs(t - 1.0) > trace_tol)
      throw Error("State: normalized trace " + std::to_string(t) + " != 1");
    v /= t;
    rho_ = from_eigh(e, v);
  }

  /** From a density matrix with unit matrix trace. */
  static State from_density_matrix(const Operator& d) {
    return State(static_cast<double>(dim_of(d)) * d);
  }

  Operator to_density_matrix() const {
    return rho_ / static_cast<double>(rho_.rows());
  }

  const Operator& op() const { return rho_; }
  int dim() const { return static_cast<int>(rho_.rows()); }

 private:
  Operator rho_;
};

}  // namespace qms
