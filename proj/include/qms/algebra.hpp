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

#include <Eigen/SVD>
#include <vector>

#include "qms/matops.hpp"

namespace qms {

inline Operator kron(const Operator& a, const Operator& b) {
  Operator k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return k;
}

/** A *-subalgebra of M_m given by a tau-orthonormal basis. */
struct SubAlgebra {
  int dim_ambient = 0;
  std::vector<Operator> basis;
  bool contains_identity = false;

  int size() const { return static_cast<int>(basis.size()); }
};

namespace detail {

inline Eigen::MatrixXcd coord_matrix(int m, const std::vector<Operator>& ops) {
  Eigen::MatrixXcd c(static_cast<Eigen::Index>(m) * m,
                     static_cast<Eigen::Index>(ops.size()));
  for (std::size_t k = 0; k < ops.size(); ++k) {
    require(dim_of(ops[k]) == m, "operator dimension mismatch");
    c.col(static_cast<Eigen::Index>(k)) = coords(ops[k]);
  }
  return c;
}

inline bool spans_identity(int m, const std::vector<Operator>& basis) {
  if (basis.empty()) return false;
  const Eigen::MatrixXcd c = coord_matrix(m, basis);
  const CVector one = coords(identity_op(m));
  return (one - c * (c.adjoint() * one)).norm() <= 1e-9;
}

inline SubAlgebra from_orthonormal_coords(int m, const Eigen::MatrixXcd& cols) {
  SubAlgebra n;
  n.dim_ambient = m;
  for (Eigen::Index k = 0; k < cols.cols(); ++k)
    n.basis.push_back(from_coords(cols.col(k), m));
  n.contains_identity = spans_identity(m, n.basis);
  return n;
}

}  // namespace detail

/**
 * Orthonormal basis of the linear span of ops. The caller is responsible
 * for the span being a *-algebra; see closure_residual.
 */
inline SubAlgebra subalgebra_from_span(int m, const std::vector<Operator>& ops,
                                       double rel_cut = 1e-9) {
  require(m >= 1, "subalgebra_from_span: m must be positive");
  if (ops.empty()) return detail::from_orthonormal_coords(m, Eigen::MatrixXcd(m * m, 0));
  const Eigen::MatrixXcd c = detail::coord_matrix(m, ops);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(c, Eigen::ComputeThinU);
  const RVector& s = svd.singularValues();
  Eigen::Index rank = 0;
  const double cut = rel_cut * (s.size() ? s(0) : 0.0);
  while (rank < s.size() && s(rank) > cut) ++rank;
  return detail::from_orthonormal_coords(m, svd.matrixU().leftCols(rank));
}

inline SubAlgebra full_algebra(int m) {
  return detail::from_orthonormal_coords(
      m, Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(m) * m,
                                    static_cast<Eigen::Index>(m) * m));
}

inline SubAlgebra scalar_algebra(int m) {
  return subalgebra_from_span(m, {identity_op(m)});
}

inline SubAlgebra diagonal_algebra(int m) {
  std::vector<Operator> ops;
  for (int i = 0; i < m; ++i) {
    Operator e = Operator::Zero(m, m);
    e(i, i) = 1.0;
    ops.push_back(e);
  }
  return subalgebra_from_span(m, ops);
}

/** N1 (x) N2 inside M_{m1} (x) M_{m2}. */
inline SubAlgebra tensor_subalgebra(const SubAlgebra& a, const SubAlgebra& b) {
  SubAlgebra n;
  n.dim_ambient = a.dim_ambient * b.dim_ambient;
  for (const auto& x : a.basis)
    for (const auto& y : b.basis) n.basis.push_back(kron(x, y));
  n.contains_identity = a.contains_identity && b.contains_identity;
  return n;
}

/** Coordinate matrix of x -> [g, x]. */
inline Eigen::MatrixXcd commutator_matrix(const Operator& g) {
  const Eigen::Index m = g.rows();
  const Operator id = Operator::Identity(m, m);
  // vec(g x - x g) = (I (x) g - g^T (x) I) vec(x), column-major vec.
  return kron(id, g) - kron(g.transpose(), id);
}

/** {x : [g, x] = 0 for all g in gens}; the full algebra when gens is empty. */
inline SubAlgebra commutant(const std::vector<Operator>& gens, int m,
                            double rel_cut = 1e-9) {
  require(m >= 1, "commutant: m must be positive");
  if (gens.empty()) return full_algebra(m);
  const Eigen::Index n = static_cast<Eigen::Index>(m) * m;
  Eigen::MatrixXcd stacked(n * static_cast<Eigen::Index>(gens.size()), n);
  for (std::size_t k = 0; k < gens.size(); ++k) {
    require(dim_of(gens[k]) == m, "commutant: generator dimension mismatch");
    stacked.middleRows(static_cast<Eigen::Index>(k) * n, n) =
        commutator_matrix(gens[k]);
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(stacked, Eigen::ComputeFullV);
  const RVector& s = svd.singularValues();
  const double smax = s.size() ? s(0) : 0.0;
  if (smax == 0.0) return full_algebra(m);
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > rel_cut * smax) ++rank;
  return detail::from_orthonormal_coords(m, svd.matrixV().rightCols(n - rank));
}

/** Largest residual of products and adjoints after projection onto N. */
inline double closure_residual(const SubAlgebra& n) {
  const int m = n.dim_ambient;
  const Eigen::MatrixXcd c = detail::coord_matrix(m, n.basis);
  auto resid = [&](const Operator& x) {
    const CVector v = coords(x);
    return (v - c * (c.adjoint() * v)).norm();
  };
  double worst = 0.0;
  for (const auto& a : n.basis) {
    worst = std::max(worst, resid(a.adjoint()));
    for (const auto& b : n.basis) worst = std::max(worst, resid(a * b));
  }
  return worst;
}

/** Gram matrix deviation from the identity. */
inline double orthonormality_residual(const SubAlgebra& n) {
  const Eigen::MatrixXcd c = detail::coord_matrix(n.dim_ambient, n.basis);
  const Eigen::Index k = c.cols();
  return max_abs(c.adjoint() * c - Eigen::MatrixXcd::Identity(k, k));
}

/** Trace-preserving conditional expectation onto N. */
inline Superop conditional_expectation(const SubAlgebra& n) {
  if (!n.contains_identity)
    throw Error("conditional_expectation: subalgebra does not contain 1");
  const Eigen::MatrixXcd c = detail::coord_matrix(n.dim_ambient, n.basis);
  return make_superop(n.dim_ambient, c * c.adjoint());
}

/** Right module basis of M over N with E(xi_i* xi_j) = delta_ij p_i. */
struct ModuleBasis {
  std::vector<Operator> xis;
  std::vector<Operator> supports;

  int size() const { return static_cast<int>(xis.size()); }
};

/** Matrix units in lexicographic order (row index first). */
inline std::vector<Operator> matrix_unit_candidates(int m) {
  std::vector<Operator> c;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      Operator e = Operator::Zero(m, m);
      e(i, j) = 1.0;
      c.push_back(e);
    }
  return c;
}

/**
 * Greedy module Gram-Schmidt over the given candidates, after xi_0 = 1.
 * Residuals are normalized by h^{-1/2} on supp(h) with h = E(eta* eta).
 */
inline ModuleBasis module_basis(const SubAlgebra& n,
                                const std::vector<Operator>& candidates,
                                double eig_cut = 1e-10) {
  const int m = n.dim_ambient;
  const Superop e = conditional_expectation(n);
  ModuleBasis mb;
  mb.xis.push_back(identity_op(m));
  mb.supports.push_back(identity_op(m));
  for (const auto& x : candidates) {
    require(dim_of(x) == m, "module_basis: candidate dimension mismatch");
    Operator eta = x;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& xi : mb.xis) eta -= xi * e.apply(xi.adjoint() * eta);
    if (hs_norm(eta) <= 1e-9 * std::max(1.0, hs_norm(x))) continue;
    const Eigh h = eigh(hermitian_part(e.apply(eta.adjoint() * eta)));
    const double cut = eig_cut * std::max(1.0, h.values.maxCoeff());
    RVector inv_sqrt(h.values.size()), supp(h.values.size());
    for (Eigen::Index k = 0; k < h.values.size(); ++k) {
      const bool on = h.values(k) > cut;
      inv_sqrt(k) = on ? 1.0 / std::sqrt(h.values(k)) : 0.0;
      supp(k) = on ? 1.0 : 0.0;
    }
    if (supp.sum() == 0.0) continue;
    mb.xis.push_back(eta * from_eigh(h, inv_sqrt));
    mb.supports.push_back(from_eigh(h, supp));
  }
  return mb;
}

inline ModuleBasis module_basis(const SubAlgebra& n) {
  return module_basis(n, matrix_unit_candidates(n.dim_ambient));
}

/** Largest deviation of E(xi_i* xi_j) from delta_ij p_i. */
inline double module_orthonormality_residual(const ModuleBasis& mb,
                                             const Superop& e) {
  double worst = 0.0;
  for (int i = 0; i < mb.size(); ++i)
    for (int j = 0; j < mb.size(); ++j) {
      Operator g = e.apply(mb.xis[i].adjoint() * mb.xis[j]);
      if (i == j) g -= mb.supports[i];
      worst = std::max(worst, max_abs(g));
    }
  return worst;
}

/** ||x - sum_i xi_i E(xi_i* x)||_2. */
inline double module_reconstruction_residual(const ModuleBasis& mb,
                                             const Superop& e,
                                             const Operator& x) {
  Operator r = x;
  for (const auto& xi : mb.xis) r -= xi * e.apply(xi.adjoint() * x);
  return hs_norm(r);
}

}  // namespace qms
