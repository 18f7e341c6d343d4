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
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qms/cporder.hpp"
#include "qms/entfish.hpp"
#include "qms/generator.hpp"
#include "qms/random.hpp"

namespace qms {

/** Where an inequality check failed, or its tightest point. */
struct Witness {
  std::optional<Operator> state;
  double t = std::numeric_limits<double>::quiet_NaN();
  double p = std::numeric_limits<double>::quiet_NaN();
  std::string note;
};

/**
 * Outcome of a sampled inequality check. slack is the largest observed
 * value of (lhs - allowed rhs); the check passes iff slack <= 0.
 */
struct Report {
  std::string quantity;
  double value = 0.0;  // lhs at the worst point
  double bound = 0.0;  // rhs at the worst point
  double slack = -std::numeric_limits<double>::infinity();
  bool pass = true;
  std::uint64_t seed = 0;
  long checks = 0;
  double max_rel_gap = 0.0;  // max |lhs - rhs| / rhs over nonzero rhs
  std::optional<Witness> witness;

  void observe(double lhs, double rhs, double allowed, const Witness& w) {
    ++checks;
    const double s = lhs - allowed;
    if (rhs > 0.0) max_rel_gap = std::max(max_rel_gap, std::abs(lhs - rhs) / rhs);
    if (s > slack) {
      slack = s;
      value = lhs;
      bound = rhs;
      if (s > 0.0 || !witness) witness = w;
    }
    if (s > 0.0) pass = false;
  }
};

// ---------------------------------------------------------------------------
// FLSI estimation

struct FlsiEstimate {
  double lambda_lower = 0.0;
  double lambda_upper = std::numeric_limits<double>::infinity();
  double lambda_certified = 0.0;  // Gamma-E constant
  Operator argmin_state;
  int n_starts = 0;
  std::uint64_t seed = 0;
  long validation_states = 0;
  long violations = 0;  // sampled ratios below lambda_certified - 1e-8
  double fd_check_error = 0.0;
};

namespace detail {

struct FlsiObjective {
  const Superop& a;
  const Superop& e;
  int m;

  /** State m e^H / tr e^H. */
  Operator state_of(const Operator& h) const {
    const Eigh eh = eigh(h);
    const double top = eh.values.maxCoeff();
    RVector w = (eh.values.array() - top).exp().matrix();
    w *= m / w.sum();
    return from_eigh(eh, w);
  }

  /**
   * I_A / D_N, or nullopt when D_N < 1e-10 or when the state is numerically
   * singular and I_A is ill-defined (such a ratio is +inf, never a minimizer).
   */
  std::optional<double> ratio(const Operator& rho) const {
    const double d = d_sub(rho, e);
    if (!(d >= 1e-10) || !std::isfinite(d)) return std::nullopt;
    try {
      return fisher(a, rho).value / d;
    } catch (const Error&) {
      return std::nullopt;
    }
  }

  std::optional<double> value(const Operator& h) const {
    return ratio(state_of(h));
  }

  /** Gradient with respect to H under the trace pairing. */
  Operator gradient(const Operator& h, double* r_out) const {
    const Operator rho = state_of(h);
    const double d = d_sub(rho, e);
    const double i = fisher(a, rho).value;
    const double r = i / d;
    if (r_out) *r_out = r;
    auto lg = [](double s) { return std::log(s); };
    auto dlg = [](double s) { return 1.0 / s; };
    const Operator lrho = matrix_function(rho, lg);
    const Operator lerho = matrix_function(hermitian_part(e.apply(rho)), lg);
    const Operator gd = lrho - lerho;
    const Operator gi = a.apply(lrho) +
                        divided_difference_multiplier(rho, lg, dlg, hermitian_part(a.apply(rho)));
    const Operator g = hermitian_part((gi - r * gd) / d);
    const Eigh eh = eigh(h);
    const double top = eh.values.maxCoeff();
    RVector w = (eh.values.array() - top).exp().matrix();
    const double z = w.sum();
    const Operator eh_op = from_eigh(eh, w);
    auto ex = [top](double s) { return std::exp(s - top); };
    const Operator jg = divided_difference_multiplier(h, ex, ex, g);
    const cplx tge = (g * eh_op).trace();
    return hermitian_part(jg / z - (tge.real() / (z * z)) * eh_op);
  }
};

inline double real_pairing(const Operator& x, const Operator& y) {
  return (x.adjoint() * y).trace().real();
}

}  // namespace detail

/**
 * Bracket for the FLSI constant: the optimizer's best ratio I_A/D_N
 * (upper) and the Gamma-E constant validated on sampled states (lower).
 */
inline FlsiEstimate flsi_estimate(const Generator& g, const GammaECertificate& cert,
                                  int n_starts, std::uint64_t seed,
                                  const Tolerances& tol = default_tolerances()) {
  require(n_starts >= 1, "flsi_estimate: n_starts must be at least 1");
  if (max_abs(g.superop.matrix) == 0.0) throw Error("FLSI undefined");
  const int m = g.dim();
  const detail::FlsiObjective obj{g.superop, g.e_fix, m};
  FlsiEstimate est;
  est.n_starts = n_starts;
  est.seed = seed;
  est.lambda_certified = cert.lambda_star;
  const Rng root(seed);
  auto consider = [&](double r, const Operator& rho) {
    if (r < est.lambda_upper) {
      est.lambda_upper = r;
      est.argmin_state = rho;
    }
  };
  for (int s = 0; s < n_starts; ++s) {
    Rng rng = root.split(static_cast<std::uint64_t>(s));
    Operator h = random_hermitian(rng, m) * rng.uniform(0.3, 3.0);
    std::optional<double> r0 = obj.value(h);
    int tries = 0;
    while (!r0 && tries++ < 20) {
      h = random_hermitian(rng, m) * 3.0;
      r0 = obj.value(h);
    }
    if (!r0) continue;
    if (s == 0) {
      const Operator k = random_hermitian(rng, m);
      double r = 0.0;
      const Operator grad = obj.gradient(h, &r);
      const double step = 1e-6;
      const auto rp = obj.value(h + step * k), rm = obj.value(h - step * k);
      if (rp && rm) {
        const double fd = (*rp - *rm) / (2 * step);
        const double an = detail::real_pairing(grad, k);
        est.fd_check_error = std::abs(fd - an) / std::max(1.0, std::abs(an));
      }
    }
    double r = *r0;
    double step = 1.0;
    for (int it = 0; it < tol.flsi_iterations; ++it) {
      double rc = 0.0;
      Operator grad;
      try {
        grad = obj.gradient(h, &rc);
      } catch (const Error&) {
        break;
      }
      const double gn2 = detail::real_pairing(grad, grad);
      if (!(gn2 > 1e-24)) break;
      bool moved = false;
      while (step > 1e-14) {
        const Operator hn = h - step * grad;
        const auto rn = obj.value(hn);
        if (rn && *rn <= r - 1e-4 * step * gn2) {
          h = hn;
          r = *rn;
          moved = true;
          step *= 2.0;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    consider(r, obj.state_of(h));
  }
  // Validation on random states from two ensembles.
  const Rng vroot = root.split(0x7fffffffULL);
  long violations = 0;
  for (int i = 0; i < tol.flsi_validation; ++i) {
    Rng rng = vroot.split(static_cast<std::uint64_t>(i));
    Operator rho;
    if (i % 2 == 0) {
      rho = random_state(rng, m).op();
    } else {
      rho = obj.state_of(random_hermitian(rng, m) * rng.uniform(0.1, 6.0));
    }
    const auto r = obj.ratio(rho);
    if (!r) continue;
    ++est.validation_states;
    consider(*r, rho);
    if (*r < cert.lambda_star - 1e-8) ++violations;
  }
  est.violations = violations;
  est.lambda_lower = std::min(cert.lambda_star, est.lambda_upper);
  return est;
}

inline FlsiEstimate flsi_estimate(const LindbladGenerator& g, int n_starts,
                                  std::uint64_t seed,
                                  const Tolerances& tol = default_tolerances()) {
  if (g.jumps.jumps.empty() || max_abs(g.superop.matrix) == 0.0)
    throw Error("FLSI undefined");
  return flsi_estimate(g, gamma_e_constant(g, tol), n_starts, seed, tol);
}

// ---------------------------------------------------------------------------
// Decay inequalities

namespace detail {

inline std::vector<double> check_grid(const Generator& g, double lambda) {
  const double rate = lambda > 0.0 ? lambda : spectral_gap(g.superop);
  if (!(rate > 0.0)) throw Error("decay check: no time scale (lambda = gap = 0)");
  return default_grid(rate);
}

}  // namespace detail

/** D_N and I_N along the semigroup against e^{-lambda t} times their initial values. */
inline Report check_decay_bound(const Generator& g, double lambda, int n_states,
                                std::uint64_t seed,
                                const Tolerances& tol = default_tolerances()) {
  require(lambda >= 0.0, "check_decay_bound: lambda must be nonnegative");
  Report rep;
  rep.quantity = "decay";
  rep.seed = seed;
  const std::vector<double> grid = detail::check_grid(g, lambda);
  const SuperopSpectrum s = spectrum(g.superop);
  std::vector<Superop> semis;
  for (double t : grid) semis.push_back(semigroup(s, t));
  const Superop ie = identity_superop(g.dim()) - g.e_fix;
  const Rng root(seed);
  for (int i = 0; i < n_states; ++i) {
    Rng rng = root.split(static_cast<std::uint64_t>(i));
    const State rho0 = random_state(rng, g.dim());
    const double d0 = d_sub(rho0.op(), g.e_fix, tol);
    const double i0 = fisher(ie, rho0.op(), 0.0, tol).value;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const State rt(hermitian_part(semis[k].apply(rho0.op())));
      const double f = std::exp(-lambda * grid[k]);
      const double dt = d_sub(rt.op(), g.e_fix, tol);
      const double it = fisher(ie, rt.op(), 0.0, tol).value;
      rep.observe(dt, f * d0, f * d0 * (1.0 + tol.decay_rel),
                  {rt.op(), grid[k], std::nan(""), "D_N"});
      rep.observe(it, f * i0, f * i0 * (1.0 + tol.decay_rel),
                  {rt.op(), grid[k], std::nan(""), "I_N"});
    }
  }
  return rep;
}

/** ||T_t x - E x||_p against e^{-lambda t} ||x - E x||_p. */
inline Report check_lp_decay(const Generator& g, double lambda,
                             const std::vector<double>& p_list, int n_x,
                             std::uint64_t seed,
                             const Tolerances& tol = default_tolerances()) {
  require(lambda >= 0.0, "check_lp_decay: lambda must be nonnegative");
  Report rep;
  rep.quantity = "lp_decay";
  rep.seed = seed;
  const std::vector<double> grid = detail::check_grid(g, lambda);
  const SuperopSpectrum s = spectrum(g.superop);
  std::vector<Superop> semis;
  for (double t : grid) semis.push_back(semigroup(s, t));
  const Rng root(seed);
  for (int i = 0; i < n_x; ++i) {
    Rng rng = root.split(static_cast<std::uint64_t>(i));
    const Operator x = i % 2 == 0 ? random_hermitian(rng, g.dim())
                                  : random_operator(rng, g.dim());
    const Operator ex = g.e_fix.apply(x);
    for (double p : p_list) {
      const double n0 = schatten_norm(x - ex, p);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const double lhs = schatten_norm(semis[k].apply(x) - ex, p);
        const double rhs = std::exp(-lambda * grid[k]) * n0;
        rep.observe(lhs, rhs, rhs * (1.0 + tol.decay_rel) + 1e-14,
                    {x, grid[k], p, "x"});
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Gamma*-dual norm and the geometric Talagrand inequality

namespace detail {

/** Real orthonormal basis of {f Hermitian : E(f) = 0} under Re tau(f g). */
inline std::vector<Operator> centered_hermitian_basis(const Superop& e) {
  const int m = e.dim;
  std::vector<Operator> raw;
  raw.push_back(identity_op(m));
  for (const auto& b : traceless_hermitian_basis(m)) raw.push_back(b);
  for (auto& b : raw) b = hermitian_part(b - e.apply(b));
  const int n = static_cast<int>(raw.size());
  Eigen::MatrixXd gram(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) gram(i, j) = tau(raw[i] * raw[j]).real();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  const double top = std::max(1.0, es.eigenvalues().maxCoeff());
  std::vector<Operator> out;
  for (int k = n - 1; k >= 0; --k) {
    const double v = es.eigenvalues()(k);
    if (v <= 1e-10 * top) continue;
    Operator f = Operator::Zero(m, m);
    for (int i = 0; i < n; ++i) f += es.eigenvectors()(i, k) * raw[i];
    out.push_back(hermitian_part(f / std::sqrt(v)));
  }
  return out;
}

/** Largest eigenvalue of Gamma(f, f) and its eigenvector. */
inline std::pair<double, CVector> gamma_top(const JumpSet& j, const Operator& f) {
  Eigen::SelfAdjointEigenSolver<Operator> es(hermitian_part(gradient_form(j, f, f)));
  const Eigen::Index k = es.eigenvalues().size() - 1;
  return {es.eigenvalues()(k), es.eigenvectors().col(k)};
}

}  // namespace detail

/** Lipschitz seminorm ||Gamma(f, f)||^{1/2} for Hermitian f. */
inline double lip_norm(const JumpSet& j, const Operator& f) {
  return std::sqrt(std::max(0.0, detail::gamma_top(j, f).first));
}

struct DualNormResult {
  double value = 0.0;
  Operator argmax;
};

/**
 * Lower bound on sup{|tau(rho f)| : f = f*, E(f) = 0, ||Gamma(f,f)|| <= lip^2}
 * by projected gradient ascent on tau(rho f)/||Gamma(f,f)||^{1/2}.
 */
inline DualNormResult gamma_dual_norm(const LindbladGenerator& g, const Operator& rho,
                                      int n_starts, std::uint64_t seed,
                                      double lip_bound = 1.0,
                                      const Tolerances& tol = default_tolerances()) {
  require(dim_of(rho) == g.dim(), "gamma_dual_norm: dimension mismatch");
  require(std::abs(tau(rho)) <= 1e-8 * std::max(1.0, max_abs(rho)),
          "gamma_dual_norm: rho must have zero trace");
  require(n_starts >= 1, "gamma_dual_norm: n_starts must be at least 1");
  DualNormResult best;
  best.argmax = Operator::Zero(g.dim(), g.dim());
  const std::vector<Operator> basis = detail::centered_hermitian_basis(g.e_fix);
  const int d = static_cast<int>(basis.size());
  if (d == 0 || max_abs(rho) == 0.0) return best;
  RVector w(d);
  for (int i = 0; i < d; ++i) w(i) = tau(rho * basis[i]).real();
  if (w.norm() <= 1e-14) return best;
  auto build = [&](const RVector& c) {
    Operator f = Operator::Zero(g.dim(), g.dim());
    for (int i = 0; i < d; ++i) f += c(i) * basis[i];
    return f;
  };
  auto objective = [&](const RVector& c) {
    const double n = detail::gamma_top(g.jumps, build(c)).first;
    return n > 0.0 ? w.dot(c) / std::sqrt(n) : -std::numeric_limits<double>::infinity();
  };
  const Rng root(seed);
  for (int s = 0; s < n_starts; ++s) {
    Rng rng = root.split(static_cast<std::uint64_t>(s));
    RVector c(d);
    if (s == 0) {
      c = w;
    } else {
      for (int i = 0; i < d; ++i) c(i) = rng.normal();
    }
    double val = objective(c);
    double step = 1.0;
    for (int it = 0; it < tol.dual_iterations; ++it) {
      const Operator f = build(c);
      const auto [n, v] = detail::gamma_top(g.jumps, f);
      if (!(n > 0.0)) break;
      const double lin = w.dot(c);
      RVector grad(d);
      for (int i = 0; i < d; ++i) {
        double dn = 0.0;
        for (const auto& a : g.jumps.jumps)
          dn += 2.0 * ((commutator(a, f) * v).adjoint() * (commutator(a, basis[i]) * v))(0, 0).real();
        grad(i) = w(i) / std::sqrt(n) - lin * dn / (2.0 * n * std::sqrt(n));
      }
      const double gn = grad.norm();
      if (!(gn > 1e-14)) break;
      bool moved = false;
      const double cn = c.norm();
      while (step > 1e-12) {
        const RVector cnew = c + step * cn * grad / gn;
        const double vn = objective(cnew);
        if (vn > val) {
          c = cnew / cnew.norm();
          val = vn;
          moved = true;
          step *= 2.0;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    if (val > best.value) {
      best.value = val;
      const Operator f = build(c);
      best.argmax = f / lip_norm(g.jumps, f);
    }
  }
  best.value *= lip_bound;
  best.argmax *= lip_bound;
  return best;
}

/** tau(e1) tau(e2) <= exp(-lambda h^2 / 64) with h from the centered test function. */
inline Report geometric_talagrand_check(const LindbladGenerator& g, double lambda,
                                        const Operator& e1, const Operator& e2,
                                        const Operator& f,
                                        const Tolerances& tol = default_tolerances()) {
  for (const Operator* e : {&e1, &e2}) {
    require(dim_of(*e) == g.dim(), "geometric_talagrand_check: dimension mismatch");
    require(max_abs(*e * *e - *e) <= 1e-8 && max_abs(*e - e->adjoint()) <= 1e-8,
            "geometric_talagrand_check: argument is not a projection");
  }
  const double t1 = tau(e1).real(), t2 = tau(e2).real();
  if (t1 <= 1e-12 || t2 <= 1e-12)
    throw Error("geometric_talagrand_check: zero-trace projection");
  require(is_hermitian(f), "geometric_talagrand_check: f must be Hermitian");
  const Operator fc = hermitian_part(f - g.e_fix.apply(f));
  const double lip = lip_norm(g.jumps, fc);
  require(lip <= 1.0 + 1e-9, "geometric_talagrand_check: ||Gamma(f,f)|| exceeds 1");
  const double h =
      std::abs(tau(e1 * fc).real() / t1 - tau(e2 * fc).real() / t2);
  const double rhs = std::exp(-lambda * h * h / 64.0);
  Report rep;
  rep.quantity = "geometric_talagrand";
  rep.observe(t1 * t2, rhs, rhs * (1.0 + tol.decay_rel), {std::nullopt, std::nan(""),
                                                         std::nan(""), "h=" + std::to_string(h)});
  return rep;
}

}  // namespace qms
