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

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "qms/cporder.hpp"
#include "qms/generator.hpp"
#include "qms/matops.hpp"

namespace qms {

namespace quad {

inline constexpr double kRelTol = 1e-13;

/** Integral over [a, b] inside (0, 1] by tanh-sinh. */
inline double tanh_sinh(const std::function<double(double)>& f, double a,
                        double b, double* err = nullptr) {
  thread_local boost::math::quadrature::tanh_sinh<double> integrator(12);
  auto g = [&](double t) {
    if (!(t > 0.0)) return 0.0;
    const double v = f(t);
    return std::isfinite(v) ? v : 0.0;
  };
  double e = 0.0, l1 = 0.0;
  const double r = integrator.integrate(g, a, b, kRelTol, &e, &l1);
  if (err) *err = e;
  return r;
}

/** Integral over [a, b] (b may be +inf) after the substitution t = e^u. */
inline double exp_gauss(const std::function<double(double)>& f, double a,
                        double b, double* err = nullptr) {
  auto g = [&](double u) {
    const double t = std::exp(u);
    if (!std::isfinite(t)) return 0.0;
    const double v = f(t) * t;
    return std::isfinite(v) ? v : 0.0;
  };
  double e = 0.0;
  const double ub = std::isinf(b) ? std::numeric_limits<double>::infinity()
                                  : std::log(b);
  const double r = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      g, std::log(a), ub, 20, kRelTol, &e);
  if (err) *err = e;
  return r;
}

}  // namespace quad

/** Subordination weight F(t) with verification flags. */
struct WeightProfile {
  enum class Kind { power, eps_sigma, table };

  Kind kind = Kind::power;
  double alpha = 0.0;  // power law exponent
  double eps = 0.0;    // eps-sigma lower cut (may underflow; ell is authoritative)
  double ell = 0.0;    // |ln eps|
  double sigma = 0.0;  // eps-sigma tail exponent
  std::vector<std::pair<double, double>> points;  // table (t, F(t)), t increasing
  double norm = 1.0;   // multiplicative normalization

  Check cond_i = Check::unchecked;
  double c_f = std::numeric_limits<double>::quiet_NaN();
  Check cond_qm = Check::unchecked;
  double qm_mu = 0.5;
  double qm_c = std::numeric_limits<double>::quiet_NaN();
  Check cond_delta2 = Check::unchecked;
  double d2_alpha = std::numeric_limits<double>::quiet_NaN();
  double d2_t = std::numeric_limits<double>::quiet_NaN();
  double d2_c = std::numeric_limits<double>::quiet_NaN();

  double operator()(double t) const {
    if (!(t > 0.0)) return 0.0;
    switch (kind) {
      case Kind::power:
        return norm * std::pow(t, -alpha);
      case Kind::eps_sigma:
        if (std::log(t) < -ell) return 0.0;
        return t < 1.0 ? 1.0 / (t * ell) : std::pow(t, -sigma) / ell;
      case Kind::table: {
        if (points.empty() || t < points.front().first || t > points.back().first)
          return 0.0;
        auto it = std::lower_bound(
            points.begin(), points.end(), t,
            [](const std::pair<double, double>& p, double v) { return p.first < v; });
        if (it == points.begin()) return norm * it->second;
        const auto& [t1, f1] = *(it - 1);
        const auto& [t2, f2] = *it;
        if (f1 <= 0.0 || f2 <= 0.0) {
          const double w = (t - t1) / (t2 - t1);
          return norm * ((1 - w) * f1 + w * f2);
        }
        const double w = std::log(t / t1) / std::log(t2 / t1);
        return norm * std::exp((1 - w) * std::log(f1) + w * std::log(f2));
      }
    }
    return 0.0;
  }

  /** Discontinuities and kinks of F, used to split the quadrature. */
  std::vector<double> breakpoints() const {
    std::vector<double> b;
    if (kind == Kind::eps_sigma && ell < 700.0) b.push_back(std::exp(-ell));
    if (kind == Kind::table)
      for (const auto& p : points) b.push_back(p.first);
    return b;
  }
};

/**
 * Integral of kt(t) F(t) over (0, inf). The caller passes kt = k(t)/t in a
 * form that stays finite as t -> 0.
 */
inline double integrate_weight(const WeightProfile& f,
                               const std::function<double(double)>& kt,
                               double* err = nullptr) {
  auto integrand = [&](double t) {
    const double w = f(t);
    return w == 0.0 ? 0.0 : kt(t) * w;
  };
  std::vector<double> cuts = f.breakpoints();
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double total = 0.0, e_total = 0.0, e = 0.0, lo = 0.0;
  for (double c : cuts) {
    if (c <= 1.0) {
      if (c > lo) {
        // tanh-sinh handles the possible singularity at 0; elsewhere Gauss-Kronrod
        // never samples the endpoints, where a table profile jumps.
        total += lo == 0.0 ? quad::tanh_sinh(integrand, lo, c, &e)
                           : quad::exp_gauss(integrand, lo, c, &e);
        e_total += e;
      }
      lo = c;
    }
  }
  lo = 1.0;
  for (double c : cuts) {
    if (c > 1.0) {
      total += quad::exp_gauss(integrand, lo, c, &e);
      e_total += e;
      lo = c;
    }
  }
  total += quad::exp_gauss(integrand, lo, std::numeric_limits<double>::infinity(), &e);
  e_total += e;
  if (err) *err = e_total;
  return total;
}

namespace detail {

/** (1 - e^{-lam t})/t, finite at t -> 0. */
inline double one_minus_exp_over_t(double lam, double t) {
  const double x = lam * t;
  if (x < 1e-8) return lam * (1.0 - 0.5 * x);
  return -std::expm1(-x) / t;
}

inline std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i)
    g[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1));
  return g;
}

inline void verify_flags(WeightProfile& f, double d2_alpha, double d2_t) {
  // (I): C_F = int min(1,t) F(t) dt/t.
  double err = 0.0;
  const double cf =
      f.kind == WeightProfile::Kind::eps_sigma
          ? 1.0 + 1.0 / (f.sigma * f.ell)
          : integrate_weight(
                f, [](double t) { return t < 1.0 ? 1.0 : 1.0 / t; }, &err);
  f.c_f = cf;
  f.cond_i = std::isfinite(cf) && err < 1e-10 * std::max(1.0, cf)
                 ? Check::verified
                 : Check::failed;
  // (QM) with mu = 1/2 on a log grid.
  const std::vector<double> grid = log_grid(1e-8, 1e8, 321);
  double cq = 0.0;
  bool qm_ok = true;
  for (double t : grid) {
    const double a = f(f.qm_mu * t), b = f(t);
    if (a == 0.0) continue;
    if (b == 0.0) {
      qm_ok = false;
      break;
    }
    cq = std::max(cq, a / b);
  }
  f.qm_c = qm_ok ? cq : std::numeric_limits<double>::infinity();
  f.cond_qm = qm_ok ? Check::verified : Check::failed;
  // (Delta_2): F(s) <= c (t/s)^alpha F(t) for t_alpha <= s <= t.
  if (std::isfinite(d2_alpha) && d2_alpha > 0.0 && d2_alpha < 1.0) {
    const std::vector<double> g2 = log_grid(d2_t, std::max(1e8, 10 * d2_t), 161);
    double c = 0.0;
    bool ok = true;
    for (std::size_t i = 0; i < g2.size() && ok; ++i)
      for (std::size_t j = i; j < g2.size(); ++j) {
        const double fs = f(g2[i]), ft = f(g2[j]);
        if (fs == 0.0) continue;
        if (ft == 0.0) {
          ok = false;
          break;
        }
        c = std::max(c, fs * std::pow(g2[i] / g2[j], d2_alpha) / ft);
      }
    f.d2_alpha = d2_alpha;
    f.d2_t = d2_t;
    f.d2_c = ok ? c : std::numeric_limits<double>::infinity();
    f.cond_delta2 = ok ? Check::verified : Check::failed;
  }
}

}  // namespace detail

/** F(t) = c(alpha) t^{-alpha}, normalized so that phi_F(lambda) = lambda^alpha. */
inline WeightProfile power_law(double alpha) {
  require(alpha > 0.0 && alpha < 1.0, "power_law: alpha must lie in (0,1)");
  WeightProfile f;
  f.kind = WeightProfile::Kind::power;
  f.alpha = alpha;
  f.norm = 1.0;
  const double raw = integrate_weight(
      f, [](double t) { return detail::one_minus_exp_over_t(1.0, t); });
  f.norm = 1.0 / raw;
  detail::verify_flags(f, alpha, 1e-8);
  return f;
}

/**
 * F(t) = t^{-1}/ell on [e^{-ell}, 1) and t^{-sigma}/ell on [1, inf), so
 * that phi_F = (psi + psi~)/ell. Parameterized by ell = |ln eps| because
 * eps itself may underflow.
 */
inline WeightProfile eps_sigma_profile_log(double ell, double sigma) {
  require(ell > 0.0 && std::isfinite(ell), "eps_sigma_profile: |ln eps| must be positive");
  require(sigma > 0.0, "eps_sigma_profile: sigma must be positive");
  WeightProfile f;
  f.kind = WeightProfile::Kind::eps_sigma;
  f.ell = ell;
  f.eps = std::exp(-ell);
  f.sigma = sigma;
  detail::verify_flags(f, sigma < 1.0 ? sigma : std::nan(""), 1.0);
  return f;
}

inline WeightProfile eps_sigma_profile(double eps, double sigma) {
  require(eps > 0.0 && eps < 1.0, "eps_sigma_profile: eps must lie in (0,1)");
  return eps_sigma_profile_log(-std::log(eps), sigma);
}

/** Log-log interpolated table, zero outside its range. */
inline WeightProfile table_profile(std::vector<std::pair<double, double>> points,
                                   double d2_alpha = std::nan(""),
                                   double d2_t = 1.0) {
  require(points.size() >= 2, "table_profile: need at least two points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    require(points[i].first > 0.0 && points[i].second >= 0.0,
            "table_profile: points must have t > 0 and F >= 0");
    if (i > 0)
      require(points[i].first > points[i - 1].first,
              "table_profile: t must be increasing");
  }
  WeightProfile f;
  f.kind = WeightProfile::Kind::table;
  f.points = std::move(points);
  detail::verify_flags(f, d2_alpha, d2_t);
  return f;
}

inline double phi_eps_sigma(double lam, double ell, double sigma);

/** phi_F(lambda) = int (1 - e^{-t lambda}) F(t) dt/t. */
inline double phi_of_lambda(const WeightProfile& f, double lam) {
  if (f.cond_i == Check::failed) throw Error("phi_of_lambda: divergent profile");
  require(lam >= -1e-12, "phi_of_lambda: lambda must be nonnegative");
  if (lam <= 0.0) return 0.0;
  if (f.kind == WeightProfile::Kind::eps_sigma)
    return phi_eps_sigma(lam, f.ell, f.sigma);
  return integrate_weight(
      f, [lam](double t) { return detail::one_minus_exp_over_t(lam, t); });
}

namespace detail {

inline Superop spectral_map(const Superop& a, const std::function<double(double)>& phi) {
  const SuperopSpectrum s = spectrum(a);
  const double scale = std::max(1.0, s.values.cwiseAbs().maxCoeff());
  RVector fv(s.values.size());
  for (Eigen::Index k = 0; k < fv.size(); ++k) {
    const double v = s.values(k);
    if (v < -1e-10 * scale) throw Error("spectral calculus: generator is not PSD");
    fv(k) = std::abs(v) <= 1e-12 * scale ? 0.0 : phi(std::max(v, 0.0));
  }
  return from_spectrum(s, fv);
}

}  // namespace detail

/** Phi_F(A) by spectral calculus. */
inline Superop subordinated_generator(const Superop& a, const WeightProfile& f) {
  return detail::spectral_map(a, [&f](double v) { return phi_of_lambda(f, v); });
}

inline Superop fractional_power(const Superop& a, double theta) {
  require(theta > 0.0 && theta <= 1.0, "fractional_power: theta must lie in (0,1]");
  return detail::spectral_map(a, [theta](double v) { return std::pow(v, theta); });
}

// ---------------------------------------------------------------------------
// The eps-sigma calculus

/** psi(lambda) = int_eps^1 (1 - e^{-lambda t}) dt/t^2 with eps = e^{-ell}. */
inline double psi_eps(double lam, double ell) {
  require(ell > 0.0, "psi_eps: |ln eps| must be positive");
  if (lam <= 0.0) return 0.0;
  // t = e^{-s}: psi = lam ell - int_0^ell g(s) ds, g = (x - 1 + e^{-x})/u, x = lam u.
  auto g = [lam](double s) {
    const double u = std::exp(-s);
    const double x = lam * u;
    double r;
    if (x < 1e-3) r = x * x * (0.5 - x * (1.0 / 6 - x * (1.0 / 24 - x / 120)));
    else r = std::expm1(-x) + x;
    return r / u;
  };
  const double cut = std::min(ell, 60.0 + std::log1p(lam));
  double e = 0.0;
  double head = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      g, 0.0, cut, 20, quad::kRelTol, &e);
  // Beyond the cut g(s) = lam^2 e^{-s}/2 to relative accuracy lam e^{-cut}.
  const double tail = ell > cut ? 0.5 * lam * lam * (std::exp(-cut) - std::exp(-ell)) : 0.0;
  return lam * ell - head - tail;
}

/** psi~(lambda) = int_1^inf (1 - e^{-lambda t}) t^{-(1+sigma)} dt. */
inline double psi_tilde(double lam, double sigma) {
  require(sigma > 0.0, "psi_tilde: sigma must be positive");
  if (lam <= 0.0) return 0.0;
  return quad::exp_gauss(
      [lam, sigma](double t) { return -std::expm1(-lam * t) * std::pow(t, -1.0 - sigma); },
      1.0, std::numeric_limits<double>::infinity());
}

inline double phi_eps_sigma(double lam, double ell, double sigma) {
  return (psi_eps(lam, ell) + psi_tilde(lam, sigma)) / ell;
}

/** Upper bound (2/sigma + ||L||^2)/(2 |ln eps|) on ||L - phi(L)||. */
inline double eps_sigma_bound(double norm_l, double ell, double sigma) {
  return (2.0 / sigma + norm_l * norm_l) / (2.0 * ell);
}

inline Superop eps_sigma_generator_log(const Superop& l, double ell, double sigma) {
  require(ell > 0.0, "eps_sigma_generator: |ln eps| must be positive");
  require(sigma > 0.0, "eps_sigma_generator: sigma must be positive");
  return detail::spectral_map(
      l, [ell, sigma](double v) { return phi_eps_sigma(v, ell, sigma); });
}

inline Superop eps_sigma_generator(const Superop& l, double eps, double sigma) {
  require(eps > 0.0 && eps < 1.0, "eps_sigma_generator: eps must lie in (0,1)");
  return eps_sigma_generator_log(l, -std::log(eps), sigma);
}

struct DensityReport {
  double t0 = 0.0;
  double t0_eff = 0.0;  // max(t0, e)
  double sigma = 0.0;
  double log_eps0 = 0.0;  // |ln eps_0|
  double norm_l = 0.0;
  double distance = 0.0;  // ||L - B_eps||
  double alpha_l = 0.0;
  double predicted_floor = 0.0;  // eps alpha(L)
  double lambda_gamma_e = 0.0;
  bool wide_eps0 = false;
};

struct DensityResult {
  Superop b_eps;
  DensityReport report;
};

/** B_eps = phi_{eps_0, sigma}(L) with ||L - B_eps|| <= eps and a Gamma-E floor. */
inline DensityResult density_approximation(const Generator& g, double eps,
                                           const Tolerances& tol = default_tolerances()) {
  const Superop& l = g.superop;
  const double norm_l = superop_norm(l);
  require(eps > 0.0 && eps < norm_l,
          "density_approximation: eps must lie in (0, ||L||)");
  const ReturnTime rt = return_time(g, tol);
  if (!rt.reached) throw Error("density_approximation: return time not reached");
  DensityReport r;
  r.t0 = rt.t0;
  r.t0_eff = std::max(rt.t0, std::numbers::e);
  const double lt = std::log(r.t0_eff);
  r.sigma = 1.0 / lt;
  r.norm_l = norm_l;
  r.log_eps0 = (lt + 0.5 * norm_l * norm_l) / eps;
  r.wide_eps0 = r.log_eps0 < std::log(100.0);
  DensityResult out;
  out.b_eps = eps_sigma_generator_log(l, r.log_eps0, r.sigma);
  r.distance = superop_norm(l - out.b_eps);
  r.alpha_l = 1.0 / (2.0 * std::numbers::e * lt * (lt + norm_l * norm_l));
  r.predicted_floor = eps * r.alpha_l;
  Generator gb;
  gb.superop = out.b_eps;
  gb.fixed_algebra = g.fixed_algebra;
  gb.e_fix = g.e_fix;
  r.lambda_gamma_e = gamma_e_constant(gb, tol).lambda_star;
  out.report = r;
  return out;
}

// ---------------------------------------------------------------------------
// The averaged maps Psi_F(r)

/** g(r) = int e^{-r/t} F(t) dt/t. */
inline double g_of_r(const WeightProfile& f, double r) {
  require(r > 0.0, "g_of_r: r must be positive");
  return integrate_weight(f, [r](double t) { return std::exp(-r / t) / t; });
}

/** int e^{-r/t} (1 - e^{-t lambda}) F(t) dt/t. */
inline double h_of_r(const WeightProfile& f, double r, double lam) {
  if (lam <= 0.0) return 0.0;
  return integrate_weight(f, [r, lam](double t) {
    return std::exp(-r / t) * detail::one_minus_exp_over_t(lam, t);
  });
}

struct PsiMap {
  Superop psi;
  double g = 0.0;
};

/** Psi_F(r) = g(r)^{-1} int e^{-r/t} T_t F(t) dt/t, spectrally. */
inline PsiMap psi_r_map(const Superop& a, const WeightProfile& f, double r) {
  if (f.cond_i == Check::failed) throw Error("psi_r_map: divergent profile");
  const double g = g_of_r(f, r);
  if (!(g > 0.0) || !std::isfinite(g))
    throw NumericalError("psi_r_map: quadrature for g(r) failed");
  PsiMap out;
  out.g = g;
  const SuperopSpectrum s = spectrum(a);
  const double scale = std::max(1.0, s.values.cwiseAbs().maxCoeff());
  RVector fv(s.values.size());
  for (Eigen::Index k = 0; k < fv.size(); ++k) {
    const double v = s.values(k);
    fv(k) = std::abs(v) <= 1e-12 * scale ? 1.0 : 1.0 - h_of_r(f, r, std::max(v, 0.0)) / g;
  }
  out.psi = from_spectrum(s, fv);
  return out;
}

/** g(r)(I - Psi_F(r)) computed directly. */
inline Superop scaled_i_minus_psi(const Superop& a, const WeightProfile& f, double r) {
  return detail::spectral_map(a, [&f, r](double v) { return h_of_r(f, r, v); });
}

}  // namespace qms
