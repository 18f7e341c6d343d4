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

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace qms {

using cplx = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

/** Bad input: wrong dimensions, invalid parameters, failed preconditions. */
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/** A computation that could not be completed numerically. */
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/** Tri-state validity flag. */
enum class Check { unchecked, verified, failed };

inline const char* to_string(Check c) {
  switch (c) {
    case Check::verified:
      return "verified";
    case Check::failed:
      return "failed";
    default:
      return "unchecked";
  }
}

/**
 * Numerical thresholds shared by the modules.
 *
 * The defaults are the documented values; the command-line tool can
 * override any of them by key.
 */
struct Tolerances {
  double psd_rel = 1e-9;          // PSD threshold relative to the spectrum scale
  double bisect_width = 1e-8;     // pencil bisection width
  double return_time = 1e-6;      // bisection width in t for the return time
  double commutant_svd = 1e-9;    // singular value cutoff, relative to sigma_max
  double module_eig = 1e-10;      // kernel cutoff for module normalization
  double eig_clamp = 1e-12;       // eigenvalue clamp before logarithms
  double negative_eig = 1e-9;     // eigenvalues below -this are an error
  double decay_rel = 1e-8;        // relative slack of decay inequalities
  double hermitian = 1e-10;       // Hermiticity of superoperator matrices
  int flsi_iterations = 200;
  int flsi_validation = 10000;
  int dual_iterations = 200;

  /** Set a field by name; throws Error on an unknown key. */
  void set(const std::string& key, double value) {
    if (key == "psd_rel") psd_rel = value;
    else if (key == "bisect_width") bisect_width = value;
    else if (key == "return_time") return_time = value;
    else if (key == "commutant_svd") commutant_svd = value;
    else if (key == "module_eig") module_eig = value;
    else if (key == "eig_clamp") eig_clamp = value;
    else if (key == "negative_eig") negative_eig = value;
    else if (key == "decay_rel") decay_rel = value;
    else if (key == "hermitian") hermitian = value;
    else if (key == "flsi_iterations") flsi_iterations = static_cast<int>(value);
    else if (key == "flsi_validation") flsi_validation = static_cast<int>(value);
    else if (key == "dual_iterations") dual_iterations = static_cast<int>(value);
    else throw Error("unknown tolerance key: " + key);
  }

  std::map<std::string, double> as_map() const {
    return {{"psd_rel", psd_rel},
            {"bisect_width", bisect_width},
            {"return_time", return_time},
            {"commutant_svd", commutant_svd},
            {"module_eig", module_eig},
            {"eig_clamp", eig_clamp},
            {"negative_eig", negative_eig},
            {"decay_rel", decay_rel},
            {"hermitian", hermitian},
            {"flsi_iterations", static_cast<double>(flsi_iterations)},
            {"flsi_validation", static_cast<double>(flsi_validation)},
            {"dual_iterations", static_cast<double>(dual_iterations)}};
  }
};

inline const Tolerances& default_tolerances() {
  static const Tolerances t{};
  return t;
}

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(msg);
}

}  // namespace qms
