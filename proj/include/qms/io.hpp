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
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qms/casebook.hpp"
#include "qms/constants.hpp"
#include "qms/cporder.hpp"
#include "qms/entfish.hpp"
#include "qms/generator.hpp"
#include "qms/subordinate.hpp"

namespace qms::io {

using json = nlohmann::ordered_json;

/** Finite doubles as numbers; inf and nan as the strings "inf", "-inf", "nan". */
inline json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

// ---------------------------------------------------------------------------
// Operators

inline json to_json(const Operator& x) {
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    json r = json::array(), c = json::array();
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      r.push_back(x(i, j).real());
      c.push_back(x(i, j).imag());
    }
    re.push_back(std::move(r));
    im.push_back(std::move(c));
  }
  return json{{"dim", x.rows()}, {"re", re}, {"im", im}};
}

namespace detail {

inline Eigen::MatrixXd real_matrix(const json& j, int m, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != m)
    throw Error(std::string("operator JSON: '") + what + "' must have dim rows");
  Eigen::MatrixXd out(m, m);
  for (int i = 0; i < m; ++i) {
    const json& row = j[i];
    if (!row.is_array() || static_cast<int>(row.size()) != m)
      throw Error(std::string("operator JSON: '") + what + "' must have dim columns");
    for (int k = 0; k < m; ++k) {
      if (!row[k].is_number())
        throw Error(std::string("operator JSON: '") + what + "' entries must be numbers");
      out(i, k) = row[k].get<double>();
    }
  }
  return out;
}

}  // namespace detail

inline Operator operator_from_json(const json& j, int expect_dim = -1) {
  if (!j.is_object() || !j.contains("re"))
    throw Error("operator JSON: expected an object with 're'");
  const json& re = j.at("re");
  if (!re.is_array() || re.empty()) throw Error("operator JSON: 're' must be a nonempty array");
  const int m = j.contains("dim") ? j.at("dim").get<int>() : static_cast<int>(re.size());
  if (m < 1) throw Error("operator JSON: dim must be positive");
  if (expect_dim >= 0 && m != expect_dim) throw Error("operator JSON: dimension mismatch");
  const Eigen::MatrixXd r = detail::real_matrix(re, m, "re");
  const Eigen::MatrixXd i = j.contains("im") ? detail::real_matrix(j.at("im"), m, "im")
                                             : Eigen::MatrixXd::Zero(m, m);
  Operator out(m, m);
  out.real() = r;
  out.imag() = i;
  return out;
}

inline json to_json(const std::vector<Operator>& ops, int m) {
  json list = json::array();
  for (const auto& x : ops) list.push_back(to_json(x));
  return json{{"dim", m}, {"matrices", list}};
}

inline std::vector<Operator> operators_from_json(const json& j, int* dim_out = nullptr) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("matrices"))
    throw Error("operator list JSON: expected {\"dim\", \"matrices\"}");
  const int m = j.at("dim").get<int>();
  if (m < 1) throw Error("operator list JSON: dim must be positive");
  if (!j.at("matrices").is_array()) throw Error("operator list JSON: 'matrices' must be an array");
  std::vector<Operator> out;
  for (const auto& e : j.at("matrices")) out.push_back(operator_from_json(e, m));
  if (dim_out) *dim_out = m;
  return out;
}

inline JumpSet jumpset_from_json(const json& j) {
  int m = 0;
  std::vector<Operator> ops = operators_from_json(j, &m);
  return make_jumpset(m, std::move(ops));
}

inline json to_json(const JumpSet& j) { return to_json(j.jumps, j.dim); }

inline json to_json(const SubAlgebra& n) {
  json out = to_json(n.basis, n.dim_ambient);
  out["contains_identity"] = n.contains_identity;
  return out;
}

inline json superop_json(const Superop& s) {
  const int d = static_cast<int>(s.matrix.rows());
  json re = json::array(), im = json::array();
  for (int i = 0; i < d; ++i) {
    json r = json::array(), c = json::array();
    for (int k = 0; k < d; ++k) {
      r.push_back(s.matrix(i, k).real());
      c.push_back(s.matrix(i, k).imag());
    }
    re.push_back(std::move(r));
    im.push_back(std::move(c));
  }
  return json{{"dim", s.dim},
              {"basis", "e_(i,j) = sqrt(m) E_ij, column-major"},
              {"re", re},
              {"im", im},
              {"hs_selfadjoint", to_string(s.hs_selfadjoint)},
              {"kills_identity", to_string(s.kills_identity)},
              {"cp_semigroup", to_string(s.cp_semigroup)}};
}

inline json to_json(const LindbladGenerator& g) {
  return json{{"jumps", to_json(g.jumps)},
              {"superop", superop_json(g.superop)},
              {"fixed_algebra", to_json(g.fixed_algebra)}};
}

// ---------------------------------------------------------------------------
// Certificates, estimates and reports

inline json to_json(const CheckResult& c) {
  return json{{"name", c.name}, {"pass", c.pass}, {"value", number(c.value)}};
}

inline json to_json(const GammaECertificate& c) {
  json checks = json::array();
  for (const auto& k : c.checks) checks.push_back(to_json(k));
  json out{{"lambda_star", c.lambda_star},
           {"tolerance", c.tolerance},
           {"method", c.method},
           {"upper", c.upper},
           {"checks", checks}};
  if (c.witness) {
    json re = json::array(), im = json::array();
    for (Eigen::Index i = 0; i < c.witness->size(); ++i) {
      re.push_back((*c.witness)(i).real());
      im.push_back((*c.witness)(i).imag());
    }
    out["witness"] = json{{"re", re}, {"im", im}};
  }
  return out;
}

inline json to_json(const FlsiEstimate& e) {
  return json{{"lambda_lower", e.lambda_lower},
              {"lambda_upper", number(e.lambda_upper)},
              {"lambda_certified", e.lambda_certified},
              {"n_starts", e.n_starts},
              {"seed", e.seed},
              {"validation_states", e.validation_states},
              {"violations", e.violations},
              {"fd_check_error", e.fd_check_error},
              {"argmin_state", e.argmin_state.size() ? to_json(e.argmin_state) : json()}};
}

inline json to_json(const Report& r) {
  json out{{"quantity", r.quantity},
           {"value", number(r.value)},
           {"bound", number(r.bound)},
           {"slack", number(r.slack)},
           {"pass", r.pass},
           {"checks", r.checks},
           {"max_rel_gap", number(r.max_rel_gap)},
           {"seed", r.seed}};
  if (r.witness) {
    json w{{"note", r.witness->note}};
    if (!std::isnan(r.witness->t)) w["t"] = r.witness->t;
    if (!std::isnan(r.witness->p)) w["p"] = number(r.witness->p);
    if (r.witness->state) w["state"] = to_json(*r.witness->state);
    out["witness"] = w;
  }
  return out;
}

inline json to_json(const WeightProfile& f) {
  json out;
  switch (f.kind) {
    case WeightProfile::Kind::power:
      out = json{{"kind", "power"}, {"alpha", f.alpha}, {"norm", f.norm}};
      break;
    case WeightProfile::Kind::eps_sigma:
      out = json{{"kind", "epssigma"}, {"eps", f.eps}, {"log_eps", -f.ell}, {"sigma", f.sigma}};
      break;
    case WeightProfile::Kind::table: {
      json pts = json::array();
      for (const auto& [t, v] : f.points) pts.push_back(json::array({t, v}));
      out = json{{"kind", "table"}, {"points", pts}};
      break;
    }
  }
  out["cond_i"] = to_string(f.cond_i);
  out["c_f"] = number(f.c_f);
  out["cond_qm"] = to_string(f.cond_qm);
  out["qm_c"] = number(f.qm_c);
  out["cond_delta2"] = to_string(f.cond_delta2);
  out["d2_c"] = number(f.d2_c);
  return out;
}

inline WeightProfile profile_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind")) throw Error("profile JSON: missing 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "power") return power_law(j.at("alpha").get<double>());
  if (kind == "epssigma") {
    const double sigma = j.at("sigma").get<double>();
    if (j.contains("log_eps")) return eps_sigma_profile_log(-j.at("log_eps").get<double>(), sigma);
    return eps_sigma_profile(j.at("eps").get<double>(), sigma);
  }
  if (kind == "table") {
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : j.at("points")) {
      if (!p.is_array() || p.size() != 2) throw Error("profile JSON: points must be [t, F] pairs");
      pts.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    const double a = j.contains("d2_alpha") ? j.at("d2_alpha").get<double>() : std::nan("");
    return table_profile(std::move(pts), a);
  }
  throw Error("profile JSON: unknown kind '" + kind + "'");
}

inline json to_json(const DensityReport& r) {
  return json{{"t0", r.t0},
              {"t0_eff", r.t0_eff},
              {"sigma", r.sigma},
              {"log_eps0", r.log_eps0},
              {"norm_l", r.norm_l},
              {"distance", r.distance},
              {"alpha_l", r.alpha_l},
              {"predicted_floor", r.predicted_floor},
              {"lambda_gamma_e", r.lambda_gamma_e},
              {"wide_eps0", r.wide_eps0}};
}

inline json to_json(const CaseResult& c) {
  json entries = json::array();
  for (const auto& e : c.entries)
    entries.push_back(json{{"label", e.label},
                           {"computed", number(e.computed)},
                           {"expected", number(e.expected)},
                           {"relation", to_string(e.relation)},
                           {"tolerance", e.tolerance},
                           {"slack", number(e.slack)},
                           {"origin", e.origin}});
  return json{{"name", c.name},
              {"pass", c.pass},
              {"max_slack", number(c.max_slack)},
              {"seed", c.seed},
              {"entries", entries}};
}

// ---------------------------------------------------------------------------
// Text formats

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/** CSV with header t,D_N,I_A,bound. */
inline std::string to_csv(const DecayTrace& tr) {
  std::ostringstream os;
  os << "t,D_N,I_A,bound\n";
  for (std::size_t i = 0; i < tr.times.size(); ++i)
    os << fmt17(tr.times[i]) << ',' << fmt17(tr.d_n[i]) << ',' << fmt17(tr.i_a[i]) << ','
       << fmt17(tr.bound[i]) << '\n';
  return os.str();
}

/** TSV summary with header name, pass, max_slack. */
inline std::string summary_tsv(const std::vector<CaseResult>& cases) {
  std::ostringstream os;
  os << "name\tpass\tmax_slack\n";
  for (const auto& c : cases)
    os << c.name << '\t' << (c.pass ? "true" : "false") << '\t' << fmt17(c.max_slack) << '\n';
  return os.str();
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error("malformed JSON in " + path + ": " + e.what());
  }
}

}  // namespace qms::io
