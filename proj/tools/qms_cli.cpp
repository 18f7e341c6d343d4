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

// Command-line front end. Exit codes: 0 success, 1 input error,
// 2 negative result, 3 numerical failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qms/qms.hpp"

namespace {

using qms::io::json;

enum Exit { kOk = 0, kInput = 1, kNegative = 2, kNumerical = 3 };

struct RunConfig {
  std::uint64_t seed = 0;
  std::vector<std::string> tol_overrides;
  std::string out;
  std::string format;  // empty: the command's natural format
  qms::Tolerances tol;
};

void apply_overrides(RunConfig& cfg) {
  for (const auto& kv : cfg.tol_overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw qms::Error("--tol expects KEY=VAL, got '" + kv + "'");
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(kv.substr(eq + 1), &used);
      if (used != kv.size() - eq - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw qms::Error("--tol " + kv + ": value is not a number");
    }
    cfg.tol.set(kv.substr(0, eq), v);
  }
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw qms::Error("cannot write " + cfg.out);
  f << text;
}

json with_config(json doc, const RunConfig& cfg) {
  doc["seed"] = cfg.seed;
  json t;
  for (const auto& [k, v] : cfg.tol.as_map()) t[k] = v;
  doc["tolerances"] = t;
  return doc;
}

qms::LindbladGenerator load_generator(const std::string& path) {
  return qms::lindblad(qms::io::jumpset_from_json(qms::io::read_json_file(path)));
}

std::vector<double> parse_list(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw qms::Error(std::string(what) + ": '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw qms::Error(std::string(what) + ": empty list");
  return out;
}

// ---------------------------------------------------------------------------

int cmd_gamma_e(const RunConfig& cfg, const std::string& file) {
  const auto g = load_generator(file);
  const auto cert = qms::gamma_e_constant(g, cfg.tol);
  json doc = qms::io::to_json(cert);
  doc["fixed_algebra_dim"] = g.fixed_algebra.size();
  emit(cfg, with_config(doc, cfg).dump(2) + "\n");
  return cert.lambda_star > 0.0 ? kOk : kNegative;
}

int cmd_flsi(const RunConfig& cfg, const std::string& file, int starts) {
  if (starts < 1) throw qms::Error("--starts must be at least 1");
  const auto g = load_generator(file);
  const auto est = qms::flsi_estimate(g, starts, cfg.seed, cfg.tol);
  emit(cfg, with_config(qms::io::to_json(est), cfg).dump(2) + "\n");
  return kOk;
}

struct SubordinateArgs {
  double theta = 0.0;
  double eps = 0.0;
  std::string sigma;
  std::string profile;
};

int cmd_subordinate(const RunConfig& cfg, const std::string& file, const SubordinateArgs& a) {
  const int modes = (a.theta != 0.0) + (a.eps != 0.0) + !a.profile.empty();
  if (modes != 1) throw qms::Error("subordinate: give exactly one of --theta, --eps, --profile");
  const auto g = load_generator(file);
  json doc;
  int code = kOk;
  if (a.theta != 0.0) {
    const qms::Superop b = qms::fractional_power(g.superop, a.theta);
    doc = json{{"mode", "theta"}, {"theta", a.theta}, {"generator", qms::io::superop_json(b)}};
  } else if (a.eps != 0.0) {
    if (!(a.eps > 0.0 && a.eps < 1.0)) throw qms::Error("--eps must lie in (0, 1)");
    double sigma = 0.0;
    json extra;
    if (a.sigma.empty() || a.sigma == "auto") {
      const auto rt = qms::return_time(g, cfg.tol);
      const double t0_eff = std::max(rt.t0, std::numbers::e);
      sigma = 1.0 / std::log(t0_eff);
      extra = json{{"t0", rt.t0}, {"t0_eff", t0_eff}};
    } else {
      sigma = parse_list(a.sigma, "--sigma").front();
      if (!(sigma > 0.0)) throw qms::Error("--sigma must be positive");
    }
    const double ell = -std::log(a.eps);
    const qms::Superop b = qms::eps_sigma_generator_log(g.superop, ell, sigma);
    const double dist = qms::superop_norm(g.superop - b);
    const double bound = qms::eps_sigma_bound(qms::superop_norm(g.superop), ell, sigma);
    doc = json{{"mode", "eps_sigma"},
               {"eps", a.eps},
               {"sigma", sigma},
               {"generator", qms::io::superop_json(b)},
               {"bound_report",
                {{"quantity", "||L - phi(L)||"},
                 {"value", dist},
                 {"bound", bound},
                 {"slack", dist - bound},
                 {"pass", dist <= bound}}}};
    if (!extra.is_null()) doc["return_time"] = extra;
    if (dist > bound) code = kNegative;
  } else {
    const auto f = qms::io::profile_from_json(qms::io::read_json_file(a.profile));
    const qms::Superop b = qms::subordinated_generator(g.superop, f);
    doc = json{{"mode", "profile"},
               {"profile", qms::io::to_json(f)},
               {"generator", qms::io::superop_json(b)}};
  }
  emit(cfg, with_config(doc, cfg).dump(2) + "\n");
  return code;
}

struct DecayArgs {
  std::string lambda = "certified";
  std::string grid = "default";
  std::string state = "random";
  bool physics = false;
};

int cmd_decay(const RunConfig& cfg, const std::string& file, const DecayArgs& a) {
  if (!cfg.format.empty() && cfg.format != "csv")
    throw qms::Error("decay writes CSV only");
  const auto g = load_generator(file);
  double lambda = 0.0;
  if (a.lambda == "certified") {
    lambda = qms::gamma_e_constant(g, cfg.tol).lambda_star;
  } else {
    lambda = parse_list(a.lambda, "--lambda").front();
    if (!(lambda >= 0.0)) throw qms::Error("--lambda must be nonnegative");
  }
  std::vector<double> grid;
  if (a.grid == "default") {
    const double rate = lambda > 0.0 ? lambda : qms::spectral_gap(g.superop);
    grid = qms::default_grid(rate > 0.0 ? rate : 1.0);
  } else {
    grid = parse_list(a.grid, "--grid");
  }
  qms::Operator rho;
  if (a.state == "random") {
    qms::Rng rng(cfg.seed);
    rho = qms::random_state(rng, g.dim()).op();
  } else {
    const qms::Operator x =
        qms::io::operator_from_json(qms::io::read_json_file(a.state), g.dim());
    rho = a.physics ? qms::State::from_density_matrix(x).op() : qms::State(x).op();
  }
  const auto tr = qms::simulate_decay(g.superop, g.e_fix, qms::State(rho), grid, lambda, cfg.tol);
  emit(cfg, qms::io::to_csv(tr));
  return kOk;
}

struct CaseArgs {
  std::string name;
  bool all = false;
  int n = 3;
  double alpha = 10.0;
  std::string delta;
  int truncation = 64;
  int m = 2;
  std::string weights;
};

int cmd_casebook(const RunConfig& cfg, const CaseArgs& a) {
  std::vector<qms::CaseResult> results;
  if (a.all) {
    if (!a.name.empty()) throw qms::Error("casebook run: give a case name or --all, not both");
    results = qms::run_all(cfg.seed, cfg.tol);
  } else if (a.name.empty()) {
    std::string msg = "casebook run: missing case name; available:";
    for (const auto& n : qms::case_names()) msg += " " + n;
    throw qms::Error(msg);
  } else if (a.name == "rothaus") {
    results.push_back(qms::case_rothaus_failure(a.n, a.alpha));
  } else if (a.name == "poisson") {
    results.push_back(qms::case_poisson_Z(a.truncation));
  } else if (a.name == "nonadditivity" && !a.delta.empty()) {
    const auto d = parse_list(a.delta, "--delta");
    results.push_back(d.size() == 1 ? qms::case_nonadditivity(d.front())
                                    : qms::case_nonadditivity(d));
  } else if (a.name == "depolarizing") {
    results.push_back(qms::case_depolarizing(a.m, cfg.seed, cfg.tol));
  } else if (a.name == "graph" && !a.weights.empty()) {
    const json j = qms::io::read_json_file(a.weights);
    if (!j.is_array() || j.empty()) throw qms::Error("--weights: expected a square array");
    const int v = static_cast<int>(j.size());
    Eigen::MatrixXd w(v, v);
    for (int x = 0; x < v; ++x) {
      if (!j[x].is_array() || static_cast<int>(j[x].size()) != v)
        throw qms::Error("--weights: expected a square array");
      for (int y = 0; y < v; ++y) w(x, y) = j[x][y].get<double>();
    }
    results.push_back(qms::case_graph_criterion(w, cfg.tol));
  } else {
    results.push_back(qms::run_case(a.name, cfg.seed, cfg.tol));
  }
  bool pass = true;
  for (const auto& r : results) pass = pass && r.pass;
  if (cfg.format == "tsv") {
    emit(cfg, qms::io::summary_tsv(results));
  } else {
    json docs = json::array();
    for (const auto& r : results) docs.push_back(qms::io::to_json(r));
    json doc{{"cases", docs}, {"summary_tsv", qms::io::summary_tsv(results)}};
    emit(cfg, with_config(doc, cfg).dump(2) + "\n");
  }
  return pass ? kOk : kNegative;
}

int cmd_convert(const RunConfig& cfg, const std::string& file, const std::string& to) {
  const qms::Operator x = qms::io::operator_from_json(qms::io::read_json_file(file));
  qms::Operator out;
  if (to == "tau") {
    out = qms::State::from_density_matrix(x).op();
  } else if (to == "physics") {
    out = qms::State(x).to_density_matrix();
  } else {
    throw qms::Error("--to must be 'tau' or 'physics'");
  }
  emit(cfg, qms::io::to_json(out).dump(2) + "\n");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum Markov semigroup toolkit"};
  app.require_subcommand(1);
  RunConfig cfg;
  app.add_option("--seed", cfg.seed, "Seed for every stochastic step")->capture_default_str();
  app.add_option("--tol", cfg.tol_overrides, "Tolerance override KEY=VAL (repeatable)");
  app.add_option("--out", cfg.out, "Write the primary output to PATH");
  app.add_option("--format", cfg.format, "Output format (json, csv or tsv)")
      ->check(CLI::IsMember({"json", "csv", "tsv"}));

  std::string jumps_file;
  auto* ge = app.add_subcommand("gamma-e", "Certify the Gamma-E constant of a Lindbladian");
  ge->add_option("jumps", jumps_file, "Jump operator list (JSON)")->required();

  int starts = 8;
  auto* fl = app.add_subcommand("flsi", "Bracket the FLSI constant");
  fl->add_option("jumps", jumps_file, "Jump operator list (JSON)")->required();
  fl->add_option("--starts", starts, "Optimizer starts")->capture_default_str();

  SubordinateArgs sub;
  auto* sb = app.add_subcommand("subordinate", "Subordinated generators");
  sb->add_option("jumps", jumps_file, "Jump operator list (JSON)")->required();
  sb->add_option("--theta", sub.theta, "Fractional power A^theta, theta in (0,1]");
  sb->add_option("--eps", sub.eps, "eps of the eps-sigma calculus");
  sb->add_option("--sigma", sub.sigma, "sigma, or 'auto' for 1/ln t0");
  sb->add_option("--profile", sub.profile, "Weight profile (JSON)");

  DecayArgs dec;
  auto* dc = app.add_subcommand("decay", "Relative entropy decay trace (CSV)");
  dc->add_option("jumps", jumps_file, "Jump operator list (JSON)")->required();
  dc->add_option("--lambda", dec.lambda, "Rate, or 'certified'")->capture_default_str();
  dc->add_option("--grid", dec.grid, "Comma-separated times, or 'default'")
      ->capture_default_str();
  dc->add_option("--state", dec.state, "State file (JSON, trace m) or 'random'")
      ->capture_default_str();
  dc->add_flag("--physics", dec.physics, "State file has trace 1");

  CaseArgs cases;
  auto* cb = app.add_subcommand("casebook", "Worked examples");
  cb->require_subcommand(1);
  auto* run = cb->add_subcommand("run", "Run a case");
  run->add_option("name", cases.name, "Case name");
  run->add_flag("--all", cases.all, "Run every case");
  run->add_option("--n", cases.n, "rothaus: n")->capture_default_str();
  run->add_option("--alpha", cases.alpha, "rothaus: alpha")->capture_default_str();
  run->add_option("--delta", cases.delta, "nonadditivity: delta or decreasing list");
  run->add_option("--N", cases.truncation, "poisson: truncation")->capture_default_str();
  run->add_option("--m", cases.m, "depolarizing: dimension")->capture_default_str();
  run->add_option("--weights", cases.weights, "graph: weight matrix (JSON array)");

  std::string to = "tau";
  auto* cv = app.add_subcommand("convert", "Convert between trace-m and trace-1 states");
  cv->add_option("state", jumps_file, "Operator (JSON)")->required();
  cv->add_option("--to", to, "'tau' (trace m) or 'physics' (trace 1)")->capture_default_str();

  for (auto* s : {ge, fl, sb, dc, cb, cv}) s->fallthrough();
  run->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInput;
  }

  try {
    apply_overrides(cfg);
    if (*ge) return cmd_gamma_e(cfg, jumps_file);
    if (*fl) return cmd_flsi(cfg, jumps_file, starts);
    if (*sb) return cmd_subordinate(cfg, jumps_file, sub);
    if (*dc) return cmd_decay(cfg, jumps_file, dec);
    if (*cb) return cmd_casebook(cfg, cases);
    if (*cv) return cmd_convert(cfg, jumps_file, to);
  } catch (const qms::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const qms::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  }
  return kInput;
}
