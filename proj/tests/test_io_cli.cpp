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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "qms/io.hpp"
#include "support.hpp"

namespace qms {
namespace {

using io::json;

TEST(Io, OperatorRoundTrip) {
  Rng rng(61);
  const Operator x = random_operator(rng, 3);
  const json j = io::to_json(x);
  EXPECT_EQ(j.at("dim").get<int>(), 3);
  EXPECT_EQ(max_abs(io::operator_from_json(j) - x), 0.0);
  const json parsed = json::parse(j.dump());
  EXPECT_EQ(max_abs(io::operator_from_json(parsed) - x), 0.0);
  EXPECT_THROW(io::operator_from_json(j, 2), Error);
  EXPECT_THROW(io::operator_from_json(json{{"re", {{1, 2}}}}), Error);
  EXPECT_THROW(io::operator_from_json(json::array()), Error);
  // Missing imaginary part means a real matrix.
  const Operator r = io::operator_from_json(json{{"re", {{1, 0}, {0, -1}}}});
  EXPECT_EQ(max_abs(r - pauli_z()), 0.0);
}

TEST(Io, JumpSetRoundTripAndValidation) {
  const JumpSet j = depolarizing_jumps(2);
  const JumpSet back = io::jumpset_from_json(json::parse(io::to_json(j).dump()));
  ASSERT_EQ(back.jumps.size(), j.jumps.size());
  for (std::size_t k = 0; k < j.jumps.size(); ++k)
    EXPECT_EQ(max_abs(back.jumps[k] - j.jumps[k]), 0.0);
  EXPECT_THROW(io::jumpset_from_json(json{{"dim", 2}}), Error);
  const json nonherm = {{"dim", 2}, {"matrices", {{{"re", {{0, 1}, {0, 0}}}}}}};
  EXPECT_THROW(io::jumpset_from_json(nonherm), Error);
}

TEST(Io, NumbersAndTextFormats) {
  EXPECT_EQ(io::number(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(io::number(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(io::number(std::nan("")), "nan");
  EXPECT_EQ(io::fmt17(0.1), "0.10000000000000001");
  DecayTrace tr;
  tr.times = {1.0};
  tr.d_n = {0.5};
  tr.i_a = {std::numeric_limits<double>::infinity()};
  tr.bound = {0.25};
  EXPECT_EQ(io::to_csv(tr), "t,D_N,I_A,bound\n1,0.5,inf,0.25\n");
  CaseResult c;
  c.name = "x";
  c.add("a", 1.0, 1.0, Relation::eq, 0.5, "t");
  EXPECT_EQ(io::summary_tsv({c}), "name\tpass\tmax_slack\nx\ttrue\t-0.5\n");
}

TEST(Io, ReportsSerialize) {
  const auto g = lindblad(make_jumpset(2, {pauli_z()}));
  const json cert = io::to_json(gamma_e_constant(g));
  EXPECT_TRUE(cert.contains("lambda_star"));
  EXPECT_TRUE(cert.contains("tolerance"));
  EXPECT_TRUE(cert.contains("checks"));
  const json prof = io::to_json(power_law(0.5));
  EXPECT_EQ(prof.at("kind"), "power");
  const WeightProfile back = io::profile_from_json(prof);
  EXPECT_NEAR(back.norm, power_law(0.5).norm, 1e-15);
  EXPECT_THROW(io::profile_from_json(json{{"kind", "other"}}), Error);
  EXPECT_THROW(io::profile_from_json(json::object()), Error);
  const json cr = io::to_json(case_poisson_Z(4));
  EXPECT_EQ(cr.at("name"), "poisson");
  EXPECT_TRUE(cr.at("pass").get<bool>());
}

TEST(Io, ReadJsonFileErrors) {
  EXPECT_THROW(io::read_json_file("/nonexistent/file.json"), Error);
  const auto p = std::filesystem::temp_directory_path() / "qms_bad.json";
  std::ofstream(p) << "{ not json";
  EXPECT_THROW(io::read_json_file(p.string()), Error);
  std::filesystem::remove(p);
}

#ifdef QMS_CLI_PATH

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run_cli(const std::string& args) {
  const std::string cmd = std::string(QMS_CLI_PATH) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const char* name) { return std::string(QMS_DATA_DIR) + "/" + name; }

TEST(Cli, GammaEDephasingAndEmpty) {
  const CliRun r = run_cli("gamma-e " + data("pauli_z.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j.at("lambda_star").get<double>(), 4.0, 1e-7);
  EXPECT_TRUE(j.contains("seed"));
  EXPECT_TRUE(j.contains("tolerances"));
  EXPECT_EQ(run_cli("gamma-e " + data("empty.json")).code, 2);
}

TEST(Cli, InputErrors) {
  const auto p = std::filesystem::temp_directory_path() / "qms_cli_bad.json";
  std::ofstream(p) << "{\"dim\": 2, \"matrices\": [";
  EXPECT_EQ(run_cli("gamma-e " + p.string()).code, 1);
  std::filesystem::remove(p);
  EXPECT_EQ(run_cli("gamma-e /nonexistent.json").code, 1);
  EXPECT_EQ(run_cli("flsi " + data("pauli_z.json") + " --starts 0").code, 1);
  EXPECT_EQ(run_cli("casebook run nosuchcase").code, 1);
  EXPECT_EQ(run_cli("--tol nosuchkey=1 gamma-e " + data("pauli_z.json")).code, 1);
  EXPECT_EQ(run_cli("--bogus").code, 1);
  EXPECT_EQ(run_cli("--help").code, 0);
}

TEST(Cli, CasebookRothausAndTsv) {
  const CliRun r = run_cli("casebook run rothaus --n 4 --alpha 2");
  ASSERT_EQ(r.code, 0) << r.out;
  const json j = json::parse(r.out);
  ASSERT_EQ(j.at("cases").size(), 1u);
  EXPECT_TRUE(j.at("cases")[0].at("pass").get<bool>());
  const CliRun t = run_cli("--format tsv casebook run poisson --N 8");
  ASSERT_EQ(t.code, 0);
  EXPECT_EQ(t.out.rfind("name\tpass\tmax_slack\npoisson\ttrue\t", 0), 0u) << t.out;
}

TEST(Cli, DecayCsvIsReproducible) {
  const std::string args = "--seed 9 decay " + data("depolarizing2.json");
  const CliRun a = run_cli(args), b = run_cli(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.rfind("t,D_N,I_A,bound\n", 0), 0u);
  EXPECT_NE(run_cli("--seed 10 decay " + data("depolarizing2.json")).out, a.out);
}

TEST(Cli, SubordinateAndConvert) {
  const CliRun s = run_cli("subordinate " + data("pauli_z.json") + " --theta 0.5");
  ASSERT_EQ(s.code, 0) << s.out;
  EXPECT_NO_THROW((void)json::parse(s.out));
  const CliRun e = run_cli("subordinate " + data("pauli_z.json") + " --eps 0.01 --sigma auto");
  ASSERT_EQ(e.code, 0) << e.out;
  EXPECT_EQ(run_cli("subordinate " + data("pauli_z.json") + " --profile " +
                    data("power_half.json"))
                .code,
            0);
  const auto p = std::filesystem::temp_directory_path() / "qms_state.json";
  std::ofstream(p) << io::to_json(Operator(0.5 * identity_op(2))).dump();
  const CliRun c = run_cli("convert " + p.string() + " --to tau");
  std::filesystem::remove(p);
  ASSERT_EQ(c.code, 0) << c.out;
  EXPECT_LT(max_abs(io::operator_from_json(json::parse(c.out)) - identity_op(2)), 1e-15);
}

#endif

}  // namespace
}  // namespace qms
