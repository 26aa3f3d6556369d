#include <gtest/gtest.h>

#include <json.hpp>
#include <sstream>

#include "ctcsim/errors.hpp"
#include "ctcsim/harness.hpp"
#include "support.hpp"

using namespace ctcsim;
using namespace ctcsim::testing;
using nlohmann::json;

namespace {

const char* kSimpleLoop = R"({
  "params": {"t": 0.7},
  "channels": [
    {"name": "phi", "role": "ctc"},
    {"name": "psi", "role": "external", "init": [0.6, 0, 0, 0.8]}
  ],
  "gates": [{"kind": "SWAP", "targets": ["phi", "psi"]}],
  "model": {"type": "exact_bell"}
})";

std::string replace(std::string s, const std::string& from, const std::string& to) {
  s.replace(s.find(from), from.size(), to);
  return s;
}

}  // namespace

TEST(ParseDoc, MinimalSimpleLoop) {
  auto doc = parse_circuit_doc(kSimpleLoop);
  EXPECT_EQ(doc.circuit.ctc_count(), 1u);
  EXPECT_EQ(doc.circuit.external_labels(), std::vector<std::string>{"psi"});
  EXPECT_TRUE(std::holds_alternative<ExactBell>(doc.model));
  EXPECT_EQ(doc.outputs, (std::vector<std::string>{"Z", "N", "rho", "projections"}));
  auto r = run_doc(doc);
  EXPECT_NEAR(*r.N, 0.5, 1e-15);
}

TEST(ParseDoc, ParamsFeedGateAngles) {
  const std::string text = R"({
    "params": {"zeta": 0.5},
    "channels": [{"name": "phi", "role": "ctc"}],
    "gates": [{"kind": "ROT", "targets": ["phi"], "params": {"theta": "zeta"}}]
  })";
  EXPECT_NEAR(*run_doc(parse_circuit_doc(text)).N, std::cos(0.5), 1e-15);
  EXPECT_NEAR(*run_doc(parse_circuit_doc(text, {{"zeta", 1.0}})).N, std::cos(1.0), 1e-15);
  EXPECT_THROW(parse_circuit_doc(text, {{"nope", 1.0}}), ConfigError);
}

TEST(ParseDoc, SyntaxErrorsCarryLine) {
  const std::string text = "{\n  \"channels\": [\n    {\"name\": \"phi\" \"role\": \"ctc\"}\n  ]\n}";
  try {
    parse_circuit_doc(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(ParseDoc, SemanticErrors) {
  EXPECT_THROW(parse_circuit_doc(replace(kSimpleLoop, "\"gates\"", "\"gatez\"")), ConfigError);
  try {
    parse_circuit_doc(replace(kSimpleLoop, "\"gates\"", "\"gatez\""));
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("gatez"), std::string::npos);
  }
  EXPECT_THROW(parse_circuit_doc(replace(kSimpleLoop, "[\"phi\", \"psi\"]", "[\"ref:phi\", \"psi\"]")),
               ConfigError);
  EXPECT_THROW(parse_circuit_doc(replace(kSimpleLoop, "[0.6, 0, 0, 0.8]", "[0.6, 0, 0, 0.9]")),
               ConfigError);
  EXPECT_THROW(parse_circuit_doc(replace(kSimpleLoop, "\"SWAP\"", "\"HADAMARD\"")), ConfigError);
  EXPECT_THROW(parse_circuit_doc(replace(kSimpleLoop, "[\"phi\", \"psi\"]", "[\"phi\", \"zz\"]")),
               LabelError);
  EXPECT_THROW(parse_circuit_doc(replace(kSimpleLoop, "\"exact_bell\"", "\"noisy_bell\", \"lambda\": 2")),
               ConfigError);
}

TEST(ParseDoc, DeltaNeedsOneLoop) {
  const std::string text = R"({
    "channels": [{"name": "a", "role": "ctc"}, {"name": "b", "role": "ctc"}],
    "model": {"type": "delta"}
  })";
  try {
    parse_circuit_doc(text);
    FAIL() << "expected UnsupportedError";
  } catch (const UnsupportedError& e) {
    EXPECT_NE(std::string(e.what()).find("weight_matrix"), std::string::npos);
  }
}

TEST(ParseDoc, Models) {
  auto wm = parse_circuit_doc(replace(kSimpleLoop, "{\"type\": \"exact_bell\"}",
                                      "{\"type\": \"weight_matrix\", \"preset\": \"quad\"}"));
  EXPECT_LT(max_abs(std::get<WeightMatrix>(wm.model).omega - quad_weights(2)), 1e-15);
  auto cl = parse_circuit_doc(replace(kSimpleLoop, "{\"type\": \"exact_bell\"}",
                                      "{\"type\": \"classical\", \"k\": \"t\", \"floor\": true}"));
  EXPECT_DOUBLE_EQ(std::get<Classical>(cl.model).k, 0.7);
  EXPECT_TRUE(std::get<Classical>(cl.model).floor);
}

TEST(ModelSpec, Parses) {
  EXPECT_TRUE(std::holds_alternative<ExactBell>(parse_model_spec("exact_bell")));
  EXPECT_DOUBLE_EQ(std::get<NoisyBell>(parse_model_spec("noisy_bell:lambda=0.2")).lambda, 0.2);
  auto c = std::get<Classical>(parse_model_spec("classical:k=0.1,floor=1"));
  EXPECT_DOUBLE_EQ(c.k, 0.1);
  EXPECT_TRUE(c.floor);
  EXPECT_EQ(std::get<DeltaQuadrature>(parse_model_spec("delta:nodes=32")).nodes_xi, 32);
  EXPECT_THROW(parse_model_spec("noisy_bell:lambda=x"), ConfigError);
  EXPECT_THROW(parse_model_spec("quantum_gravity"), ConfigError);
}

TEST(Commands, ScenarioReportFields) {
  std::ostringstream out, err;
  EXPECT_EQ(scenario_command("faulty_gun", {{"zeta", kPi / 3}}, "exact_bell", false, {}, out, err), 0);
  auto j = json::parse(out.str());
  EXPECT_NEAR(j.at("N").get<double>(), 0.5, 1e-15);
  EXPECT_EQ(j.at("metadata").at("measure"), "flat-theta-xi");
  EXPECT_EQ(j.at("metadata").at("tool_version"), kToolVersion);
}

TEST(Commands, ParadoxExitCode) {
  std::ostringstream out, err;
  EXPECT_EQ(scenario_command("grandfather_not", {}, "exact_bell", false, {}, out, err), 2);
  auto j = json::parse(out.str());
  EXPECT_TRUE(j.at("paradox").get<bool>());
  bool found = false;
  for (const auto& p : j.at("projections"))
    if (p.at("label") == "N") found = std::abs(p.at("weight").get<double>() - 1.0) < 1e-15;
  EXPECT_TRUE(found);
}

TEST(Commands, DeltaSimpleLoop) {
  std::ostringstream out, err;
  EXPECT_EQ(scenario_command("simple_loop", {}, "delta:nodes=64", false, {}, out, err), 0);
  EXPECT_NEAR(json::parse(out.str()).at("Z").get<double>(), kPi * kPi, 1e-8);
}

TEST(Commands, VerifyFlag) {
  std::ostringstream out, err;
  EXPECT_EQ(scenario_command("two_ctc_cx", {}, "noisy_bell:lambda=0.2", true, {}, out, err), 0);
  auto j = json::parse(out.str());
  ASSERT_TRUE(j.contains("checks"));
  for (const auto& c : j.at("checks")) EXPECT_TRUE(c.at("passed").get<bool>());
}

TEST(Commands, SweepTables) {
  std::ostringstream out, err;
  EXPECT_EQ(sweep_command("two_ctc_cx", true, "noisy_bell:lambda=0", "lambda", 0, 1, 5, {}, out,
                          err),
            0);
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "lambda,Z,N,acceptance,paradox");
  int rows = 0;
  while (std::getline(lines, line)) {
    const double l = std::stod(line.substr(0, line.find(',')));
    const double z = std::stod(line.substr(line.find(',') + 1));
    EXPECT_NEAR(z, 0.25 * std::pow(1 - l / 2, 2), 1e-14);
    ++rows;
  }
  EXPECT_EQ(rows, 5);

  std::ostringstream o2, e2;
  EXPECT_EQ(sweep_command("faulty_gun", true, "exact_bell", "zeta", 0, 1.2, 4, {}, o2, e2), 0);
  std::istringstream l2(o2.str());
  std::getline(l2, line);
  while (std::getline(l2, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
    EXPECT_NEAR(std::stod(f[2]), std::cos(std::stod(f[0])), 1e-14);
  }
}

TEST(Commands, SweepRejectsZeroSteps) {
  std::ostringstream out, err;
  EXPECT_EQ(sweep_command("faulty_gun", true, "exact_bell", "zeta", 0, 1, 0, {}, out, err), 1);
  EXPECT_NE(err.str().find("steps"), std::string::npos);
}

TEST(Commands, ListScenarios) {
  std::ostringstream out;
  EXPECT_EQ(list_scenarios_command(out), 0);
  for (const auto& n : list_scenarios()) EXPECT_NE(out.str().find(n), std::string::npos);
}

TEST(Commands, MissingFile) {
  std::ostringstream out, err;
  EXPECT_EQ(run_command("/nonexistent/doc.json", {}, {}, out, err), 1);
  EXPECT_FALSE(err.str().empty());
}
