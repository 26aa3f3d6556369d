#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ctcsim/engine.hpp"

namespace ctcsim {

using ParamMap = std::map<std::string, double>;

enum class ModelFamily {
  ExactBell,
  NoisyBell,
  Classical,
  ClassicalFloor,
  Delta,
  WeightMatrix,
};

std::string to_string(ModelFamily family);
ModelFamily family_of(const CtcModel& model);
// Representative model of a family used when none is given.
CtcModel representative_model(ModelFamily family);

struct ParadoxExpected {};
using Expected = std::variant<double, CMatrix, ParadoxExpected>;

// One closed-form expectation. `value` receives the scenario parameters and
// the noise parameter of the model (lambda or k, zero otherwise).
//
// Quantities:
//   Z, N, rho, rho_loop          fields of the run result
//   psi_bar:<label>              projected state, compared as |v><v|
//   weight:<label>               squared norm of a projection
//   paradox                      the run must raise ParadoxError
//   paradox_weight:<label>       weight carried by the ParadoxError
//   flip:<a>,<b>                 P(a != b)
//   excite:<ch>                  P(ch = 1)
//   prob:<ch>=<bit>,...          joint basis probability
//   marginal:<ch>,...            reduced density matrix
//   bias:<ch>, bias_Z:<ch>       input bias over the flat measure
//   mixture:<ch>, mixture_Z:<ch> mixture over the |0>, |1> inputs of ch
struct Expectation {
  ModelFamily family;
  std::string quantity;
  std::function<Expected(const ParamMap&, double)> value;
  double tolerance = 1e-10;
  std::string note;
};

struct ScenarioParam {
  std::string name;
  double default_value = 0.0;
  std::string description;
};

struct Scenario {
  std::string name;
  std::string description;
  std::vector<ScenarioParam> params;
  std::function<Circuit(const ParamMap&)> build;
  std::vector<Expectation> expectations;
  // Bell runs use this (reference, loop) pair instead of the Bell state.
  std::function<PureState(const ParamMap&)> reference_pair;
  // Bell runs are conditioned on this external channel; the parameter
  // "insulated" selects the mode.
  std::optional<std::string> power_channel;
};

struct CheckResult {
  std::string quantity;
  std::string family;
  std::string note;
  double error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  std::string detail;
};

const std::vector<Scenario>& catalog();
std::vector<std::string> list_scenarios();
const Scenario& find_scenario(const std::string& name);

ParamMap resolve_params(const Scenario& scenario, const ParamMap& overrides);
Circuit build_scenario(const std::string& name, const ParamMap& overrides = {});

// Runs a scenario under a model, honoring its reference pair or power
// channel when it has one.
PostSelectionResult run_scenario(const Scenario& scenario,
                                 const ParamMap& params, const CtcModel& model,
                                 const EngineOptions& opts = {});

// Checks every expectation of the model's family.
std::vector<CheckResult> verify_scenario(const std::string& name,
                                         const ParamMap& overrides,
                                         const CtcModel& model,
                                         const EngineOptions& opts = {});
// Checks every expectation, each family under its representative model.
std::vector<CheckResult> verify_scenario_all(const std::string& name,
                                             const ParamMap& overrides = {},
                                             const EngineOptions& opts = {});

}  // namespace ctcsim
