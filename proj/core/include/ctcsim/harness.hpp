#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ctcsim/engine.hpp"
#include "ctcsim/scenarios.hpp"

namespace ctcsim {

inline constexpr const char* kToolVersion = "ctcsim 0.1.0";

struct ConditionalSpec {
  std::string power_channel;
  ConditionalMode mode = ConditionalMode::Coupled;
};

// A parsed circuit document. Gate angles and model parameters may name an
// entry of `params`; `source` keeps the document so it can be re-parsed with
// different parameter values.
struct CircuitDoc {
  Circuit circuit;
  CtcModel model;
  std::vector<std::string> outputs;
  EngineOptions options;
  std::optional<ConditionalSpec> conditional;
  ParamMap params;
  std::string source;
};

// Syntax errors raise ParseError with the line; semantic ones ConfigError
// naming the offending path.
CircuitDoc parse_circuit_doc(const std::string& text,
                             const ParamMap& overrides = {});

// "exact_bell", "noisy_bell:lambda=0.2", "classical:k=0.1,floor=1",
// "delta:nodes=64", "weight_matrix:preset=delta".
CtcModel parse_model_spec(const std::string& spec);

PostSelectionResult run_doc(const CircuitDoc& doc);

// Reports are JSON with a fixed field order.
std::string make_report(const PostSelectionResult& result,
                        const Circuit& circuit, const CtcModel& model,
                        const std::vector<std::string>& outputs);
std::string make_paradox_report(const ParadoxError& error,
                                const CtcModel& model);

// CLI verbs. Each writes its report to `out` (or to `out_path` when given),
// diagnostics to `err`, and returns the process exit code: 0 on success,
// 2 on ParadoxError, 1 on any other error.
int run_command(const std::string& doc_path, const ParamMap& overrides,
                const std::optional<std::string>& out_path, std::ostream& out,
                std::ostream& err);
int scenario_command(const std::string& name, const ParamMap& params,
                     const std::string& model_spec, bool verify,
                     const std::optional<std::string>& out_path,
                     std::ostream& out, std::ostream& err);
// Sweeps a document parameter (or, with `scenario`, a scenario parameter or
// the model's lambda / k) over `steps` evenly spaced points. The table goes
// to `out` as CSV; the list of reports to `out_path` when given.
int sweep_command(const std::string& source, bool scenario,
                  const std::string& model_spec, const std::string& param,
                  double from, double to, int steps,
                  const std::optional<std::string>& out_path, std::ostream& out,
                  std::ostream& err);
int list_scenarios_command(std::ostream& out);

}  // namespace ctcsim
