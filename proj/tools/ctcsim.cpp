#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ctcsim/harness.hpp"

namespace {

// Parses repeated "name=value" options.
ctcsim::ParamMap parse_params(const std::vector<std::string>& items) {
  ctcsim::ParamMap out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ctcsim::ConfigError("expected name=value, got '" + item + "'");
    try {
      std::size_t used = 0;
      const auto text = item.substr(eq + 1);
      out[item.substr(0, eq)] = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
    } catch (const std::invalid_argument&) {
      throw ctcsim::ConfigError("'" + item + "' does not hold a number");
    } catch (const std::out_of_range&) {
      throw ctcsim::ConfigError("'" + item + "' is out of range");
    }
  }
  return out;
}

std::optional<std::string> maybe(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Post-selected closed timelike curve circuit simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ctcsim::kToolVersion);

  std::string doc_path, out_path, name, model = "exact_bell", param;
  std::vector<std::string> params;
  bool verify = false, scenario = false;
  double from = 0.0, to = 1.0;
  int steps = 11;

  auto* run = app.add_subcommand("run", "run a circuit document");
  run->add_option("doc", doc_path, "circuit document (JSON)")->required();
  run->add_option("--param", params, "override a document parameter, name=value");
  run->add_option("--out", out_path, "write the report here");

  auto* sc = app.add_subcommand("scenario", "run a catalog scenario");
  sc->add_option("name", name, "scenario name")->required();
  sc->add_option("--param", params, "scenario parameter, name=value");
  sc->add_option("--model", model, "model, e.g. noisy_bell:lambda=0.2");
  sc->add_flag("--verify", verify, "check the closed-form expectations");
  sc->add_option("--out", out_path, "write the report here");

  auto* sw = app.add_subcommand("sweep", "sweep one parameter");
  sw->add_option("doc", doc_path, "circuit document, or scenario name with --scenario")
      ->required();
  sw->add_flag("--scenario", scenario, "treat the first argument as a scenario name");
  sw->add_option("--model", model, "model for scenario sweeps");
  sw->add_option("--param", param, "parameter to sweep")->required();
  sw->add_option("--from", from, "first value")->required();
  sw->add_option("--to", to, "last value")->required();
  sw->add_option("--steps", steps, "number of points")->required();
  sw->add_option("--out", out_path, "write the list of reports here");

  auto* ls = app.add_subcommand("list-scenarios", "list the scenario catalog");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run)
      return ctcsim::run_command(doc_path, parse_params(params), maybe(out_path),
                                 std::cout, std::cerr);
    if (*sc)
      return ctcsim::scenario_command(name, parse_params(params), model, verify,
                                      maybe(out_path), std::cout, std::cerr);
    if (*sw)
      return ctcsim::sweep_command(doc_path, scenario, model, param, from, to, steps,
                                   maybe(out_path), std::cout, std::cerr);
    if (*ls) return ctcsim::list_scenarios_command(std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
