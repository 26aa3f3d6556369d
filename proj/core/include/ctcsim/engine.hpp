#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ctcsim/circuit.hpp"
#include "ctcsim/state.hpp"

namespace ctcsim {

// Bell-basis outcomes on a (reference, loop) pair:
//   B  (|00> + |11>)/sqrt2    Minus  (|00> - |11>)/sqrt2
//   N  (|01> + |10>)/sqrt2    MinusN (|01> - |10>)/sqrt2
enum class BellLabel { B, Minus, N, MinusN };

std::string to_string(BellLabel label);
PureState bell_pair(BellLabel label, const std::string& ref,
                    const std::string& loop);

struct ExactBell {};
struct NoisyBell {
  double lambda = 0.0;
};
// Classical loop with bit-error probability k. The projective convention
// weights a matching history (1 - k) and spreads k over the d - 1
// mismatched ones; the floor convention weights every history k / d and
// adds (1 - k) to matching ones.
struct Classical {
  double k = 0.0;
  bool floor = false;
};
struct WeightMatrix {
  Eigen::MatrixXd omega;
};
struct DeltaQuadrature {
  int nodes_theta = 64;
  int nodes_xi = 64;
};

using CtcModel =
    std::variant<ExactBell, NoisyBell, Classical, WeightMatrix, DeltaQuadrature>;

std::string model_name(const CtcModel& model);
void validate_model(const CtcModel& model);

struct ProjectionEntry {
  std::string label;
  PureState state;  // unnormalized, over the external channels
  double weight = 0.0;
};

struct ProjectionSet {
  std::vector<ProjectionEntry> entries;

  const ProjectionEntry& at(const std::string& label) const;
  double total_weight() const;
};

struct PostSelectionResult {
  std::string model;
  double Z = 0.0;
  std::optional<double> N;
  DensityOperator rho;
  std::optional<DensityOperator> rho_loop;
  ProjectionSet projections;
  std::vector<double> model_weights;  // aligned with projections.entries
  double acceptance = 0.0;
  bool perturbation = false;
  std::map<std::string, std::string> metadata;
};

struct EngineOptions {
  double paradox_tolerance = kDefaultParadoxTolerance;

  // Honors CTC_SIM_TOLERANCE when it holds a positive number.
  static EngineOptions from_environment();
};

// Register order used by the Bell model: for each CTC channel its reference
// qubit then the loop qubit, followed by the external channels.
std::vector<std::string> bell_register(const Circuit& circuit);
PureState bell_out_state(const Circuit& circuit);

// All 4^m Bell-basis projections of the evolved state. Labels join the
// per-channel outcomes with commas, first CTC channel first.
ProjectionSet bell_projections(const Circuit& circuit);

// psi_ij = <e_i| U |e_j, psi_ex> over the CTC register, labelled "i|j".
ProjectionSet eigenpair_projections(const Circuit& circuit);

PostSelectionResult run_exact_bell(const Circuit& circuit,
                                   const EngineOptions& opts = {});
PostSelectionResult run_noisy_bell(const Circuit& circuit, double lambda,
                                   const EngineOptions& opts = {});
PostSelectionResult run_classical(const Circuit& circuit, double k,
                                  bool floor = false,
                                  const EngineOptions& opts = {});
// Weights are rescaled to mean one before use; Z is reported on that scale.
PostSelectionResult run_weight_matrix(const Circuit& circuit,
                                      const Eigen::MatrixXd& omega,
                                      const EngineOptions& opts = {});
// Single CTC channel. The loop state is cos(t)|0> + e^{i x} sin(t)|1>
// integrated with the flat measure dt dx over [0, pi] x [0, 2 pi).
PostSelectionResult run_delta_quadrature(const Circuit& circuit,
                                         int nodes_theta = 64,
                                         int nodes_xi = 64,
                                         const EngineOptions& opts = {});

PostSelectionResult run(const Circuit& circuit, const CtcModel& model,
                        const EngineOptions& opts = {});

// Z without the paradox check.
double partition_function(const Circuit& circuit, const CtcModel& model);

Eigen::MatrixXd flat_weights(std::size_t d);
Eigen::MatrixXd quad_weights(std::size_t d);
Eigen::MatrixXd delta_weights(std::size_t d);
Eigen::MatrixXd classical_weights(std::size_t d, double k, bool floor);
// Independent bit errors on each of m loop qubits.
Eigen::MatrixXd product_classical_weights(std::size_t m, double k);

enum class ConditionalMode { Coupled, Insulated };

// The CTC projection applies only on the branch where `power_channel` is 1;
// the other branch passes through with weight one. Coupled mode renormalizes
// the whole ensemble; insulated mode renormalizes inside the projected
// branch and keeps the branch weights.
PostSelectionResult run_conditional(const Circuit& circuit,
                                    const std::string& power_channel,
                                    const CtcModel& model, ConditionalMode mode,
                                    const EngineOptions& opts = {});

// Like run_exact_bell but the (reference, loop) pair starts in `pair` and
// is projected back onto it. Single CTC channel only.
PostSelectionResult run_reference_pair(const Circuit& circuit,
                                       const PureState& pair,
                                       const EngineOptions& opts = {});

// Classical mixture over inputs of one external channel, each branch
// weighted by its own Z. The reported Z is the sum of the branch values.
PostSelectionResult run_input_mixture(const Circuit& circuit,
                                      const std::string& channel,
                                      const std::vector<PureState>& inputs,
                                      const CtcModel& model,
                                      const EngineOptions& opts = {});

}  // namespace ctcsim
