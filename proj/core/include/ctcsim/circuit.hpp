#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ctcsim/state.hpp"

namespace ctcsim {

// Controls come first in every multi-qubit gate; the last target is the one
// acted upon.
enum class GateKind {
  X,
  Z,
  Rot,      // [[cos, -sin], [sin, cos]]
  Phase,    // diag(1, e^{i xi})
  Swap,
  CX,
  CZ,       // conditional phase flip, diag(1, 1, 1, -1)
  CRot,
  CPhase,
  CCRot,
  CCCRot,
  Toffoli,
  Custom,
};

std::string to_string(GateKind kind);
GateKind gate_kind_from_string(const std::string& name);
std::size_t gate_arity(GateKind kind);
bool gate_takes_angle(GateKind kind);

struct Gate {
  GateKind kind = GateKind::X;
  std::vector<std::string> targets;
  double angle = 0.0;
  Operator op;
};

Gate make_gate(GateKind kind, std::vector<std::string> targets,
               double angle = 0.0);
Gate make_custom_gate(Operator op, std::vector<std::string> targets);

// Building-block matrices, exposed for tests and scenario code.
CMatrix rot_matrix(double theta);
CMatrix controlled(const CMatrix& u, std::size_t controls);

enum class ChannelRole { Ctc, External };

struct Channel {
  std::string label;
  ChannelRole role = ChannelRole::External;
  std::optional<PureState> init;  // one qubit; external channels only
};

inline Channel ctc_channel(std::string label) {
  return {std::move(label), ChannelRole::Ctc, std::nullopt};
}
inline Channel external_channel(std::string label,
                                std::optional<PureState> init = std::nullopt) {
  return {std::move(label), ChannelRole::External, std::move(init)};
}

// Joint initial state for a group of external channels.
struct EntangledInit {
  std::vector<std::string> channels;
  PureState state;
};

// Name of the reference qubit paired with a CTC channel in the Bell model.
std::string reference_label(const std::string& ctc_label);
bool is_reference_label(const std::string& label);

class Circuit {
 public:
  Circuit() = default;

  // Builds without validation; validate() reports the problems.
  static Circuit unchecked(std::vector<Channel> channels,
                           std::vector<Gate> gates,
                           std::vector<EntangledInit> entangled = {});

  const std::vector<Channel>& channels() const { return channels_; }
  const std::vector<Gate>& gates() const { return gates_; }
  const std::vector<EntangledInit>& entangled_inits() const {
    return entangled_;
  }

  std::vector<std::string> labels() const;
  std::vector<std::string> ctc_labels() const;
  std::vector<std::string> external_labels() const;
  std::size_t ctc_count() const { return ctc_labels().size(); }
  const Channel& channel(const std::string& label) const;
  bool has_perturbation() const;

  // Product of the external initial states in declared channel order.
  // External channels without an initializer start in |0>.
  PureState external_state() const;

  // Copy with one external channel's initial state replaced.
  Circuit with_external_init(const std::string& label, PureState init) const;

 private:
  std::vector<Channel> channels_;
  std::vector<Gate> gates_;
  std::vector<EntangledInit> entangled_;
};

Circuit build_circuit(std::vector<Channel> channels, std::vector<Gate> gates,
                      std::vector<EntangledInit> entangled = {});

// Empty when the circuit is well formed.
std::vector<std::string> validate(const Circuit& circuit);

// Unitary over the circuit channels (CTC loop bits and externals) in
// declared order.
CMatrix compile_unitary(const Circuit& circuit);

// Applies the gates of a circuit in order to a state holding its channels.
PureState evolve(const Circuit& circuit, PureState state);

}  // namespace ctcsim
