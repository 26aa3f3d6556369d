#include "ctcsim/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace ctcsim {

namespace {

constexpr const char* kRefPrefix = "ref:";

struct Violation {
  enum Kind { Config, Label, Arity } kind;
  std::string message;
};

std::vector<Violation> collect_violations(const Circuit& c) {
  std::vector<Violation> out;
  std::set<std::string> labels;
  std::size_t ctc = 0;
  for (const auto& ch : c.channels()) {
    if (ch.label.empty()) {
      out.push_back({Violation::Label, "empty channel label"});
      continue;
    }
    if (is_reference_label(ch.label))
      out.push_back({Violation::Config,
                     "label '" + ch.label + "' uses the reserved ref: prefix"});
    if (!labels.insert(ch.label).second)
      out.push_back({Violation::Config, "duplicate channel label '" +
                                            ch.label + "'"});
    if (ch.role == ChannelRole::Ctc) {
      ++ctc;
      if (ch.init)
        out.push_back({Violation::Config, "CTC channel '" + ch.label +
                                              "' has an explicit initializer"});
    } else if (ch.init) {
      if (ch.init->num_qubits() != 1)
        out.push_back({Violation::Config, "initializer of '" + ch.label +
                                              "' is not a single qubit"});
      else if (std::abs(ch.init->norm_squared() - 1.0) > 1e-10)
        out.push_back({Violation::Config, "initializer of '" + ch.label +
                                              "' is not normalized"});
    }
  }

  std::set<std::string> covered;
  for (const auto& g : c.entangled_inits()) {
    if (g.channels.size() != g.state.num_qubits())
      out.push_back({Violation::Config,
                     "entangled initializer size does not match its channels"});
    if (std::abs(g.state.norm_squared() - 1.0) > 1e-10)
      out.push_back(
          {Violation::Config, "entangled initializer is not normalized"});
    for (const auto& l : g.channels) {
      if (!labels.count(l)) {
        out.push_back({Violation::Label,
                       "entangled initializer names unknown channel '" + l +
                           "'"});
        continue;
      }
      const auto& ch = c.channel(l);
      if (ch.role == ChannelRole::Ctc)
        out.push_back({Violation::Config, "CTC channel '" + l +
                                              "' has an explicit initializer"});
      else if (ch.init)
        out.push_back({Violation::Config,
                       "external channel '" + l + "' is initialized twice"});
      if (!covered.insert(l).second)
        out.push_back({Violation::Config,
                       "external channel '" + l + "' is initialized twice"});
    }
  }

  if (labels.size() + ctc > kMaxQubits)
    out.push_back({Violation::Config,
                   "register with reference qubits exceeds " +
                       std::to_string(kMaxQubits) + " qubits"});

  for (std::size_t i = 0; i < c.gates().size(); ++i) {
    const auto& g = c.gates()[i];
    const std::string where = "gate " + std::to_string(i) + " (" +
                              to_string(g.kind) + ")";
    if (g.targets.size() != g.op.arity())
      out.push_back({Violation::Arity, where + " has wrong target count"});
    std::set<std::string> seen;
    for (const auto& t : g.targets) {
      if (is_reference_label(t) &&
          labels.count(t.substr(std::string(kRefPrefix).size()))) {
        out.push_back({Violation::Config,
                       where + " targets reference qubit '" + t + "'"});
      } else if (!labels.count(t)) {
        out.push_back(
            {Violation::Label, where + " targets unknown channel '" + t + "'"});
      }
      if (!seen.insert(t).second)
        out.push_back({Violation::Label, where + " repeats target '" + t + "'"});
    }
  }
  return out;
}

}  // namespace

std::string to_string(GateKind kind) {
  switch (kind) {
    case GateKind::X: return "X";
    case GateKind::Z: return "Z";
    case GateKind::Rot: return "ROT";
    case GateKind::Phase: return "PHASE";
    case GateKind::Swap: return "SWAP";
    case GateKind::CX: return "CX";
    case GateKind::CZ: return "CZ";
    case GateKind::CRot: return "CROT";
    case GateKind::CPhase: return "CPHASE";
    case GateKind::CCRot: return "CCROT";
    case GateKind::CCCRot: return "CCCROT";
    case GateKind::Toffoli: return "TOFFOLI";
    case GateKind::Custom: return "CUSTOM";
  }
  return "?";
}

GateKind gate_kind_from_string(const std::string& name) {
  static const std::map<std::string, GateKind> table = {
      {"X", GateKind::X},           {"NOT", GateKind::X},
      {"Z", GateKind::Z},           {"ROT", GateKind::Rot},
      {"PHASE", GateKind::Phase},   {"SWAP", GateKind::Swap},
      {"CX", GateKind::CX},         {"CNOT", GateKind::CX},
      {"CZ", GateKind::CZ},         {"CPF", GateKind::CZ},
      {"CROT", GateKind::CRot},     {"CPHASE", GateKind::CPhase},
      {"CCROT", GateKind::CCRot},   {"CCCROT", GateKind::CCCRot},
      {"TOFFOLI", GateKind::Toffoli}, {"CUSTOM", GateKind::Custom},
  };
  auto it = table.find(name);
  if (it == table.end()) throw ConfigError("unknown gate kind '" + name + "'");
  return it->second;
}

std::size_t gate_arity(GateKind kind) {
  switch (kind) {
    case GateKind::X:
    case GateKind::Z:
    case GateKind::Rot:
    case GateKind::Phase: return 1;
    case GateKind::Swap:
    case GateKind::CX:
    case GateKind::CZ:
    case GateKind::CRot:
    case GateKind::CPhase: return 2;
    case GateKind::CCRot:
    case GateKind::Toffoli: return 3;
    case GateKind::CCCRot: return 4;
    case GateKind::Custom: return 0;
  }
  return 0;
}

bool gate_takes_angle(GateKind kind) {
  switch (kind) {
    case GateKind::Rot:
    case GateKind::Phase:
    case GateKind::CRot:
    case GateKind::CPhase:
    case GateKind::CCRot:
    case GateKind::CCCRot: return true;
    default: return false;
  }
}

CMatrix rot_matrix(double theta) {
  CMatrix m(2, 2);
  m << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return m;
}

CMatrix controlled(const CMatrix& u, std::size_t controls) {
  const auto du = u.rows();
  const auto d = du << controls;
  CMatrix m = CMatrix::Identity(d, d);
  m.bottomRightCorner(du, du) = u;
  return m;
}

Gate make_gate(GateKind kind, std::vector<std::string> targets, double angle) {
  if (kind == GateKind::Custom)
    throw ConfigError("custom gates need an explicit operator");
  if (!std::isfinite(angle)) throw ConfigError("gate angle is not finite");
  if (targets.size() != gate_arity(kind))
    throw ArityError(to_string(kind) + " acts on " +
                     std::to_string(gate_arity(kind)) + " qubits but " +
                     std::to_string(targets.size()) + " targets were given");
  CMatrix x(2, 2), z(2, 2), phase(2, 2);
  x << 0, 1, 1, 0;
  z << 1, 0, 0, -1;
  phase << 1, 0, 0, std::polar(1.0, angle);
  CMatrix m;
  switch (kind) {
    case GateKind::X: m = x; break;
    case GateKind::Z: m = z; break;
    case GateKind::Rot: m = rot_matrix(angle); break;
    case GateKind::Phase: m = phase; break;
    case GateKind::Swap:
      m = CMatrix::Zero(4, 4);
      m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1.0;
      break;
    case GateKind::CX: m = controlled(x, 1); break;
    case GateKind::CZ: m = controlled(z, 1); break;
    case GateKind::CRot: m = controlled(rot_matrix(angle), 1); break;
    case GateKind::CPhase: m = controlled(phase, 1); break;
    case GateKind::CCRot: m = controlled(rot_matrix(angle), 2); break;
    case GateKind::CCCRot: m = controlled(rot_matrix(angle), 3); break;
    case GateKind::Toffoli: m = controlled(x, 2); break;
    case GateKind::Custom: break;
  }
  Gate g;
  g.kind = kind;
  g.targets = std::move(targets);
  g.angle = gate_takes_angle(kind) ? angle : 0.0;
  g.op = Operator(std::move(m));
  return g;
}

Gate make_custom_gate(Operator op, std::vector<std::string> targets) {
  if (targets.size() != op.arity())
    throw ArityError("custom operator acts on " + std::to_string(op.arity()) +
                     " qubits but " + std::to_string(targets.size()) +
                     " targets were given");
  Gate g;
  g.kind = GateKind::Custom;
  g.targets = std::move(targets);
  g.op = std::move(op);
  return g;
}

std::string reference_label(const std::string& ctc_label) {
  return kRefPrefix + ctc_label;
}

bool is_reference_label(const std::string& label) {
  return label.rfind(kRefPrefix, 0) == 0;
}

Circuit Circuit::unchecked(std::vector<Channel> channels,
                           std::vector<Gate> gates,
                           std::vector<EntangledInit> entangled) {
  Circuit c;
  c.channels_ = std::move(channels);
  c.gates_ = std::move(gates);
  c.entangled_ = std::move(entangled);
  return c;
}

std::vector<std::string> Circuit::labels() const {
  std::vector<std::string> out;
  for (const auto& ch : channels_) out.push_back(ch.label);
  return out;
}

std::vector<std::string> Circuit::ctc_labels() const {
  std::vector<std::string> out;
  for (const auto& ch : channels_)
    if (ch.role == ChannelRole::Ctc) out.push_back(ch.label);
  return out;
}

std::vector<std::string> Circuit::external_labels() const {
  std::vector<std::string> out;
  for (const auto& ch : channels_)
    if (ch.role == ChannelRole::External) out.push_back(ch.label);
  return out;
}

const Channel& Circuit::channel(const std::string& label) const {
  for (const auto& ch : channels_)
    if (ch.label == label) return ch;
  throw LabelError("unknown channel: " + label);
}

bool Circuit::has_perturbation() const {
  return std::any_of(gates_.begin(), gates_.end(),
                     [](const Gate& g) { return g.op.perturbation(); });
}

PureState Circuit::external_state() const {
  PureState acc;
  std::set<std::string> grouped;
  for (const auto& g : entangled_) {
    acc = tensor(acc, g.state.relabeled(g.channels));
    grouped.insert(g.channels.begin(), g.channels.end());
  }
  for (const auto& ch : channels_) {
    if (ch.role != ChannelRole::External || grouped.count(ch.label)) continue;
    PureState s = ch.init ? ch.init->relabeled({ch.label})
                          : PureState::basis({ch.label}, 0);
    acc = tensor(acc, s);
  }
  return acc.reordered(external_labels());
}

Circuit Circuit::with_external_init(const std::string& label,
                                    PureState init) const {
  Circuit c = *this;
  bool found = false;
  for (auto& ch : c.channels_) {
    if (ch.label != label) continue;
    if (ch.role != ChannelRole::External)
      throw ConfigError("channel '" + label + "' is not external");
    ch.init = init.relabeled({label});
    found = true;
  }
  if (!found) throw LabelError("unknown channel: " + label);
  for (const auto& g : c.entangled_)
    if (std::find(g.channels.begin(), g.channels.end(), label) !=
        g.channels.end())
      throw ConfigError("channel '" + label +
                        "' is part of an entangled initializer");
  return c;
}

Circuit build_circuit(std::vector<Channel> channels, std::vector<Gate> gates,
                      std::vector<EntangledInit> entangled) {
  Circuit c = Circuit::unchecked(std::move(channels), std::move(gates),
                                 std::move(entangled));
  auto v = collect_violations(c);
  if (!v.empty()) {
    const auto& first = v.front();
    switch (first.kind) {
      case Violation::Label: throw LabelError(first.message);
      case Violation::Arity: throw ArityError(first.message);
      case Violation::Config: throw ConfigError(first.message);
    }
  }
  return c;
}

std::vector<std::string> validate(const Circuit& circuit) {
  std::vector<std::string> out;
  for (auto& v : collect_violations(circuit)) out.push_back(v.message);
  return out;
}

PureState evolve(const Circuit& circuit, PureState state) {
  for (const auto& g : circuit.gates())
    state = apply_gate(state, g.op, g.targets);
  return state;
}

CMatrix compile_unitary(const Circuit& circuit) {
  auto labels = circuit.labels();
  const auto d = Eigen::Index{1} << labels.size();
  CMatrix u(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    u.col(j) = evolve(circuit, PureState::basis(labels, j)).amplitudes();
  return u;
}

}  // namespace ctcsim
