#include "ctcsim/engine.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <numbers>

#include <unsupported/Eigen/KroneckerProduct>

#include "ctcsim/quadrature.hpp"

namespace ctcsim {

namespace {

constexpr BellLabel kBellOrder[] = {BellLabel::B, BellLabel::Minus,
                                    BellLabel::N, BellLabel::MinusN};

std::string bits(std::uint64_t v, std::size_t width) {
  std::string s(width, '0');
  for (std::size_t i = 0; i < width; ++i)
    if (v & (std::uint64_t{1} << (width - 1 - i))) s[i] = '1';
  return s;
}

// Shortest form that reads back to the same double.
std::string fmt_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void require_runnable(const Circuit& c) {
  auto problems = validate(c);
  if (!problems.empty()) throw ConfigError(problems.front());
  if (c.ctc_count() == 0) throw NoCtcError("circuit has no CTC channel");
}

// Weighted sum over a projection set, before normalization.
struct Mixture {
  ProjectionSet set;
  std::vector<double> weights;
  double Z = 0.0;
  CMatrix rho;
  std::vector<std::string> labels;
};

Mixture mix(ProjectionSet set, std::vector<double> weights,
            const std::vector<std::string>& ext_labels) {
  Mixture m;
  m.labels = ext_labels;
  const auto d = Eigen::Index{1} << ext_labels.size();
  m.rho = CMatrix::Zero(d, d);
  for (std::size_t i = 0; i < set.entries.size(); ++i) {
    const auto& e = set.entries[i];
    if (weights[i] == 0.0) continue;
    m.Z += weights[i] * e.weight;
    m.rho += weights[i] * (e.state.amplitudes() * e.state.amplitudes().adjoint());
  }
  m.set = std::move(set);
  m.weights = std::move(weights);
  return m;
}

[[noreturn]] void raise_paradox(const std::string& what, ProjectionSet set) {
  throw ParadoxError(what, std::make_shared<const ProjectionSet>(std::move(set)));
}

PostSelectionResult finish(Mixture m, const std::string& model,
                           const Circuit& c, const EngineOptions& opts) {
  if (!(m.Z >= opts.paradox_tolerance))
    raise_paradox("acceptance " + fmt_double(m.Z) +
                      " is below the paradox tolerance under " + model,
                  std::move(m.set));
  PostSelectionResult r;
  r.model = model;
  r.Z = m.Z;
  r.acceptance = m.Z;
  r.rho = DensityOperator(m.labels, m.rho / m.Z);
  r.projections = std::move(m.set);
  r.model_weights = std::move(m.weights);
  r.perturbation = c.has_perturbation();
  r.metadata["measure"] = "flat-theta-xi";
  r.metadata["model"] = model;
  r.metadata["paradox_tolerance"] = fmt_double(opts.paradox_tolerance);
  return r;
}

std::vector<double> bell_weights(const ProjectionSet& set, std::size_t m,
                                 double lambda) {
  std::vector<double> w;
  w.reserve(set.entries.size());
  const double good = 1.0 - 0.75 * lambda;
  const double bad = 0.25 * lambda;
  for (std::size_t idx = 0; idx < set.entries.size(); ++idx) {
    double p = 1.0;
    std::size_t rest = idx;
    for (std::size_t q = 0; q < m; ++q) {
      p *= (rest % 4 == 0) ? good : bad;
      rest /= 4;
    }
    w.push_back(p);
  }
  return w;
}

std::vector<double> matrix_weights(const ProjectionSet& set,
                                   const Eigen::MatrixXd& omega) {
  // Entry a*d + b holds <e_a|U|e_b>; omega(i, j) weights the history that
  // enters the loop as e_i and leaves it as e_j.
  const auto d = omega.rows();
  std::vector<double> w;
  for (std::size_t idx = 0; idx < set.entries.size(); ++idx)
    w.push_back(omega(static_cast<Eigen::Index>(idx) % d,
                      static_cast<Eigen::Index>(idx) / d));
  return w;
}

void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw ConfigError("noise parameter lambda must lie in [0, 1]");
}

void check_k(double k) {
  if (!(k >= 0.0 && k <= 1.0))
    throw ConfigError("classical error rate k must lie in [0, 1]");
}

void check_omega(const Eigen::MatrixXd& omega, std::size_t d) {
  if (omega.rows() != static_cast<Eigen::Index>(d) ||
      omega.cols() != static_cast<Eigen::Index>(d))
    throw ConfigError("weight matrix must be " + std::to_string(d) + "x" +
                      std::to_string(d));
  if (!omega.allFinite() || (omega.array() < 0.0).any())
    throw ConfigError("weight matrix entries must be finite and non-negative");
  if (omega.sum() <= 0.0) throw ConfigError("weight matrix is all zero");
}

Mixture bell_mixture(const Circuit& c, double lambda) {
  auto set = bell_projections(c);
  auto w = bell_weights(set, c.ctc_count(), lambda);
  return mix(std::move(set), std::move(w), c.external_labels());
}

Mixture weight_mixture(const Circuit& c, const Eigen::MatrixXd& omega) {
  auto set = eigenpair_projections(c);
  auto w = matrix_weights(set, omega);
  return mix(std::move(set), std::move(w), c.external_labels());
}

struct DeltaIntegral {
  double Z = 0.0;
  CMatrix rho_ext;
  CMatrix rho_loop;
};

DeltaIntegral delta_integral(const ProjectionSet& m, std::size_t ext_dim,
                             int nodes_theta, int nodes_xi) {
  const auto rt = gauss_legendre(nodes_theta, 0.0, std::numbers::pi);
  const auto rx = periodic_trapezoid(nodes_xi, 0.0, 2.0 * std::numbers::pi);
  const CVector& m00 = m.entries[0].state.amplitudes();
  const CVector& m01 = m.entries[1].state.amplitudes();
  const CVector& m10 = m.entries[2].state.amplitudes();
  const CVector& m11 = m.entries[3].state.amplitudes();
  DeltaIntegral out;
  out.rho_ext = CMatrix::Zero(ext_dim, ext_dim);
  out.rho_loop = CMatrix::Zero(2, 2);
  CVector phi(2);
  for (std::size_t i = 0; i < rt.nodes.size(); ++i) {
    const double c = std::cos(rt.nodes[i]), s = std::sin(rt.nodes[i]);
    for (std::size_t j = 0; j < rx.nodes.size(); ++j) {
      const Complex p1 = std::polar(s, rx.nodes[j]);
      const double w = rt.weights[i] * rx.weights[j];
      // psi_bar = sum_ab conj(phi_a) phi_b M_ab
      CVector v = (c * c) * m00 + (c * p1) * m01 + (std::conj(p1) * c) * m10 +
                  std::norm(p1) * m11;
      const double omega = v.squaredNorm();
      phi << c, p1;
      out.Z += w * omega;
      out.rho_ext += w * (v * v.adjoint());
      out.rho_loop += (w * omega) * (phi * phi.adjoint());
    }
  }
  return out;
}

void check_single_ctc(const Circuit& c, const char* what) {
  if (c.ctc_count() != 1)
    throw UnsupportedError(std::string(what) +
                           " supports exactly one CTC channel");
}

}  // namespace

std::string to_string(BellLabel label) {
  switch (label) {
    case BellLabel::B: return "B";
    case BellLabel::Minus: return "-";
    case BellLabel::N: return "N";
    case BellLabel::MinusN: return "-N";
  }
  return "?";
}

PureState bell_pair(BellLabel label, const std::string& ref,
                    const std::string& loop) {
  const double h = 1.0 / std::sqrt(2.0);
  CVector v = CVector::Zero(4);
  switch (label) {
    case BellLabel::B: v(0) = h, v(3) = h; break;
    case BellLabel::Minus: v(0) = h, v(3) = -h; break;
    case BellLabel::N: v(1) = h, v(2) = h; break;
    case BellLabel::MinusN: v(1) = h, v(2) = -h; break;
  }
  return PureState({ref, loop}, v);
}

std::string model_name(const CtcModel& model) {
  struct V {
    std::string operator()(const ExactBell&) const { return "exact_bell"; }
    std::string operator()(const NoisyBell& m) const {
      return "noisy_bell(lambda=" + fmt_double(m.lambda) + ")";
    }
    std::string operator()(const Classical& m) const {
      return std::string("classical(k=") + fmt_double(m.k) +
             (m.floor ? ",floor)" : ")");
    }
    std::string operator()(const WeightMatrix&) const {
      return "weight_matrix";
    }
    std::string operator()(const DeltaQuadrature& m) const {
      return "delta(nodes=" + std::to_string(m.nodes_theta) + "x" +
             std::to_string(m.nodes_xi) + ")";
    }
  };
  return std::visit(V{}, model);
}

void validate_model(const CtcModel& model) {
  if (auto* m = std::get_if<NoisyBell>(&model)) check_lambda(m->lambda);
  if (auto* m = std::get_if<Classical>(&model)) check_k(m->k);
  if (auto* m = std::get_if<DeltaQuadrature>(&model)) {
    if (m->nodes_theta < 8 || m->nodes_xi < 8)
      throw ConfigError("quadrature needs at least 8 nodes per axis");
  }
  if (auto* m = std::get_if<WeightMatrix>(&model)) {
    if (!m->omega.allFinite() || (m->omega.array() < 0.0).any())
      throw ConfigError("weight matrix entries must be finite and non-negative");
    if (m->omega.sum() <= 0.0) throw ConfigError("weight matrix is all zero");
  }
}

const ProjectionEntry& ProjectionSet::at(const std::string& label) const {
  for (const auto& e : entries)
    if (e.label == label) return e;
  throw NotFound("no projection labelled '" + label + "'");
}

double ProjectionSet::total_weight() const {
  double t = 0.0;
  for (const auto& e : entries) t += e.weight;
  return t;
}

EngineOptions EngineOptions::from_environment() {
  EngineOptions o;
  if (const char* env = std::getenv("CTC_SIM_TOLERANCE")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && *end == '\0' && v > 0.0 && std::isfinite(v))
      o.paradox_tolerance = v;
  }
  return o;
}

std::vector<std::string> bell_register(const Circuit& circuit) {
  std::vector<std::string> reg;
  for (const auto& l : circuit.ctc_labels()) {
    reg.push_back(reference_label(l));
    reg.push_back(l);
  }
  for (const auto& l : circuit.external_labels()) reg.push_back(l);
  return reg;
}

PureState bell_out_state(const Circuit& circuit) {
  if (circuit.ctc_count() == 0) throw NoCtcError("circuit has no CTC channel");
  PureState acc;
  for (const auto& l : circuit.ctc_labels())
    acc = tensor(acc, bell_pair(BellLabel::B, reference_label(l), l));
  return tensor(acc, circuit.external_state());
}

ProjectionSet bell_projections(const Circuit& circuit) {
  require_runnable(circuit);
  const auto ctcs = circuit.ctc_labels();
  PureState evolved = evolve(circuit, bell_out_state(circuit));

  struct Partial {
    std::string label;
    PureState state;
  };
  std::vector<Partial> layer{{"", evolved}};
  for (const auto& l : ctcs) {
    std::vector<Partial> next;
    next.reserve(layer.size() * 4);
    const auto ref = reference_label(l);
    for (const auto& p : layer) {
      for (auto b : kBellOrder) {
        auto proj = project(p.state, bell_pair(b, ref, l), {ref, l});
        next.push_back({p.label.empty() ? to_string(b)
                                        : p.label + "," + to_string(b),
                        std::move(proj.state)});
      }
    }
    layer = std::move(next);
  }
  ProjectionSet set;
  for (auto& p : layer) {
    const double w = p.state.norm_squared();
    set.entries.push_back({std::move(p.label), std::move(p.state), w});
  }
  return set;
}

ProjectionSet eigenpair_projections(const Circuit& circuit) {
  require_runnable(circuit);
  const auto ctcs = circuit.ctc_labels();
  const std::size_t m = ctcs.size();
  const std::uint64_t d = std::uint64_t{1} << m;
  const PureState ext = circuit.external_state();

  std::vector<std::vector<PureState>> cols(d);
  for (std::uint64_t j = 0; j < d; ++j) {
    PureState out = evolve(circuit, tensor(PureState::basis(ctcs, j), ext));
    for (std::uint64_t i = 0; i < d; ++i)
      cols[j].push_back(project(out, PureState::basis(ctcs, i), ctcs).state);
  }
  ProjectionSet set;
  for (std::uint64_t i = 0; i < d; ++i)
    for (std::uint64_t j = 0; j < d; ++j) {
      PureState s = std::move(cols[j][i]);
      const double w = s.norm_squared();
      set.entries.push_back({bits(i, m) + "|" + bits(j, m), std::move(s), w});
    }
  return set;
}

PostSelectionResult run_exact_bell(const Circuit& circuit,
                                   const EngineOptions& opts) {
  auto m = bell_mixture(circuit, 0.0);
  auto r = finish(std::move(m), "exact_bell", circuit, opts);
  r.N = std::sqrt(r.Z);
  return r;
}

PostSelectionResult run_noisy_bell(const Circuit& circuit, double lambda,
                                   const EngineOptions& opts) {
  check_lambda(lambda);
  return finish(bell_mixture(circuit, lambda),
                model_name(NoisyBell{lambda}), circuit, opts);
}

PostSelectionResult run_classical(const Circuit& circuit, double k, bool floor,
                                  const EngineOptions& opts) {
  check_k(k);
  require_runnable(circuit);
  const std::size_t d = std::size_t{1} << circuit.ctc_count();
  auto r = finish(weight_mixture(circuit, classical_weights(d, k, floor)),
                  model_name(Classical{k, floor}), circuit, opts);
  r.metadata["classical_convention"] = floor ? "floor" : "projective";
  return r;
}

PostSelectionResult run_weight_matrix(const Circuit& circuit,
                                      const Eigen::MatrixXd& omega,
                                      const EngineOptions& opts) {
  require_runnable(circuit);
  const std::size_t d = std::size_t{1} << circuit.ctc_count();
  check_omega(omega, d);
  const double mean = omega.mean();
  auto r = finish(weight_mixture(circuit, omega / mean), "weight_matrix",
                  circuit, opts);
  r.metadata["weight_scale"] = fmt_double(1.0 / mean);
  return r;
}

PostSelectionResult run_delta_quadrature(const Circuit& circuit,
                                         int nodes_theta, int nodes_xi,
                                         const EngineOptions& opts) {
  validate_model(DeltaQuadrature{nodes_theta, nodes_xi});
  require_runnable(circuit);
  check_single_ctc(circuit, "delta quadrature");
  auto set = eigenpair_projections(circuit);
  const auto ext_dim = Eigen::Index{1} << circuit.external_labels().size();
  auto fine = delta_integral(set, ext_dim, nodes_theta, nodes_xi);
  auto check = delta_integral(set, ext_dim, nodes_theta + 8, nodes_xi + 8);
  if (std::abs(fine.Z - check.Z) > 1e-6 * std::max(1.0, std::abs(fine.Z)))
    throw NumericsError("delta quadrature did not converge");

  const std::string name = model_name(DeltaQuadrature{nodes_theta, nodes_xi});
  if (!(fine.Z >= opts.paradox_tolerance))
    raise_paradox("acceptance is below the paradox tolerance under " + name,
                  std::move(set));
  PostSelectionResult r;
  r.model = name;
  r.Z = fine.Z;
  r.acceptance = fine.Z;
  r.rho = DensityOperator(circuit.external_labels(), fine.rho_ext / fine.Z);
  r.rho_loop = DensityOperator(circuit.ctc_labels(), fine.rho_loop / fine.Z);
  r.projections = std::move(set);
  r.model_weights.assign(r.projections.entries.size(), 0.0);
  r.perturbation = circuit.has_perturbation();
  r.metadata["measure"] = "flat-theta-xi";
  r.metadata["model"] = name;
  r.metadata["paradox_tolerance"] = fmt_double(opts.paradox_tolerance);
  return r;
}

PostSelectionResult run(const Circuit& circuit, const CtcModel& model,
                        const EngineOptions& opts) {
  validate_model(model);
  struct V {
    const Circuit& c;
    const EngineOptions& o;
    PostSelectionResult operator()(const ExactBell&) const {
      return run_exact_bell(c, o);
    }
    PostSelectionResult operator()(const NoisyBell& m) const {
      return run_noisy_bell(c, m.lambda, o);
    }
    PostSelectionResult operator()(const Classical& m) const {
      return run_classical(c, m.k, m.floor, o);
    }
    PostSelectionResult operator()(const WeightMatrix& m) const {
      return run_weight_matrix(c, m.omega, o);
    }
    PostSelectionResult operator()(const DeltaQuadrature& m) const {
      return run_delta_quadrature(c, m.nodes_theta, m.nodes_xi, o);
    }
  };
  return std::visit(V{circuit, opts}, model);
}

double partition_function(const Circuit& circuit, const CtcModel& model) {
  validate_model(model);
  require_runnable(circuit);
  const std::size_t d = std::size_t{1} << circuit.ctc_count();
  struct V {
    const Circuit& c;
    std::size_t d;
    double operator()(const ExactBell&) const { return bell_mixture(c, 0.0).Z; }
    double operator()(const NoisyBell& m) const {
      return bell_mixture(c, m.lambda).Z;
    }
    double operator()(const Classical& m) const {
      return weight_mixture(c, classical_weights(d, m.k, m.floor)).Z;
    }
    double operator()(const WeightMatrix& m) const {
      check_omega(m.omega, d);
      return weight_mixture(c, m.omega / m.omega.mean()).Z;
    }
    double operator()(const DeltaQuadrature& m) const {
      check_single_ctc(c, "delta quadrature");
      auto set = eigenpair_projections(c);
      const auto ext_dim = Eigen::Index{1} << c.external_labels().size();
      return delta_integral(set, ext_dim, m.nodes_theta, m.nodes_xi).Z;
    }
  };
  return std::visit(V{circuit, d}, model);
}

Eigen::MatrixXd flat_weights(std::size_t d) {
  return Eigen::MatrixXd::Ones(d, d);
}

Eigen::MatrixXd quad_weights(std::size_t d) {
  return Eigen::MatrixXd::Ones(d, d) + 2.0 * Eigen::MatrixXd::Identity(d, d);
}

Eigen::MatrixXd delta_weights(std::size_t d) {
  return Eigen::MatrixXd::Identity(d, d);
}

Eigen::MatrixXd classical_weights(std::size_t d, double k, bool floor) {
  check_k(k);
  if (d < 2) throw ConfigError("classical weights need d >= 2");
  const double dd = static_cast<double>(d);
  if (floor)
    return Eigen::MatrixXd::Constant(d, d, k / dd) +
           (1.0 - k) * Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd w = Eigen::MatrixXd::Constant(d, d, k / (dd - 1.0));
  w.diagonal().setConstant(1.0 - k);
  return w;
}

Eigen::MatrixXd product_classical_weights(std::size_t m, double k) {
  check_k(k);
  const std::size_t d = std::size_t{1} << m;
  Eigen::MatrixXd w(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const int flips = std::popcount(i ^ j);
      w(i, j) = std::pow(k, flips) * std::pow(1.0 - k, double(m) - flips);
    }
  return w;
}

PostSelectionResult run_conditional(const Circuit& circuit,
                                    const std::string& power_channel,
                                    const CtcModel& model, ConditionalMode mode,
                                    const EngineOptions& opts) {
  require_runnable(circuit);
  double lambda = 0.0;
  if (auto* nb = std::get_if<NoisyBell>(&model)) {
    check_lambda(nb->lambda);
    lambda = nb->lambda;
  } else if (!std::holds_alternative<ExactBell>(model)) {
    throw UnsupportedError("conditional runs support the Bell models only");
  }
  if (circuit.channel(power_channel).role != ChannelRole::External)
    throw ConfigError("power channel must be an external channel");

  const auto reg = bell_register(circuit);
  const auto ctcs = circuit.ctc_labels();
  const auto ext = circuit.external_labels();
  PureState evolved = evolve(circuit, bell_out_state(circuit));

  // The power bit must not be correlated with the reference qubits.
  {
    std::vector<std::string> keep{power_channel};
    for (const auto& l : ctcs) keep.push_back(reference_label(l));
    auto joint = partial_trace(DensityOperator::pure(evolved), keep);
    auto p = partial_trace(joint, {power_channel}).matrix();
    const auto dr = Eigen::Index{1} << ctcs.size();
    CMatrix prod = Eigen::kroneckerProduct(p, CMatrix::Identity(dr, dr) /
                                                  double(dr))
                       .eval();
    if ((joint.matrix() - prod).cwiseAbs().maxCoeff() > 1e-10)
      throw ConfigError("power channel is entangled with CTC reference bits");
  }

  const std::size_t pp = evolved.position(power_channel);
  const std::uint64_t pbit = std::uint64_t{1} << (reg.size() - 1 - pp);
  CVector on = evolved.amplitudes(), off = evolved.amplitudes();
  for (std::uint64_t i = 0; i < evolved.dim(); ++i)
    ((i & pbit) ? off : on)(i) = 0.0;
  const PureState on_state(reg, on), off_state(reg, off);
  const double w_off = off_state.norm_squared();

  // Bell projections of the powered branch.
  std::vector<std::pair<std::string, PureState>> layer{{"", on_state}};
  for (const auto& l : ctcs) {
    std::vector<std::pair<std::string, PureState>> next;
    const auto ref = reference_label(l);
    for (const auto& [lab, st] : layer)
      for (auto b : kBellOrder)
        next.emplace_back(lab.empty() ? to_string(b) : lab + "," + to_string(b),
                          project(st, bell_pair(b, ref, l), {ref, l}).state);
    layer = std::move(next);
  }
  ProjectionSet set;
  for (auto& [lab, st] : layer) {
    const double w = st.norm_squared();
    set.entries.push_back({lab, st, w});
  }
  auto weights = bell_weights(set, ctcs.size(), lambda);
  Mixture on_mix = mix(std::move(set), std::move(weights), ext);

  CMatrix rho_off = partial_trace(DensityOperator::pure(off_state), ext).matrix();
  const double w_on = on_state.norm_squared();
  const std::string name =
      model_name(model) +
      (mode == ConditionalMode::Coupled ? " conditional(coupled)"
                                        : " conditional(insulated)");

  PostSelectionResult r;
  r.model = name;
  r.Z = on_mix.Z + w_off;
  r.acceptance = r.Z;
  if (mode == ConditionalMode::Coupled) {
    if (!(r.Z >= opts.paradox_tolerance))
      raise_paradox("acceptance is below the paradox tolerance", on_mix.set);
    r.rho = DensityOperator(ext, (on_mix.rho + rho_off) / r.Z);
  } else {
    CMatrix acc = rho_off;
    if (w_on > 0.0) {
      if (!(on_mix.Z >= opts.paradox_tolerance))
        raise_paradox("powered branch has zero acceptance", on_mix.set);
      acc += (w_on / on_mix.Z) * on_mix.rho;
    }
    r.rho = DensityOperator(ext, acc / (w_on + w_off));
  }
  r.projections = std::move(on_mix.set);
  r.model_weights = std::move(on_mix.weights);
  r.perturbation = circuit.has_perturbation();
  r.metadata["measure"] = "flat-theta-xi";
  r.metadata["model"] = name;
  r.metadata["power_on_weight"] = fmt_double(w_on);
  r.metadata["paradox_tolerance"] = fmt_double(opts.paradox_tolerance);
  return r;
}

PostSelectionResult run_reference_pair(const Circuit& circuit,
                                       const PureState& pair,
                                       const EngineOptions& opts) {
  require_runnable(circuit);
  check_single_ctc(circuit, "reference pair runs");
  if (pair.num_qubits() != 2) throw ArityError("reference pair needs 2 qubits");
  const auto loop = circuit.ctc_labels().front();
  const auto ref = reference_label(loop);
  PureState p = pair.relabeled({ref, loop});
  PureState evolved = evolve(circuit, tensor(p, circuit.external_state()));
  auto proj = project(evolved, p, {ref, loop});
  ProjectionSet set;
  set.entries.push_back({"pair", proj.state, proj.weight});
  auto r = finish(mix(std::move(set), {1.0}, circuit.external_labels()),
                  "reference_pair", circuit, opts);
  r.N = std::sqrt(r.Z);
  return r;
}

PostSelectionResult run_input_mixture(const Circuit& circuit,
                                      const std::string& channel,
                                      const std::vector<PureState>& inputs,
                                      const CtcModel& model,
                                      const EngineOptions& opts) {
  if (inputs.empty()) throw ConfigError("input mixture needs inputs");
  double z_total = 0.0;
  CMatrix acc;
  for (const auto& in : inputs) {
    Circuit c = circuit.with_external_init(channel, in);
    const double z = partition_function(c, model);
    if (z < opts.paradox_tolerance) continue;
    auto r = run(c, model, opts);
    if (acc.size() == 0) acc = CMatrix::Zero(r.rho.matrix().rows(), r.rho.matrix().cols());
    acc += z * r.rho.matrix();
    z_total += z;
  }
  if (!(z_total >= opts.paradox_tolerance))
    throw ParadoxError("every input of the mixture is a paradox");
  PostSelectionResult r;
  r.model = model_name(model) + " input_mixture(" + channel + ")";
  r.Z = z_total;
  r.acceptance = z_total;
  r.rho = DensityOperator(circuit.external_labels(), acc / z_total);
  r.perturbation = circuit.has_perturbation();
  r.metadata["measure"] = "flat-theta-xi";
  r.metadata["model"] = r.model;
  r.metadata["paradox_tolerance"] = fmt_double(opts.paradox_tolerance);
  return r;
}

}  // namespace ctcsim
