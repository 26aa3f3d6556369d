#include "ctcsim/harness.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ctcsim/analysis.hpp"

namespace ctcsim {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

void check_keys(const json& obj, const std::string& path,
                const std::set<std::string>& allowed) {
  if (!obj.is_object()) bad(path, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) bad(path + "/" + it.key(), "unknown key");
}

const json& require(const json& obj, const std::string& key,
                    const std::string& path) {
  if (!obj.contains(key)) bad(path, "missing key '" + key + "'");
  return obj.at(key);
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) bad(path, "expected a string");
  return j.get<std::string>();
}

// A number, or the name of a document parameter.
double get_real(const json& j, const std::string& path, const ParamMap& params) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    auto it = params.find(j.get<std::string>());
    if (it == params.end())
      bad(path, "unknown parameter '" + j.get<std::string>() + "'");
    return it->second;
  }
  bad(path, "expected a number or a parameter name");
}

std::vector<std::string> get_names(const json& j, const std::string& path) {
  if (!j.is_array()) bad(path, "expected an array of names");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(get_string(j[i], path + "/" + std::to_string(i)));
  return out;
}

// Flat [re, im, re, im, ...] list.
CVector get_amplitudes(const json& j, const std::string& path,
                       const ParamMap& params) {
  if (!j.is_array() || j.size() % 2 != 0)
    bad(path, "expected an even-length list of [re, im] components");
  CVector v(j.size() / 2);
  for (std::size_t i = 0; i < j.size(); i += 2)
    v(i / 2) = Complex(get_real(j[i], path + "/" + std::to_string(i), params),
                       get_real(j[i + 1], path + "/" + std::to_string(i + 1), params));
  if (std::abs(v.norm() - 1.0) > 1e-9) bad(path, "amplitudes are not normalized");
  return v;
}

PureState named_state(const std::string& label, const std::string& name,
                      const std::string& path) {
  const double h = 1.0 / std::sqrt(2.0);
  if (name == "0") return PureState::qubit(label, 1.0, 0.0);
  if (name == "1") return PureState::qubit(label, 0.0, 1.0);
  if (name == "+") return PureState::qubit(label, h, h);
  if (name == "-") return PureState::qubit(label, h, -h);
  bad(path, "unknown named state '" + name + "'");
}

CMatrix get_complex_matrix(const json& j, const std::string& path,
                           const ParamMap& params) {
  if (!j.is_array() || j.empty()) bad(path, "expected a list of rows");
  const std::size_t n = j.size();
  CMatrix m(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto rp = path + "/" + std::to_string(r);
    if (!j[r].is_array() || j[r].size() != n) bad(rp, "row has the wrong length");
    for (std::size_t c = 0; c < n; ++c) {
      const auto& e = j[r][c];
      const auto ep = rp + "/" + std::to_string(c);
      if (e.is_array() && e.size() == 2)
        m(r, c) = Complex(get_real(e[0], ep, params), get_real(e[1], ep, params));
      else
        m(r, c) = get_real(e, ep, params);
    }
  }
  return m;
}

Eigen::MatrixXd preset_weights(const std::string& preset, std::size_t d,
                               const std::string& path) {
  if (preset == "flat") return flat_weights(d);
  if (preset == "quad") return quad_weights(d);
  if (preset == "delta") return delta_weights(d);
  bad(path, "unknown weight preset '" + preset + "'");
}

CtcModel parse_model(const json& j, const std::string& path,
                     const ParamMap& params, std::size_t loop_dim) {
  check_keys(j, path, {"type", "lambda", "k", "floor", "omega", "preset",
                       "nodes", "nodes_theta", "nodes_xi"});
  const auto type = get_string(require(j, "type", path), path + "/type");
  auto real = [&](const char* key, double fallback) {
    return j.contains(key) ? get_real(j.at(key), path + "/" + key, params)
                           : fallback;
  };
  auto integer = [&](const char* key, int fallback) {
    const double v = real(key, fallback);
    if (v != std::floor(v)) bad(path + "/" + key, "expected an integer");
    return static_cast<int>(v);
  };
  if (type == "exact_bell") return ExactBell{};
  if (type == "noisy_bell")
    return NoisyBell{get_real(require(j, "lambda", path), path + "/lambda", params)};
  if (type == "classical") {
    bool floor = false;
    if (j.contains("floor")) {
      if (!j.at("floor").is_boolean()) bad(path + "/floor", "expected a boolean");
      floor = j.at("floor").get<bool>();
    }
    return Classical{get_real(require(j, "k", path), path + "/k", params), floor};
  }
  if (type == "delta") {
    const int n = integer("nodes", 64);
    return DeltaQuadrature{integer("nodes_theta", n), integer("nodes_xi", n)};
  }
  if (type == "weight_matrix") {
    if (j.contains("omega") == j.contains("preset"))
      bad(path, "weight_matrix needs exactly one of 'omega' or 'preset'");
    if (j.contains("preset"))
      return WeightMatrix{preset_weights(get_string(j.at("preset"), path + "/preset"),
                                         loop_dim, path + "/preset")};
    const CMatrix m = get_complex_matrix(j.at("omega"), path + "/omega", params);
    if (m.imag().cwiseAbs().maxCoeff() != 0.0)
      bad(path + "/omega", "weights must be real");
    return WeightMatrix{m.real()};
  }
  bad(path + "/type", "unknown model type '" + type + "'");
}

bool known_output(const std::string& o) {
  static const std::set<std::string> plain{"Z", "N", "rho", "rho_loop",
                                           "projections"};
  if (plain.count(o)) return true;
  const auto colon = o.find(':');
  if (colon == std::string::npos || colon + 1 == o.size()) return false;
  const auto head = o.substr(0, colon);
  return head == "flip" || head == "excite" || head == "input_bias";
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::size_t line_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

// Serializes reals with negative zero folded to zero so that equal values
// always print the same.
double clean(double v) { return v == 0.0 ? 0.0 : v; }

ojson complex_matrix_json(const CMatrix& m) {
  ojson entries = ojson::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      entries.push_back({clean(m(r, c).real()), clean(m(r, c).imag())});
  return entries;
}

ojson density_json(const DensityOperator& rho) {
  ojson j;
  j["dim"] = rho.matrix().rows();
  j["labels"] = rho.labels();
  j["entries"] = complex_matrix_json(rho.matrix());
  return j;
}

ojson projections_json(const ProjectionSet& set) {
  ojson arr = ojson::array();
  for (const auto& e : set.entries) {
    ojson p;
    p["label"] = e.label;
    p["weight"] = clean(e.weight);
    arr.push_back(p);
  }
  return arr;
}

ojson conventions_json(const CtcModel& model) {
  ojson c;
  c["bit_order"] = "first channel is the most significant bit";
  c["rotation"] = "[[cos, -sin], [sin, cos]]";
  c["bell_labels"] = "B, -, N, -N per CTC channel, first channel first";
  if (auto* m = std::get_if<Classical>(&model))
    c["classical"] = m->floor ? "floor" : "projective";
  return c;
}

ojson metadata_json(const std::map<std::string, std::string>& extra,
                    const CtcModel& model) {
  ojson m;
  m["measure"] = "flat-theta-xi";
  m["conventions"] = conventions_json(model);
  m["tool_version"] = kToolVersion;
  for (const auto& [k, v] : extra)
    if (k != "measure") m[k] = v;
  return m;
}

ojson result_json(const PostSelectionResult& result, const Circuit& circuit,
                  const CtcModel& model, const std::vector<std::string>& outputs) {
  ojson j;
  j["paradox"] = false;
  j["model"] = result.model;
  j["Z"] = clean(result.Z);
  if (result.N) j["N"] = clean(*result.N);
  j["acceptance"] = clean(result.acceptance);
  j["perturbation"] = result.perturbation;
  j["rho"] = density_json(result.rho);
  const bool want_loop =
      std::find(outputs.begin(), outputs.end(), "rho_loop") != outputs.end();
  if (want_loop && result.rho_loop) j["rho_loop"] = density_json(*result.rho_loop);
  j["projections"] = projections_json(result.projections);
  ojson derived = ojson::object();
  for (const auto& o : outputs) {
    const auto colon = o.find(':');
    if (colon == std::string::npos) continue;
    const auto head = o.substr(0, colon);
    const auto arg = o.substr(colon + 1);
    if (head == "flip") {
      auto ab = split(arg, ',');
      if (ab.size() != 2) throw ConfigError("outputs: flip needs two channels");
      derived[o] = clean(flip_probability(result, ab[0], ab[1]));
    } else if (head == "excite") {
      derived[o] = clean(excitation_probability(result, arg));
    } else if (head == "input_bias") {
      auto b = input_bias(circuit, arg, model);
      ojson bj;
      bj["Z"] = clean(b.Z_rho);
      bj["rho"] = density_json(b.rho_bar);
      derived[o] = bj;
    }
  }
  j["derived"] = derived;
  j["metadata"] = metadata_json(result.metadata, model);
  return j;
}

ojson paradox_json(const ParadoxError& error, const CtcModel& model) {
  ojson j;
  j["paradox"] = true;
  j["model"] = model_name(model);
  j["message"] = error.what();
  j["projections"] =
      error.projections() ? projections_json(*error.projections()) : ojson::array();
  j["metadata"] = metadata_json({}, model);
  return j;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& text, const std::optional<std::string>& out_path,
          std::ostream& out) {
  if (!out_path) {
    out << text << "\n";
    return;
  }
  std::ofstream f(*out_path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + *out_path + "'");
  f << text << "\n";
}

std::string dump(const ojson& j) { return j.dump(2); }

std::string number(double v) { return ojson(clean(v)).dump(); }

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    err << "parse error (line " << e.line() << "): " << e.what() << "\n";
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return 1;
}

EngineOptions options_with(double tolerance) {
  if (std::getenv("CTC_SIM_TOLERANCE")) return EngineOptions::from_environment();
  EngineOptions o;
  o.paradox_tolerance = tolerance;
  return o;
}

}  // namespace

CircuitDoc parse_circuit_doc(const std::string& text, const ParamMap& overrides) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), line_of(text, e.byte));
  }
  check_keys(root, "", {"params", "channels", "entangled_inits", "gates",
                        "model", "outputs", "conditional", "tolerance"});

  CircuitDoc doc;
  doc.source = text;
  if (root.contains("params")) {
    const auto& p = root.at("params");
    if (!p.is_object()) bad("/params", "expected an object");
    for (auto it = p.begin(); it != p.end(); ++it) {
      if (!it.value().is_number()) bad("/params/" + it.key(), "expected a number");
      doc.params[it.key()] = it.value().get<double>();
    }
  }
  for (const auto& [k, v] : overrides) {
    if (!doc.params.count(k)) bad("/params", "parameter '" + k + "' not found");
    doc.params[k] = v;
  }

  std::vector<Channel> channels;
  const auto& ch = require(root, "channels", "");
  if (!ch.is_array()) bad("/channels", "expected an array");
  for (std::size_t i = 0; i < ch.size(); ++i) {
    const auto path = "/channels/" + std::to_string(i);
    check_keys(ch[i], path, {"name", "role", "init"});
    const auto name = get_string(require(ch[i], "name", path), path + "/name");
    const auto role = get_string(require(ch[i], "role", path), path + "/role");
    if (role == "ctc") {
      if (ch[i].contains("init")) bad(path + "/init", "CTC channels take no init");
      channels.push_back(ctc_channel(name));
    } else if (role == "external") {
      std::optional<PureState> init;
      if (ch[i].contains("init")) {
        const auto& in = ch[i].at("init");
        if (in.is_string())
          init = named_state(name, in.get<std::string>(), path + "/init");
        else
          init = PureState({name}, get_amplitudes(in, path + "/init", doc.params));
        if (init->dim() != 2) bad(path + "/init", "expected one qubit");
      }
      channels.push_back(external_channel(name, init));
    } else {
      bad(path + "/role", "expected \"ctc\" or \"external\"");
    }
  }

  std::vector<EntangledInit> entangled;
  if (root.contains("entangled_inits")) {
    const auto& e = root.at("entangled_inits");
    if (!e.is_array()) bad("/entangled_inits", "expected an array");
    for (std::size_t i = 0; i < e.size(); ++i) {
      const auto path = "/entangled_inits/" + std::to_string(i);
      check_keys(e[i], path, {"channels", "amplitudes"});
      auto names = get_names(require(e[i], "channels", path), path + "/channels");
      CVector amps = get_amplitudes(require(e[i], "amplitudes", path),
                                    path + "/amplitudes", doc.params);
      std::vector<std::string> tmp;
      for (std::size_t q = 0; q < names.size(); ++q) tmp.push_back("q" + std::to_string(q));
      if (amps.size() != (Eigen::Index{1} << names.size()))
        bad(path + "/amplitudes", "length does not match the channel count");
      entangled.push_back({names, PureState(tmp, amps)});
    }
  }

  std::vector<Gate> gates;
  if (root.contains("gates")) {
    const auto& g = root.at("gates");
    if (!g.is_array()) bad("/gates", "expected an array");
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto path = "/gates/" + std::to_string(i);
      check_keys(g[i], path, {"kind", "targets", "params", "matrix", "perturbation"});
      const auto kind_name = get_string(require(g[i], "kind", path), path + "/kind");
      GateKind kind;
      try {
        kind = gate_kind_from_string(kind_name);
      } catch (const Error& ex) {
        bad(path + "/kind", ex.what());
      }
      auto targets = get_names(require(g[i], "targets", path), path + "/targets");
      for (const auto& t : targets)
        if (is_reference_label(t))
          bad(path + "/targets", "gates may not act on reference qubit '" + t + "'");
      if (kind == GateKind::Custom) {
        const CMatrix m =
            get_complex_matrix(require(g[i], "matrix", path), path + "/matrix", doc.params);
        bool pert = false;
        if (g[i].contains("perturbation")) {
          if (!g[i].at("perturbation").is_boolean())
            bad(path + "/perturbation", "expected a boolean");
          pert = g[i].at("perturbation").get<bool>();
        }
        try {
          gates.push_back(make_custom_gate(Operator(m, pert), targets));
        } catch (const ConfigError& ex) {
          bad(path + "/matrix", ex.what());
        }
        continue;
      }
      if (g[i].contains("matrix") || g[i].contains("perturbation"))
        bad(path, "only CUSTOM gates take a matrix");
      double angle = 0.0;
      if (g[i].contains("params")) {
        const auto& p = g[i].at("params");
        check_keys(p, path + "/params", {"theta", "xi"});
        if (p.size() > 1) bad(path + "/params", "give one of theta or xi");
        if (!gate_takes_angle(kind)) bad(path + "/params", "gate takes no angle");
        for (auto it = p.begin(); it != p.end(); ++it)
          angle = get_real(it.value(), path + "/params/" + it.key(), doc.params);
      } else if (gate_takes_angle(kind)) {
        bad(path, "missing params/theta or params/xi");
      }
      gates.push_back(make_gate(kind, targets, angle));
    }
  }

  doc.circuit = build_circuit(std::move(channels), std::move(gates), std::move(entangled));

  const std::size_t loop_dim = std::size_t{1} << doc.circuit.ctc_count();
  doc.model = root.contains("model")
                  ? parse_model(root.at("model"), "/model", doc.params, loop_dim)
                  : CtcModel{ExactBell{}};
  try {
    validate_model(doc.model);
  } catch (const ConfigError& ex) {
    bad("/model", ex.what());
  }
  if (std::holds_alternative<DeltaQuadrature>(doc.model) &&
      doc.circuit.ctc_count() != 1)
    throw UnsupportedError(
        "the delta model integrates a single CTC qubit; use model type "
        "\"weight_matrix\" with preset \"delta\" for more loops");

  if (root.contains("outputs")) {
    doc.outputs = get_names(root.at("outputs"), "/outputs");
    for (std::size_t i = 0; i < doc.outputs.size(); ++i)
      if (!known_output(doc.outputs[i]))
        bad("/outputs/" + std::to_string(i), "unknown output '" + doc.outputs[i] + "'");
  } else {
    doc.outputs = {"Z", "N", "rho", "projections"};
  }

  if (root.contains("conditional")) {
    const auto& c = root.at("conditional");
    check_keys(c, "/conditional", {"power", "mode"});
    ConditionalSpec spec;
    spec.power_channel = get_string(require(c, "power", "/conditional"), "/conditional/power");
    if (c.contains("mode")) {
      const auto mode = get_string(c.at("mode"), "/conditional/mode");
      if (mode == "coupled") spec.mode = ConditionalMode::Coupled;
      else if (mode == "insulated") spec.mode = ConditionalMode::Insulated;
      else bad("/conditional/mode", "expected \"coupled\" or \"insulated\"");
    }
    doc.conditional = spec;
  }

  double tol = kDefaultParadoxTolerance;
  if (root.contains("tolerance")) {
    tol = get_real(root.at("tolerance"), "/tolerance", doc.params);
    if (!(tol > 0.0)) bad("/tolerance", "must be positive");
  }
  doc.options = options_with(tol);
  return doc;
}

CtcModel parse_model_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string type = spec.substr(0, colon);
  std::map<std::string, double> kv;
  std::string preset;
  if (colon != std::string::npos) {
    for (const auto& item : split(spec.substr(colon + 1), ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw ConfigError("model spec: expected key=value in '" + item + "'");
      const auto key = item.substr(0, eq);
      const auto val = item.substr(eq + 1);
      if (key == "preset") {
        preset = val;
        continue;
      }
      try {
        std::size_t used = 0;
        kv[key] = std::stod(val, &used);
        if (used != val.size()) throw std::invalid_argument(val);
      } catch (const std::exception&) {
        throw ConfigError("model spec: '" + val + "' is not a number");
      }
    }
  }
  auto take = [&](const std::string& key, std::optional<double> fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) {
      if (!fallback) throw ConfigError("model spec: missing '" + key + "'");
      return *fallback;
    }
    const double v = it->second;
    kv.erase(it);
    return v;
  };
  CtcModel model;
  if (type == "exact_bell") {
    model = ExactBell{};
  } else if (type == "noisy_bell") {
    model = NoisyBell{take("lambda", std::nullopt)};
  } else if (type == "classical") {
    const double k = take("k", std::nullopt);
    model = Classical{k, take("floor", 0.0) != 0.0};
  } else if (type == "delta") {
    const double n = take("nodes", 64.0);
    model = DeltaQuadrature{static_cast<int>(take("nodes_theta", n)),
                            static_cast<int>(take("nodes_xi", n))};
  } else if (type == "weight_matrix") {
    const double d = take("dim", 2.0);
    if (d < 1 || d != std::floor(d)) throw ConfigError("model spec: bad dim");
    model = WeightMatrix{preset_weights(preset.empty() ? "flat" : preset,
                                        static_cast<std::size_t>(d), "model spec")};
  } else {
    throw ConfigError("unknown model '" + type + "'");
  }
  if (!kv.empty())
    throw ConfigError("model spec: unknown key '" + kv.begin()->first + "'");
  validate_model(model);
  return model;
}

PostSelectionResult run_doc(const CircuitDoc& doc) {
  if (doc.conditional)
    return run_conditional(doc.circuit, doc.conditional->power_channel, doc.model,
                           doc.conditional->mode, doc.options);
  return run(doc.circuit, doc.model, doc.options);
}

std::string make_report(const PostSelectionResult& result, const Circuit& circuit,
                        const CtcModel& model, const std::vector<std::string>& outputs) {
  return dump(result_json(result, circuit, model, outputs));
}

std::string make_paradox_report(const ParadoxError& error, const CtcModel& model) {
  return dump(paradox_json(error, model));
}

int run_command(const std::string& doc_path, const ParamMap& overrides,
                const std::optional<std::string>& out_path, std::ostream& out,
                std::ostream& err) {
  return guarded(err, [&] {
    const CircuitDoc doc = parse_circuit_doc(read_file(doc_path), overrides);
    try {
      const auto result = run_doc(doc);
      emit(make_report(result, doc.circuit, doc.model, doc.outputs), out_path, out);
      return 0;
    } catch (const ParadoxError& p) {
      emit(make_paradox_report(p, doc.model), out_path, out);
      err << "paradox: " << p.what() << "\n";
      return 2;
    }
  });
}

int scenario_command(const std::string& name, const ParamMap& params,
                     const std::string& model_spec, bool verify,
                     const std::optional<std::string>& out_path, std::ostream& out,
                     std::ostream& err) {
  return guarded(err, [&] {
    const Scenario& sc = find_scenario(name);
    const ParamMap resolved = resolve_params(sc, params);
    const CtcModel model = parse_model_spec(model_spec);
    const EngineOptions opts = EngineOptions::from_environment();
    const Circuit circuit = sc.build(resolved);

    ojson head;
    head["scenario"] = sc.name;
    ojson pj = ojson::object();
    for (const auto& [k, v] : resolved) pj[k] = clean(v);
    head["params"] = pj;

    ojson checks = ojson::array();
    bool all_passed = true;
    if (verify) {
      for (const auto& c : verify_scenario(sc.name, resolved, model, opts)) {
        ojson cj;
        cj["quantity"] = c.quantity;
        cj["passed"] = c.passed;
        cj["error"] = clean(c.error);
        cj["tolerance"] = c.tolerance;
        cj["detail"] = c.detail;
        cj["note"] = c.note;
        checks.push_back(cj);
        all_passed = all_passed && c.passed;
      }
    }

    int code = 0;
    ojson body;
    try {
      const auto result = run_scenario(sc, resolved, model, opts);
      std::vector<std::string> outputs{"rho_loop"};
      body = result_json(result, circuit, model, outputs);
    } catch (const ParadoxError& p) {
      body = paradox_json(p, model);
      err << "paradox: " << p.what() << "\n";
      code = 2;
    }
    for (auto it = body.begin(); it != body.end(); ++it) head[it.key()] = it.value();
    if (verify) head["checks"] = checks;
    emit(dump(head), out_path, out);
    if (verify && !all_passed) {
      err << "verification failed\n";
      return 1;
    }
    return code;
  });
}

int sweep_command(const std::string& source, bool scenario,
                  const std::string& model_spec, const std::string& param,
                  double from, double to, int steps,
                  const std::optional<std::string>& out_path, std::ostream& out,
                  std::ostream& err) {
  return guarded(err, [&] {
    if (steps < 1) throw ConfigError("steps must be at least 1");
    if (!std::isfinite(from) || !std::isfinite(to))
      throw ConfigError("sweep bounds must be finite");

    // Each point yields (circuit, model, options, outputs, runner).
    std::function<ojson(double)> point;
    std::string doc_text;
    if (scenario) {
      const Scenario& sc = find_scenario(source);
      const CtcModel base = parse_model_spec(model_spec);
      const bool model_param = param == "lambda" || param == "k";
      bool found = model_param;
      for (const auto& p : sc.params) found = found || p.name == param;
      if (!found) throw ConfigError("scenario '" + sc.name + "' has no parameter '" + param + "'");
      if (param == "lambda" && !std::holds_alternative<NoisyBell>(base))
        throw ConfigError("lambda sweeps need a noisy_bell model");
      if (param == "k" && !std::holds_alternative<Classical>(base))
        throw ConfigError("k sweeps need a classical model");
      point = [&sc, base, param, model_param](double v) {
        CtcModel model = base;
        ParamMap overrides;
        if (param == "lambda") model = NoisyBell{v};
        else if (param == "k") model = Classical{v, std::get<Classical>(base).floor};
        if (!model_param) overrides[param] = v;
        validate_model(model);
        const ParamMap resolved = resolve_params(sc, overrides);
        const auto opts = EngineOptions::from_environment();
        try {
          return result_json(run_scenario(sc, resolved, model, opts),
                             sc.build(resolved), model, {});
        } catch (const ParadoxError& p) {
          return paradox_json(p, model);
        }
      };
    } else {
      doc_text = read_file(source);
      const CircuitDoc probe = parse_circuit_doc(doc_text);
      if (!probe.params.count(param))
        throw ConfigError("/params: parameter '" + param + "' not found");
      point = [&doc_text, param](double v) {
        const CircuitDoc doc = parse_circuit_doc(doc_text, {{param, v}});
        try {
          return result_json(run_doc(doc), doc.circuit, doc.model, doc.outputs);
        } catch (const ParadoxError& p) {
          return paradox_json(p, doc.model);
        }
      };
    }

    std::ostringstream table;
    table << param << ",Z,N,acceptance,paradox\n";
    ojson reports = ojson::array();
    for (int i = 0; i < steps; ++i) {
      const double v = steps == 1 ? from : from + (to - from) * i / (steps - 1);
      ojson r = point(v);
      const bool paradox = r.at("paradox").get<bool>();
      table << number(v) << ",";
      if (!paradox) {
        table << r.at("Z").dump() << ",";
        if (r.contains("N")) table << r.at("N").dump();
        table << "," << r.at("acceptance").dump();
      } else {
        table << ",,";
      }
      table << "," << (paradox ? "true" : "false") << "\n";
      ojson row;
      row[param] = clean(v);
      row["report"] = r;
      reports.push_back(row);
    }
    out << table.str();
    if (out_path) emit(dump(reports), out_path, out);
    return 0;
  });
}

int list_scenarios_command(std::ostream& out) {
  for (const auto& s : catalog()) {
    out << s.name;
    for (const auto& p : s.params) out << " " << p.name << "=" << number(p.default_value);
    out << "\n    " << s.description << "\n";
  }
  return 0;
}

}  // namespace ctcsim
