#include "ctcsim/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ctcsim/analysis.hpp"

namespace ctcsim {

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

// ---------------------------------------------------------------- helpers

Complex amp0(const ParamMap& p, const std::string& s = "") {
  return std::cos(p.at("t" + s));
}
Complex amp1(const ParamMap& p, const std::string& s = "") {
  return std::polar(std::sin(p.at("t" + s)), p.at("chi" + s));
}

CVector vec(std::initializer_list<Complex> xs) {
  CVector v(xs.size());
  Eigen::Index i = 0;
  for (auto x : xs) v(i++) = x;
  return v;
}

CVector input(const ParamMap& p, const std::string& s = "") {
  return vec({amp0(p, s), amp1(p, s)});
}

PureState input_state(const ParamMap& p, const std::string& s = "") {
  return PureState::polar("in", p.at("t" + s), p.at("chi" + s));
}

CVector kron(const CVector& a, const CVector& b) {
  CVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

CMatrix outer(const CVector& v) { return v * v.adjoint(); }

CMatrix diag(std::initializer_list<Complex> xs) {
  return vec(xs).asDiagonal();
}

CMatrix pauli_x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

// One-qubit depolarizing channel with error lambda on qubit q of n.
CMatrix depolarize(const CMatrix& rho, std::size_t q, std::size_t n,
                   double lambda) {
  CMatrix x = pauli_x(), y(2, 2), z(2, 2);
  y << 0, -kI, kI, 0;
  z << 1, 0, 0, -1;
  auto lift = [&](const CMatrix& p) {
    CMatrix acc = CMatrix::Identity(1, 1);
    for (std::size_t i = 0; i < n; ++i) {
      const CMatrix f = (i == q) ? p : CMatrix::Identity(2, 2);
      CMatrix next(acc.rows() * 2, acc.cols() * 2);
      for (Eigen::Index r = 0; r < acc.rows(); ++r)
        for (Eigen::Index c = 0; c < acc.cols(); ++c)
          next.block(r * 2, c * 2, 2, 2) = acc(r, c) * f;
      acc = next;
    }
    return acc;
  };
  const CMatrix X = lift(x), Y = lift(y), Z = lift(z);
  return (1.0 - 0.75 * lambda) * rho +
         0.25 * lambda * (X * rho * X + Y * rho * Y + Z * rho * Z);
}

Circuit make(std::vector<Channel> ch, std::vector<Gate> g,
             std::vector<EntangledInit> e = {}) {
  return build_circuit(std::move(ch), std::move(g), std::move(e));
}

Gate G(GateKind k, std::vector<std::string> t, double a = 0.0) {
  return make_gate(k, std::move(t), a);
}

using F = ModelFamily;

Expectation scalar(F f, std::string q,
                   std::function<double(const ParamMap&, double)> fn,
                   std::string note, double tol = 1e-10) {
  return {f, std::move(q),
          [fn](const ParamMap& p, double x) -> Expected { return fn(p, x); },
          tol, std::move(note)};
}

Expectation matrix(F f, std::string q,
                   std::function<CMatrix(const ParamMap&, double)> fn,
                   std::string note, double tol = 1e-10) {
  return {f, std::move(q),
          [fn](const ParamMap& p, double x) -> Expected { return fn(p, x); },
          tol, std::move(note)};
}

Expectation state(F f, std::string label,
                  std::function<CVector(const ParamMap&, double)> fn,
                  std::string note, double tol = 1e-10) {
  return {f, "psi_bar:" + std::move(label),
          [fn](const ParamMap& p, double x) -> Expected {
            return outer(fn(p, x));
          },
          tol, std::move(note)};
}

// Expects ParadoxError wherever `n2` falls below the default tolerance.
Expectation guarded(F f, std::string q,
                    std::function<double(const ParamMap&, double)> fn,
                    std::function<double(const ParamMap&, double)> n2,
                    std::string note, double tol = 1e-10) {
  return {f, std::move(q),
          [fn, n2](const ParamMap& p, double x) -> Expected {
            if (n2(p, x) < kDefaultParadoxTolerance) return ParadoxExpected{};
            return fn(p, x);
          },
          tol, std::move(note)};
}

Expectation paradox(F f, std::string note) {
  return {f, "paradox",
          [](const ParamMap&, double) -> Expected { return ParadoxExpected{}; },
          0.0, std::move(note)};
}

const ScenarioParam kT{"t", 0.7, "polar angle of the input qubit"};
const ScenarioParam kChi{"chi", 0.4, "relative phase of the input qubit"};

std::vector<ScenarioParam> qubit_params(int count) {
  std::vector<ScenarioParam> out;
  const double ts[] = {0.7, 1.1, 0.45};
  const double cs[] = {0.4, -0.9, 1.3};
  for (int i = 1; i <= count; ++i) {
    const auto s = std::to_string(i);
    out.push_back({"t" + s, ts[i - 1], "polar angle of input " + s});
    out.push_back({"chi" + s, cs[i - 1], "relative phase of input " + s});
  }
  return out;
}

// Closed-form density matrix sum_l w_l |v_l><v_l| / Z.
CMatrix weighted(const std::vector<std::pair<double, CVector>>& parts) {
  CMatrix acc = CMatrix::Zero(parts.front().second.size(),
                              parts.front().second.size());
  double z = 0.0;
  for (const auto& [w, v] : parts) {
    acc += w * outer(v);
    z += w * v.squaredNorm();
  }
  return acc / z;
}

double good(double lambda) { return 1.0 - 0.75 * lambda; }
double bad(double lambda) { return 0.25 * lambda; }

// ---------------------------------------------------------------- catalog

std::vector<Scenario> make_catalog() {
  std::vector<Scenario> cat;

  // A qubit sent around the loop and swapped out again.
  {
    Scenario s;
    s.name = "simple_loop";
    s.description = "external qubit swapped through a single loop";
    s.params = {kT, kChi};
    s.build = [](const ParamMap& p) {
      return make({ctc_channel("phi"), external_channel("psi", input_state(p))},
                  {G(GateKind::Swap, {"phi", "psi"})});
    };
    s.expectations = {
        scalar(F::ExactBell, "N", [](auto&, double) { return 0.5; },
               "teleportation through the loop"),
        matrix(F::ExactBell, "rho", [](auto& p, double) { return outer(input(p)); },
               "state survives unchanged"),
        state(F::ExactBell, "B",
              [](auto& p, double) -> CVector { return 0.5 * input(p); },
              "projection is half the input"),
        scalar(F::NoisyBell, "Z", [](auto&, double) { return 0.25; },
               "all four projections carry 1/4"),
        matrix(F::NoisyBell, "rho",
               [](auto& p, double l) -> CMatrix {
                 return (1.0 - l) * outer(input(p)) +
                        0.5 * l * CMatrix::Identity(2, 2);
               },
               "noisy loop acts as a depolarizing channel"),
        scalar(F::Classical, "Z", [](auto&, double) { return 1.0; },
               "classical loop conserves weight"),
        matrix(F::Classical, "rho",
               [](auto& p, double k) -> CMatrix {
                 const double a = std::norm(amp0(p)), b = std::norm(amp1(p));
                 return diag({(1 - k) * a + k * b, (1 - k) * b + k * a});
               },
               "classical loop decoheres and flips with rate k"),
        scalar(F::Delta, "Z", [](auto&, double) { return kPi * kPi; },
               "flat-measure integral of the overlap", 1e-8),
        matrix(F::Delta, "rho",
               [](auto& p, double) -> CMatrix {
                 const Complex a = amp0(p), b = amp1(p);
                 CMatrix m(2, 2);
                 m << 0.5 * std::norm(a) + 0.25, 0.25 * a * std::conj(b),
                     0.25 * std::conj(a) * b, 0.5 * std::norm(b) + 0.25;
                 return m;
               },
               "componentwise flat-measure integrals", 1e-8),
    };
    cat.push_back(std::move(s));
  }

  // Two-qubit register swapped through two loops.
  {
    Scenario s;
    s.name = "simple_loop_2q";
    s.description = "entangled two-qubit register swapped through two loops";
    s.params = {{"a0", 0.1, "amplitude of |00>"},
                {"a1", 0.3, "amplitude of |01>"},
                {"a2", 0.5, "amplitude of |10>"},
                {"a3", 0.8, "modulus of the |11> amplitude"},
                {"chi", 0.6, "phase of the |11> amplitude"}};
    auto gamma = [](const ParamMap& p) {
      CVector g = vec({p.at("a0"), p.at("a1"), p.at("a2"),
                       std::polar(p.at("a3"), p.at("chi"))});
      if (g.norm() == 0.0) throw ConfigError("all amplitudes are zero");
      return CVector(g / g.norm());
    };
    s.build = [gamma](const ParamMap& p) {
      return make({ctc_channel("phi1"), ctc_channel("phi2"),
                   external_channel("q1"), external_channel("q2")},
                  {G(GateKind::Swap, {"phi1", "q1"}),
                   G(GateKind::Swap, {"phi2", "q2"})},
                  {{{"q1", "q2"}, PureState({"a", "b"}, gamma(p))}});
    };
    s.expectations = {
        scalar(F::ExactBell, "N", [](auto&, double) { return 0.25; },
               "one factor 1/2 per loop"),
        matrix(F::ExactBell, "rho",
               [gamma](auto& p, double) { return outer(gamma(p)); },
               "register survives unchanged"),
        scalar(F::NoisyBell, "Z", [](auto&, double) { return 1.0 / 16.0; },
               "projections all carry 1/16"),
        matrix(F::NoisyBell, "rho",
               [gamma](auto& p, double l) {
                 return depolarize(depolarize(outer(gamma(p)), 0, 2, l), 1, 2, l);
               },
               "independent depolarizing channel on each qubit"),
        scalar(F::ClassicalFloor, "Z", [](auto&, double) { return 1.0; },
               "floor convention conserves weight"),
        matrix(F::ClassicalFloor, "rho",
               [gamma](auto& p, double k) -> CMatrix {
                 CVector g = gamma(p);
                 CMatrix m = 0.25 * k * CMatrix::Identity(4, 4);
                 for (int i = 0; i < 4; ++i) m(i, i) += (1 - k) * std::norm(g(i));
                 return m;
               },
               "k/4 floor plus decohered populations"),
    };
    cat.push_back(std::move(s));
  }

  // Loop anchored on a non-maximally entangled reference pair.
  {
    Scenario s;
    s.name = "twist_pair";
    s.description = "simple loop with a twisted reference pair";
    s.params = {kT, kChi};
    s.build = cat.front().build;
    s.reference_pair = [](const ParamMap&) {
      const double h = 1.0 / std::sqrt(2.0);
      return PureState({"r", "l"}, vec({h, 0.5, 0.0, 0.5}));
    };
    s.expectations = {
        state(F::ExactBell, "pair",
              [](auto& p, double) -> CVector {
                const Complex a = amp0(p), b = amp1(p);
                const double r8 = 1.0 / std::sqrt(8.0);
                return 0.5 * input(p) + vec({b * r8, a * r8});
              },
              "projection against the twisted pair"),
    };
    cat.push_back(std::move(s));
  }

  // Grandfather family: the loop bit is negated, phase flipped or rotated.
  auto grandfather = [&](std::string name, GateKind kind, double angle,
                         std::string label, std::string what) {
    Scenario s;
    s.name = std::move(name);
    s.description = "loop bit sent back " + what;
    s.params = {kT, kChi};
    s.build = [kind, angle](const ParamMap& p) {
      return make({ctc_channel("phi"), external_channel("psi", input_state(p))},
                  {G(kind, {"phi"}, angle)});
    };
    s.expectations.push_back(paradox(F::ExactBell, "inconsistent history"));
    s.expectations.push_back(scalar(
        F::ExactBell, "paradox_weight:" + label,
        [](auto&, double) { return 1.0; }, "all weight sits on one orthogonal state"));
    s.expectations.push_back(
        scalar(F::NoisyBell, "Z", [](auto&, double l) { return 0.25 * l; },
               "only the noise term survives"));
    s.expectations.push_back(matrix(
        F::NoisyBell, "rho", [](auto& p, double) { return outer(input(p)); },
        "external qubit is untouched"));
    return s;
  };
  {
    auto s = grandfather("grandfather_not", GateKind::X, 0.0, "N", "negated");
    s.expectations.push_back(
        scalar(F::Classical, "Z", [](auto&, double k) { return 2.0 * k; },
               "classical paradox is resolved by errors only"));
    s.expectations.push_back(scalar(F::Delta, "Z",
                                    [](auto&, double) { return kPi * kPi / 2; },
                                    "flat-measure integral", 1e-8));
    s.expectations.push_back(matrix(
        F::Delta, "rho_loop",
        [](auto&, double) -> CMatrix { return 0.5 * CMatrix::Identity(2, 2); },
        "loop is maximally mixed", 1e-8));
    cat.push_back(std::move(s));
  }
  {
    auto s = grandfather("grandfather_pf", GateKind::Z, 0.0, "-",
                         "with a phase flip");
    s.expectations.push_back(
        scalar(F::Classical, "Z", [](auto&, double k) { return 2.0 * (1.0 - k); },
               "a classical bit ignores the phase flip"));
    s.expectations.push_back(scalar(F::Delta, "Z",
                                    [](auto&, double) { return kPi * kPi; },
                                    "integral of cos^2 2theta", 1e-8));
    cat.push_back(std::move(s));
  }
  {
    auto s = grandfather("grandfather_rot", GateKind::Rot, kPi / 2, "-N",
                         "rotated by pi/2");
    s.expectations.push_back(scalar(F::Delta, "Z",
                                    [](auto&, double) { return kPi * kPi / 2; },
                                    "flat-measure integral", 1e-8));
    s.expectations.push_back(matrix(
        F::Delta, "rho_loop",
        [](auto&, double) -> CMatrix { return 0.5 * CMatrix::Identity(2, 2); },
        "loop is maximally mixed", 1e-8));
    cat.push_back(std::move(s));
  }
  {
    Scenario s;
    s.name = "grandfather_perturbed";
    s.description = "negation perturbed towards the identity";
    s.params = {{"eps", 1e-4, "identity admixture"}, kT, kChi};
    s.build = [](const ParamMap& p) {
      const double e = p.at("eps");
      CMatrix m = (1.0 - e) * pauli_x() + e * CMatrix::Identity(2, 2);
      return make({ctc_channel("phi"), external_channel("psi", input_state(p))},
                  {make_custom_gate(Operator(m, true), {"phi"})});
    };
    s.expectations = {
        scalar(F::ExactBell, "N", [](auto& p, double) { return std::abs(p.at("eps")); },
               "norm equals the perturbation"),
        matrix(F::ExactBell, "rho", [](auto& p, double) { return outer(input(p)); },
               "external qubit is untouched"),
    };
    cat.push_back(std::move(s));
  }

  // Conditional phase flip between the input and the loop.
  auto cpf_build = [](const ParamMap& p) {
    return make({ctc_channel("phi"), external_channel("psi", input_state(p))},
                {G(GateKind::CZ, {"psi", "phi"})});
  };
  auto gun_noisy_rho = [](const ParamMap& p, double l) -> CMatrix {
    const double a = std::norm(amp0(p)), b = std::norm(amp1(p));
    const double z = (1 - l) * a + l / 4;
    return diag({good(l) * a / z, bad(l) * b / z});
  };
  {
    Scenario s;
    s.name = "cpf_delta";
    s.description = "conditional phase flip from the input onto the loop";
    s.params = {kT, kChi};
    s.build = cpf_build;
    s.expectations = {
        state(F::ExactBell, "B",
              [](auto& p, double) -> CVector { return vec({amp0(p), 0.0}); },
              "only the |0> branch is consistent"),
        scalar(F::ExactBell, "N", [](auto& p, double) { return std::abs(amp0(p)); },
               "norm equals |alpha|"),
        scalar(F::Delta, "Z",
               [](auto& p, double) {
                 return 2 * kPi * kPi * (1 - std::norm(amp1(p)) / 2);
               },
               "flat-measure integral", 1e-8),
        matrix(F::Delta, "rho",
               [](auto& p, double) {
                 const double a = std::norm(amp0(p)), b = std::norm(amp1(p));
                 return diag({2 * a / (a + 1), b / (a + 1)});
               },
               "coherence is lost, |0> is favoured", 1e-8),
        matrix(F::Delta, "rho_loop",
               [](auto&, double) -> CMatrix { return 0.5 * CMatrix::Identity(2, 2); },
               "loop is maximally mixed", 1e-8),
        scalar(F::ClassicalFloor, "Z", [](auto&, double k) { return 2 - k; },
               "floor convention"),
        matrix(F::ClassicalFloor, "rho",
               [](auto& p, double) {
                 return diag({std::norm(amp0(p)), std::norm(amp1(p))});
               },
               "populations kept, coherence lost"),
        scalar(F::Classical, "Z", [](auto&, double k) { return 2 * (1 - k); },
               "projective convention"),
        matrix(F::Classical, "rho",
               [](auto& p, double) {
                 return diag({std::norm(amp0(p)), std::norm(amp1(p))});
               },
               "same state under both conventions"),
    };
    cat.push_back(std::move(s));
  }

  {
    Scenario s;
    s.name = "faulty_gun";
    s.description = "loop bit rotated by zeta with no external input";
    s.params = {{"zeta", 0.6, "rotation angle"}};
    s.build = [](const ParamMap& p) {
      return make({ctc_channel("phi")}, {G(GateKind::Rot, {"phi"}, p.at("zeta"))});
    };
    auto c2 = [](const ParamMap& p) { return std::pow(std::cos(p.at("zeta")), 2); };
    s.expectations = {
        scalar(F::ExactBell, "N",
               [](auto& p, double) { return std::abs(std::cos(p.at("zeta"))); },
               "norm is cos zeta"),
        scalar(F::NoisyBell, "Z",
               [c2](auto& p, double l) { return (1 - l) * c2(p) + l / 4; },
               "single-loop noisy norm"),
        scalar(F::ClassicalFloor, "Z",
               [c2](auto& p, double k) { return k + 2 * (1 - k) * c2(p); },
               "floor convention"),
        scalar(F::Classical, "Z",
               [c2](auto& p, double k) {
                 return 2 * (1 - k) * c2(p) + 2 * k * (1 - c2(p));
               },
               "projective convention"),
        scalar(F::Delta, "Z",
               [c2](auto& p, double) { return kPi * kPi / 2 * (3 * c2(p) + 1); },
               "flat-measure integral", 1e-8),
        matrix(F::Delta, "rho_loop",
               [](auto&, double) -> CMatrix { return 0.5 * CMatrix::Identity(2, 2); },
               "loop is maximally mixed", 1e-8),
    };
    cat.push_back(std::move(s));
  }

  {
    Scenario s;
    s.name = "cnot_gun";
    s.description = "input qubit controls a negation of the loop";
    s.params = {kT, kChi};
    s.build = [](const ParamMap& p) {
      return make({ctc_channel("phi"), external_channel("psi", input_state(p))},
                  {G(GateKind::CX, {"psi", "phi"})});
    };
    auto a2 = [](const ParamMap& p) { return std::norm(amp0(p)); };
    s.expectations = {
        state(F::ExactBell, "B",
              [](auto& p, double) -> CVector { return vec({amp0(p), 0.0}); },
              "control forced to |0>"),
        scalar(F::ExactBell, "N", [](auto& p, double) { return std::abs(amp0(p)); },
               "norm equals |alpha|"),
        scalar(F::NoisyBell, "Z",
               [a2](auto& p, double l) { return (1 - l) * a2(p) + l / 4; },
               "noisy norm"),
        matrix(F::NoisyBell, "rho", gun_noisy_rho, "noisy output populations"),
        scalar(F::Classical, "Z",
               [a2](auto& p, double k) {
                 return 2 * k * (1 - a2(p)) + 2 * (1 - k) * a2(p);
               },
               "projective convention"),
        scalar(F::Delta, "Z",
               [a2](auto& p, double) { return kPi * kPi / 2 * (3 * a2(p) + 1); },
               "flat-measure integral", 1e-8),
        matrix(F::Delta, "rho_loop",
               [](auto&, double) -> CMatrix { return 0.5 * CMatrix::Identity(2, 2); },
               "loop is maximally mixed", 1e-8),
        matrix(F::Delta, "bias:psi",
               [](auto&, double) { return diag({13.0 / 20, 7.0 / 20}); },
               "input bias towards |0>", 1e-6),
        scalar(F::Delta, "bias_Z:psi",
               [](auto&, double) { return 5 * std::pow(kPi, 4) / 2; },
               "integrated acceptance", 1e-6),
        matrix(F::Classical, "bias:psi",
               [](auto&, double k) { return diag({(3 - 2 * k) / 4, (1 + 2 * k) / 4}); },
               "input bias with a classical loop", 1e-6),
        matrix(F::ClassicalFloor, "mixture:psi",
               [](auto&, double k) { return diag({(2 - k) / 2, k / 2}); },
               "classical control and loop"),
        scalar(F::ClassicalFloor, "mixture_Z:psi", [](auto&, double) { return 2.0; },
               "classical control and loop"),
    };
    cat.push_back(std::move(s));
  }

  {
    Scenario s;
    s.name = "cpf_gun";
    s.description = "input qubit controls a phase flip of the loop";
    s.params = {kT, kChi};
    s.build = cpf_build;
    s.expectations = {
        state(F::ExactBell, "B",
              [](auto& p, double) -> CVector { return vec({amp0(p), 0.0}); },
              "control forced to |0>"),
        state(F::ExactBell, "-",
              [](auto& p, double) -> CVector { return vec({0.0, amp1(p)}); },
              "|1> branch lands on the phase-flipped state"),
        scalar(F::NoisyBell, "Z",
               [](auto& p, double l) { return (1 - l) * std::norm(amp0(p)) + l / 4; },
               "noisy norm"),
        matrix(F::NoisyBell, "rho", gun_noisy_rho, "noisy output populations"),
    };
    cat.push_back(std::move(s));
  }

  {
    Scenario s;
    s.name = "crot_gun";
    s.description = "input qubit controls a rotation of the loop";
    s.params = {{"zeta", 1.1, "rotation angle"}, kT, kChi};
    s.build = [](const ParamMap& p) {
      return make({ctc_channel("phi"), external_channel("psi", input_state(p))},
                  {G(GateKind::CRot, {"psi", "phi"}, p.at("zeta"))});
    };
    s.expectations = {
        state(F::ExactBell, "B",
              [](auto& p, double) -> CVector {
                return vec({amp0(p), amp1(p) * std::cos(p.at("zeta"))});
              },
              "rotated branch partly consistent"),
        state(F::ExactBell, "-N",
              [](auto& p, double) -> CVector {
                return vec({0.0, amp1(p) * std::sin(p.at("zeta"))});
              },
              "rotated branch remainder"),
        scalar(F::NoisyBell, "Z",
               [](auto& p, double l) {
                 return 1 - 0.75 * l -
                        (1 - l) * std::norm(amp1(p)) * std::pow(std::sin(p.at("zeta")), 2);
               },
               "noisy norm"),
        matrix(F::NoisyBell, "rho",
               [](auto& p, double l) -> CMatrix {
                 const Complex a = amp0(p), b = amp1(p);
                 const double c = std::cos(p.at("zeta")), sn = std::sin(p.at("zeta"));
                 const double z = 1 - 0.75 * l - (1 - l) * std::norm(b) * sn * sn;
                 CMatrix m(2, 2);
                 m << good(l) * std::norm(a), good(l) * c * a * std::conj(b),
                     good(l) * c * std::conj(a) * b,
                     std::norm(b) * (l / 4 + (1 - l) * c * c);
                 return m / z;
               },
               "noisy output"),
    };
    cat.push_back(std::move(s));
  }

  {
    Scenario s;
    s.name = "phase_gun";
    s.description = "input qubit controls a phase xi on the loop";
    s.params = {{"xi", 2.0, "phase angle"}, kT, kChi};
    s.build = [](const ParamMap& p) {
      return make({ctc_channel("phi"), external_channel("psi", input_state(p))},
                  {G(GateKind::CPhase, {"psi", "phi"}, p.at("xi"))});
    };
    auto bvec = [](const ParamMap& p) {
      return vec({amp0(p), amp1(p) * (1.0 + std::polar(1.0, p.at("xi"))) / 2.0});
    };
    auto mvec = [](const ParamMap& p) {
      return vec({0.0, amp1(p) * (1.0 - std::polar(1.0, p.at("xi"))) / 2.0});
    };
    s.expectations = {
        state(F::ExactBell, "B", [bvec](auto& p, double) { return bvec(p); },
              "phase splits the controlled branch"),
        state(F::ExactBell, "-", [mvec](auto& p, double) { return mvec(p); },
              "remainder lands on the phase-flipped state"),
        scalar(F::NoisyBell, "Z",
               [](auto& p, double l) {
                 return 1 - 0.75 * l -
                        (1 - l) * std::norm(amp1(p)) * (1 - std::cos(p.at("xi"))) / 2;
               },
               "noisy norm"),
        matrix(F::NoisyBell, "rho",
               [bvec, mvec](auto& p, double l) {
                 return weighted({{good(l), bvec(p)}, {bad(l), mvec(p)}});
               },
               "noisy output"),
    };
    cat.push_back(std::move(s));
  }

  // Unproven proof: the loop controls an operation on the input.
  {
    Scenario s;
    s.name = "unproven_proof_cx";
    s.description = "loop bit controls a negation of the input";
    s.params = {kT, kChi};
    s.build = [](const ParamMap& p) {
      return make({ctc_channel("phi"), external_channel("psi", input_state(p))},
                  {G(GateKind::CX, {"phi", "psi"})});
    };
    auto bv = [](const ParamMap& p) {
      const Complex h = (amp0(p) + amp1(p)) / 2.0;
      return vec({h, h});
    };
    auto mv = [](const ParamMap& p) {
      const Complex h = (amp0(p) - amp1(p)) / 2.0;
      return vec({h, -h});
    };
    auto re_ab = [](const ParamMap& p) {
      return std::real(amp0(p) * std::conj(amp1(p)));
    };
    s.expectations = {
        state(F::ExactBell, "B", [bv](auto& p, double) { return bv(p); },
              "projection onto |+>"),
        state(F::ExactBell, "-", [mv](auto& p, double) { return mv(p); },
              "projection onto |->"),
        scalar(F::ExactBell, "N",
               [re_ab](auto& p, double) { return std::sqrt(0.5 * (1 + 2 * re_ab(p))); },
               "norm squared is (1 + 2 Re(alpha conj beta)) / 2"),
        scalar(F::NoisyBell, "Z",
               [re_ab](auto& p, double l) {
                 return 0.5 - l / 4 + (1 - l) * re_ab(p);
               },
               "noisy norm"),
        matrix(F::NoisyBell, "rho",
               [bv, mv](auto& p, double l) {
                 return weighted({{good(l), bv(p)}, {bad(l), mv(p)}});
               },
               "noisy output"),
        scalar(F::Classical, "Z", [](auto&, double k) { return 2 - 2 * k; },
               "classical norm"),
        matrix(F::Classical, "rho",
               [re_ab](auto& p, double) -> CMatrix {
                 CMatrix m(2, 2);
                 m << 0.5, re_ab(p), re_ab(p), 0.5;
                 return m;
               },
               "equal mixture of the input and its negation"),
    };
    cat.push_back(std::move(s));
  }
  {
    Scenario s;
    s.name = "unproven_proof_crot";
    s.description = "loop bit controls a pi/2 rotation of the input";
    s.params = {kT, kChi};
    s.build = [](const ParamMap& p) {
      return make({ctc_channel("phi"), external_channel("psi", input_state(p))},
                  {G(GateKind::CRot, {"phi", "psi"}, kPi / 2)});
    };
    auto rpsi = [](const ParamMap& p) { return vec({-amp1(p), amp0(p)}); };
    s.expectations = {
        state(F::ExactBell, "B",
              [](auto& p, double) -> CVector {
                return vec({(amp0(p) - amp1(p)) / 2.0, (amp0(p) + amp1(p)) / 2.0});
              },
              "half of input plus rotated input"),
        scalar(F::ExactBell, "N", [](auto&, double) { return std::sqrt(0.5); },
               "norm squared is 1/2 for every input"),
        scalar(F::NoisyBell, "Z", [](auto&, double l) { return 0.5 - l / 4; },
               "noisy norm"),
        scalar(F::Classical, "Z", [](auto&, double k) { return 2 - 2 * k; },
               "classical norm"),
        matrix(F::Classical, "rho",
               [rpsi](auto& p, double) -> CMatrix {
                 return 0.5 * (outer(input(p)) + outer(rpsi(p)));
               },
               "equal mixture of the input and its rotation"),
        scalar(F::Delta, "Z", [](auto&, double) { return 1.5 * kPi * kPi; },
               "weight cos^4 + sin^4", 1e-8),
        matrix(F::Delta, "rho_loop",
               [](auto&, double) -> CMatrix { return 0.5 * CMatrix::Identity(2, 2); },
               "loop is maximally mixed", 1e-8),
        matrix(F::Delta, "rho",
               [rpsi](auto& p, double) -> CMatrix {
                 const CVector v = input(p), r = rpsi(p);
                 return 0.5 * (outer(v) + outer(r)) +
                        (v * r.adjoint() + r * v.adjoint()) / 6.0;
               },
               "flat-measure integral of the projected state", 1e-8),
    };
    cat.push_back(std::move(s));
  }
  {
    Scenario s;
    s.name = "unproven_proof_cpf";
    s.description = "loop bit controls a phase flip of the input";
    s.params = {kT, kChi};
    s.build = [](const ParamMap& p) {
      return make({ctc_channel("phi"), external_channel("psi", input_state(p))},
                  {G(GateKind::CZ, {"phi", "psi"})});
    };
    s.expectations = {
        state(F::ExactBell, "B",
              [](auto& p, double) -> CVector { return vec({amp0(p), 0.0}); },
              "only |0> is consistent"),
        scalar(F::ExactBell, "N", [](auto& p, double) { return std::abs(amp0(p)); },
               "norm equals |alpha|"),
    };
    cat.push_back(std::move(s));
  }

  {
    Scenario s;
    s.name = "twice_watched_pot_product";
    s.description = "loop bit copied onto two probes";
    s.params = qubit_params(2);
    s.build = [](const ParamMap& p) {
      return make({ctc_channel("phi"), external_channel("p1", input_state(p, "1")),
                   external_channel("p2", input_state(p, "2"))},
                  {G(GateKind::CX, {"phi", "p1"}), G(GateKind::CX, {"phi", "p2"})});
    };
    auto bv = [](const ParamMap& p) {
      const Complex a1 = amp0(p, "1"), b1 = amp1(p, "1");
      const Complex a2 = amp0(p, "2"), b2 = amp1(p, "2");
      const Complex e = (a1 * a2 + b1 * b2) / 2.0, o = (a1 * b2 + b1 * a2) / 2.0;
      return vec({e, o, o, e});
    };
    auto mv = [](const ParamMap& p) {
      const CVector a = kron(input(p, "1"), input(p, "2"));
      const CVector x = kron(pauli_x() * input(p, "1"), pauli_x() * input(p, "2"));
      return CVector((a - x) / 2.0);
    };
    s.expectations = {
        state(F::ExactBell, "B", [bv](auto& p, double) { return bv(p); },
              "symmetrized product of the probes"),
        scalar(F::NoisyBell, "Z",
               [bv](auto& p, double l) { return (1 - l) * bv(p).squaredNorm() + l / 4; },
               "noisy norm"),
        matrix(F::NoisyBell, "rho",
               [bv, mv](auto& p, double l) {
                 return weighted({{good(l), bv(p)}, {bad(l), mv(p)}});
               },
               "noisy output"),
        scalar(F::Classical, "Z", [](auto&, double k) { return 2 - 2 * k; },
               "classical norm"),
        matrix(F::Classical, "rho",
               [](auto& p, double) -> CMatrix {
                 const CVector a = kron(input(p, "1"), input(p, "2"));
                 const CVector x =
                     kron(pauli_x() * input(p, "1"), pauli_x() * input(p, "2"));
                 return 0.5 * (outer(a) + outer(x));
               },
               "mixture of the probes and their joint negation"),
    };
    cat.push_back(std::move(s));
  }

  {
    Scenario s;
    s.name = "twice_watched_pot_entangled";
    s.description = "loop bit copied onto a probe that is copied onto another";
    s.params = qubit_params(2);
    s.build = [](const ParamMap& p) {
      return make({ctc_channel("phi"), external_channel("p1", input_state(p, "1")),
                   external_channel("p2", input_state(p, "2"))},
                  {G(GateKind::CX, {"phi", "p1"}), G(GateKind::CX, {"p1", "p2"})});
    };
    auto part = [](const ParamMap& p, double sign) {
      const Complex c = (amp0(p, "1") + sign * amp1(p, "1")) / 2.0;
      const CVector v = input(p, "2");
      return CVector(c * (kron(vec({1.0, 0.0}), v) +
                          sign * kron(vec({0.0, 1.0}), pauli_x() * v)));
    };
    s.expectations = {
        state(F::ExactBell, "B", [part](auto& p, double) { return part(p, 1.0); },
              "second probe inherits the projection"),
        state(F::ExactBell, "-", [part](auto& p, double) { return part(p, -1.0); },
              "phase-flipped projection"),
        scalar(F::NoisyBell, "Z",
               [part](auto& p, double l) {
                 return (1 - l) * part(p, 1.0).squaredNorm() + l / 4;
               },
               "noisy norm"),
        matrix(F::NoisyBell, "rho",
               [part](auto& p, double l) {
                 return weighted({{good(l), part(p, 1.0)}, {bad(l), part(p, -1.0)}});
               },
               "noisy output"),
    };
    cat.push_back(std::move(s));
  }

  {
    Scenario s;
    s.name = "two_ctc_cx";
    s.description = "first loop negates the second loop and an external bit";
    s.params = {kT, kChi};
    s.build = [](const ParamMap& p) {
      return make({ctc_channel("phi1"), ctc_channel("phi2"),
                   external_channel("psi", input_state(p))},
                  {G(GateKind::CX, {"phi1", "phi2"}), G(GateKind::CX, {"phi1", "psi"})});
    };
    s.expectations = {
        state(F::ExactBell, "B,B",
              [](auto& p, double) -> CVector { return 0.5 * input(p); },
              "half the input"),
        scalar(F::ExactBell, "N", [](auto&, double) { return 0.5; }, "norm 1/2"),
        scalar(F::NoisyBell, "Z",
               [](auto&, double l) { return 0.25 * std::pow(1 - l / 2, 2); },
               "product of per-loop weights"),
        matrix(F::NoisyBell, "rho",
               [](auto& p, double l) -> CMatrix {
                 const CVector v = input(p);
                 return (4 - 3 * l) / (4 - 2 * l) * outer(v) +
                        l / (4 - 2 * l) * outer(pauli_x() * v);
               },
               "noise leaks the negated input"),
        scalar(F::ClassicalFloor, "Z", [](auto&, double k) { return 2 - k; },
               "floor convention"),
        matrix(F::ClassicalFloor, "rho",
               [](auto& p, double k) -> CMatrix {
                 const CVector v = input(p);
                 const double z = 2 - k;
                 return (1 - k / (2 * z)) * outer(v) + k / (2 * z) * outer(pauli_x() * v);
               },
               "floor convention"),
    };
    cat.push_back(std::move(s));
  }

  {
    Scenario s;
    s.name = "mutual_paradox";
    s.description = "input copied onto two loops around a rotation";
    s.params = {{"zeta", 0.5, "rotation angle of the input"}, kT, kChi};
    s.build = [](const ParamMap& p) {
      return make({ctc_channel("phi1"), ctc_channel("phi2"),
                   external_channel("psi", input_state(p))},
                  {G(GateKind::CX, {"psi", "phi1"}),
                   G(GateKind::Rot, {"psi"}, p.at("zeta")),
                   G(GateKind::CX, {"psi", "phi2"})});
    };
    s.expectations = {
        state(F::ExactBell, "B,B",
              [](auto& p, double) -> CVector {
                return vec({amp0(p) * std::cos(p.at("zeta")), 0.0});
              },
              "consistent only without a flip"),
        guarded(F::ExactBell, "N",
                [](auto& p, double) { return std::abs(amp0(p) * std::cos(p.at("zeta"))); },
                [](auto& p, double) {
                  return std::norm(amp0(p) * std::cos(p.at("zeta")));
                },
                "norm alpha cos zeta, a paradox at zeta = pi/2"),
        scalar(F::NoisyBell, "Z",
               [](auto& p, double l) {
                 const double c2 = std::pow(std::cos(p.at("zeta")), 2), s2 = 1 - c2;
                 const double a2 = std::norm(amp0(p)), b2 = std::norm(amp1(p));
                 return good(l) * good(l) * a2 * c2 + bad(l) * good(l) * s2 +
                        bad(l) * bad(l) * b2 * c2;
               },
               "sum over the four populated projections"),
    };
    cat.push_back(std::move(s));
  }

  {
    Scenario s;
    s.name = "third_party";
    s.description = "two inputs each negate the loop";
    s.params = qubit_params(2);
    s.build = [](const ParamMap& p) {
      return make({ctc_channel("phi"), external_channel("psi1", input_state(p, "1")),
                   external_channel("psi2", input_state(p, "2"))},
                  {G(GateKind::CX, {"psi1", "phi"}), G(GateKind::CX, {"psi2", "phi"})});
    };
    auto bv = [](const ParamMap& p) {
      return vec({amp0(p, "1") * amp0(p, "2"), 0.0, 0.0, amp1(p, "1") * amp1(p, "2")});
    };
    auto nv = [](const ParamMap& p) {
      return vec({0.0, amp0(p, "1") * amp1(p, "2"), amp1(p, "1") * amp0(p, "2"), 0.0});
    };
    s.expectations = {
        state(F::ExactBell, "B", [bv](auto& p, double) { return bv(p); },
              "even-parity inputs survive"),
        state(F::ExactBell, "N", [nv](auto& p, double) { return nv(p); },
              "odd-parity inputs"),
        scalar(F::NoisyBell, "Z",
               [bv](auto& p, double l) { return (1 - l) * bv(p).squaredNorm() + l / 4; },
               "noisy norm"),
        scalar(F::Classical, "Z",
               [bv](auto& p, double k) {
                 const double n2 = bv(p).squaredNorm();
                 return 2 * ((1 - k) * n2 + k * (1 - n2));
               },
               "classical norm"),
        matrix(F::Classical, "rho",
               [bv, nv](auto& p, double k) {
                 return weighted({{1 - k, bv(p)}, {k, nv(p)}});
               },
               "classical output"),
    };
    cat.push_back(std::move(s));
  }

  {
    Scenario s;
    s.name = "stubborn_spin";
    s.description = "loop spin rotated twice between three probes";
    s.params = {{"theta1", 0.9, "first rotation"}, {"theta2", 1.2, "second rotation"}};
    s.build = [](const ParamMap& p) {
      return make({ctc_channel("phi"), external_channel("p1"), external_channel("p2"),
                   external_channel("p3")},
                  {G(GateKind::CX, {"phi", "p1"}),
                   G(GateKind::Rot, {"phi"}, p.at("theta1")),
                   G(GateKind::CX, {"phi", "p2"}),
                   G(GateKind::Rot, {"phi"}, p.at("theta2")),
                   G(GateKind::CX, {"phi", "p3"})});
    };
    struct Trig {
      double c1, s1, c2, s2;
    };
    auto trig = [](const ParamMap& p) {
      const double c1 = std::pow(std::cos(p.at("theta1")), 2);
      const double c2 = std::pow(std::cos(p.at("theta2")), 2);
      return Trig{c1, 1 - c1, c2, 1 - c2};
    };
    s.expectations = {
        scalar(F::ExactBell, "N",
               [trig](auto& p, double) {
                 auto t = trig(p);
                 return std::sqrt(0.5 * (t.c1 * t.c2 + t.s1 * t.s2));
               },
               "norm of the consistent branch"),
        scalar(F::ExactBell, "flip:p1,p2",
               [trig](auto& p, double) {
                 auto t = trig(p);
                 return t.s1 * t.s2 / (t.c1 * t.c2 + t.s1 * t.s2);
               },
               "flip probability 1/(cot^2 cot^2 + 1)"),
        scalar(F::NoisyBell, "flip:p1,p2",
               [trig](auto& p, double l) {
                 auto t = trig(p);
                 const double z = (1 - l) * 0.5 * (t.c1 * t.c2 + t.s1 * t.s2) + l / 4;
                 return t.s1 / (2 * z) * ((1 - l) * t.s2 + l / 2);
               },
               "noisy flip probability"),
        scalar(F::Classical, "flip:p1,p2",
               [trig](auto& p, double k) {
                 auto t = trig(p);
                 const double num = (1 - k) * t.s1 * t.s2 + k * t.s1 * t.c2;
                 const double den = (1 - k) * (t.c1 * t.c2 + t.s1 * t.s2) +
                                    k * (t.s1 * t.c2 + t.c1 * t.s2);
                 return num / den;
               },
               "classical flip probability, normalized over all histories"),
    };
    cat.push_back(std::move(s));
  }

  {
    Scenario s;
    s.name = "amnesia_plain";
    s.description = "input swapped into the loop and XORed with its copy";
    s.params = {kT, kChi};
    s.build = [](const ParamMap& p) {
      return make({ctc_channel("phi"), external_channel("psi", input_state(p))},
                  {G(GateKind::Swap, {"phi", "psi"}), G(GateKind::CX, {"phi", "psi"})});
    };
    auto s2 = [](const ParamMap& p) { return std::norm(amp0(p) + amp1(p)); };
    s.expectations = {
        state(F::ExactBell, "B",
              [](auto& p, double) -> CVector {
                return vec({(amp0(p) + amp1(p)) / 2.0, 0.0});
              },
              "output forgets the input"),
        guarded(F::ExactBell, "N",
                [s2](auto& p, double) { return std::sqrt(s2(p)) / 2; },
                [s2](auto& p, double) { return s2(p) / 4; },
                "paradox when the erased amplitudes cancel"),
        scalar(F::NoisyBell, "Z",
               [s2](auto& p, double l) { return 0.25 * (l + (1 - l) * s2(p)); },
               "noisy norm"),
        matrix(F::NoisyBell, "rho",
               [s2](auto& p, double l) {
                 const double z = 0.25 * (l + (1 - l) * s2(p));
                 return diag({((1 - l) * s2(p) / 4 + l / 8) / z, l / 8 / z});
               },
               "noisy output"),
        scalar(F::Classical, "Z", [](auto&, double) { return 1.0; }, "classical norm"),
        matrix(F::Classical, "rho", [](auto&, double k) { return diag({1 - k, k}); },
               "classical output"),
    };
    cat.push_back(std::move(s));
  }
  {
    Scenario s;
    s.name = "amnesia_entangled";
    s.description = "amnesia circuit on half of an entangled pair";
    s.params = {kT, kChi};
    s.build = [](const ParamMap& p) {
      const CVector v = vec({amp0(p), 0.0, 0.0, amp1(p)});
      return make({ctc_channel("phi"), external_channel("psi1"), external_channel("psi2")},
                  {G(GateKind::Swap, {"phi", "psi1"}), G(GateKind::CX, {"phi", "psi1"})},
                  {{{"psi1", "psi2"}, PureState({"a", "b"}, v)}});
    };
    s.expectations = {
        scalar(F::ExactBell, "N", [](auto&, double) { return 0.5; },
               "norm 1/2 for every input"),
        scalar(F::NoisyBell, "Z", [](auto&, double) { return 0.25; }, "noisy norm"),
        matrix(F::NoisyBell, "rho",
               [](auto& p, double l) -> CMatrix {
                 const Complex a = amp0(p), b = amp1(p);
                 CMatrix m = CMatrix::Zero(4, 4);
                 m(0, 0) = (1 - l / 2) * std::norm(a);
                 m(0, 1) = (1 - l) * a * std::conj(b);
                 m(1, 0) = std::conj(m(0, 1));
                 m(1, 1) = (1 - l / 2) * std::norm(b);
                 m(2, 2) = l / 2 * std::norm(a);
                 m(3, 3) = l / 2 * std::norm(b);
                 return m;
               },
               "noisy output"),
        scalar(F::Classical, "Z", [](auto&, double) { return 1.0; }, "classical norm"),
        matrix(F::Classical, "rho",
               [](auto& p, double k) {
                 const double a = std::norm(amp0(p)), b = std::norm(amp1(p));
                 return diag({(1 - k) * a, (1 - k) * b, k * a, k * b});
               },
               "classical output"),
    };
    cat.push_back(std::move(s));
  }

  {
    Scenario s;
    s.name = "amnesia_secondary_loop";
    s.description = "amnesia circuit fed by a rotated, phase-flipped Bell pair";
    s.params = {kT, kChi};
    s.build = [](const ParamMap& p) {
      const double h = 1.0 / std::sqrt(2.0);
      return make({ctc_channel("phi"), external_channel("psi1"), external_channel("psi2"),
                   external_channel("psi3", input_state(p))},
                  {G(GateKind::Rot, {"psi2"}, -kPi / 4), G(GateKind::CZ, {"psi3", "psi1"}),
                   G(GateKind::CX, {"phi", "psi1"}), G(GateKind::CX, {"psi1", "phi"})},
                  {{{"psi1", "psi2"}, PureState({"a", "b"}, vec({h, 0, 0, h}))}});
    };
    s.expectations = {
        state(F::ExactBell, "B",
              [](auto& p, double) -> CVector {
                CVector v = CVector::Zero(8);
                v(0) = 0.5 * amp0(p);
                v(3) = -0.5 * amp1(p);
                return v;
              },
              "secondary loop keeps the input coherent"),
        scalar(F::ExactBell, "N", [](auto&, double) { return 0.5; }, "norm 1/2"),
        scalar(F::NoisyBell, "Z", [](auto&, double) { return 0.25; },
               "acceptance independent of noise"),
        state(F::NoisyBell, "B",
              [](auto& p, double) -> CVector {
                CVector v = CVector::Zero(8);
                v(0) = 0.5 * amp0(p);
                v(3) = -0.5 * amp1(p);
                return v;
              },
              "projection does not depend on the noise"),
    };
    cat.push_back(std::move(s));
  }

  // Back-propagating measurement: the probe records a rotation flip, and the
  // loop is controlled through a chain of controlled rotations.
  {
    Scenario s;
    s.name = "backprop_chain";
    s.description = "probe flip seen through a chain of controlled rotations";
    s.params = {{"theta_s", 0.8, "control rotation"},
                {"theta_g1", 1.1, "first controlled rotation"},
                {"theta_g2", 0.9, "second controlled rotation"}};
    s.build = [](const ParamMap& p) {
      return make({ctc_channel("phi"), external_channel("c2"), external_channel("c1"),
                   external_channel("probe")},
                  {G(GateKind::Rot, {"c1"}, p.at("theta_s")), G(GateKind::CX, {"c1", "probe"}),
                   G(GateKind::Rot, {"c1"}, -p.at("theta_s")),
                   G(GateKind::CRot, {"c1", "c2"}, p.at("theta_g1")),
                   G(GateKind::CRot, {"c2", "phi"}, p.at("theta_g2"))});
    };
    auto x = [](const ParamMap& p) {
      const double ss = std::pow(std::sin(p.at("theta_s")), 2);
      const double g = std::pow(std::sin(p.at("theta_g1")) * std::sin(p.at("theta_g2")), 2);
      return std::pair{ss, g};
    };
    s.expectations = {
        scalar(F::ExactBell, "N",
               [x](auto& p, double) {
                 auto [ss, g] = x(p);
                 return std::sqrt(1 - 2 * ss * (1 - ss) * g);
               },
               "norm of the consistent branch"),
        scalar(F::ExactBell, "excite:probe",
               [x](auto& p, double) {
                 auto [ss, g] = x(p);
                 return ss * (1 - (1 - ss) * g) / (1 - 2 * ss * (1 - ss) * g);
               },
               "flip probability of the probe"),
    };
    cat.push_back(std::move(s));
  }
  {
    Scenario s;
    s.name = "backprop_single";
    s.description = "probe flip seen through one controlled rotation";
    s.params = {{"theta_s", 0.8, "control rotation"},
                {"theta_g", 1.0, "controlled rotation"}};
    s.build = [](const ParamMap& p) {
      return make({ctc_channel("phi"), external_channel("c"), external_channel("probe")},
                  {G(GateKind::Rot, {"c"}, p.at("theta_s")), G(GateKind::CX, {"c", "probe"}),
                   G(GateKind::Rot, {"c"}, -p.at("theta_s")),
                   G(GateKind::CRot, {"c", "phi"}, p.at("theta_g"))});
    };
    auto x = [](const ParamMap& p) {
      const double ss = std::pow(std::sin(p.at("theta_s")), 2);
      const double g = std::pow(std::sin(p.at("theta_g")), 2);
      return std::pair{ss, g};
    };
    s.expectations = {
        scalar(F::ExactBell, "N",
               [x](auto& p, double) {
                 auto [ss, g] = x(p);
                 return std::sqrt(1 - 2 * ss * (1 - ss) * g);
               },
               "norm of the consistent branch"),
        scalar(F::ExactBell, "excite:probe",
               [x](auto& p, double) {
                 auto [ss, g] = x(p);
                 return ss * (1 - (1 - ss) * g) / (1 - 2 * ss * (1 - ss) * g);
               },
               "flip probability of the probe"),
        scalar(F::NoisyBell, "Z",
               [x](auto& p, double l) {
                 auto [ss, g] = x(p);
                 return 1 - 0.75 * l - 2 * (1 - l) * ss * (1 - ss) * g;
               },
               "noisy norm"),
    };
    cat.push_back(std::move(s));
  }

  {
    Scenario s;
    s.name = "n_controlled_not";
    s.description = "m inputs each negate the loop";
    s.params = {{"m", 3, "number of controls (1 to 6)"}};
    const double defaults[] = {0.5, 0.9, 1.2, 0.3, 0.7, 1.0};
    for (int i = 0; i < 6; ++i)
      s.params.push_back({"t" + std::to_string(i), defaults[i],
                          "polar angle of control " + std::to_string(i)});
    auto count = [](const ParamMap& p) {
      const double m = p.at("m");
      if (m != std::floor(m) || m < 1 || m > 6)
        throw ConfigError("m must be an integer between 1 and 6");
      return static_cast<int>(m);
    };
    s.build = [count](const ParamMap& p) {
      const int m = count(p);
      std::vector<Channel> ch{ctc_channel("phi")};
      std::vector<Gate> g;
      for (int i = 0; i < m; ++i) {
        const auto l = "c" + std::to_string(i);
        ch.push_back(external_channel(
            l, PureState::polar("x", p.at("t" + std::to_string(i)), 0.0)));
        g.push_back(G(GateKind::CX, {l, "phi"}));
      }
      return make(std::move(ch), std::move(g));
    };
    auto n2 = [count](const ParamMap& p) {
      const int m = count(p);
      std::vector<double> rest;
      for (int i = 1; i < m; ++i)
        rest.push_back(std::abs(std::cos(p.at("t" + std::to_string(i)))));
      auto r = parity_recursion(rest);
      const double a2 = std::pow(std::cos(p.at("t0")), 2);
      return r.E2 * a2 + r.D2 * (1 - a2);
    };
    s.expectations = {
        scalar(F::ExactBell, "N", [n2](auto& p, double) { return std::sqrt(n2(p)); },
               "parity recursion"),
        scalar(F::NoisyBell, "Z",
               [n2](auto& p, double l) { return (1 - l) * n2(p) + l / 4; },
               "noisy norm"),
    };
    cat.push_back(std::move(s));
  }

  {
    Scenario s;
    s.name = "ccrot_selector";
    s.description = "doubly controlled rotation then a rotation of the loop";
    s.params = {{"theta1", kPi / 2, "controlled rotation"},
                {"theta2", kPi / 2, "plain rotation"}};
    for (auto& q : qubit_params(2)) s.params.push_back(q);
    s.build = [](const ParamMap& p) {
      return make({ctc_channel("phi"), external_channel("psi1", input_state(p, "1")),
                   external_channel("psi2", input_state(p, "2"))},
                  {G(GateKind::CCRot, {"psi1", "psi2", "phi"}, p.at("theta1")),
                   G(GateKind::Rot, {"phi"}, p.at("theta2"))});
    };
    auto parts = [](const ParamMap& p, bool sine) {
      CVector in = kron(input(p, "1"), input(p, "2"));
      CVector top = CVector::Zero(4);
      top(3) = in(3);
      const double t1 = p.at("theta1"), t2 = p.at("theta2");
      auto f = [sine](double a) { return sine ? std::sin(a) : std::cos(a); };
      return CVector(f(t2) * (in - top) + f(t1 + t2) * top);
    };
    s.expectations = {
        state(F::ExactBell, "B", [parts](auto& p, double) { return parts(p, false); },
              "cosine of the accumulated rotation"),
        state(F::ExactBell, "-N", [parts](auto& p, double) { return parts(p, true); },
              "sine of the accumulated rotation"),
        matrix(F::NoisyBell, "rho",
               [parts](auto& p, double l) {
                 return weighted({{good(l), parts(p, false)}, {bad(l), parts(p, true)}});
               },
               "noisy selection"),
    };
    cat.push_back(std::move(s));
  }
  {
    Scenario s;
    s.name = "cccrot_selector";
    s.description = "triply controlled rotation then a rotation of the loop";
    s.params = {{"theta1", kPi / 2, "controlled rotation"},
                {"theta2", kPi / 2, "plain rotation"}};
    for (auto& q : qubit_params(3)) s.params.push_back(q);
    s.build = [](const ParamMap& p) {
      return make({ctc_channel("phi"), external_channel("psi1", input_state(p, "1")),
                   external_channel("psi2", input_state(p, "2")),
                   external_channel("psi3", input_state(p, "3"))},
                  {G(GateKind::CCCRot, {"psi1", "psi2", "psi3", "phi"}, p.at("theta1")),
                   G(GateKind::Rot, {"phi"}, p.at("theta2"))});
    };
    auto parts = [](const ParamMap& p, bool sine) {
      CVector in = kron(kron(input(p, "1"), input(p, "2")), input(p, "3"));
      CVector top = CVector::Zero(8);
      top(7) = in(7);
      const double t1 = p.at("theta1"), t2 = p.at("theta2");
      auto f = [sine](double a) { return sine ? std::sin(a) : std::cos(a); };
      return CVector(f(t2) * (in - top) + f(t1 + t2) * top);
    };
    s.expectations = {
        state(F::ExactBell, "B", [parts](auto& p, double) { return parts(p, false); },
              "selects |111> at pi/2, pi/2"),
        state(F::ExactBell, "-N", [parts](auto& p, double) { return parts(p, true); },
              "everything else"),
        matrix(F::NoisyBell, "rho",
               [parts](auto& p, double l) {
                 return weighted({{good(l), parts(p, false)}, {bad(l), parts(p, true)}});
               },
               "noisy selection"),
    };
    cat.push_back(std::move(s));
  }

  {
    Scenario s;
    s.name = "parity_ec";
    s.description = "parity of a noisy encoded pair checked against the loop";
    s.params = {{"eps", 0.1, "bit-flip amplitude parameter"}, kT, kChi};
    auto noisy = [](const ParamMap& p) {
      const double e = p.at("eps");
      if (!(e >= 0 && e <= 1)) throw ConfigError("eps must lie in [0, 1]");
      const Complex a = amp0(p), b = amp1(p);
      const double m = std::sqrt(e * (1 - e));
      CVector v = vec({(1 - e) * a + e * b, m * (a + b), m * (a + b), (1 - e) * b + e * a});
      if (v.norm() == 0.0) throw ConfigError("encoded state vanishes");
      return CVector(v / v.norm());
    };
    s.build = [noisy](const ParamMap& p) {
      return make({ctc_channel("phi"), external_channel("c1"), external_channel("c2")},
                  {G(GateKind::CX, {"c1", "phi"}), G(GateKind::CX, {"c2", "phi"})},
                  {{{"c1", "c2"}, PureState({"a", "b"}, noisy(p))}});
    };
    auto even = [noisy](const ParamMap& p) {
      CVector v = noisy(p);
      v(1) = v(2) = 0.0;
      return v;
    };
    auto odd = [noisy](const ParamMap& p) {
      CVector v = noisy(p);
      v(0) = v(3) = 0.0;
      return v;
    };
    s.expectations = {
        state(F::ExactBell, "B", [even](auto& p, double) { return even(p); },
              "even-parity part"),
        state(F::ExactBell, "N", [odd](auto& p, double) { return odd(p); },
              "odd-parity part"),
        scalar(F::NoisyBell, "Z",
               [even, odd](auto& p, double l) {
                 const double omega = 4 / l - 3;
                 return l / 4 * (omega * even(p).squaredNorm() + odd(p).squaredNorm());
               },
               "skewed parity weights"),
    };
    cat.push_back(std::move(s));
  }

  {
    Scenario s;
    s.name = "tourist_trap";
    s.description = "message bits from Bell pairs, deselected when powered";
    s.params = {{"insulated", 0, "0 couples the branches, 1 insulates them"}};
    s.power_channel = "p";
    s.build = [](const ParamMap& p) {
      const double i = p.at("insulated");
      if (i != 0 && i != 1) throw ConfigError("insulated must be 0 or 1");
      const double h = 1.0 / std::sqrt(2.0);
      const PureState bell({"a", "b"}, vec({h, 0, 0, h}));
      return make({ctc_channel("phi"), external_channel("m1"), external_channel("t1"),
                   external_channel("m2"), external_channel("t2"), external_channel("m3"),
                   external_channel("t3"), external_channel("p")},
                  {G(GateKind::X, {"m1"}), G(GateKind::X, {"m2"}),
                   G(GateKind::Toffoli, {"m1", "m2", "p"}), G(GateKind::X, {"m1"}),
                   G(GateKind::X, {"m2"}), G(GateKind::X, {"m3"}),
                   G(GateKind::CX, {"m3", "phi"}), G(GateKind::X, {"m3"})},
                  {{{"m1", "t1"}, bell}, {{"m2", "t2"}, bell}, {{"m3", "t3"}, bell}});
    };
    s.expectations = {
        scalar(F::ExactBell, "prob:m1=0,m2=0",
               [](auto& p, double) { return p.at("insulated") ? 0.25 : 1.0 / 7.0; },
               "powered prefix is suppressed only when coupled"),
        scalar(F::NoisyBell, "prob:m1=0,m2=0",
               [](auto& p, double l) {
                 if (p.at("insulated")) return 0.25;
                 const double on = 0.25 * ((1 - l) * 0.5 + l / 4);
                 return on / (on + 0.75);
               },
               "powered prefix weight"),
    };
    cat.push_back(std::move(s));
  }

  return cat;
}

// ---------------------------------------------------------------- checks

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double noise_of(const CtcModel& m) {
  if (auto* x = std::get_if<NoisyBell>(&m)) return x->lambda;
  if (auto* x = std::get_if<Classical>(&m)) return x->k;
  return 0.0;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

double matrix_error(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    return std::numeric_limits<double>::infinity();
  return (a - b).cwiseAbs().maxCoeff();
}

CheckResult check_one(const Scenario& sc, const ParamMap& params,
                      const Expectation& e, const CtcModel& model,
                      const EngineOptions& opts,
                      std::optional<PostSelectionResult>& cached,
                      std::optional<std::string>& cached_error,
                      const ProjectionSet*& paradox_set,
                      std::shared_ptr<const ProjectionSet>& paradox_hold) {
  CheckResult r;
  r.quantity = e.quantity;
  r.family = to_string(e.family);
  r.note = e.note;
  r.tolerance = e.tolerance;

  const Expected expected = e.value(params, noise_of(model));
  const auto colon = e.quantity.find(':');
  const std::string head = e.quantity.substr(0, colon);
  const std::string arg =
      colon == std::string::npos ? "" : e.quantity.substr(colon + 1);
  const Circuit circuit = sc.build(params);

  auto compare = [&](const Expected& observed) {
    if (auto* d = std::get_if<double>(&expected)) {
      const double o = std::get<double>(observed);
      r.error = std::abs(o - *d) / std::max(1.0, std::abs(*d));
      r.detail = "expected " + fmt(*d) + ", observed " + fmt(o);
    } else {
      const auto& m = std::get<CMatrix>(expected);
      r.error = matrix_error(std::get<CMatrix>(observed), m);
      r.detail = "max entry deviation " + fmt(r.error);
    }
    r.passed = r.error <= e.tolerance;
  };

  // Quantities that need their own runs.
  if (head == "bias" || head == "bias_Z") {
    auto b = input_bias(circuit, arg, model);
    compare(head == "bias" ? Expected(b.rho_bar.matrix()) : Expected(b.Z_rho));
    return r;
  }
  if (head == "mixture" || head == "mixture_Z") {
    auto m = run_input_mixture(
        circuit, arg, {PureState::basis({arg}, 0), PureState::basis({arg}, 1)},
        model, opts);
    compare(head == "mixture" ? Expected(m.rho.matrix()) : Expected(m.Z));
    return r;
  }

  if (!cached && !cached_error && !paradox_set) {
    try {
      cached = run_scenario(sc, params, model, opts);
    } catch (const ParadoxError& p) {
      paradox_set = p.projections();
      if (paradox_set)
        paradox_hold = std::make_shared<const ProjectionSet>(*paradox_set);
      paradox_set = paradox_hold.get();
      if (!paradox_set) cached_error = std::string("paradox without projections");
    } catch (const Error& ex) {
      cached_error = ex.what();
    }
  }

  if (std::holds_alternative<ParadoxExpected>(expected)) {
    r.passed = paradox_set != nullptr;
    r.detail = r.passed ? "ParadoxError raised" : "run did not raise ParadoxError";
    r.error = r.passed ? 0.0 : 1.0;
    return r;
  }
  if (head == "paradox_weight") {
    if (!paradox_set) {
      r.detail = "run did not raise ParadoxError";
      r.error = 1.0;
      return r;
    }
    compare(paradox_set->at(arg).weight);
    return r;
  }
  // Projections survive a paradox; they travel with the error.
  if (!cached && paradox_set && (head == "psi_bar" || head == "weight")) {
    const auto& entry = paradox_set->at(arg);
    if (head == "weight") return compare(entry.weight), r;
    const auto& st = entry.state.amplitudes();
    return compare(CMatrix(st * st.adjoint())), r;
  }
  if (!cached) {
    r.detail = paradox_set ? "unexpected ParadoxError"
                           : "run failed: " + cached_error.value_or("?");
    r.error = std::numeric_limits<double>::infinity();
    return r;
  }

  const auto& res = *cached;
  if (head == "Z") return compare(res.Z), r;
  if (head == "N") {
    if (!res.N) throw ConfigError("N is only reported by the exact Bell model");
    return compare(*res.N), r;
  }
  if (head == "rho") return compare(res.rho.matrix()), r;
  if (head == "rho_loop") {
    if (!res.rho_loop) throw ConfigError("model reports no loop state");
    return compare(res.rho_loop->matrix()), r;
  }
  if (head == "psi_bar") {
    const auto& st = res.projections.at(arg).state.amplitudes();
    return compare(CMatrix(st * st.adjoint())), r;
  }
  if (head == "weight") return compare(res.projections.at(arg).weight), r;
  if (head == "flip") {
    auto ab = split(arg, ',');
    return compare(flip_probability(res, ab.at(0), ab.at(1))), r;
  }
  if (head == "excite") return compare(excitation_probability(res, arg)), r;
  if (head == "prob") {
    std::vector<std::string> chans;
    std::vector<int> bits;
    for (const auto& kv : split(arg, ',')) {
      auto parts = split(kv, '=');
      chans.push_back(parts.at(0));
      bits.push_back(std::stoi(parts.at(1)));
    }
    return compare(basis_probability(res.rho, chans, bits)), r;
  }
  if (head == "marginal")
    return compare(partial_trace(res.rho, split(arg, ',')).matrix()), r;
  throw ConfigError("unknown expectation quantity '" + e.quantity + "'");
}

}  // namespace

std::string to_string(ModelFamily family) {
  switch (family) {
    case ModelFamily::ExactBell: return "exact_bell";
    case ModelFamily::NoisyBell: return "noisy_bell";
    case ModelFamily::Classical: return "classical";
    case ModelFamily::ClassicalFloor: return "classical_floor";
    case ModelFamily::Delta: return "delta";
    case ModelFamily::WeightMatrix: return "weight_matrix";
  }
  return "?";
}

ModelFamily family_of(const CtcModel& model) {
  if (std::holds_alternative<ExactBell>(model)) return ModelFamily::ExactBell;
  if (std::holds_alternative<NoisyBell>(model)) return ModelFamily::NoisyBell;
  if (auto* c = std::get_if<Classical>(&model))
    return c->floor ? ModelFamily::ClassicalFloor : ModelFamily::Classical;
  if (std::holds_alternative<DeltaQuadrature>(model)) return ModelFamily::Delta;
  return ModelFamily::WeightMatrix;
}

CtcModel representative_model(ModelFamily family) {
  switch (family) {
    case ModelFamily::ExactBell: return ExactBell{};
    case ModelFamily::NoisyBell: return NoisyBell{0.3};
    case ModelFamily::Classical: return Classical{0.2, false};
    case ModelFamily::ClassicalFloor: return Classical{0.2, true};
    case ModelFamily::Delta: return DeltaQuadrature{};
    case ModelFamily::WeightMatrix: return WeightMatrix{flat_weights(2)};
  }
  return ExactBell{};
}

const std::vector<Scenario>& catalog() {
  static const std::vector<Scenario> cat = make_catalog();
  return cat;
}

std::vector<std::string> list_scenarios() {
  std::vector<std::string> out;
  for (const auto& s : catalog()) out.push_back(s.name);
  return out;
}

const Scenario& find_scenario(const std::string& name) {
  static const std::map<std::string, std::string> aliases{
      {"secondary_loop", "amnesia_secondary_loop"},
      {"twice_watched_pot", "twice_watched_pot_product"}};
  const auto alias = aliases.find(name);
  const std::string& key = alias == aliases.end() ? name : alias->second;
  for (const auto& s : catalog())
    if (s.name == key) return s;
  throw NotFound("unknown scenario '" + name + "'");
}

ParamMap resolve_params(const Scenario& scenario, const ParamMap& overrides) {
  ParamMap p;
  for (const auto& d : scenario.params) p[d.name] = d.default_value;
  for (const auto& [k, v] : overrides) {
    if (!p.count(k))
      throw ConfigError("scenario '" + scenario.name + "' has no parameter '" +
                        k + "'");
    if (!std::isfinite(v)) throw ConfigError("parameter '" + k + "' is not finite");
    p[k] = v;
  }
  return p;
}

Circuit build_scenario(const std::string& name, const ParamMap& overrides) {
  const auto& s = find_scenario(name);
  return s.build(resolve_params(s, overrides));
}

PostSelectionResult run_scenario(const Scenario& scenario,
                                 const ParamMap& params, const CtcModel& model,
                                 const EngineOptions& opts) {
  const Circuit c = scenario.build(params);
  const bool bell = std::holds_alternative<ExactBell>(model) ||
                    std::holds_alternative<NoisyBell>(model);
  if (scenario.power_channel && bell) {
    const auto mode = params.count("insulated") && params.at("insulated") != 0
                          ? ConditionalMode::Insulated
                          : ConditionalMode::Coupled;
    return run_conditional(c, *scenario.power_channel, model, mode, opts);
  }
  if (scenario.reference_pair && std::holds_alternative<ExactBell>(model))
    return run_reference_pair(c, scenario.reference_pair(params), opts);
  return run(c, model, opts);
}

std::vector<CheckResult> verify_scenario(const std::string& name,
                                         const ParamMap& overrides,
                                         const CtcModel& model,
                                         const EngineOptions& opts) {
  const auto& sc = find_scenario(name);
  const ParamMap params = resolve_params(sc, overrides);
  const ModelFamily fam = family_of(model);
  std::optional<PostSelectionResult> cached;
  std::optional<std::string> cached_error;
  const ProjectionSet* paradox_set = nullptr;
  std::shared_ptr<const ProjectionSet> hold;
  std::vector<CheckResult> out;
  for (const auto& e : sc.expectations) {
    if (e.family != fam) continue;
    out.push_back(check_one(sc, params, e, model, opts, cached, cached_error,
                            paradox_set, hold));
  }
  return out;
}

std::vector<CheckResult> verify_scenario_all(const std::string& name,
                                             const ParamMap& overrides,
                                             const EngineOptions& opts) {
  const auto& sc = find_scenario(name);
  std::vector<ModelFamily> families;
  for (const auto& e : sc.expectations)
    if (std::find(families.begin(), families.end(), e.family) == families.end())
      families.push_back(e.family);
  std::vector<CheckResult> out;
  for (auto f : families) {
    auto part = verify_scenario(name, overrides, representative_model(f), opts);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

}  // namespace ctcsim
