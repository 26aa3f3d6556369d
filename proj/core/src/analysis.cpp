#include "ctcsim/analysis.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/tools/minima.hpp>

#include "ctcsim/quadrature.hpp"

namespace ctcsim {

namespace {

void check_omega(double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega))
    throw ConfigError("skew factor must be positive and finite");
}

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0))
    throw ConfigError(std::string(what) + " must lie in [0, 1]");
}

}  // namespace

double skew_factor(const CtcModel& model) {
  if (auto* m = std::get_if<NoisyBell>(&model)) {
    check_probability(m->lambda, "lambda");
    if (m->lambda == 0.0) throw InfiniteSkew("noiseless Bell channel");
    return 4.0 / m->lambda - 3.0;
  }
  if (auto* m = std::get_if<Classical>(&model)) {
    check_probability(m->k, "k");
    if (m->k == 0.0) throw InfiniteSkew("noiseless classical channel");
    return 1.0 / m->k - 1.0;
  }
  if (std::holds_alternative<ExactBell>(model))
    throw InfiniteSkew("exact post-selection has no finite skew");
  throw UnsupportedError("skew factor is defined for the noisy channels only");
}

double compose_skew(const std::vector<double>& omegas) {
  double acc = 1.0;
  for (double o : omegas) {
    check_omega(o);
    acc *= o;
  }
  return acc;
}

double boosted_success(double p_success, double omega) {
  check_probability(p_success, "success probability");
  check_omega(omega);
  return omega * p_success / (omega * p_success + 1.0 - p_success);
}

double povm_inconclusive(double p_inconclusive, double omega) {
  check_probability(p_inconclusive, "inconclusive probability");
  check_omega(omega);
  return p_inconclusive /
         (p_inconclusive + omega - omega * p_inconclusive);
}

double povm_ambient_inconclusive(double p_n, Complex overlap_ab,
                                 double theta) {
  const double c = std::cos(theta);
  return 4.0 * p_n * c * c / (2.0 + 2.0 * overlap_ab.real());
}

double povm_mixture_weight(double p_n, Complex overlap_ab, double theta,
                           double omega) {
  const double pt = povm_ambient_inconclusive(p_n, overlap_ab, theta);
  return 1.0 - pt + povm_inconclusive(pt, omega);
}

EntropyReport entropy_skew(double a, double S0, double omega) {
  if (!(a > 0.0 && a <= 1.0)) throw ConfigError("a must lie in (0, 1]");
  check_omega(omega);
  EntropyReport r;
  const double zp = (omega - 1.0) * a + 1.0;
  r.delta_S = (1.0 / zp - 1.0) * (S0 + std::log(a)) + std::log(zp) -
              (a / zp) * omega * std::log(omega);
  if (omega == 1.0) {
    r.delta_S = 0.0;
    r.a_extremal = 0.5;
    r.Z_extremal = 1.0;
    r.delta_S_extremal = 0.0;
    return r;
  }
  const double lo = std::log(omega);
  const double om1 = omega - 1.0;
  r.a_extremal = (1.0 - omega + omega * lo) / (om1 * om1);
  r.Z_extremal = omega * lo / om1;
  r.delta_S_extremal = std::log(r.Z_extremal) - r.Z_extremal + 1.0;
  return r;
}

double entropy_skew_direct(const std::vector<double>& probs, double omega) {
  check_omega(omega);
  if (probs.empty()) throw ConfigError("empty probability vector");
  auto entropy = [](const std::vector<double>& p) {
    double s = 0.0;
    for (double v : p)
      if (v > 0.0) s -= v * std::log(v);
    return s;
  };
  std::vector<double> skewed = probs;
  skewed[0] *= omega;
  double z = 0.0;
  for (double v : skewed) z += v;
  for (double& v : skewed) v /= z;
  return entropy(skewed) - entropy(probs);
}

double szilard_work(double x, double omega) {
  if (!(x > 0.0 && x < 1.0)) throw ConfigError("x must lie in (0, 1)");
  check_omega(omega);
  const double pl = omega * x / ((omega - 1.0) * x + 1.0);
  return -pl * std::log(x) - (1.0 - pl) * std::log(1.0 - x) -
         std::numbers::ln2;
}

double tm_entropy_potential(double omega) {
  check_omega(omega);
  return std::log(omega);
}

SzilardOptimum szilard_max_work(double omega) {
  check_omega(omega);
  const int bits = std::numeric_limits<double>::digits / 2;
  auto neg = [omega](double x) { return -szilard_work(x, omega); };
  // W is concave on (0, 1) for the skews of interest; scan for the bracket
  // before refining so that very lopsided optima are not missed.
  double best_x = 0.5, best = neg(0.5);
  for (int i = 1; i < 1000; ++i) {
    const double x = i / 1000.0;
    const double v = neg(x);
    if (v < best) best = v, best_x = x;
  }
  const double lo = std::max(1e-12, best_x - 1e-3);
  const double hi = std::min(1.0 - 1e-12, best_x + 1e-3);
  auto res = boost::math::tools::brent_find_minima(neg, lo, hi, bits);
  return {res.first, -res.second};
}

double ec_fidelity(double eps, int n) {
  check_probability(eps, "eps");
  if (n < 0) throw ConfigError("n must be non-negative");
  const double good = std::pow(1.0 - eps, n + 1);
  const double bad = std::pow(eps, n);
  return good / (good + bad);
}

BiasReport input_bias(const Circuit& circuit, const std::string& channel,
                      const CtcModel& model, int nodes) {
  if (nodes < 4) throw ConfigError("input bias needs at least 4 nodes");
  const auto& ch = circuit.channel(channel);
  if (ch.role != ChannelRole::External)
    throw ConfigError("input bias sweeps an external channel");

  auto integrate = [&](int n, double& z_total) {
    const auto rt = gauss_legendre(n, 0.0, std::numbers::pi);
    const auto rx = periodic_trapezoid(n, 0.0, 2.0 * std::numbers::pi);
    CMatrix acc = CMatrix::Zero(2, 2);
    z_total = 0.0;
    for (std::size_t i = 0; i < rt.nodes.size(); ++i)
      for (std::size_t j = 0; j < rx.nodes.size(); ++j) {
        PureState psi = PureState::polar(channel, rt.nodes[i], rx.nodes[j]);
        const double z = partition_function(
            circuit.with_external_init(channel, psi), model);
        const double w = rt.weights[i] * rx.weights[j] * z;
        acc += w * (psi.amplitudes() * psi.amplitudes().adjoint());
        z_total += w;
      }
    return acc;
  };

  double z_fine = 0.0, z_check = 0.0;
  CMatrix fine = integrate(nodes, z_fine);
  CMatrix check = integrate(nodes + 8, z_check);
  if (!(z_fine > 0.0))
    throw ParadoxError("every input of the sweep is a paradox");
  if ((fine / z_fine - check / z_check).cwiseAbs().maxCoeff() > 1e-6 ||
      std::abs(z_fine - z_check) > 1e-6 * std::max(1.0, z_fine))
    throw NumericsError("input bias quadrature did not converge");
  return {DensityOperator({channel}, fine / z_fine), z_fine};
}

double flip_probability(const PostSelectionResult& result, const std::string& a,
                        const std::string& b) {
  return basis_probability(result.rho, {a, b}, {0, 1}) +
         basis_probability(result.rho, {a, b}, {1, 0});
}

double excitation_probability(const PostSelectionResult& result,
                              const std::string& channel) {
  return basis_probability(result.rho, {channel}, {1});
}

ParityReport parity_recursion(const std::vector<double>& alphas) {
  ParityReport r;
  for (double a : alphas) {
    if (!(a >= 0.0 && a <= 1.0))
      throw ConfigError("control amplitudes must lie in [0, 1]");
    const double a2 = a * a;
    const double e = r.E2 * a2 + r.D2 * (1.0 - a2);
    r.D2 = 1.0 - e;
    r.E2 = e;
    r.epsilons.push_back(std::abs(r.E2 - 0.5));
  }
  r.k_eff = r.D2;
  return r;
}

SearchErrorRates search_error_rates(double p0, double alpha_rate, double t,
                                    double gamma, double p) {
  if (!(p0 > 0.0 && p0 < 1.0)) throw ConfigError("p0 must lie in (0, 1)");
  SearchErrorRates r;
  r.eps_omega = 0.5 / (std::exp(alpha_rate * t) * p0 / (1.0 - p0) + 1.0);
  const double d = p - 0.5;
  r.eps_chernoff = std::exp(-2.0 * d * d * gamma * t);
  return r;
}

Complex noisy_weak_value(const CVector& in, const CMatrix& u1, const CMatrix& a,
                         const CMatrix& u2, const CVector& selected,
                         const std::vector<CVector>& orthogonal, double omega) {
  check_omega(omega);
  const CVector with_a = u2 * (a * (u1 * in));
  const CVector without = u2 * (u1 * in);
  Complex num = omega * selected.dot(with_a);
  Complex den = omega * selected.dot(without);
  for (const auto& o : orthogonal) {
    num += o.dot(with_a);
    den += o.dot(without);
  }
  if (std::abs(den) == 0.0) throw ParadoxError("weak value normalizer vanishes");
  return num / den;
}

}  // namespace ctcsim
