#pragma once

// Shared test utilities: a seeded random circuit generator and oracles that
// recompute engine quantities straight from the compiled unitary.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "ctcsim/circuit.hpp"
#include "ctcsim/engine.hpp"

namespace ctcsim::testing {

inline constexpr double kPi = std::numbers::pi;

inline CVector random_vector(std::mt19937& rng, Eigen::Index n) {
  std::normal_distribution<double> g;
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(g(rng), g(rng));
  return v / v.norm();
}

inline PureState random_state(std::mt19937& rng,
                              std::vector<std::string> labels) {
  const Eigen::Index n = Eigen::Index{1} << labels.size();
  return PureState(std::move(labels), random_vector(rng, n));
}

inline CMatrix random_unitary(std::mt19937& rng, Eigen::Index n) {
  std::normal_distribution<double> g;
  CMatrix a(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) a(r, c) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<CMatrix> qr(a);
  return qr.householderQ();
}

struct RandomCircuitSpec {
  int min_ctc = 1, max_ctc = 2;
  int min_ext = 0, max_ext = 3;
  int max_gates = 8;
};

// Channels are named c0.. (CTC) and e0.. (external) and shuffled together so
// that declaration order exercises the register bookkeeping.
inline Circuit random_circuit(std::mt19937& rng, RandomCircuitSpec spec = {}) {
  std::uniform_int_distribution<int> nctc(spec.min_ctc, spec.max_ctc);
  std::uniform_int_distribution<int> next(spec.min_ext, spec.max_ext);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  const int m = nctc(rng), e = next(rng);
  std::vector<Channel> channels;
  std::vector<std::string> labels;
  for (int i = 0; i < m; ++i) {
    labels.push_back("c" + std::to_string(i));
    channels.push_back(ctc_channel(labels.back()));
  }
  for (int i = 0; i < e; ++i) {
    labels.push_back("e" + std::to_string(i));
    channels.push_back(external_channel(
        labels.back(), PureState::polar("x", std::abs(angle(rng)), angle(rng))));
  }
  std::shuffle(channels.begin(), channels.end(), rng);

  static const GateKind kinds[] = {GateKind::X,     GateKind::Z,     GateKind::Rot,
                                   GateKind::Phase, GateKind::Swap,  GateKind::CX,
                                   GateKind::CZ,    GateKind::CRot,  GateKind::CPhase,
                                   GateKind::CCRot, GateKind::Toffoli};
  std::uniform_int_distribution<int> ngates(0, spec.max_gates);
  std::uniform_int_distribution<std::size_t> pick(0, std::size(kinds) - 1);
  std::vector<Gate> gates;
  const int count = ngates(rng);
  while (static_cast<int>(gates.size()) < count) {
    const GateKind k = kinds[pick(rng)];
    const std::size_t arity = gate_arity(k);
    if (arity > labels.size()) continue;
    std::vector<std::string> pool = labels;
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(arity);
    gates.push_back(make_gate(k, pool, gate_takes_angle(k) ? angle(rng) : 0.0));
  }
  return build_circuit(std::move(channels), std::move(gates));
}

// Blocks M_ab = <a|U|b> of the compiled unitary, acting on the external
// register (external channels in declared order). a and b index the CTC
// register big-endian in declared order.
class LoopBlocks {
 public:
  explicit LoopBlocks(const Circuit& c) : u_(compile_unitary(c)) {
    const auto labels = c.labels();
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const bool ctc = c.channel(labels[i]).role == ChannelRole::Ctc;
      (ctc ? ctc_pos_ : ext_pos_).push_back(labels.size() - 1 - i);
    }
    psi_ = c.external_state().amplitudes();
  }

  std::size_t loop_dim() const { return std::size_t{1} << ctc_pos_.size(); }
  std::size_t ext_dim() const { return std::size_t{1} << ext_pos_.size(); }
  std::size_t loops() const { return ctc_pos_.size(); }

  CMatrix block(std::size_t a, std::size_t b) const {
    CMatrix m(ext_dim(), ext_dim());
    for (std::size_t r = 0; r < ext_dim(); ++r)
      for (std::size_t col = 0; col < ext_dim(); ++col)
        m(r, col) = u_(index(a, r), index(b, col));
    return m;
  }

  // M_ab applied to the external initial state.
  CVector applied(std::size_t a, std::size_t b) const { return block(a, b) * psi_; }

  const CVector& input() const { return psi_; }

 private:
  std::size_t index(std::size_t loop, std::size_t ext) const {
    std::size_t out = 0;
    // Positions are bit offsets from the least significant end; the first
    // declared channel of each kind is the most significant of its register.
    for (std::size_t i = 0; i < ctc_pos_.size(); ++i)
      if ((loop >> (ctc_pos_.size() - 1 - i)) & 1U) out |= std::size_t{1} << ctc_pos_[i];
    for (std::size_t i = 0; i < ext_pos_.size(); ++i)
      if ((ext >> (ext_pos_.size() - 1 - i)) & 1U) out |= std::size_t{1} << ext_pos_[i];
    return out;
  }

  CMatrix u_;
  std::vector<std::size_t> ctc_pos_, ext_pos_;
  CVector psi_;
};

// Bell pair coefficients L(r, l) over (reference bit, loop bit).
inline Eigen::Matrix2cd bell_coefficients(BellLabel label) {
  const double h = 1.0 / std::sqrt(2.0);
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  switch (label) {
    case BellLabel::B: m(0, 0) = h, m(1, 1) = h; break;
    case BellLabel::Minus: m(0, 0) = h, m(1, 1) = -h; break;
    case BellLabel::N: m(0, 1) = h, m(1, 0) = h; break;
    case BellLabel::MinusN: m(0, 1) = h, m(1, 0) = -h; break;
  }
  return m;
}

// <L_1 ... L_m | (I_ref x U) |Bell^m, psi>: with the reference bits equal to
// b, the projection is 2^{-m/2} sum_{a,b} conj(L(b, a)) M_ab psi.
inline CVector bell_projection_oracle(const LoopBlocks& lb,
                                      const std::vector<BellLabel>& labels) {
  const std::size_t m = lb.loops();
  CVector out = CVector::Zero(lb.ext_dim());
  for (std::size_t a = 0; a < lb.loop_dim(); ++a)
    for (std::size_t b = 0; b < lb.loop_dim(); ++b) {
      Complex coef = std::pow(2.0, -0.5 * m);
      for (std::size_t i = 0; i < m; ++i) {
        const int ai = (a >> (m - 1 - i)) & 1, bi = (b >> (m - 1 - i)) & 1;
        coef *= std::conj(bell_coefficients(labels[i])(bi, ai));
      }
      if (coef != Complex(0.0)) out += coef * lb.applied(a, b);
    }
  return out;
}

inline std::vector<std::vector<BellLabel>> all_bell_labels(std::size_t m) {
  std::vector<std::vector<BellLabel>> out{{}};
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<std::vector<BellLabel>> next;
    for (const auto& prefix : out)
      for (BellLabel l : {BellLabel::B, BellLabel::Minus, BellLabel::N, BellLabel::MinusN}) {
        auto v = prefix;
        v.push_back(l);
        next.push_back(v);
      }
    out = next;
  }
  return out;
}

inline std::string join_labels(const std::vector<BellLabel>& ls) {
  std::string s;
  for (std::size_t i = 0; i < ls.size(); ++i) s += (i ? "," : "") + to_string(ls[i]);
  return s;
}

struct Mixture {
  double Z = 0.0;
  CMatrix rho;
};

inline Mixture mixture(const std::vector<std::pair<double, CVector>>& parts) {
  Mixture m;
  m.rho = CMatrix::Zero(parts.front().second.size(), parts.front().second.size());
  for (const auto& [w, v] : parts) {
    m.rho += w * v * v.adjoint();
    m.Z += w * v.squaredNorm();
  }
  m.rho /= m.Z;
  return m;
}

// Noisy Bell channel with independent errors per loop.
inline Mixture noisy_bell_oracle(const Circuit& c, double lambda) {
  LoopBlocks lb(c);
  std::vector<std::pair<double, CVector>> parts;
  for (const auto& ls : all_bell_labels(lb.loops())) {
    double w = 1.0;
    for (auto l : ls) w *= l == BellLabel::B ? 1.0 - 0.75 * lambda : 0.25 * lambda;
    parts.push_back({w, bell_projection_oracle(lb, ls)});
  }
  return mixture(parts);
}

// Weighted eigenpair sum with omega(i, j) weighting <e_j|U|e_i, psi>.
inline Mixture eigenpair_oracle(const Circuit& c, const Eigen::MatrixXd& omega) {
  LoopBlocks lb(c);
  std::vector<std::pair<double, CVector>> parts;
  for (std::size_t i = 0; i < lb.loop_dim(); ++i)
    for (std::size_t j = 0; j < lb.loop_dim(); ++j)
      parts.push_back({omega(i, j), lb.applied(j, i)});
  return mixture(parts);
}

// Closed-form flat-measure moments for a single loop qubit:
//   int cos^4 = 3 pi^2 / 4, int cos^2 sin^2 = pi^2 / 4, phases average out.
inline Mixture delta_moment_oracle(const Circuit& c) {
  LoopBlocks lb(c);
  const CVector m00 = lb.applied(0, 0), m11 = lb.applied(1, 1);
  const CVector m01 = lb.applied(0, 1), m10 = lb.applied(1, 0);
  const double q = kPi * kPi / 4;
  Mixture out;
  out.Z = q * (3 * (m00.squaredNorm() + m11.squaredNorm()) +
               2 * std::real(m00.dot(m11)) + m01.squaredNorm() + m10.squaredNorm());
  CMatrix acc = 3 * (m00 * m00.adjoint() + m11 * m11.adjoint()) + m00 * m11.adjoint() +
                m11 * m00.adjoint() + m01 * m01.adjoint() + m10 * m10.adjoint();
  out.rho = q * acc / out.Z;
  return out;
}

struct MonteCarlo {
  double mean = 0.0;
  double stderr_ = 0.0;
};

// Plain Monte Carlo over the flat (theta, xi) box of area 2 pi^2.
inline MonteCarlo delta_monte_carlo(const Circuit& c, std::size_t samples,
                                    std::uint32_t seed) {
  LoopBlocks lb(c);
  const CVector m00 = lb.applied(0, 0), m11 = lb.applied(1, 1);
  const CVector m01 = lb.applied(0, 1), m10 = lb.applied(1, 0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> th(0.0, kPi), xi(0.0, 2 * kPi);
  const double area = 2 * kPi * kPi;
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const double t = th(rng), x = xi(rng);
    const Complex p0 = std::cos(t), p1 = std::polar(std::sin(t), x);
    const CVector v = std::conj(p0) * p0 * m00 + std::conj(p0) * p1 * m01 +
                      std::conj(p1) * p0 * m10 + std::conj(p1) * p1 * m11;
    const double f = area * v.squaredNorm();
    sum += f;
    sum2 += f * f;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  return {mean, std::sqrt(std::max(0.0, sum2 / n - mean * mean) / n)};
}

inline double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace ctcsim::testing
