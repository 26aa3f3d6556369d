#include "ctcsim/state.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ctcsim {

namespace {

std::uint64_t bit_of(std::size_t n, std::size_t pos) {
  return std::uint64_t{1} << (n - 1 - pos);
}

void check_labels(const std::vector<std::string>& labels) {
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (l.empty()) throw LabelError("empty channel label");
    if (!seen.insert(l).second) throw LabelCollision("duplicate label: " + l);
  }
}

// Moves the bits at positions `from` of an n-bit index to a packed k-bit
// value, first entry most significant.
std::uint64_t gather_bits(std::uint64_t index, std::size_t n,
                          const std::vector<std::size_t>& from) {
  std::uint64_t v = 0;
  for (auto p : from) v = (v << 1) | ((index & bit_of(n, p)) ? 1 : 0);
  return v;
}

std::uint64_t scatter_bits(std::uint64_t value, std::size_t n,
                           const std::vector<std::size_t>& to) {
  std::uint64_t idx = 0;
  const std::size_t k = to.size();
  for (std::size_t i = 0; i < k; ++i) {
    if (value & (std::uint64_t{1} << (k - 1 - i))) idx |= bit_of(n, to[i]);
  }
  return idx;
}

std::vector<std::size_t> positions_of(const std::vector<std::string>& labels,
                                      const std::vector<std::string>& wanted) {
  std::vector<std::size_t> out;
  out.reserve(wanted.size());
  for (const auto& w : wanted) {
    auto it = std::find(labels.begin(), labels.end(), w);
    if (it == labels.end()) throw LabelError("unknown channel: " + w);
    out.push_back(static_cast<std::size_t>(it - labels.begin()));
  }
  return out;
}

std::vector<std::size_t> complement(std::size_t n,
                                    const std::vector<std::size_t>& taken) {
  std::vector<std::size_t> rest;
  for (std::size_t p = 0; p < n; ++p)
    if (std::find(taken.begin(), taken.end(), p) == taken.end())
      rest.push_back(p);
  return rest;
}

}  // namespace

PureState::PureState() : amps_(CVector::Ones(1)) {}

PureState::PureState(std::vector<std::string> labels, CVector amplitudes)
    : labels_(std::move(labels)), amps_(std::move(amplitudes)) {
  check_labels(labels_);
  if (labels_.size() > kMaxQubits)
    throw ConfigError("register exceeds " + std::to_string(kMaxQubits) +
                      " qubits");
  if (amps_.size() != (Eigen::Index{1} << labels_.size()))
    throw ArityError("amplitude vector size does not match label count");
  if (!amps_.allFinite()) throw ConfigError("non-finite amplitude");
}

PureState PureState::basis(std::vector<std::string> labels,
                           std::uint64_t index) {
  CVector v = CVector::Zero(Eigen::Index{1} << labels.size());
  if (index >= static_cast<std::uint64_t>(v.size()))
    throw ConfigError("basis index out of range");
  v(index) = 1.0;
  return PureState(std::move(labels), std::move(v));
}

PureState PureState::qubit(const std::string& label, Complex alpha,
                           Complex beta) {
  CVector v(2);
  v << alpha, beta;
  return PureState({label}, std::move(v));
}

PureState PureState::polar(const std::string& label, double theta,
                           double chi) {
  return qubit(label, std::cos(theta), std::polar(std::sin(theta), chi));
}

bool PureState::has(const std::string& label) const {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

std::size_t PureState::position(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw LabelError("unknown channel: " + label);
  return static_cast<std::size_t>(it - labels_.begin());
}

PureState PureState::reordered(const std::vector<std::string>& order) const {
  if (order.size() != labels_.size())
    throw LabelError("reorder must name every channel exactly once");
  auto pos = positions_of(labels_, order);
  const std::size_t n = labels_.size();
  CVector out(amps_.size());
  for (std::uint64_t i = 0; i < dim(); ++i) {
    // Bit j of the new index (MSB first) is the old bit at pos[j].
    out(gather_bits(i, n, pos)) = amps_(i);
  }
  return PureState(order, std::move(out));
}

PureState PureState::relabeled(std::vector<std::string> labels) const {
  return PureState(std::move(labels), amps_);
}

PureState PureState::scaled(Complex factor) const {
  return PureState(labels_, amps_ * factor);
}

Operator::Operator(CMatrix matrix, bool perturbation)
    : matrix_(std::move(matrix)), perturbation_(perturbation) {
  const auto d = matrix_.rows();
  if (d != matrix_.cols() || d < 2 || (d & (d - 1)) != 0)
    throw ArityError("operator must be a square 2^k matrix");
  while ((Eigen::Index{1} << arity_) < d) ++arity_;
  if (!matrix_.allFinite()) throw ConfigError("non-finite operator entry");
  if (!perturbation_ && !is_unitary())
    throw ConfigError(
        "operator is not unitary; non-unitary perturbations must be flagged");
}

bool Operator::is_unitary(double tol) const {
  const auto d = matrix_.rows();
  return (matrix_.adjoint() * matrix_ - CMatrix::Identity(d, d))
             .cwiseAbs()
             .maxCoeff() < tol;
}

DensityOperator::DensityOperator(std::vector<std::string> labels,
                                 CMatrix matrix)
    : labels_(std::move(labels)), matrix_(std::move(matrix)) {
  check_labels(labels_);
  const auto d = Eigen::Index{1} << labels_.size();
  if (matrix_.rows() != d || matrix_.cols() != d)
    throw ArityError("density matrix size does not match label count");
}

DensityOperator DensityOperator::pure(const PureState& state) {
  return DensityOperator(state.labels(),
                         state.amplitudes() * state.amplitudes().adjoint());
}

bool DensityOperator::is_hermitian(double tol) const {
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() < tol;
}

double DensityOperator::min_eigenvalue() const {
  CMatrix h = 0.5 * (matrix_ + matrix_.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

std::size_t DensityOperator::position(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw LabelError("unknown channel: " + label);
  return static_cast<std::size_t>(it - labels_.begin());
}

DensityOperator DensityOperator::reordered(
    const std::vector<std::string>& order) const {
  if (order.size() != labels_.size())
    throw LabelError("reorder must name every channel exactly once");
  return partial_trace(*this, order);
}

PureState tensor(const PureState& a, const PureState& b) {
  std::vector<std::string> labels = a.labels();
  for (const auto& l : b.labels()) {
    if (a.has(l)) throw LabelCollision("label appears in both states: " + l);
    labels.push_back(l);
  }
  if (labels.size() > kMaxQubits)
    throw ConfigError("register exceeds " + std::to_string(kMaxQubits) +
                      " qubits");
  CVector v(a.amplitudes().size() * b.amplitudes().size());
  const auto db = b.amplitudes().size();
  for (Eigen::Index i = 0; i < a.amplitudes().size(); ++i)
    v.segment(i * db, db) = a.amplitudes()(i) * b.amplitudes();
  return PureState(std::move(labels), std::move(v));
}

PureState apply_gate(const PureState& state, const Operator& op,
                     const std::vector<std::string>& targets) {
  if (targets.size() != op.arity())
    throw ArityError("gate acts on " + std::to_string(op.arity()) +
                     " qubits but " + std::to_string(targets.size()) +
                     " targets were given");
  auto pos = positions_of(state.labels(), targets);
  for (std::size_t i = 0; i < pos.size(); ++i)
    for (std::size_t j = i + 1; j < pos.size(); ++j)
      if (pos[i] == pos[j]) throw LabelError("repeated gate target");

  const std::size_t n = state.num_qubits();
  const std::uint64_t local = std::uint64_t{1} << pos.size();
  std::vector<std::uint64_t> offsets(local);
  for (std::uint64_t v = 0; v < local; ++v)
    offsets[v] = scatter_bits(v, n, pos);
  std::uint64_t mask = 0;
  for (auto p : pos) mask |= bit_of(n, p);

  const CVector& in = state.amplitudes();
  const CMatrix& m = op.matrix();
  CVector out = CVector::Zero(in.size());
  CVector buf(local);
  for (std::uint64_t base = 0; base < state.dim(); ++base) {
    if (base & mask) continue;
    for (std::uint64_t v = 0; v < local; ++v) buf(v) = in(base | offsets[v]);
    for (std::uint64_t r = 0; r < local; ++r) {
      Complex acc = 0.0;
      for (std::uint64_t c = 0; c < local; ++c) acc += m(r, c) * buf(c);
      out(base | offsets[r]) = acc;
    }
  }
  return PureState(state.labels(), std::move(out));
}

Projected project(const PureState& state, const PureState& bra,
                  const std::vector<std::string>& subset) {
  if (subset.size() != bra.num_qubits())
    throw ArityError("bra size does not match projected subset");
  if (std::abs(bra.norm_squared() - 1.0) > 1e-10)
    throw ConfigError("projection bra must be normalized");
  auto pos = positions_of(state.labels(), subset);
  for (std::size_t i = 0; i < pos.size(); ++i)
    for (std::size_t j = i + 1; j < pos.size(); ++j)
      if (pos[i] == pos[j]) throw LabelError("repeated projection channel");

  const std::size_t n = state.num_qubits();
  auto rest = complement(n, pos);
  std::vector<std::string> rest_labels;
  for (auto p : rest) rest_labels.push_back(state.labels()[p]);

  CVector out = CVector::Zero(Eigen::Index{1} << rest.size());
  const CVector& in = state.amplitudes();
  for (std::uint64_t i = 0; i < state.dim(); ++i) {
    if (in(i) == Complex(0.0)) continue;
    const auto s = gather_bits(i, n, pos);
    const auto r = gather_bits(i, n, rest);
    out(r) += std::conj(bra.amplitude(s)) * in(i);
  }
  PureState result(std::move(rest_labels), std::move(out));
  const double w = result.norm_squared();
  return {std::move(result), w};
}

DensityOperator partial_trace(const DensityOperator& rho,
                              const std::vector<std::string>& keep) {
  auto pos = positions_of(rho.labels(), keep);
  for (std::size_t i = 0; i < pos.size(); ++i)
    for (std::size_t j = i + 1; j < pos.size(); ++j)
      if (pos[i] == pos[j]) throw LabelError("repeated channel in keep list");
  const std::size_t n = rho.num_qubits();
  auto traced = complement(n, pos);
  const std::uint64_t dk = std::uint64_t{1} << pos.size();
  const std::uint64_t dt = std::uint64_t{1} << traced.size();

  std::vector<std::uint64_t> kidx(dk), tidx(dt);
  for (std::uint64_t v = 0; v < dk; ++v) kidx[v] = scatter_bits(v, n, pos);
  for (std::uint64_t v = 0; v < dt; ++v) tidx[v] = scatter_bits(v, n, traced);

  const CMatrix& m = rho.matrix();
  CMatrix out = CMatrix::Zero(dk, dk);
  for (std::uint64_t a = 0; a < dk; ++a)
    for (std::uint64_t b = 0; b < dk; ++b) {
      Complex acc = 0.0;
      for (std::uint64_t t = 0; t < dt; ++t)
        acc += m(kidx[a] | tidx[t], kidx[b] | tidx[t]);
      out(a, b) = acc;
    }
  return DensityOperator(keep, std::move(out));
}

std::pair<PureState, double> normalize(const PureState& state, double tol) {
  const double n = state.norm();
  if (!(n >= tol))
    throw ParadoxError("state norm " + std::to_string(n) +
                       " is below the paradox tolerance");
  return {state.scaled(1.0 / n), n};
}

double basis_probability(const DensityOperator& rho,
                         const std::vector<std::string>& channels,
                         const std::vector<int>& bits) {
  if (channels.size() != bits.size())
    throw ArityError("one bit value is needed per channel");
  auto reduced = partial_trace(rho, channels);
  std::uint64_t idx = 0;
  for (int b : bits) {
    if (b != 0 && b != 1) throw ConfigError("bit values must be 0 or 1");
    idx = (idx << 1) | static_cast<std::uint64_t>(b);
  }
  const double tr = reduced.trace().real();
  return reduced.matrix()(idx, idx).real() / tr;
}

}  // namespace ctcsim
