#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ctcsim/errors.hpp"

namespace ctcsim {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

// Dense simulation is capped at this many qubits per register.
inline constexpr std::size_t kMaxQubits = 14;

inline constexpr double kDefaultParadoxTolerance = 1e-12;

// A labelled register of qubits with a dense amplitude vector. The first
// label is the most significant bit of the basis index.
class PureState {
 public:
  PureState();
  PureState(std::vector<std::string> labels, CVector amplitudes);

  static PureState basis(std::vector<std::string> labels, std::uint64_t index);
  static PureState qubit(const std::string& label, Complex alpha, Complex beta);
  // cos(theta)|0> + e^{i chi} sin(theta)|1>
  static PureState polar(const std::string& label, double theta, double chi);

  const std::vector<std::string>& labels() const { return labels_; }
  const CVector& amplitudes() const { return amps_; }
  std::size_t num_qubits() const { return labels_.size(); }
  std::uint64_t dim() const { return static_cast<std::uint64_t>(amps_.size()); }

  Complex amplitude(std::uint64_t index) const { return amps_(index); }
  double norm_squared() const { return amps_.squaredNorm(); }
  double norm() const { return amps_.norm(); }

  bool has(const std::string& label) const;
  // Position of a label in the register; throws LabelError when absent.
  std::size_t position(const std::string& label) const;

  PureState reordered(const std::vector<std::string>& order) const;
  PureState relabeled(std::vector<std::string> labels) const;
  PureState scaled(Complex factor) const;

 private:
  std::vector<std::string> labels_;
  CVector amps_;
};

// Unitary (or explicitly flagged non-unitary perturbation) acting on k qubits.
class Operator {
 public:
  Operator() = default;
  explicit Operator(CMatrix matrix, bool perturbation = false);

  const CMatrix& matrix() const { return matrix_; }
  std::size_t arity() const { return arity_; }
  bool perturbation() const { return perturbation_; }
  bool is_unitary(double tol = 1e-10) const;

 private:
  CMatrix matrix_;
  std::size_t arity_ = 0;
  bool perturbation_ = false;
};

class DensityOperator {
 public:
  DensityOperator() = default;
  DensityOperator(std::vector<std::string> labels, CMatrix matrix);

  static DensityOperator pure(const PureState& state);

  const std::vector<std::string>& labels() const { return labels_; }
  const CMatrix& matrix() const { return matrix_; }
  std::size_t num_qubits() const { return labels_.size(); }

  Complex trace() const { return matrix_.trace(); }
  bool is_hermitian(double tol = 1e-10) const;
  double min_eigenvalue() const;
  std::size_t position(const std::string& label) const;
  DensityOperator reordered(const std::vector<std::string>& order) const;

 private:
  std::vector<std::string> labels_;
  CMatrix matrix_;
};

struct Projected {
  PureState state;
  double weight = 0.0;  // squared norm of the projected state
};

PureState tensor(const PureState& a, const PureState& b);
PureState apply_gate(const PureState& state, const Operator& op,
                     const std::vector<std::string>& targets);
// Contracts the channels in `subset` against bra (bra qubit i pairs with
// subset[i]). The remaining channels keep their original order.
Projected project(const PureState& state, const PureState& bra,
                  const std::vector<std::string>& subset);
// Result labels follow the order given in `keep`.
DensityOperator partial_trace(const DensityOperator& rho,
                              const std::vector<std::string>& keep);
std::pair<PureState, double> normalize(
    const PureState& state, double tol = kDefaultParadoxTolerance);

// Probability that the computational-basis bits of `channels` equal `bits`.
double basis_probability(const DensityOperator& rho,
                         const std::vector<std::string>& channels,
                         const std::vector<int>& bits);

}  // namespace ctcsim
