#pragma once

#include <string>
#include <vector>

#include "ctcsim/engine.hpp"

namespace ctcsim {

// Relative weight of the selected outcome against each orthogonal one:
// 4/lambda - 3 for the noisy Bell channel, 1/k - 1 for the classical one.
double skew_factor(const CtcModel& model);
double compose_skew(const std::vector<double>& omegas);

// Success probability after a post-selection with skew omega.
double boosted_success(double p_success, double omega);

// Inconclusive-outcome probability of a POVM after skewing.
double povm_inconclusive(double p_inconclusive, double omega);
// Inconclusive probability for the ambient states |a>, |b> mixed at angle
// theta, given the bare POVM value p_n.
double povm_ambient_inconclusive(double p_n, Complex overlap_ab, double theta);
// 1 - P_n(theta) + Pbar_n(theta)
double povm_mixture_weight(double p_n, Complex overlap_ab, double theta,
                           double omega);

struct EntropyReport {
  double delta_S = 0.0;
  double a_extremal = 0.0;  // a that extremizes delta_S when S0 = -ln a
  double Z_extremal = 0.0;
  double delta_S_extremal = 0.0;
};

// Entropy change when one outcome of probability a is skewed by omega and
// the rest of the ensemble (entropy S0 overall) is left alone.
EntropyReport entropy_skew(double a, double S0, double omega);
// Direct entropy change of a probability vector whose first entry is skewed.
double entropy_skew_direct(const std::vector<double>& probs, double omega);

double szilard_work(double x, double omega);
double tm_entropy_potential(double omega);

struct SzilardOptimum {
  double x = 0.0;
  double work = 0.0;
};
SzilardOptimum szilard_max_work(double omega);

// Probability that an n-fold parity-checked channel is correct.
double ec_fidelity(double eps, int n);

struct BiasReport {
  DensityOperator rho_bar;
  double Z_rho = 0.0;
};

// Sweeps one external qubit over the flat (theta, chi) measure and averages
// |psi><psi| weighted by Z(psi).
BiasReport input_bias(const Circuit& circuit, const std::string& channel,
                      const CtcModel& model, int nodes = 24);

// P(bit a != bit b) in the output state.
double flip_probability(const PostSelectionResult& result, const std::string& a,
                        const std::string& b);
// P(channel reads 1).
double excitation_probability(const PostSelectionResult& result,
                              const std::string& channel);

struct ParityReport {
  double E2 = 1.0;  // probability that the controls have even parity
  double D2 = 0.0;
  double k_eff = 0.0;
  std::vector<double> epsilons;  // |E2 - 1/2| after each control
};

// alphas are the |0> amplitudes (moduli) of the parity controls.
ParityReport parity_recursion(const std::vector<double>& alphas);

struct SearchErrorRates {
  double eps_omega = 0.0;
  double eps_chernoff = 0.0;
};

SearchErrorRates search_error_rates(double p0, double alpha_rate, double t,
                                    double gamma, double p);

// Weak value of A between U1 and U2 when the final post-selection onto
// `selected` is skewed by omega against the orthogonal directions.
Complex noisy_weak_value(const CVector& in, const CMatrix& u1, const CMatrix& a,
                         const CMatrix& u2, const CVector& selected,
                         const std::vector<CVector>& orthogonal, double omega);

}  // namespace ctcsim
