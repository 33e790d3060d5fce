#pragma once

#include <cstdint>

#include "tomoed/problems.hpp"

namespace tomoed {

/// Counter-based random stream (SplitMix64): output k is a bit-mix of
/// seed-derived counter + k, so identical seeds give identical sequences on
/// every platform. Replicate streams are derived through the same mixer.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(seed) {}
  static RngStream derived(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();
  double next_double();  // in [0, 1)
  /// Exact Binomial(n, p) by counting Bernoulli draws.
  std::int64_t binomial(std::int64_t n, double p);
  /// Multinomial via sequential conditional binomials; sums to trials exactly.
  RVec multinomial(std::int64_t trials, const RVec& probs);

 private:
  std::uint64_t state_;
};

/// Multinomial counts per configuration: E n = ell_g p(truth).
CountData sample_counts(const EstimationProblem& problem, const ParamPoint& truth, const RVec& ell,
                        RngStream& rng);

struct LikelihoodCurve {
  std::vector<RVec> grid;      // theta values
  std::vector<double> values;  // E L(theta); +inf where the model hits p=0 on a p_true>0 outcome
  std::vector<double> normalized;  // divided by the finite minimum
  Index argmin = 0;
};

/// Average likelihood E L(theta) = -sum over configs/outcomes of
/// ell_g p(theta_true) log p(theta), on a grid.
LikelihoodCurve average_likelihood(const EstimationProblem& problem, const ParamPoint& truth,
                                   const RVec& ell, const std::vector<RVec>& grid);

/// Pulsed control schedule: five control amplitudes per segment plus duration.
struct PulseSegment {
  RVec controls;  // (e1z, e1x, e2z, e2x, ec)
  double dt = 0.0;
};
struct PulseTable {
  std::vector<PulseSegment> segments;
  void validate() const;
};

/// Sequential product of per-segment propagators of the two-qubit Bell-gate
/// Hamiltonian with parameters omega = (omega0, omega1, omega_c).
CMat pulse_gate(const PulseTable& table, const RVec& omega);

// ---- adaptive demonstrations ------------------------------------------------

/// One round of the indirect-adaptive iteration.
struct AdaptiveRound {
  RVec control;
  RVec lambda;
  RVec ell;
  RVec theta_hat;
  double wc_fidelity = 0.0;
  double neg_loglik = 0.0;
};

struct AdaptiveMleLoop {
  std::function<RVec(const RVec& theta_hat)> control_rule;
  std::function<HamiltonianProblem(const RVec& control)> problem_for_control;
  std::function<CMat(const RVec& control, const RVec& theta)> realized_gate;
  CMat desired_gate;
  RVec theta_true;
  double lexpt = 1e5;
  int rounds = 3;
  std::uint64_t seed = 0;
};
/// Estimate/design/collect loop: OED design at the current estimate, simulate
/// counts from the true parameters, refit, report gate fidelity per round.
std::vector<AdaptiveRound> run_adaptive_mle(const AdaptiveMleLoop& loop, const RVec& theta0);

struct HillClimbLoop {
  std::function<double(double theta_model, double theta_hat)> expected_nll;
  std::function<double(double theta_hat)> realized_fidelity;  // optional; may be null
  double bracket = 0.03;  // golden-section window half-width, relative
  int rounds = 12;
};
struct HillClimbRound {
  double theta_hat = 0.0;
  double expected_nll = 0.0;
  double fidelity = 0.0;
};
/// Local hill climb on the average likelihood (Sec. 7.1 demo): each round
/// minimizes the expected negative log-likelihood in a bracket around the
/// current estimate.
std::vector<HillClimbRound> run_adaptive_hillclimb(const HillClimbLoop& loop, double theta0);

// ---- Sec. 7.2 landscape ------------------------------------------------------

struct BipartiteLandscape {
  double w_qz = 1.0, w_qx = 0.01, w_ez = 1.0, w_ex = 0.0, w_qe = 0.005;
};
struct LandscapeResult {
  RVec eps_z, eps_x;
  RMat p;             // outcome probability over the grid
  double max_value = 0.0;
  double argmax_ez = 0.0, argmax_ex = 0.0;
  int local_maxima = 0;  // strict 4-neighbourhood maxima
};
/// p(eps) = Tr M U(tf) rho0 U(tf)^H for constant controls over the grid, with
/// rho0 = |1><1| (x) I/2, M = |0><0| (x) I, tf = pi / w_qx.
LandscapeResult landscape_scan(const BipartiteLandscape& model, const RVec& eps_z_grid,
                               const RVec& eps_x_grid, Exec exec = Exec::Parallel);

}  // namespace tomoed
