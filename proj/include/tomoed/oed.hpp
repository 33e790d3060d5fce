#pragma once

#include <functional>
#include <optional>

#include "tomoed/fisher.hpp"

namespace tomoed {

struct DualCertificate {
  RMat w;                      // PSD dual matrix, Tr(W G_g) <= 1 feasible
  double dual_value = 0.0;     // (Tr W^{1/2})^2
  double duality_gap = 0.0;    // V - dual_value
  double max_slack = 0.0;      // max_g Tr(W G_g) - 1 before feasibility scaling
  double cs_residual = 0.0;    // max_g lambda_g |Tr(W G_g) - 1|
  RVec slacks;                 // Tr(W G_g) - 1 per configuration
};

struct Design {
  RVec lambda;
  double v_lambda = 0.0;           // V(lambda) = Tr G(lambda)^{-1}
  double kkt_residual = 0.0;
  double condition = 0.0;          // of G(lambda)
  std::optional<RVec> rounding;            // ell = round(lexpt * lambda)
  std::optional<double> lexpt;
  std::optional<double> v_scaled;          // V(lexpt * lambda)
  std::optional<double> v_rounded;         // V(ell_round)
  std::optional<double> rounded_total;     // sum ell (round() does not repair it)
  std::optional<DualCertificate> certificate;
};

struct DesignOptions {
  double gap_tol = 1e-9;      // n_cfg * mu stop
  double newton_tol = 1e-13;
  int max_newton = 5000;
};

/// Relaxed A-optimal design: minimize Tr G(lambda)^{-1} on the simplex, by a
/// barrier Newton method with the equality handled through a KKT step.
/// Throws NotIdentifiable if even the uniform allocation is singular.
Design solve_design(const FisherModel& model, const DesignOptions& opts = {});

/// Attach ell = round(lexpt*lambda) and both Eq-bnds values to the design.
/// Throws AllZero when every entry rounds to zero.
void round_design(Design& d, const FisherModel& model, double lexpt);

struct TruncationTradeoff {
  Index n_sub = 0;
  RVec lambda_sub;            // kept support, renormalized
  double v_sub = 0.0;
  double ell_sub = 0.0;       // round(V(lambda_sub)/V0)
};

/// Keep the n_sub largest entries of the design, renormalize, and return the
/// minimum experiment count for target variance v0.
/// Throws TruncationNotIdentifiable when the kept support is singular.
TruncationTradeoff truncate_design(const Design& d, const FisherModel& model, Index n_sub, double v0);

/// Full (n_sub, ell_sub) tradeoff sweep; entries may be computed in parallel.
std::vector<TruncationTradeoff> truncation_sweep(const Design& d, const FisherModel& model,
                                                 const std::vector<Index>& sizes, double v0,
                                                 Exec exec = Exec::Parallel);

/// Recover the dual certificate W = G(lambda)^{-2} / V (scaled into
/// feasibility) and verify the optimality system.
/// Throws CertificateFailed when residuals exceed 10x tolerance.
DualCertificate dual_certificate(const Design& d, const FisherModel& model, double tol = 1e-6);

/// One bootstrapping round record (estimate / design / round loop of Sec 2.3).
struct BootstrapRound {
  ParamPoint estimate;
  RVec lambda;
  RVec ell;
  double v_lambda = 0.0;
  double neg_loglik = 0.0;
};

struct BootstrapSettings {
  int rounds = 1;
  double lexpt_per_round = 1000;
  std::uint64_t seed = 0;
};

/// Alternates simulate -> estimate -> design -> round, starting from a given
/// allocation. The estimator and simulator are injected so the loop stays
/// decoupled from solver choices. No convergence is asserted.
using EstimateFn = std::function<ParamPoint(const CountData&)>;
using SimulateFn = std::function<CountData(const RVec& ell, std::uint64_t round_seed)>;
std::vector<BootstrapRound> bootstrap(const EstimationProblem& problem, const RVec& initial_ell,
                                      const BootstrapSettings& settings, const EstimateFn& estimate,
                                      const SimulateFn& simulate);

}  // namespace tomoed
