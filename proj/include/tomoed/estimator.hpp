#pragma once

#include <map>
#include <optional>

#include "tomoed/barrier.hpp"
#include "tomoed/problems.hpp"

namespace tomoed {

struct LikelihoodSpec {
  EstimationProblem problem;
  CountData data;
  std::optional<RVec> ls_weights;  // per configuration; default ell_g / ell_expt
};

struct EstimateReport {
  ParamPoint estimate;
  double neg_loglik = 0.0;
  double lower_bound = 0.0;    // empirical bound -sum n log(n/ell)
  double gap = 0.0;            // certified optimality gap (absolute)
  double kkt_residual = 0.0;   // relative certified suboptimality
  int iterations = 0;
  bool converged = false;
  std::vector<RVec> fitted_probs;

  // per-variant diagnostics
  std::optional<double> purity;            // Tr rho^2
  std::optional<bool> purity_boundary;     // Tr rho^2 >= 1 - 1e-6
  std::optional<RVec> eigenvalues;         // of the state estimate (LS paths keep negatives)
  std::optional<double> trace_x;
  std::optional<double> trace_cap;         // echoed when given
  std::optional<Index> kraus_rank;         // count of s_k > 1e-6
  std::optional<bool> identifiable;        // Fisher-rank flag (distribution problems)
  std::optional<double> fisher_condition;
  std::vector<RVec> local_minima;          // Hamiltonian grid-local minima (refined)
  std::vector<double> local_minima_values;
};

/// Empirical lower bound -sum n log(n/ell) (zero-count terms dropped).
double empirical_lower_bound(const CountData& data);

EstimateReport mle_state(const LikelihoodSpec& spec);
EstimateReport mle_state_pure_relaxed(const LikelihoodSpec& spec);
EstimateReport ls_state(const LikelihoodSpec& spec, bool keep_psd);
EstimateReport mle_state_distribution(const LikelihoodSpec& spec);
EstimateReport mle_superoperator(const LikelihoodSpec& spec, std::optional<double> trace_cap = {});
EstimateReport mle_osr_distribution(const LikelihoodSpec& spec);

struct GridRefineSettings {
  Index points_per_dim = 201;
  int max_refine_sweeps = 80;
  double grad_tol = 1e-6;
};
EstimateReport mle_hamiltonian(const LikelihoodSpec& spec, const GridRefineSettings& settings = {});

}  // namespace tomoed
