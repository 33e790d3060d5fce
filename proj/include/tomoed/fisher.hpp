#pragma once

#include <optional>
#include <string>

#include "tomoed/problems.hpp"

namespace tomoed {

/// Per-configuration information matrices G_gamma over the free parameters,
/// all real symmetric PSD of size d x d.
struct FisherModel {
  std::vector<RMat> blocks;
  std::vector<std::string> labels;
  Index d = 0;
  std::string parameterization;  // "state" | "state-dist" | "superop" | "osr-dist" | "hamiltonian"

  Index n_cfg() const { return static_cast<Index>(blocks.size()); }
  /// G(w) = sum_g w_g G_g.
  RMat aggregate(const RVec& w) const;
};

struct BoundReport {
  double value = 0.0;          // V = Tr G^{-1}
  RMat g;                      // aggregated information matrix
  double condition = 0.0;
  bool identifiable = true;
};

struct IdentifiabilityRecord {
  Index rank = 0;
  double condition = 0.0;
  bool identifiable = true;
  RVec spectrum;               // eigenvalues ascending
  RMat near_null;              // eigenvectors under threshold (d x k)
};

struct FisherOptions {
  Exec exec = Exec::Parallel;
  double fd_step_scale = 1e-5;     // h = scale * (1 + |theta_i|)
  double zero_prob_tol = 1e-12;
  bool keep_hessian_term = true;   // Hamiltonian case: subtract grad^2 p term
};

/// Per-configuration Fisher blocks at the surrogate point.
/// Affine parameterizations use the exact a a^T / p form; the Hamiltonian case
/// uses central finite differences, with the exact curvature limit
/// 2(p(+h)+p(-h))/h^2 substituted for outcomes where p and grad p both vanish.
/// Throws ZeroProbability when an informative outcome has p <= tol.
FisherModel fisher_blocks(const EstimationProblem& problem, const ParamPoint& surrogate,
                          const FisherOptions& opts = {});

/// Cramer-Rao bound value for an allocation (counts ell or fractions lambda).
/// Throws NotIdentifiable when the aggregate is singular (cond > 1e12).
BoundReport crb_value(const FisherModel& model, const RVec& allocation);

IdentifiabilityRecord identifiability(const FisherModel& model, double cond_threshold = 1e12);

/// det of the 3x3 linear system of the bit-flip/depolarizing channel for input
/// amplitudes (a, b); zero iff Re(a b*) (|b|^2 - |a|^2) = 0.
double channel_det_R(Complex a, Complex b);

}  // namespace tomoed
