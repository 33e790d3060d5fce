#pragma once

#include <variant>

#include "tomoed/qmodel.hpp"

namespace tomoed {

/// Affine probability structure over the free parameters z (equality
/// constraints already eliminated): p_{gamma,alpha}(z) = base[g](a) + A[g](a,:) z.
///
/// Outcomes flagged in structurally_zero have identically vanishing
/// probability (zero POVM element / zero R matrix); they carry no information
/// and are skipped by likelihood and Fisher evaluation.
struct AffineView {
  std::vector<RVec> base;
  std::vector<RMat> coef;
  std::vector<std::vector<bool>> structurally_zero;
  Index d = 0;

  Index n_cfg() const { return static_cast<Index>(base.size()); }
  RVec probs(Index g, const RVec& z) const {
    return base[static_cast<size_t>(g)] + coef[static_cast<size_t>(g)] * z;
  }
};

/// State tomography: p = Tr(O rho), parameter rho with Tr rho = 1 eliminated.
struct StateProblem {
  ConfigurationEnsemble ensemble;

  Index dim() const { return ensemble.dim(); }
  AffineView affine() const;
  RVec point_to_z(const DensityMatrix& rho) const;
  DensityMatrix z_to_point(const RVec& z) const;
};

/// Distribution of known input states: p = a^T f on the simplex.
struct StateDistProblem {
  std::vector<PovmSet> povms;          // per configuration
  std::vector<std::string> labels;     // optional
  std::vector<DensityMatrix> input_states;

  Index n_in() const { return static_cast<Index>(input_states.size()); }
  AffineView affine() const;
  RVec point_to_z(const RVec& f) const;
  RVec z_to_point(const RVec& z) const;  // returns f
};

/// OSR in a fixed basis: p = Tr(X R), completeness equality eliminated via the
/// nullspace of the constraint map (Appendix machinery, cached per dimension).
struct SuperopProblem {
  ConfigurationEnsemble ensemble;
  HermBasis op_basis;

  SuperopProblem(ConfigurationEnsemble e, HermBasis b)
      : ensemble(std::move(e)), op_basis(std::move(b)) {}

  Index dim() const { return ensemble.dim(); }
  const std::vector<std::vector<CMat>>& r_matrices() const;
  AffineView affine() const;
  RVec point_to_z(const Superoperator& x) const;
  Superoperator z_to_point(const RVec& z) const;

 private:
  mutable std::vector<std::vector<CMat>> r_cache_;
};

/// Distribution over known Kraus perturbations: p = a^T q on the simplex.
/// Each component k is a group of Kraus matrices sharing the weight q_k (a
/// plain Kraus element is a singleton group; the depolarizing channel is a
/// four-element group).
struct OsrDistProblem {
  ConfigurationEnsemble ensemble;
  std::vector<std::vector<CMat>> kraus_bar;  // known K-bar groups
  RVec weight_check;            // q for the weighted completeness check; empty to skip

  Index kappa() const { return static_cast<Index>(kraus_bar.size()); }
  void validate() const;  // weighted completeness sum q_k Kbar^H Kbar = I
  AffineView affine() const;
  RVec point_to_z(const RVec& q) const;
  RVec z_to_point(const RVec& z) const;
};

/// Hamiltonian parameter estimation; configurations are (input beta, time tau)
/// pairs in row-major (beta outer, tau inner) order. Not affine in theta.
struct HamiltonianProblem {
  HamiltonianModel model;

  Index n_cfg() const {
    return static_cast<Index>(model.inputs.size() * model.sample_times.size());
  }
  /// Probability table for all configurations at theta.
  std::vector<RVec> probs(const RVec& theta) const;
  std::string config_label(Index g) const;
};

using EstimationProblem =
    std::variant<StateProblem, StateDistProblem, SuperopProblem, OsrDistProblem, HamiltonianProblem>;

/// Parameter value for the generic interfaces; the problem type disambiguates
/// the RVec case (f, q or theta).
using ParamPoint = std::variant<DensityMatrix, Superoperator, RVec>;

/// Outcome probability table p_{alpha gamma}(point). Enforces feasibility of
/// the point within 1e-8, clamps eigensolver-noise negatives in (-1e-12, 0) to
/// zero and raises InfeasiblePoint beyond that.
std::vector<RVec> outcome_probs(const EstimationProblem& problem, const ParamPoint& point);

/// Free-parameter count of the problem (n^2-1, n_in-1, n^4-n^2, kappa-1, n_theta).
Index free_dim(const EstimationProblem& problem);

/// Shared free-basis data for the superoperator parameterization (cached per n):
/// Hermitian matrices N_m spanning the nullspace of the completeness map, plus
/// the strictly feasible base point Xbar = I/n (fully depolarizing channel).
struct SuperopFreeBasis {
  std::vector<CMat> null_elems;  // n^4 - n^2 Hermitian directions
  CMat xbar;                     // particular solution, strictly PD
};
const SuperopFreeBasis& superop_free_basis(const HermBasis& op_basis);

}  // namespace tomoed
