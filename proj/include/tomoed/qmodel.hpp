#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tomoed/basis.hpp"
#include "tomoed/numerics.hpp"

namespace tomoed {

/// Unit-trace PSD matrix. validate() enforces eigenvalues >= -1e-10 and
/// Tr = 1 within 1e-10.
struct DensityMatrix {
  CMat rho;

  Index dim() const { return rho.rows(); }
  void validate() const;
  static DensityMatrix pure(const CVec& psi);
};

/// POVM: PSD elements summing to identity.
struct PovmSet {
  std::vector<CMat> elements;
  std::vector<std::string> labels;  // optional outcome names, empty or per element

  Index dim() const { return elements.empty() ? 0 : elements[0].rows(); }
  Index n_out() const { return static_cast<Index>(elements.size()); }
  void validate(double tol = 1e-10) const;
};

/// Column-stochastic conditional probability table nu(alpha | beta).
struct NoiseMixer {
  RMat nu;  // n_out x n_out_clean

  void validate() const;
};

/// Trace-preserving Kraus set: sum K^H K = I within 1e-8.
struct KrausSet {
  std::vector<CMat> matrices;

  Index dim() const { return matrices.empty() ? 0 : matrices[0].rows(); }
  void validate(double tol = 1e-8) const;
};

/// Superoperator X in a fixed operator basis: X PSD, sum_ij X_ij B_i^H B_j = I.
struct Superoperator {
  CMat x;          // n^2 x n^2 Hermitian
  HermBasis basis;  // n^2 operator basis elements B_i

  Index dim() const { return basis.matrix_dim(); }
  void validate(double tol = 1e-8) const;
};

/// One measurement configuration: a POVM applied to a fixed input state.
struct Configuration {
  PovmSet povm;
  DensityMatrix input;
  std::string label;
};

struct ConfigurationEnsemble {
  std::vector<Configuration> configs;

  Index dim() const { return configs.empty() ? 0 : configs[0].input.dim(); }
  Index n_cfg() const { return static_cast<Index>(configs.size()); }
  void validate() const;
};

/// Outcome counts n_{alpha gamma}; real-valued so exact-probability
/// pseudo-counts can be used wherever data is expected. The sampler always
/// produces integers.
struct CountData {
  std::vector<RVec> counts;  // per configuration, length n_out(gamma)

  Index n_cfg() const { return static_cast<Index>(counts.size()); }
  RVec trials() const;
  double total() const;
  void validate() const;
};

/// Parametric Hamiltonian model H(t, theta) with box-bounded parameters,
/// sample times and prepared input states; measurement POVM shared across
/// configurations. Time dependence is piecewise-constant between knots.
struct HamiltonianModel {
  std::function<CMat(double t, const RVec& theta)> hamiltonian;
  RVec theta_lo, theta_hi;         // box Theta
  std::vector<double> sample_times;
  std::vector<DensityMatrix> inputs;
  PovmSet povm;
  std::vector<double> time_knots;  // piecewise-constant segment starts, may be empty

  Index n_theta() const { return theta_lo.size(); }
  void validate() const;
  /// Propagator U(t, theta): product of per-segment Hermitian exponentials.
  CMat propagator(double t, const RVec& theta) const;
};

// ---- operations -----------------------------------------------------------

/// Noisy POVM M_alpha = sum_beta nu(alpha|beta) Mbar_beta.
PovmSet apply_noise(const PovmSet& clean, const NoiseMixer& mixer);

/// Effective POVM O_alpha = sum_k K_k^H M_alpha K_k.
PovmSet povm_pullback(const KrausSet& kraus, const PovmSet& m);

/// R matrices [R_ag]_ij = Tr(B_j rho_g B_i^H O_ag), one per outcome per config.
std::vector<std::vector<CMat>> build_R_matrices(const ConfigurationEnsemble& ensemble,
                                                const HermBasis& basis);

/// Kraus reconstruction from X via its eigendecomposition (weights s_k
/// descending; eigenvalues below drop_tol are discarded).
struct KrausWithWeights {
  KrausSet kraus;
  RVec weights;
};
KrausWithWeights kraus_from_superoperator(const Superoperator& x, double drop_tol = 1e-10);

/// X_ij = sum_k c_ki conj(c_kj) with c_ki the basis coordinates of K_k.
Superoperator superoperator_from_kraus(const KrausSet& kraus, const HermBasis& basis);

/// Forward channel action sigma = sum_ij X_ij B_i rho B_j^H.
CMat apply_superoperator(const Superoperator& x, const CMat& rho);

}  // namespace tomoed
