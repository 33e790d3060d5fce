#pragma once

#include "tomoed/problems.hpp"
#include "tomoed/simlab.hpp"

namespace tomoed::photonics {

/// Wave-plate pair; angles in degrees (converted to radians at use).
struct WavePlateSetting {
  double h = 0.0;
  double q = 0.0;
};

struct DetectorNoise {
  double eta = 1.0;    // efficiency
  double delta = 0.0;  // dark-count probability
  void validate() const;
};

/// Rank-1 projector pair (M10, M01) of the single-arm analyzer; complete.
std::pair<CMat, CMat> one_arm_projectors(const WavePlateSetting& s);

/// The 4x2 conditional-probability mixer {10,01,00,11} x {10,01} built from
/// nu(1|0) = delta and nu(0|1) = (1-eta)(1-delta).
NoiseMixer one_arm_noise_mixer(const DetectorNoise& noise);

/// Noisy four-outcome POVM {10, 01, 00, 11}.
PovmSet one_arm_noisy_povm(const WavePlateSetting& s, const DetectorNoise& noise);

/// Row-major (h outer, q inner) cartesian grid of settings.
std::vector<WavePlateSetting> angle_grid(const std::vector<double>& h_list,
                                         const std::vector<double>& q_list);

/// One-arm photon-counting ensemble over the settings grid; with noise absent
/// the clean two-outcome projector pairs are used.
ConfigurationEnsemble build_one_arm_ensemble(const std::vector<WavePlateSetting>& settings,
                                             const std::optional<DetectorNoise>& noise,
                                             const DensityMatrix& input);

/// Two-arm ensemble over the row-major (h, q, h', q') grid with input
/// rho (x) rho_primed. Noise-free: the four two-photon firing patterns
/// {0101, 0110, 1001, 1010} (complete on the two-photon subspace). With
/// noise: the full 16-outcome tensor product of per-arm noisy POVMs.
ConfigurationEnsemble build_two_arm_ensemble(const std::vector<double>& h_list,
                                             const std::vector<double>& q_list,
                                             const std::vector<double>& hp_list,
                                             const std::vector<double>& qp_list,
                                             const std::optional<DetectorNoise>& noise,
                                             const DensityMatrix& input,
                                             const DensityMatrix& input_primed);

/// The paper's worked input states.
DensityMatrix rho_pure();   // |+><+|
DensityMatrix rho_mixd();   // [[0.6, -0.2i], [0.2i, 0.4]]

/// Bit-flip/depolarizing OSR-distribution problem over the 16-angle ensemble
/// with single pure input psi(theta) = (cos t, sin t); noise-free POVMs.
struct BitflipDepolarizing {
  OsrDistProblem problem;
  RVec q_surrogate;
};
BitflipDepolarizing bitflip_depolarizing_problem(const RVec& q_surrogate, double theta_deg,
                                                 const std::vector<WavePlateSetting>& settings);
std::vector<WavePlateSetting> channel_angle_grid();  // {0,15,30,45}^2

enum class HadamardInput { Ket0, Had0, Both };

/// Sec. 4.3 single-parameter model H = theta eps (X+Z)/sqrt(2) on the
/// 100-point time grid t_k = (pi/2)(k-1)/99 with computational-basis POVM.
struct HadamardSetup {
  HamiltonianProblem problem;
  RVec theta_surrogate;
};
HadamardSetup hadamard_hamiltonian_problem(double theta_surrogate, double eps, HadamardInput input,
                                           double theta_lo = 0.8, double theta_hi = 1.2,
                                           Index n_times = 100);

/// Two-qubit Bell-gate Hamiltonian H1 + H2 + H12 for controls
/// (e1z, e1x, e2z, e2x, ec) and omega = (omega0, omega1, omega_c).
CMat bell_hamiltonian(const RVec& controls, const RVec& omega);

/// The six-segment pulse schedule realizing exp(-i pi/4) U_bell when the
/// durations are designed at the true omega1. omega_had sets the last
/// segment's amplitude/duration pair and cancels out of the gate.
PulseTable bell_pulse_table(double omega1_hat, double omega_c, double omega0 = 1.0,
                            double omega_had = 1.0);

CMat bell_gate();  // U_bell
CMat hadamard_gate();

}  // namespace tomoed::photonics
