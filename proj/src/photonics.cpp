#include "tomoed/photonics.hpp"

#include <cmath>

namespace tomoed::photonics {

namespace {

constexpr double kDegToRad = M_PI / 180.0;

const CMat& pauli_x() {
  static CMat x = [] {
    CMat m(2, 2);
    m << 0, 1, 1, 0;
    return m;
  }();
  return x;
}
const CMat& pauli_y() {
  static CMat y = [] {
    CMat m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return m;
  }();
  return y;
}
const CMat& pauli_z() {
  static CMat z = [] {
    CMat m(2, 2);
    m << 1, 0, 0, -1;
    return m;
  }();
  return z;
}

std::string angle_label(const WavePlateSetting& s) {
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return std::string(buf);
  };
  return "h=" + fmt(s.h) + ",q=" + fmt(s.q);
}

}  // namespace

void DetectorNoise::validate() const {
  if (eta < 0 || eta > 1 || delta < 0 || delta > 1)
    throw InvalidModel("detector noise: eta and delta must lie in [0,1]");
}

std::pair<CMat, CMat> one_arm_projectors(const WavePlateSetting& s) {
  const double h = s.h * kDegToRad, q = s.q * kDegToRad;
  const double s2h = std::sin(2 * h), c2h = std::cos(2 * h);
  const double s2hq = std::sin(2 * (h - q)), c2hq = std::cos(2 * (h - q));
  CVec psi1(2), psi2(2);
  psi1 << Complex(s2h, s2hq), Complex(c2h, -c2hq);
  psi2 << Complex(c2h, c2hq), Complex(-s2h, s2hq);
  psi1 /= std::sqrt(2.0);
  psi2 /= std::sqrt(2.0);
  return {psi1 * psi1.adjoint(), psi2 * psi2.adjoint()};
}

NoiseMixer one_arm_noise_mixer(const DetectorNoise& noise) {
  noise.validate();
  const double n10 = noise.delta;                          // fires with no photon
  const double n00 = 1.0 - n10;
  const double n01 = (1.0 - noise.eta) * (1.0 - noise.delta);  // misses a photon
  const double n11 = 1.0 - n01;
  RMat nu(4, 2);
  // rows: outcomes {10, 01, 00, 11}; columns: noise-free {10, 01}
  nu << n11 * n00, n10 * n01,
        n01 * n10, n00 * n11,
        n01 * n00, n00 * n01,
        n11 * n10, n10 * n11;
  return NoiseMixer{nu};
}

PovmSet one_arm_noisy_povm(const WavePlateSetting& s, const DetectorNoise& noise) {
  auto [m10, m01] = one_arm_projectors(s);
  PovmSet clean;
  clean.elements = {m10, m01};
  clean.labels = {"10", "01"};
  PovmSet out = apply_noise(clean, one_arm_noise_mixer(noise));
  out.labels = {"10", "01", "00", "11"};
  return out;
}

std::vector<WavePlateSetting> angle_grid(const std::vector<double>& h_list,
                                         const std::vector<double>& q_list) {
  std::vector<WavePlateSetting> out;
  out.reserve(h_list.size() * q_list.size());
  for (double h : h_list)
    for (double q : q_list) out.push_back({h, q});
  return out;
}

ConfigurationEnsemble build_one_arm_ensemble(const std::vector<WavePlateSetting>& settings,
                                             const std::optional<DetectorNoise>& noise,
                                             const DensityMatrix& input) {
  if (settings.empty()) throw InvalidModel("one-arm ensemble: empty settings grid");
  ConfigurationEnsemble ens;
  for (const WavePlateSetting& s : settings) {
    Configuration cfg;
    if (noise) {
      cfg.povm = one_arm_noisy_povm(s, *noise);
    } else {
      auto [m10, m01] = one_arm_projectors(s);
      cfg.povm.elements = {m10, m01};
      cfg.povm.labels = {"10", "01"};
    }
    cfg.input = input;
    cfg.label = angle_label(s);
    ens.configs.push_back(std::move(cfg));
  }
  return ens;
}

ConfigurationEnsemble build_two_arm_ensemble(const std::vector<double>& h_list,
                                             const std::vector<double>& q_list,
                                             const std::vector<double>& hp_list,
                                             const std::vector<double>& qp_list,
                                             const std::optional<DetectorNoise>& noise,
                                             const DensityMatrix& input,
                                             const DensityMatrix& input_primed) {
  if (h_list.empty() || q_list.empty() || hp_list.empty() || qp_list.empty())
    throw InvalidModel("two-arm ensemble: empty angle list");
  DensityMatrix joint{kron(input.rho, input_primed.rho)};
  ConfigurationEnsemble ens;
  for (double h : h_list)
    for (double q : q_list)
      for (double hp : hp_list)
        for (double qp : qp_list) {
          Configuration cfg;
          cfg.input = joint;
          cfg.label = angle_label({h, q}) + "," + "h'=" + std::to_string(hp) + ",q'=" + std::to_string(qp);
          if (!noise) {
            auto [a10, a01] = one_arm_projectors({h, q});
            auto [b10, b01] = one_arm_projectors({hp, qp});
            // firing patterns 0101, 0110, 1001, 1010
            cfg.povm.elements = {kron(a01, b01), kron(a01, b10), kron(a10, b01), kron(a10, b10)};
            cfg.povm.labels = {"0101", "0110", "1001", "1010"};
          } else {
            PovmSet pa = one_arm_noisy_povm({h, q}, *noise);
            PovmSet pb = one_arm_noisy_povm({hp, qp}, *noise);
            for (Index a = 0; a < 4; ++a)
              for (Index b = 0; b < 4; ++b) {
                cfg.povm.elements.push_back(
                    kron(pa.elements[static_cast<size_t>(a)], pb.elements[static_cast<size_t>(b)]));
                cfg.povm.labels.push_back(pa.labels[static_cast<size_t>(a)] +
                                          pb.labels[static_cast<size_t>(b)]);
              }
          }
          ens.configs.push_back(std::move(cfg));
        }
  return ens;
}

DensityMatrix rho_pure() {
  CMat r(2, 2);
  r << 0.5, 0.5, 0.5, 0.5;
  return DensityMatrix{r};
}

DensityMatrix rho_mixd() {
  CMat r(2, 2);
  r << 0.6, Complex(0, -0.2), Complex(0, 0.2), 0.4;
  return DensityMatrix{r};
}

std::vector<WavePlateSetting> channel_angle_grid() {
  return angle_grid({0, 15, 30, 45}, {0, 15, 30, 45});
}

BitflipDepolarizing bitflip_depolarizing_problem(const RVec& q_surrogate, double theta_deg,
                                                 const std::vector<WavePlateSetting>& settings) {
  if (q_surrogate.size() != 3 || q_surrogate.minCoeff() < 0 ||
      std::abs(q_surrogate.sum() - 1.0) > 1e-10)
    throw InvalidModel("bitflip/depolarizing: q must be a 3-simplex point");
  const double th = theta_deg * kDegToRad;
  CVec psi(2);
  psi << std::cos(th), std::sin(th);
  DensityMatrix input = DensityMatrix::pure(psi);

  OsrDistProblem prob;
  for (const WavePlateSetting& s : settings) {
    Configuration cfg;
    auto [m10, m01] = one_arm_projectors(s);
    cfg.povm.elements = {m10, m01};
    cfg.povm.labels = {"10", "01"};
    cfg.input = input;
    cfg.label = angle_label(s);
    prob.ensemble.configs.push_back(std::move(cfg));
  }
  const CMat i2 = CMat::Identity(2, 2);
  prob.kraus_bar = {{i2},
                    {pauli_x()},
                    {i2 / 2.0, pauli_x() / 2.0, pauli_y() / 2.0, pauli_z() / 2.0}};
  prob.weight_check = q_surrogate;
  return {std::move(prob), q_surrogate};
}

HadamardSetup hadamard_hamiltonian_problem(double theta_surrogate, double eps, HadamardInput input,
                                           double theta_lo, double theta_hi, Index n_times) {
  if (eps == 0.0) throw InvalidModel("hadamard problem: eps must be nonzero");
  if (n_times < 1) throw EmptyGrid("hadamard problem: need at least one sample time");
  HamiltonianProblem prob;
  CMat had = hadamard_gate();
  prob.model.hamiltonian = [had, eps](double, const RVec& th) -> CMat { return th(0) * eps * had; };
  prob.model.theta_lo = RVec::Constant(1, theta_lo);
  prob.model.theta_hi = RVec::Constant(1, theta_hi);
  for (Index k = 0; k < n_times; ++k)
    prob.model.sample_times.push_back((M_PI / 2.0) * static_cast<double>(k) /
                                      static_cast<double>(n_times - 1));
  CVec ket0(2);
  ket0 << 1, 0;
  if (input == HadamardInput::Ket0 || input == HadamardInput::Both)
    prob.model.inputs.push_back(DensityMatrix::pure(ket0));
  if (input == HadamardInput::Had0 || input == HadamardInput::Both)
    prob.model.inputs.push_back(DensityMatrix::pure(had * ket0));
  CMat m1 = CMat::Zero(2, 2), m2 = CMat::Zero(2, 2);
  m1(0, 0) = 1;
  m2(1, 1) = 1;
  prob.model.povm.elements = {m1, m2};
  prob.model.povm.labels = {"0", "1"};
  return {std::move(prob), RVec::Constant(1, theta_surrogate)};
}

CMat bell_hamiltonian(const RVec& controls, const RVec& omega) {
  if (controls.size() != 5 || omega.size() != 3)
    throw DimensionMismatch("bell_hamiltonian: expected 5 controls and 3 omegas");
  const double w0 = omega(0), w1 = omega(1), wc = omega(2);
  const CMat i2 = CMat::Identity(2, 2);
  CMat h1 = 0.5 * (controls(0) * w0 * kron(pauli_z(), i2) + controls(1) * w1 * kron(pauli_x(), i2));
  CMat h2 = 0.5 * (controls(2) * w0 * kron(i2, pauli_z()) + controls(3) * w1 * kron(i2, pauli_x()));
  CMat h12 = controls(4) * wc *
             (kron(pauli_x(), pauli_x()) + kron(pauli_y(), pauli_y()) + kron(pauli_z(), pauli_z()));
  return h1 + h2 + h12;
}

PulseTable bell_pulse_table(double omega1_hat, double omega_c, double omega0, double omega_had) {
  if (omega1_hat <= 0 || omega_c <= 0 || omega0 <= 0 || omega_had <= 0)
    throw InvalidModel("bell_pulse_table: frequencies must be positive");
  auto seg = [](std::initializer_list<double> c, double dt) {
    PulseSegment s;
    s.controls = RVec(5);
    Index i = 0;
    for (double v : c) s.controls(i++) = v;
    s.dt = dt;
    return s;
  };
  PulseTable t;
  t.segments = {
      seg({0, 0, 0, 1, 0}, M_PI / omega1_hat),
      seg({0, 0, 0, 0, 1}, M_PI / (8 * omega_c)),
      seg({0, 0, 0, 1, 0}, M_PI / (2 * omega1_hat)),
      seg({0, 1, 0, 0, 0}, 3 * M_PI / (2 * omega1_hat)),
      seg({0, 0, 0, 0, 1}, M_PI / (8 * omega_c)),
      seg({omega_had / (omega0 * std::sqrt(2.0)), omega_had / (omega1_hat * std::sqrt(2.0)), 0, 0, 0},
          M_PI / omega_had),
  };
  return t;
}

CMat bell_gate() {
  CMat u(4, 4);
  u << 1, 0, 1, 0,
       0, 1, 0, 1,
       0, 1, 0, -1,
       1, 0, -1, 0;
  return u / std::sqrt(2.0);
}

CMat hadamard_gate() {
  CMat u(2, 2);
  u << 1, 1, 1, -1;
  return u / std::sqrt(2.0);
}

}  // namespace tomoed::photonics
