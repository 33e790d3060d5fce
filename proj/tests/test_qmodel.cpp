#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "tomoed/photonics.hpp"
#include "tomoed/problems.hpp"

using namespace tomoed;

namespace {

std::mt19937_64 gen(777);

CMat random_cmat(Index r, Index c) {
  std::normal_distribution<double> nd;
  CMat m(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = Complex(nd(gen), nd(gen));
  return m;
}

DensityMatrix random_state(Index n) {
  CMat a = random_cmat(n, n);
  CMat r = a * a.adjoint();
  return DensityMatrix{r / r.trace()};
}

PovmSet random_two_outcome_povm(Index n) {
  CMat a = random_cmat(n, n);
  CMat h = 0.5 * (a + a.adjoint());
  Eigh ed = eigh(h);
  RVec clipped = ed.values.unaryExpr([&](double v) {
    double lo = ed.values.minCoeff(), hi = ed.values.maxCoeff();
    return (v - lo) / (hi - lo);  // in [0,1]
  });
  CMat m0 = ed.vectors * clipped.asDiagonal() * ed.vectors.adjoint();
  PovmSet p;
  p.elements = {m0, CMat::Identity(n, n) - m0};
  return p;
}

// random trace-preserving Kraus pair via a Stinespring isometry column block
KrausSet random_kraus_pair(Index n) {
  CMat a = random_cmat(2 * n, n);
  Eigen::HouseholderQR<CMat> qr(a);
  CMat q = CMat(qr.householderQ()) * CMat::Identity(2 * n, n);
  KrausSet k;
  k.matrices = {q.topRows(n), q.bottomRows(n)};
  return k;
}

}  // namespace

TEST_CASE("apply_noise with the identity mixer is the identity") {
  PovmSet clean = random_two_outcome_povm(2);
  NoiseMixer mix{RMat::Identity(2, 2)};
  PovmSet noisy = apply_noise(clean, mix);
  CHECK((noisy.elements[0] - clean.elements[0]).norm() <= 1e-15);
  CHECK((noisy.elements[1] - clean.elements[1]).norm() <= 1e-15);
}

TEST_CASE("apply_noise with the detector mixer keeps completeness") {
  PovmSet clean;
  auto [m10, m01] = photonics::one_arm_projectors({10, 25});
  clean.elements = {m10, m01};
  NoiseMixer mix = photonics::one_arm_noise_mixer({0.75, 0.05});
  PovmSet noisy = apply_noise(clean, mix);
  REQUIRE(noisy.n_out() == 4);
  CMat sum = CMat::Zero(2, 2);
  for (const CMat& m : noisy.elements) sum += m;
  CHECK((sum - CMat::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);
  noisy.validate();
}

TEST_CASE("apply_noise rejects a mixer with a bad column") {
  PovmSet clean = random_two_outcome_povm(2);
  RMat nu(2, 2);
  nu << 1, 0, 0, 0;  // second column sums to 0
  CHECK_THROWS_AS(apply_noise(clean, NoiseMixer{nu}), InvalidModel);
}

TEST_CASE("povm_pullback") {
  PovmSet m = random_two_outcome_povm(2);
  KrausSet ident;
  ident.matrices = {CMat::Identity(2, 2)};
  PovmSet same = povm_pullback(ident, m);
  CHECK((same.elements[0] - m.elements[0]).norm() <= 1e-15);

  CMat h = random_cmat(2, 2);
  CMat u = herm_expm(0.5 * (h + h.adjoint()), 1.0);
  KrausSet ku;
  ku.matrices = {u};
  PovmSet pulled = povm_pullback(ku, m);
  CHECK((pulled.elements[0] - u.adjoint() * m.elements[0] * u).norm() <= 1e-12);

  KrausSet pair = random_kraus_pair(2);
  pair.validate();
  PovmSet o = povm_pullback(pair, m);
  CMat sum = CMat::Zero(2, 2);
  for (const CMat& e : o.elements) sum += e;  // direct summation oracle
  CHECK((sum - CMat::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-10);
  o.validate();
}

TEST_CASE("outcome_probs: state and OSR-distribution basics") {
  CMat proj0 = CMat::Zero(2, 2);
  proj0(0, 0) = 1;
  Configuration cfg;
  cfg.povm.elements = {proj0, CMat::Identity(2, 2) - proj0};
  cfg.input = DensityMatrix{CMat::Identity(2, 2) / 2.0};
  cfg.label = "z";
  StateProblem sp{ConfigurationEnsemble{{cfg}}};
  auto p = outcome_probs(sp, DensityMatrix{CMat::Identity(2, 2) / 2.0});
  CHECK(p[0](0) == doctest::Approx(0.5).epsilon(1e-12));

  OsrDistProblem op;
  Configuration c2 = cfg;
  c2.input = DensityMatrix{proj0};
  op.ensemble.configs = {c2};
  CMat x(2, 2);
  x << 0, 1, 1, 0;
  op.kraus_bar = {{CMat::Identity(2, 2)}, {x}};
  RVec q(2);
  q << 1, 0;
  auto p2 = outcome_probs(EstimationProblem{op}, ParamPoint{q});
  CHECK(p2[0](0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("outcome_probs: Hamiltonian case against the propagator oracle") {
  auto setup = photonics::hadamard_hamiltonian_problem(1.0, 1.0, photonics::HadamardInput::Ket0);
  RVec th = RVec::Ones(1);
  auto p = outcome_probs(EstimationProblem{setup.problem}, ParamPoint{th});
  CMat had = photonics::hadamard_gate();
  for (size_t k = 0; k < setup.problem.model.sample_times.size(); ++k) {
    const double t = setup.problem.model.sample_times[k];
    CMat u = herm_expm(had, t);  // oracle: exp(-i t theta eps U_had), theta=eps=1
    const double p1 = std::norm(u(1, 0));
    CHECK(p[k](1) == doctest::Approx(p1).epsilon(1e-10));
    CHECK(p[k].sum() == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("probabilities sum to one for every parameterization") {
  auto noise = photonics::DetectorNoise{0.75, 0.05};
  auto ens = photonics::build_one_arm_ensemble(
      photonics::angle_grid({0, 15, 30}, {0, 30}), noise, random_state(2));
  StateProblem sp{ens};
  DensityMatrix rho = random_state(2);
  for (const RVec& p : outcome_probs(sp, rho)) CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("build_R_matrices: identity channel is diag(2,0,0,0) in the Pauli basis") {
  HermBasis basis = HermBasis::canonical(2);
  auto ens = photonics::build_one_arm_ensemble(photonics::angle_grid({0, 30}, {0, 45}),
                                               photonics::DetectorNoise{0.75, 0.05}, photonics::rho_pure());
  auto r = build_R_matrices(ens, basis);
  CMat xtrue = CMat::Zero(4, 4);
  xtrue(0, 0) = 2.0;
  Superoperator x{xtrue, basis};
  // Tr X R equals the direct elementwise double loop
  for (size_t g = 0; g < r.size(); ++g) {
    double total = 0;
    for (size_t a = 0; a < r[g].size(); ++a) {
      const CMat& rm = r[g][a];
      CHECK(is_hermitian(rm, 1e-10));
      Complex direct = 0;
      for (Index i = 0; i < 4; ++i)
        for (Index j = 0; j < 4; ++j)
          direct += x.x(i, j) *
                    (basis[j] * ens.configs[g].input.rho * basis[i].adjoint() *
                     ens.configs[g].povm.elements[a])
                        .trace();
      const double via_r = (x.x * rm).trace().real();
      CHECK(std::abs(via_r - direct.real()) <= 1e-12);
      total += via_r;
      // against the physical probability
      const double phys = (ens.configs[g].povm.elements[a] * ens.configs[g].input.rho).trace().real();
      CHECK(via_r == doctest::Approx(phys).epsilon(1e-10));
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("build_R_matrices rejects a basis of the wrong dimension") {
  auto ens = photonics::build_one_arm_ensemble(photonics::angle_grid({0}, {0}), std::nullopt,
                                               photonics::rho_pure());
  CHECK_THROWS_AS(build_R_matrices(ens, HermBasis::canonical(4)), BadBasis);
}

TEST_CASE("kraus_from_superoperator: identity channel gives a single Kraus operator") {
  HermBasis basis = HermBasis::canonical(2);
  CMat xtrue = CMat::Zero(4, 4);
  xtrue(0, 0) = 2.0;
  auto kw = kraus_from_superoperator(Superoperator{xtrue, basis});
  REQUIRE(kw.kraus.matrices.size() == 1);
  CHECK(kw.weights(0) == doctest::Approx(2.0));
  // K proportional to I up to phase
  CMat k = kw.kraus.matrices[0];
  CHECK((k * k.adjoint() - CMat::Identity(2, 2)).norm() <= 1e-10);
  CHECK(std::abs(std::abs(k(0, 0)) - 1.0) <= 1e-10);
  CHECK(std::abs(k(0, 1)) <= 1e-12);
}

TEST_CASE("kraus round trip reproduces the channel action") {
  HermBasis basis = HermBasis::canonical(2);
  for (int rep = 0; rep < 5; ++rep) {
    KrausSet truth = random_kraus_pair(2);
    Superoperator x = superoperator_from_kraus(truth, basis);
    x.validate();
    auto back = kraus_from_superoperator(x);
    CHECK(static_cast<Index>(back.kraus.matrices.size()) <= 4);
    for (const CMat& b : basis.elements()) {
      CMat via_truth = CMat::Zero(2, 2);
      for (const CMat& k : truth.matrices) via_truth += k * b * k.adjoint();
      CMat via_back = CMat::Zero(2, 2);
      for (const CMat& k : back.kraus.matrices) via_back += k * b * k.adjoint();
      CHECK((via_truth - via_back).norm() <= 1e-8);
      CHECK((apply_superoperator(x, b) - via_truth).norm() <= 1e-10);
    }
  }
}

TEST_CASE("validation catches broken models") {
  CMat bad(2, 2);
  bad << 0.7, 0.1, 0.1, 0.7;  // trace 1.4
  CHECK_THROWS_AS(DensityMatrix{bad}.validate(), InvalidModel);
  PovmSet p;
  p.elements = {CMat::Identity(2, 2)};
  p.elements[0](0, 0) = 2.0;  // sums beyond identity
  CHECK_THROWS_AS(p.validate(), InvalidModel);
  KrausSet k;
  k.matrices = {CMat::Identity(2, 2) * 2.0};
  CHECK_THROWS_AS(k.validate(), InvalidModel);
}
