#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tomoed/fisher.hpp"
#include "tomoed/photonics.hpp"
#include "tomoed/simlab.hpp"

using namespace tomoed;
using namespace tomoed::photonics;

TEST_CASE("one_arm_projectors at h=q=0") {
  auto [m10, m01] = one_arm_projectors({0, 0});
  // psi1 = (0, (1-i)/sqrt 2)
  CHECK(std::abs(m10(0, 0)) <= 1e-15);
  CHECK(m10(1, 1).real() == doctest::Approx(1.0));
  CHECK(((m10 + m01) - CMat::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-15);
  // rank 1 each
  CHECK(std::abs((m10 * m10 - m10).norm()) <= 1e-12);
}

TEST_CASE("projectors stay complete and rank-1 across settings") {
  for (double h : {0.0, 22.5, 7.0, 45.0})
    for (double q : {0.0, 22.5, 33.0}) {
      auto [m10, m01] = one_arm_projectors({h, q});
      CHECK(((m10 + m01) - CMat::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);
      Eigh e1 = eigh(m10);
      CHECK(e1.values(0) <= 1e-12);
      CHECK(e1.values(1) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("one_arm_noisy_povm") {
  SUBCASE("noise-free limit reduces to the projector pair") {
    PovmSet p = one_arm_noisy_povm({15, 30}, {1.0, 0.0});
    auto [m10, m01] = one_arm_projectors({15, 30});
    CHECK((p.elements[0] - m10).norm() <= 1e-14);
    CHECK((p.elements[1] - m01).norm() <= 1e-14);
    CHECK(p.elements[2].norm() <= 1e-14);
    CHECK(p.elements[3].norm() <= 1e-14);
  }

  SUBCASE("paper noise values keep completeness, all four elements nonzero") {
    PovmSet p = one_arm_noisy_povm({10, 5}, {0.75, 0.05});
    CMat sum = CMat::Zero(2, 2);
    for (const CMat& m : p.elements) {
      sum += m;
      CHECK(m.norm() > 1e-6);
    }
    CHECK((sum - CMat::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);
  }

  SUBCASE("dead detectors: outcome 00 is the identity") {
    PovmSet p = one_arm_noisy_povm({10, 5}, {0.0, 0.0});
    CHECK((p.elements[2] - CMat::Identity(2, 2)).norm() <= 1e-14);
    CHECK(p.elements[0].norm() <= 1e-14);
    CHECK(p.elements[1].norm() <= 1e-14);
    CHECK(p.elements[3].norm() <= 1e-14);
  }
}

TEST_CASE("ensemble builders") {
  std::vector<double> grid;
  for (int a = 0; a <= 45; a += 5) grid.push_back(a);

  SUBCASE("one-arm 10x10 grid") {
    auto ens = build_one_arm_ensemble(angle_grid(grid, grid), std::nullopt, rho_pure());
    CHECK(ens.n_cfg() == 100);
    ens.validate();
  }

  SUBCASE("two-arm 4^4 grid") {
    std::vector<double> a4 = {0, 20, 25, 45};
    auto ens = build_two_arm_ensemble(a4, a4, a4, a4, std::nullopt, rho_pure(), rho_mixd());
    CHECK(ens.n_cfg() == 256);
    CHECK(ens.dim() == 4);
    ens.validate();
  }

  SUBCASE("single setting") {
    auto ens = build_one_arm_ensemble({{10, 20}}, DetectorNoise{0.9, 0.01}, rho_mixd());
    CHECK(ens.n_cfg() == 1);
    ens.validate();
  }

  SUBCASE("two-arm with noise keeps a complete 16-outcome POVM") {
    auto ens = build_two_arm_ensemble({0}, {0}, {20}, {45}, DetectorNoise{0.75, 0.05}, rho_pure(),
                                      rho_pure());
    CHECK(ens.configs[0].povm.n_out() == 16);
    ens.validate();
  }
}

TEST_CASE("bitflip/depolarizing problem") {
  RVec q(3);
  q << 0.6, 0.2, 0.2;

  SUBCASE("theta=25 is identifiable") {
    auto bd = bitflip_depolarizing_problem(q, 25.0, channel_angle_grid());
    CHECK(bd.problem.ensemble.n_cfg() == 16);
    bd.problem.validate();
    FisherModel fm = fisher_blocks(bd.problem, q);
    CHECK(identifiability(fm).identifiable);
  }

  SUBCASE("identity distribution reproduces noise-free state probabilities") {
    RVec qi(3);
    qi << 1, 0, 0;
    auto bd = bitflip_depolarizing_problem(qi, 30.0, channel_angle_grid());
    auto p = outcome_probs(bd.problem, ParamPoint{qi});
    StateProblem sp{bd.problem.ensemble};
    auto ps = outcome_probs(sp, bd.problem.ensemble.configs[0].input);
    for (size_t g = 0; g < p.size(); ++g)
      CHECK((p[g] - ps[g]).cwiseAbs().maxCoeff() <= 1e-12);
  }

  SUBCASE("det R vanishes exactly on the bad set") {
    for (int deg = 1; deg < 90; ++deg) {
      const double t = deg * M_PI / 180.0;
      const double det = channel_det_R(std::cos(t), std::sin(t));
      if (deg == 45) {
        CHECK(std::abs(det) <= 1e-14);
      } else {
        CHECK(std::abs(det) > 1e-6);
      }
    }
  }
}

TEST_CASE("hadamard setup shapes") {
  auto s1 = hadamard_hamiltonian_problem(1.0, 1.0, HadamardInput::Ket0);
  CHECK(s1.problem.n_cfg() == 100);
  auto s2 = hadamard_hamiltonian_problem(1.0, 1.0, HadamardInput::Both);
  CHECK(s2.problem.n_cfg() == 200);
  CHECK(s2.problem.model.sample_times.front() == 0.0);
  CHECK(s2.problem.model.sample_times.back() == doctest::Approx(M_PI / 2));
}

TEST_CASE("bell pulse table") {
  RVec omega(3);
  omega << 1.0, 0.01, 0.01;

  SUBCASE("six-segment product is exp(-i pi/4) U_bell") {
    PulseTable t = bell_pulse_table(0.01, 0.01);
    CMat u = pulse_gate(t, omega);
    CMat target = std::exp(Complex(0, -M_PI / 4)) * bell_gate();
    CHECK((u - target).cwiseAbs().maxCoeff() <= 1e-8);
  }

  SUBCASE("empty table gives the identity") {
    CMat u = pulse_gate(PulseTable{}, omega);
    CHECK((u - CMat::Identity(4, 4)).norm() <= 1e-15);
  }

  SUBCASE("single row is -i I (x) X") {
    PulseTable t;
    PulseSegment s;
    s.controls = (RVec(5) << 0, 0, 0, 1, 0).finished();
    s.dt = M_PI / omega(1);
    t.segments = {s};
    CMat x(2, 2);
    x << 0, 1, 1, 0;
    CMat u = pulse_gate(t, omega);
    CHECK((u - Complex(0, -1) * kron(CMat::Identity(2, 2), x)).cwiseAbs().maxCoeff() <= 1e-10);
  }
}
