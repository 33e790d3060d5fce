#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_helpers.hpp"
#include "tomoed/estimator.hpp"
#include "tomoed/oed.hpp"
#include "tomoed/simlab.hpp"

using namespace tomoed;
using namespace tomoed::testing;

namespace {

FisherModel one_arm_model(const DensityMatrix& rho, bool noise) {
  std::vector<double> angles;
  for (int a = 0; a <= 45; a += 5) angles.push_back(a);
  auto ens = photonics::build_one_arm_ensemble(
      photonics::angle_grid(angles, angles),
      noise ? std::optional<photonics::DetectorNoise>({0.75, 0.05}) : std::nullopt, rho);
  return fisher_blocks(StateProblem{ens}, rho);
}

FisherModel random_model(Index n_cfg, Index n_states = 1) {
  ConfigurationEnsemble ens;
  for (Index k = 0; k < n_cfg; ++k) {
    Configuration c;
    c.povm = random_povm(2, 2);
    c.input = random_state(2);
    c.label = "cfg" + std::to_string(k);
    ens.configs.push_back(c);
  }
  (void)n_states;
  return fisher_blocks(StateProblem{ens}, random_state(2));
}

// exhaustive simplex grid search oracle
double grid_search_v(const FisherModel& fm, double step) {
  const Index m = fm.n_cfg();
  double best = std::numeric_limits<double>::infinity();
  const Index levels = static_cast<Index>(std::lround(1.0 / step));
  std::function<void(Index, Index, RVec&)> rec = [&](Index idx, Index left, RVec& lam) {
    if (idx == m - 1) {
      lam(idx) = static_cast<double>(left) * step;
      RMat g = fm.aggregate(lam);
      Eigen::LLT<RMat> llt(g);
      if (llt.info() == Eigen::Success) {
        double v = llt.solve(RMat::Identity(fm.d, fm.d)).trace();
        best = std::min(best, v);
      }
      return;
    }
    for (Index k = 0; k <= left; ++k) {
      lam(idx) = static_cast<double>(k) * step;
      rec(idx + 1, left - k, lam);
    }
  };
  RVec lam(m);
  rec(0, levels, lam);
  return best;
}

}  // namespace

TEST_CASE("two identical configurations: any split is optimal") {
  ConfigurationEnsemble ens = xyz_ensemble(photonics::rho_mixd());
  ens.configs.resize(2);
  ens.configs[1] = ens.configs[0];
  ens.configs[1].label = "copy";
  FisherModel fm = fisher_blocks(StateProblem{ens}, photonics::rho_mixd());
  // two copies of the same (rank-deficient) block are not identifiable for a
  // qubit, so embed in a 3-config model with the missing directions added
  ConfigurationEnsemble full = xyz_ensemble(photonics::rho_mixd());
  full.configs.push_back(full.configs[0]);
  full.configs[3].label = "X-copy";
  FisherModel fm2 = fisher_blocks(StateProblem{full}, photonics::rho_mixd());
  Design d = solve_design(fm2);
  // copies share weight: their blocks are equal so V depends on the sum only
  const double v_single = [&] {
    RVec lam(4);
    lam << d.lambda(0) + d.lambda(3), d.lambda(1), d.lambda(2), 0.0;
    return crb_value(fm2, lam).value;
  }();
  CHECK(v_single == doctest::Approx(d.v_lambda).epsilon(1e-9));
}

TEST_CASE("one-arm pure no-noise design reproduces the paper's support") {
  FisherModel fm = one_arm_model(photonics::rho_pure(), false);
  Design d = solve_design(fm);
  CHECK(std::lround(d.v_lambda / 1e-4) == 20307);  // ceil gives the paper's 20,308
  auto weight = [&](int h, int q) {
    for (Index g = 0; g < fm.n_cfg(); ++g)
      if (fm.labels[size_t(g)] == "h=" + std::to_string(h) + ",q=" + std::to_string(q))
        return d.lambda(g);
    return -1.0;
  };
  CHECK(std::abs(weight(0, 0) - 0.24) <= 0.02);
  CHECK(std::abs(weight(20, 45) - 0.25) <= 0.02);
  CHECK(std::abs(weight(25, 45) - 0.25) <= 0.02);
  CHECK(std::abs(weight(45, 0) - 0.24) <= 0.02);
  CHECK(d.kkt_residual <= 1e-7);

  SUBCASE("certificate at the optimum") {
    DualCertificate cert = dual_certificate(d, fm);
    CHECK(cert.cs_residual <= 1e-6);
    CHECK(cert.duality_gap <= 1e-6 * (1 + d.v_lambda));
    for (Index g = 0; g < fm.n_cfg(); ++g)
      if (d.lambda(g) > 1e-4) CHECK(std::abs(cert.slacks(g)) <= 1e-5);
    CHECK(cert.max_slack <= 1e-7);
  }

  SUBCASE("rounding and the bound pair") {
    round_design(d, fm, 1000);
    CHECK(*d.rounded_total >= 999);
    // scale-consistent sandwich: V(ell_round) >= V(lambda)/sum(ell_round)
    CHECK(*d.v_rounded >= d.v_lambda / *d.rounded_total - 1e-12);
    CHECK((*d.v_scaled) / (*d.v_rounded) == doctest::Approx(0.9990).epsilon(2e-3));
  }

  SUBCASE("truncation tradeoff") {
    TruncationTradeoff t8 = truncate_design(d, fm, 8, 1e-4);
    CHECK(std::lround(t8.ell_sub) == 20307);  // support fits in 8 configs
    TruncationTradeoff tall = truncate_design(d, fm, fm.n_cfg(), 1e-4);
    CHECK(std::lround(tall.ell_sub) == std::lround(d.v_lambda / 1e-4));
    CHECK_THROWS_AS(truncate_design(d, fm, 1, 1e-4), TruncationNotIdentifiable);
  }
}

TEST_CASE("round_design basics") {
  ConfigurationEnsemble full = xyz_ensemble(photonics::rho_mixd());
  FisherModel fm = fisher_blocks(StateProblem{full}, photonics::rho_mixd());
  Design d;
  d.lambda = (RVec(3) << 1.0 / 3, 2.0 / 3, 0.0).finished();
  d.v_lambda = crb_value(fm, d.lambda).value;
  round_design(d, fm, 100);
  CHECK((*d.rounding)(0) == 33);
  CHECK((*d.rounding)(1) == 67);
  CHECK((*d.rounding)(2) == 0);

  Design tiny;
  tiny.lambda = RVec::Constant(3, 1.0 / 3);
  tiny.v_lambda = 1.0;
  CHECK_THROWS_AS(round_design(tiny, fm, 1), AllZero);
}

TEST_CASE("design solve matches brute-force simplex search on small instances") {
  for (int rep = 0; rep < 3; ++rep) {
    FisherModel fm = random_model(4);
    Design d;
    try {
      d = solve_design(fm);
    } catch (const NotIdentifiable&) {
      continue;
    }
    const double vg = grid_search_v(fm, 0.05);  // coarse grid upper bound set
    CHECK(d.v_lambda <= vg + 1e-9);
    DualCertificate cert = dual_certificate(d, fm);
    CHECK(vg >= cert.dual_value - 1e-9);  // grid minimum above the certified dual
  }
  // one finer run at the property-suite step on a 4-config instance
  FisherModel fm = random_model(4);
  try {
    Design d = solve_design(fm);
    const double vg = grid_search_v(fm, 0.005);
    CHECK(vg >= d.v_lambda - 1e-4);
  } catch (const NotIdentifiable&) {
  }
}

TEST_CASE("homogeneity: scaling all blocks rescales V and keeps the argmin") {
  FisherModel fm = random_model(5);
  try {
    Design d1 = solve_design(fm);
    FisherModel scaled = fm;
    for (RMat& b : scaled.blocks) b *= 3.0;
    Design d2 = solve_design(scaled);
    CHECK(d2.v_lambda == doctest::Approx(d1.v_lambda / 3.0).epsilon(1e-7));
    CHECK((d1.lambda - d2.lambda).cwiseAbs().maxCoeff() <= 1e-5);
  } catch (const NotIdentifiable&) {
  }
}

TEST_CASE("degenerate zero block receives zero weight") {
  ConfigurationEnsemble ens = xyz_ensemble(photonics::rho_mixd());
  FisherModel fm = fisher_blocks(StateProblem{ens}, photonics::rho_mixd());
  FisherModel padded = fm;
  padded.blocks.push_back(RMat::Zero(3, 3));
  padded.labels.push_back("dead");
  Design d = solve_design(padded);
  CHECK(d.lambda(3) <= 1e-6);
  CHECK(d.v_lambda == doctest::Approx(solve_design(fm).v_lambda).epsilon(1e-7));
}

TEST_CASE("not identifiable model is rejected") {
  ConfigurationEnsemble ens;
  Configuration c;
  c.povm = basis_povm('Z');
  c.input = photonics::rho_mixd();
  c.label = "z";
  ens.configs = {c};
  FisherModel fm = fisher_blocks(StateProblem{ens}, photonics::rho_mixd());
  CHECK_THROWS_AS(solve_design(fm), NotIdentifiable);
}

TEST_CASE("bootstrap trace") {
  ConfigurationEnsemble ens = xyz_ensemble(photonics::rho_mixd());
  StateProblem prob{ens};
  EstimationProblem ep{prob};

  EstimateFn estimate = [&](const CountData& data) -> ParamPoint {
    return mle_state({ep, data, {}}).estimate;
  };
  SimulateFn simulate = [&](const RVec& ell, std::uint64_t seed) {
    RngStream rng(seed);
    return sample_counts(ep, photonics::rho_mixd(), ell, rng);
  };

  BootstrapSettings s;
  s.rounds = 3;
  s.lexpt_per_round = 1e4;
  s.seed = 7;
  RVec ell0 = RVec::Constant(3, 3334);

  auto trace = bootstrap(ep, ell0, s, estimate, simulate);
  REQUIRE(trace.size() == 3);
  // V non-increasing on this instance (recorded, not asserted as a theorem)
  CHECK(trace[1].v_lambda <= trace[0].v_lambda + 1e-6);
  CHECK(trace[2].v_lambda <= trace[1].v_lambda + 1e-6);

  // rounds = 1 is estimate-then-design
  BootstrapSettings s1 = s;
  s1.rounds = 1;
  auto t1 = bootstrap(ep, ell0, s1, estimate, simulate);
  CHECK((t1[0].lambda - trace[0].lambda).cwiseAbs().maxCoeff() <= 1e-12);

  // fixed seed reproduces the trace bitwise
  auto again = bootstrap(ep, ell0, s, estimate, simulate);
  for (size_t r = 0; r < trace.size(); ++r) {
    CHECK((again[r].ell - trace[r].ell).cwiseAbs().maxCoeff() == 0.0);
    CHECK(again[r].v_lambda == trace[r].v_lambda);
  }
}
