#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include "test_helpers.hpp"
#include "tomoed/json_io.hpp"

using namespace tomoed;
using namespace tomoed::testing;

TEST_CASE("complex matrices round-trip bit-exactly") {
  CMat m = random_cmat(3, 2);
  m(0, 0) = Complex(1.0 / 3.0, -2.0 / 7.0);
  Json j = cmat_to_json(m);
  std::string text = j.dump();
  CMat back = cmat_from_json(parse_json_text(text, "mem"));
  CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("ensembles round-trip through JSON") {
  auto ens = photonics::build_one_arm_ensemble(photonics::angle_grid({0, 10}, {0, 45}),
                                               photonics::DetectorNoise{0.75, 0.05},
                                               photonics::rho_mixd());
  Json j = ensemble_to_json(ens);
  ConfigurationEnsemble back = ensemble_from_json(parse_json_text(j.dump(), "mem"));
  REQUIRE(back.n_cfg() == ens.n_cfg());
  for (Index g = 0; g < ens.n_cfg(); ++g) {
    CHECK(back.configs[size_t(g)].label == ens.configs[size_t(g)].label);
    CHECK((back.configs[size_t(g)].input.rho - ens.configs[size_t(g)].input.rho)
              .cwiseAbs()
              .maxCoeff() == 0.0);
    for (size_t a = 0; a < ens.configs[size_t(g)].povm.elements.size(); ++a)
      CHECK((back.configs[size_t(g)].povm.elements[a] - ens.configs[size_t(g)].povm.elements[a])
                .cwiseAbs()
                .maxCoeff() == 0.0);
  }
  back.validate();
}

TEST_CASE("problems round-trip with their type tags") {
  auto ens = photonics::build_one_arm_ensemble(photonics::angle_grid({0, 20}, {15}),
                                               std::nullopt, photonics::rho_pure());
  EstimationProblem p = StateProblem{ens};
  Json j = problem_to_json(p);
  CHECK(j.at("type") == "state");
  EstimationProblem back = problem_from_json(j);
  CHECK(std::holds_alternative<StateProblem>(back));

  RVec q(3);
  q << 0.6, 0.2, 0.2;
  auto bd = photonics::bitflip_depolarizing_problem(q, 25.0, photonics::channel_angle_grid());
  Json j2 = problem_to_json(EstimationProblem{bd.problem});
  EstimationProblem back2 = problem_from_json(j2);
  const auto& op = std::get<OsrDistProblem>(back2);
  CHECK(op.kappa() == 3);
  CHECK(op.kraus_bar[2].size() == 4);

  Json j3;
  j3["type"] = "hamiltonian";
  j3["model"] = "hadamard";
  j3["eps"] = 5.0;
  j3["input"] = "ket0";
  EstimationProblem back3 = problem_from_json(j3);
  CHECK(std::get<HamiltonianProblem>(back3).n_cfg() == 100);
}

TEST_CASE("points round-trip") {
  ParamPoint p1{photonics::rho_mixd()};
  ParamPoint b1 = point_from_json(point_to_json(p1));
  CHECK((std::get<DensityMatrix>(b1).rho - photonics::rho_mixd().rho).cwiseAbs().maxCoeff() == 0.0);

  RVec f(3);
  f << 0.2, 0.3, 0.5;
  Json jf;
  jf["f"] = rvec_to_json(f);
  CHECK((std::get<RVec>(point_from_json(jf)) - f).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("counts round-trip") {
  CountData d;
  d.counts = {(RVec(2) << 3, 5).finished(), (RVec(4) << 0, 1, 2, 9).finished()};
  CountData back = counts_from_json(parse_json_text(counts_to_json(d).dump(), "mem"));
  REQUIRE(back.n_cfg() == 2);
  CHECK((back.counts[0] - d.counts[0]).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.counts[1] - d.counts[1]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("parse errors carry line and column") {
  try {
    parse_json_text("{\n  \"a\": [1, }\n}", "bad.json");
    CHECK(false);
  } catch (const ParseError& e) {
    std::string msg = e.what();
    CHECK(msg.find("bad.json:2:") != std::string::npos);
  }
}
