#include "tomoed/simlab.hpp"

#include <cmath>

#include "tomoed/estimator.hpp"
#include "tomoed/fidelity.hpp"
#include "tomoed/fisher.hpp"
#include "tomoed/oed.hpp"
#include "tomoed/photonics.hpp"

#ifdef TOMOED_HAVE_OPENMP
#include <omp.h>
#endif

namespace tomoed {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

RngStream RngStream::derived(std::uint64_t seed, std::uint64_t stream_id) {
  std::uint64_t s = seed;
  std::uint64_t mixed = splitmix64(s) ^ (0x9E3779B97F4A7C15ULL * (stream_id + 1));
  return RngStream(mixed);
}

std::uint64_t RngStream::next_u64() { return splitmix64(state_); }

double RngStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::int64_t RngStream::binomial(std::int64_t n, double p) {
  if (p <= 0.0) return 0;
  if (p >= 1.0) return n;
  std::int64_t k = 0;
  for (std::int64_t i = 0; i < n; ++i)
    if (next_double() < p) ++k;
  return k;
}

RVec RngStream::multinomial(std::int64_t trials, const RVec& probs) {
  RVec out = RVec::Zero(probs.size());
  std::int64_t remaining = trials;
  double mass = 1.0;
  for (Index a = 0; a + 1 < probs.size() && remaining > 0; ++a) {
    const double cond = (mass > 0) ? std::clamp(probs(a) / mass, 0.0, 1.0) : 0.0;
    const std::int64_t k = binomial(remaining, cond);
    out(a) = static_cast<double>(k);
    remaining -= k;
    mass -= probs(a);
  }
  out(probs.size() - 1) += static_cast<double>(remaining);
  return out;
}

CountData sample_counts(const EstimationProblem& problem, const ParamPoint& truth, const RVec& ell,
                        RngStream& rng) {
  if (ell.minCoeff() < 0) throw InvalidModel("sample_counts: negative allocation");
  std::vector<RVec> p;
  try {
    p = outcome_probs(problem, truth);
  } catch (const InfeasiblePoint& e) {
    throw InfeasibleTruth(e.what());
  }
  if (static_cast<Index>(p.size()) != ell.size())
    throw DimensionMismatch("sample_counts: allocation size mismatch");
  CountData data;
  for (Index g = 0; g < ell.size(); ++g)
    data.counts.push_back(rng.multinomial(static_cast<std::int64_t>(std::llround(ell(g))),
                                          p[static_cast<size_t>(g)]));
  return data;
}

LikelihoodCurve average_likelihood(const EstimationProblem& problem, const ParamPoint& truth,
                                   const RVec& ell, const std::vector<RVec>& grid) {
  std::vector<RVec> pt = outcome_probs(problem, truth);
  LikelihoodCurve curve;
  curve.grid = grid;
  curve.values.resize(grid.size());
  const auto& prob = std::get<HamiltonianProblem>(problem);
  for (size_t k = 0; k < grid.size(); ++k) {
    const RVec& th = grid[k];
    if ((th - prob.model.theta_lo).minCoeff() < -1e-12 ||
        (prob.model.theta_hi - th).minCoeff() < -1e-12)
      throw InfeasiblePoint("average_likelihood: grid point outside Theta");
    std::vector<RVec> pm = prob.probs(th);
    double val = 0.0;
    for (Index g = 0; g < ell.size() && std::isfinite(val); ++g)
      for (Index a = 0; a < pm[static_cast<size_t>(g)].size(); ++a) {
        const double ptrue = pt[static_cast<size_t>(g)](a);
        if (ell(g) * ptrue <= 0) continue;
        const double pmod = pm[static_cast<size_t>(g)](a);
        if (pmod <= 0) {  // reported as +inf point
          val = std::numeric_limits<double>::infinity();
          break;
        }
        val -= ell(g) * ptrue * std::log(pmod);
      }
    curve.values[k] = val;
  }
  double best = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < curve.values.size(); ++k)
    if (curve.values[k] < best) {
      best = curve.values[k];
      curve.argmin = static_cast<Index>(k);
    }
  curve.normalized.resize(curve.values.size());
  for (size_t k = 0; k < curve.values.size(); ++k) curve.normalized[k] = curve.values[k] / best;
  return curve;
}

void PulseTable::validate() const {
  for (const PulseSegment& s : segments) {
    if (s.dt <= 0) throw InvalidModel("pulse table: non-positive duration");
    if (s.controls.size() != 5) throw InvalidModel("pulse table: expected 5 controls per segment");
  }
}

CMat pulse_gate(const PulseTable& table, const RVec& omega) {
  table.validate();
  CMat u = CMat::Identity(4, 4);
  for (const PulseSegment& s : table.segments)
    u = herm_expm(photonics::bell_hamiltonian(s.controls, omega), s.dt) * u;
  return u;
}

std::vector<AdaptiveRound> run_adaptive_mle(const AdaptiveMleLoop& loop, const RVec& theta0) {
  std::vector<AdaptiveRound> trace;
  RVec theta_hat = theta0;
  for (int r = 0; r < loop.rounds; ++r) {
    AdaptiveRound rec;
    rec.control = loop.control_rule(theta_hat);
    HamiltonianProblem prob = loop.problem_for_control(rec.control);
    FisherModel fm = fisher_blocks(EstimationProblem{prob}, ParamPoint{theta_hat});
    Design des = solve_design(fm);
    round_design(des, fm, loop.lexpt);
    rec.lambda = des.lambda;
    rec.ell = *des.rounding;
    RngStream rng = RngStream::derived(loop.seed, static_cast<std::uint64_t>(r));
    CountData data = sample_counts(EstimationProblem{prob}, ParamPoint{loop.theta_true}, rec.ell, rng);
    LikelihoodSpec spec{EstimationProblem{prob}, std::move(data), {}};
    EstimateReport rep = mle_hamiltonian(spec);
    theta_hat = std::get<RVec>(rep.estimate);
    rec.theta_hat = theta_hat;
    rec.neg_loglik = rep.neg_loglik;
    rec.wc_fidelity =
        worst_case_fidelity(loop.desired_gate, loop.realized_gate(rec.control, loop.theta_true)).value;
    trace.push_back(std::move(rec));
  }
  return trace;
}

std::vector<HillClimbRound> run_adaptive_hillclimb(const HillClimbLoop& loop, double theta0) {
  std::vector<HillClimbRound> trace;
  double theta_hat = theta0;
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int r = 0; r < loop.rounds; ++r) {
    const double lo0 = theta_hat * (1.0 - loop.bracket);
    const double hi0 = theta_hat * (1.0 + loop.bracket);
    double a = std::min(lo0, hi0), b = std::max(lo0, hi0);
    double c = b - golden * (b - a), d = a + golden * (b - a);
    double fc = loop.expected_nll(c, theta_hat);
    double fd = loop.expected_nll(d, theta_hat);
    for (int it = 0; it < 90; ++it) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - golden * (b - a);
        fc = loop.expected_nll(c, theta_hat);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + golden * (b - a);
        fd = loop.expected_nll(d, theta_hat);
      }
    }
    theta_hat = 0.5 * (a + b);
    HillClimbRound rec;
    rec.theta_hat = theta_hat;
    rec.expected_nll = loop.expected_nll(theta_hat, theta_hat);
    rec.fidelity = loop.realized_fidelity ? loop.realized_fidelity(theta_hat) : 0.0;
    trace.push_back(rec);
  }
  return trace;
}

LandscapeResult landscape_scan(const BipartiteLandscape& model, const RVec& eps_z_grid,
                               const RVec& eps_x_grid, Exec exec) {
  if (eps_z_grid.size() == 0 || eps_x_grid.size() == 0)
    throw InvalidModel("landscape_scan: empty grid");
  CMat I2 = CMat::Identity(2, 2);
  CMat X(2, 2), Y(2, 2), Z(2, 2);
  X << 0, 1, 1, 0;
  Y << 0, Complex(0, -1), Complex(0, 1), 0;
  Z << 1, 0, 0, -1;
  CVec ket0(2), ket1(2);
  ket0 << 1, 0;
  ket1 << 0, 1;
  CMat rho0 = kron(ket1 * ket1.adjoint(), I2 / 2.0);
  CMat meas = kron(ket0 * ket0.adjoint(), I2);
  CMat he = model.w_ez * Z / 2.0 + model.w_ex * X / 2.0;
  CMat hqe = model.w_qe * (kron(X, X) + kron(Y, Y) + kron(Z, Z));
  const double tf = M_PI / model.w_qx;

  LandscapeResult res;
  res.eps_z = eps_z_grid;
  res.eps_x = eps_x_grid;
  res.p.resize(eps_z_grid.size(), eps_x_grid.size());
  const Index nz = eps_z_grid.size(), nx = eps_x_grid.size();
#ifdef TOMOED_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic) collapse(2) if (exec == Exec::Parallel)
#endif
  for (Index i = 0; i < nz; ++i)
    for (Index j = 0; j < nx; ++j) {
      CMat hq = (eps_z_grid(i) - 1.0) * model.w_qz * Z / 2.0 + eps_x_grid(j) * model.w_qx * X / 2.0;
      CMat h = kron(hq, I2) + kron(I2, he) + hqe;
      CMat uf = herm_expm(h, tf);
      res.p(i, j) = (meas * uf * rho0 * uf.adjoint()).trace().real();
    }

  res.max_value = -1.0;
  res.local_maxima = 0;
  for (Index i = 0; i < nz; ++i)
    for (Index j = 0; j < nx; ++j) {
      const double v = res.p(i, j);
      if (v > res.max_value) {
        res.max_value = v;
        res.argmax_ez = eps_z_grid(i);
        res.argmax_ex = eps_x_grid(j);
      }
      bool local = true;
      if (i > 0 && res.p(i - 1, j) >= v) local = false;
      if (i + 1 < nz && res.p(i + 1, j) >= v) local = false;
      if (j > 0 && res.p(i, j - 1) >= v) local = false;
      if (j + 1 < nx && res.p(i, j + 1) >= v) local = false;
      if (local) ++res.local_maxima;
    }
  return res;
}

}  // namespace tomoed
