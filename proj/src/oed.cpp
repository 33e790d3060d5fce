#include "tomoed/oed.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#ifdef TOMOED_HAVE_OPENMP
#include <omp.h>
#endif

namespace tomoed {

namespace {

double v_of(const FisherModel& model, const RVec& w) {
  RMat g = model.aggregate(w);
  Eigen::LLT<RMat> llt(g);
  if (llt.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  return llt.solve(RMat::Identity(model.d, model.d)).trace();
}

// one Newton stage of min V(lambda) - mu sum log lambda  s.t. 1'lambda = 1
void newton_stage(const FisherModel& model, RVec& lam, double mu, const DesignOptions& opts,
                  int& total_iters) {
  const Index m = model.n_cfg();
  const Index d = model.d;
  std::vector<RMat> w(static_cast<size_t>(m)), v2(static_cast<size_t>(m));
  for (int it = 0; it < 400; ++it) {
    if (++total_iters > opts.max_newton) throw SolverMaxIter("solve_design: iteration budget exhausted");
    RMat g = model.aggregate(lam);
    Eigen::LLT<RMat> llt(g);
    if (llt.info() != Eigen::Success) throw NotIdentifiable("solve_design: singular aggregate");
    RMat gi = llt.solve(RMat::Identity(d, d));
    RVec grad(m);
    for (Index a = 0; a < m; ++a) {
      w[static_cast<size_t>(a)].noalias() = gi * model.blocks[static_cast<size_t>(a)] * gi;
      v2[static_cast<size_t>(a)].noalias() = model.blocks[static_cast<size_t>(a)] * gi;
      grad(a) = -w[static_cast<size_t>(a)].trace() - mu / lam(a);
    }
    RMat h(m, m);
    for (Index a = 0; a < m; ++a)
      for (Index b = a; b < m; ++b) {
        const double val = 2.0 * (w[static_cast<size_t>(a)].cwiseProduct(
                                      v2[static_cast<size_t>(b)].transpose()))
                                     .sum();
        h(a, b) = val;
        h(b, a) = val;
      }
    h.diagonal().array() += mu / lam.array().square();
    // KKT system for the linear constraint 1' dlam = 0
    RMat kkt = RMat::Zero(m + 1, m + 1);
    kkt.topLeftCorner(m, m) = h;
    kkt.topRightCorner(m, 1).setOnes();
    kkt.bottomLeftCorner(1, m).setOnes();
    RVec rhs = RVec::Zero(m + 1);
    rhs.head(m) = -grad;
    RVec sol = kkt.ldlt().solve(rhs);
    RVec dlam = sol.head(m);
    const double dec2 = -grad.dot(dlam);
    const double f0 = v_of(model, lam) - mu * lam.array().log().sum();
    if (dec2 / 2 <= opts.newton_tol * (1 + std::abs(f0))) return;
    double step = 1.0;
    for (Index a = 0; a < m; ++a)
      if (dlam(a) < 0) step = std::min(step, -0.99 * lam(a) / dlam(a));
    double ft = std::numeric_limits<double>::infinity();
    while (step > 1e-16) {
      RVec lt = lam + step * dlam;
      if (lt.minCoeff() > 0) {
        ft = v_of(model, lt) - mu * lt.array().log().sum();
        if (ft <= f0 - 0.01 * step * dec2) break;
      }
      step *= 0.5;
    }
    if (!(ft < f0)) return;
    lam += step * dlam;
  }
}

}  // namespace

Design solve_design(const FisherModel& model, const DesignOptions& opts) {
  const Index m = model.n_cfg();
  if (m == 0) throw InvalidModel("solve_design: empty model");
  RVec lam = RVec::Constant(m, 1.0 / static_cast<double>(m));
  {
    RMat g = model.aggregate(lam);
    Eigen::SelfAdjointEigenSolver<RMat> es(g);
    if (es.eigenvalues()(0) <= 0 ||
        es.eigenvalues()(model.d - 1) / es.eigenvalues()(0) > 1e12)
      throw NotIdentifiable("solve_design: model not identifiable for any allocation");
  }
  double mu = 1.0;
  int total = 0;
  while (true) {
    newton_stage(model, lam, mu, opts, total);
    if (static_cast<double>(m) * mu <= opts.gap_tol) break;
    mu *= 0.1;
  }
  Design d;
  d.lambda = lam;
  RMat g = model.aggregate(lam);
  Eigen::SelfAdjointEigenSolver<RMat> es(g);
  d.condition = es.eigenvalues()(model.d - 1) / es.eigenvalues()(0);
  d.v_lambda = es.eigenvalues().cwiseInverse().sum();
  // KKT residual of the original problem: on-support stationarity plus
  // feasibility; the certificate refines this.
  RMat gi = es.operatorInverseSqrt();
  gi = gi * gi;
  double nu = d.v_lambda;
  double res = 0.0;
  for (Index a = 0; a < m; ++a) {
    const double t = (gi * model.blocks[static_cast<size_t>(a)] * gi).trace();
    res = std::max(res, lam(a) * std::abs(t - nu) / std::max(1.0, nu));
  }
  d.kkt_residual = res;
  return d;
}

void round_design(Design& d, const FisherModel& model, double lexpt) {
  if (lexpt < 1) throw InvalidModel("round_design: lexpt must be >= 1");
  RVec ell(d.lambda.size());
  for (Index i = 0; i < ell.size(); ++i) {
    const double x = lexpt * d.lambda(i);
    // round half away from zero
    ell(i) = std::floor(x + 0.5);
  }
  if (ell.maxCoeff() <= 0) throw AllZero("round_design: all entries round to zero");
  d.lexpt = lexpt;
  d.rounding = ell;
  d.rounded_total = ell.sum();
  d.v_scaled = d.v_lambda / lexpt;
  d.v_rounded = v_of(model, ell);
}

TruncationTradeoff truncate_design(const Design& d, const FisherModel& model, Index n_sub, double v0) {
  const Index m = d.lambda.size();
  if (n_sub < 1 || n_sub > m) throw InvalidModel("truncate_design: bad n_sub");
  std::vector<Index> order(static_cast<size_t>(m));
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return d.lambda(a) > d.lambda(b); });
  RVec sub = RVec::Zero(m);
  for (Index k = 0; k < n_sub; ++k) sub(order[static_cast<size_t>(k)]) = d.lambda(order[static_cast<size_t>(k)]);
  const double s = sub.sum();
  if (s <= 0) throw TruncationNotIdentifiable("truncate_design: kept support has zero mass");
  sub /= s;
  RMat g = model.aggregate(sub);
  Eigen::SelfAdjointEigenSolver<RMat> es(g);
  if (es.eigenvalues()(0) <= 0 || es.eigenvalues()(model.d - 1) / es.eigenvalues()(0) > 1e12)
    throw TruncationNotIdentifiable("truncate_design: kept support makes G singular");
  TruncationTradeoff t;
  t.n_sub = n_sub;
  t.lambda_sub = sub;
  t.v_sub = es.eigenvalues().cwiseInverse().sum();
  t.ell_sub = std::floor(t.v_sub / v0 + 0.5);
  return t;
}

std::vector<TruncationTradeoff> truncation_sweep(const Design& d, const FisherModel& model,
                                                 const std::vector<Index>& sizes, double v0, Exec exec) {
  std::vector<TruncationTradeoff> out(sizes.size());
  std::exception_ptr err;
#ifdef TOMOED_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic) if (exec == Exec::Parallel)
#endif
  for (size_t i = 0; i < sizes.size(); ++i) {
    try {
      out[i] = truncate_design(d, model, sizes[i], v0);
    } catch (...) {
#ifdef TOMOED_HAVE_OPENMP
#pragma omp critical
#endif
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
  return out;
}

DualCertificate dual_certificate(const Design& d, const FisherModel& model, double tol) {
  DualCertificate c;
  RMat g = model.aggregate(d.lambda);
  Eigen::SelfAdjointEigenSolver<RMat> es(g);
  if (es.eigenvalues()(0) <= 0) throw NotIdentifiable("dual_certificate: singular aggregate");
  RMat gi = es.operatorInverseSqrt();
  gi = gi * gi;  // G^{-1}
  const double v = gi.trace();
  RMat w = (gi * gi) / v;
  const Index m = model.n_cfg();
  RVec slack(m);
  for (Index a = 0; a < m; ++a) slack(a) = (w * model.blocks[static_cast<size_t>(a)]).trace() - 1.0;
  c.max_slack = slack.maxCoeff();
  // scale W into dual feasibility so the reported value is a true lower bound
  const double scale = (c.max_slack > 0) ? 1.0 / (1.0 + c.max_slack) : 1.0;
  c.w = scale * w;
  c.slacks = ((slack.array() + 1.0) * scale - 1.0).matrix();
  Eigen::SelfAdjointEigenSolver<RMat> ew(c.w);
  const double trsqrt = ew.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  c.dual_value = trsqrt * trsqrt;
  c.duality_gap = v - c.dual_value;
  double cs = 0.0;
  for (Index a = 0; a < m; ++a) cs = std::max(cs, d.lambda(a) * std::abs(c.slacks(a)));
  c.cs_residual = cs;
  if (cs > 10 * tol || c.duality_gap > 10 * tol * (1.0 + v))
    throw CertificateFailed("dual_certificate: residuals exceed 10x tolerance");
  return c;
}

std::vector<BootstrapRound> bootstrap(const EstimationProblem& problem, const RVec& initial_ell,
                                      const BootstrapSettings& settings, const EstimateFn& estimate,
                                      const SimulateFn& simulate) {
  if (settings.rounds < 1) throw InvalidModel("bootstrap: rounds must be >= 1");
  std::vector<BootstrapRound> trace;
  RVec ell = initial_ell;
  for (int r = 0; r < settings.rounds; ++r) {
    const std::uint64_t round_seed = settings.seed * 1000003ULL + static_cast<std::uint64_t>(r);
    CountData data = simulate(ell, round_seed);
    BootstrapRound rec;
    rec.estimate = estimate(data);
    FisherModel fm = fisher_blocks(problem, rec.estimate);
    Design des = solve_design(fm);
    round_design(des, fm, settings.lexpt_per_round);
    rec.lambda = des.lambda;
    rec.ell = *des.rounding;
    rec.v_lambda = des.v_lambda;
    trace.push_back(std::move(rec));
    ell = trace.back().ell;
  }
  return trace;
}

}  // namespace tomoed
