#include "tomoed/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "tomoed/fisher.hpp"

#ifdef TOMOED_HAVE_OPENMP
#include <omp.h>
#endif

namespace tomoed {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_shapes(const AffineView& view, const CountData& data) {
  if (data.n_cfg() != view.n_cfg()) throw DimensionMismatch("likelihood: config count mismatch");
  for (Index g = 0; g < view.n_cfg(); ++g) {
    const RVec& n = data.counts[static_cast<size_t>(g)];
    if (n.size() != view.base[static_cast<size_t>(g)].size())
      throw DimensionMismatch("likelihood: outcome count mismatch at configuration " +
                              std::to_string(g));
    for (Index a = 0; a < n.size(); ++a)
      if (n(a) > 0 && view.structurally_zero[static_cast<size_t>(g)][static_cast<size_t>(a)])
        throw ZeroProbabilityOutcome("likelihood: counts observed on an outcome the model forces to zero");
  }
}

// negative log-likelihood over the affine view; +inf when a counted outcome
// has p <= 0 (0 log 0 = 0 convention: zero-count terms dropped)
SmoothFn make_nll(const AffineView& view, const CountData& data) {
  return [&view, &data](const RVec& z, RVec* grad, RMat* hess) -> double {
    double val = 0.0;
    if (grad) grad->setZero(view.d);
    if (hess) hess->setZero(view.d, view.d);
    for (Index g = 0; g < view.n_cfg(); ++g) {
      const RVec p = view.probs(g, z);
      const RVec& n = data.counts[static_cast<size_t>(g)];
      const RMat& a = view.coef[static_cast<size_t>(g)];
      for (Index al = 0; al < p.size(); ++al) {
        if (n(al) <= 0) continue;
        if (p(al) <= 0) return kInf;
        val -= n(al) * std::log(p(al));
        if (grad) grad->noalias() -= (n(al) / p(al)) * a.row(al).transpose();
        if (hess) hess->noalias() += (n(al) / (p(al) * p(al))) * (a.row(al).transpose() * a.row(al));
      }
    }
    return val;
  };
}

// -log det(base + sum z_i E_i); degree = matrix dimension
struct LogDetBarrier {
  CMat base;
  const std::vector<CMat>* elems;  // d basis elements
  Index offset = 0;                // first z index used

  double operator()(const RVec& z, RVec* grad, RMat* hess) const {
    const Index d = static_cast<Index>(elems->size());
    CMat m = base;
    for (Index i = 0; i < d; ++i) m += z(offset + i) * (*elems)[static_cast<size_t>(i)];
    Eigen::LLT<CMat> llt(m);
    if (llt.info() != Eigen::Success) return kInf;
    CMat l = llt.matrixL();
    double logdet = 0.0;
    for (Index i = 0; i < m.rows(); ++i) logdet += std::log(l(i, i).real());
    logdet *= 2.0;
    if (grad || hess) {
      CMat mi = llt.solve(CMat::Identity(m.rows(), m.cols()));
      if (grad) {
        grad->setZero(z.size());
        for (Index i = 0; i < d; ++i)
          (*grad)(offset + i) = -(mi * (*elems)[static_cast<size_t>(i)]).trace().real();
      }
      if (hess) {
        hess->setZero(z.size(), z.size());
        std::vector<CMat> mie(static_cast<size_t>(d));
        for (Index i = 0; i < d; ++i) mie[static_cast<size_t>(i)] = mi * (*elems)[static_cast<size_t>(i)];
        for (Index i = 0; i < d; ++i)
          for (Index j = i; j < d; ++j) {
            const double v =
                (mie[static_cast<size_t>(i)] * mie[static_cast<size_t>(j)]).trace().real();
            (*hess)(offset + i, offset + j) = v;
            (*hess)(offset + j, offset + i) = v;
          }
      }
    }
    return -logdet;
  }
};

struct SolveOutput {
  RVec z;
  double objective;
  double gap;
  double kkt;
  int iterations;
  bool converged;
};

SolveOutput solve_barrier_problem(const SmoothFn& f, const SmoothFn& phi, double degree, RVec z0) {
  BarrierOptions opts;
  BarrierResult r = barrier_minimize(f, phi, degree, std::move(z0), opts);
  SolveOutput out;
  out.z = r.z;
  out.objective = r.objective;
  out.gap = r.gap;
  out.kkt = r.gap / (1.0 + std::abs(r.objective));
  out.iterations = r.newton_iters;
  out.converged = r.converged;
  return out;
}

std::vector<RVec> fitted_probs(const AffineView& view, const RVec& z) {
  std::vector<RVec> out;
  for (Index g = 0; g < view.n_cfg(); ++g) out.push_back(view.probs(g, z));
  return out;
}

// Fisher-rank identifiability flag for the distribution problems, evaluated at
// the simplex center (rank deficiency there is structural).
template <typename Problem>
void attach_identifiability(const Problem& prob, Index k, EstimateReport& rep) {
  try {
    RVec center = RVec::Constant(k, 1.0 / static_cast<double>(k));
    FisherModel fm = fisher_blocks(EstimationProblem{prob}, ParamPoint{center});
    IdentifiabilityRecord rec = identifiability(fm);
    rep.identifiable = rec.identifiable;
    rep.fisher_condition = rec.condition;
  } catch (const ZeroProbability&) {
    rep.identifiable = std::nullopt;
  }
}

}  // namespace

double empirical_lower_bound(const CountData& data) {
  double lb = 0.0;
  RVec trials = data.trials();
  for (Index g = 0; g < data.n_cfg(); ++g) {
    const RVec& n = data.counts[static_cast<size_t>(g)];
    for (Index a = 0; a < n.size(); ++a)
      if (n(a) > 0) lb -= n(a) * std::log(n(a) / trials(g));
  }
  return lb;
}

// ---- state -----------------------------------------------------------------

namespace {

EstimateReport mle_state_impl(const LikelihoodSpec& spec, bool pure_relaxed) {
  const auto& prob = std::get<StateProblem>(spec.problem);
  const Index n = prob.dim();
  AffineView view = prob.affine();
  check_shapes(view, spec.data);
  spec.data.validate();
  SmoothFn nll = make_nll(view, spec.data);

  HermBasis basis = HermBasis::canonical(n);
  std::vector<CMat> tail(basis.elements().begin() + 1, basis.elements().end());
  LogDetBarrier logdet{CMat::Identity(n, n) / static_cast<double>(n), &tail, 0};
  const double purity_cap = 1.0 - 1.0 / static_cast<double>(n);  // Tr rho^2 = 1/n + |z|^2
  SmoothFn phi = [&, pure_relaxed](const RVec& z, RVec* g, RMat* h) -> double {
    double v = logdet(z, g, h);
    if (!std::isfinite(v) || !pure_relaxed) return v;
    const double slack = purity_cap - z.squaredNorm();
    if (slack <= 0) return kInf;
    v -= std::log(slack);
    if (g) *g += 2.0 * z / slack;
    if (h) {
      *h += (2.0 / slack) * RMat::Identity(z.size(), z.size());
      h->noalias() += (4.0 / (slack * slack)) * (z * z.transpose());
    }
    return v;
  };
  const double degree = static_cast<double>(n) + (pure_relaxed ? 1.0 : 0.0);
  SolveOutput s = solve_barrier_problem(nll, phi, degree, RVec::Zero(n * n - 1));

  EstimateReport rep;
  DensityMatrix rho = prob.z_to_point(s.z);
  rep.neg_loglik = s.objective;
  rep.lower_bound = empirical_lower_bound(spec.data);
  rep.gap = s.gap;
  rep.kkt_residual = s.kkt;
  rep.iterations = s.iterations;
  rep.converged = s.converged;
  rep.fitted_probs = fitted_probs(view, s.z);
  Eigh ed = eigh(rho.rho);
  rep.eigenvalues = ed.values;
  rep.purity = 1.0 / static_cast<double>(n) + s.z.squaredNorm();
  if (pure_relaxed) rep.purity_boundary = (*rep.purity >= 1.0 - 1e-6);
  rep.estimate = std::move(rho);
  return rep;
}

}  // namespace

EstimateReport mle_state(const LikelihoodSpec& spec) { return mle_state_impl(spec, false); }

EstimateReport mle_state_pure_relaxed(const LikelihoodSpec& spec) {
  return mle_state_impl(spec, true);
}

EstimateReport ls_state(const LikelihoodSpec& spec, bool keep_psd) {
  const auto& prob = std::get<StateProblem>(spec.problem);
  const Index n = prob.dim();
  AffineView view = prob.affine();
  if (spec.data.n_cfg() != view.n_cfg()) throw DimensionMismatch("ls_state: config count mismatch");
  RVec trials = spec.data.trials();
  const double total = trials.sum();
  RVec w = spec.ls_weights ? *spec.ls_weights : RVec(trials / total);
  if (w.minCoeff() < 0) throw InvalidModel("ls_state: negative weight");

  // residual structure: sqrt(w_g) (p_emp - base - A z)
  const Index d = view.d;
  RMat normal = RMat::Zero(d, d);
  RVec rhs = RVec::Zero(d);
  SmoothFn quad = [&](const RVec& z, RVec* g, RMat* h) -> double {
    double val = 0.0;
    if (g) g->setZero(d);
    if (h) h->setZero(d, d);
    for (Index gg = 0; gg < view.n_cfg(); ++gg) {
      if (w(gg) == 0 || trials(gg) == 0) continue;
      RVec pemp = spec.data.counts[static_cast<size_t>(gg)] / trials(gg);
      RVec r = pemp - view.probs(gg, z);
      val += w(gg) * r.squaredNorm();
      if (g) g->noalias() -= 2 * w(gg) * view.coef[static_cast<size_t>(gg)].transpose() * r;
      if (h) h->noalias() +=
          2 * w(gg) * view.coef[static_cast<size_t>(gg)].transpose() * view.coef[static_cast<size_t>(gg)];
    }
    return val;
  };

  EstimateReport rep;
  RVec z;
  if (!keep_psd) {
    for (Index g = 0; g < view.n_cfg(); ++g) {
      if (w(g) == 0 || trials(g) == 0) continue;
      RVec pemp = spec.data.counts[static_cast<size_t>(g)] / trials(g);
      const RMat& a = view.coef[static_cast<size_t>(g)];
      normal.noalias() += w(g) * a.transpose() * a;
      rhs.noalias() += w(g) * a.transpose() * (pemp - view.base[static_cast<size_t>(g)]);
    }
    Eigen::SelfAdjointEigenSolver<RMat> es(normal);
    if (es.eigenvalues()(0) < 1e-10 * std::max(1e-300, es.eigenvalues()(d - 1)))
      throw SingularNormalEquations("ls_state: data not rich enough for the unconstrained path");
    z = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
        (es.eigenvectors().transpose() * rhs);
    rep.converged = true;
    rep.gap = 0.0;
    rep.kkt_residual = 0.0;
  } else {
    HermBasis basis = HermBasis::canonical(n);
    std::vector<CMat> tail(basis.elements().begin() + 1, basis.elements().end());
    LogDetBarrier logdet{CMat::Identity(n, n) / static_cast<double>(n), &tail, 0};
    SmoothFn phi = [&](const RVec& zz, RVec* g, RMat* h) { return logdet(zz, g, h); };
    SolveOutput s = solve_barrier_problem(quad, phi, static_cast<double>(n), RVec::Zero(d));
    z = s.z;
    rep.gap = s.gap;
    rep.kkt_residual = s.kkt;
    rep.iterations = s.iterations;
    rep.converged = s.converged;
  }
  DensityMatrix rho = prob.z_to_point(z);
  rep.neg_loglik = quad(z, nullptr, nullptr);  // LS objective, not a log-likelihood
  rep.lower_bound = 0.0;
  rep.fitted_probs = fitted_probs(view, z);
  Eigh ed = eigh(rho.rho);
  rep.eigenvalues = ed.values;  // negatives reported, not clipped
  rep.purity = (rho.rho * rho.rho).trace().real();
  rep.estimate = std::move(rho);
  return rep;
}

// ---- simplex distributions ---------------------------------------------------

namespace {

EstimateReport simplex_mle(const AffineView& view, const CountData& data, Index k,
                           const std::function<RVec(const RVec&)>& z_to_f) {
  SmoothFn nll = make_nll(view, data);
  // barrier -sum log f_i(z), f = 1/k + Ceq z; recover f through the affine map
  // of each coordinate, which is exactly what view-independent callers supply.
  SmoothFn phi = [&, k](const RVec& z, RVec* g, RMat* h) -> double {
    RVec f = z_to_f(z);
    if (f.minCoeff() <= 0) return kInf;
    // d f / d z is the fixed matrix Ceq; reconstruct it once
    static thread_local RMat ceq;
    if (ceq.rows() != f.size() || ceq.cols() != z.size()) {
      ceq.resize(f.size(), z.size());
      RVec f0 = z_to_f(RVec::Zero(z.size()));
      for (Index j = 0; j < z.size(); ++j) {
        RVec e = RVec::Zero(z.size());
        e(j) = 1.0;
        ceq.col(j) = z_to_f(e) - f0;
      }
    }
    double v = -f.array().log().sum();
    if (g) *g = -ceq.transpose() * f.cwiseInverse();
    if (h) *h = ceq.transpose() * f.array().square().inverse().matrix().asDiagonal() * ceq;
    return v;
  };
  SolveOutput s = solve_barrier_problem(nll, phi, static_cast<double>(k), RVec::Zero(k - 1));
  EstimateReport rep;
  rep.estimate = z_to_f(s.z);
  rep.neg_loglik = s.objective;
  rep.lower_bound = empirical_lower_bound(data);
  rep.gap = s.gap;
  rep.kkt_residual = s.kkt;
  rep.iterations = s.iterations;
  rep.converged = s.converged;
  rep.fitted_probs = fitted_probs(view, s.z);
  return rep;
}

}  // namespace

EstimateReport mle_state_distribution(const LikelihoodSpec& spec) {
  const auto& prob = std::get<StateDistProblem>(spec.problem);
  const Index k = prob.n_in();
  if (k == 1) {
    EstimateReport rep;
    rep.estimate = RVec::Ones(1);
    rep.lower_bound = empirical_lower_bound(spec.data);
    rep.neg_loglik = rep.lower_bound;
    rep.converged = true;
    rep.identifiable = true;
    return rep;
  }
  AffineView view = prob.affine();
  check_shapes(view, spec.data);
  EstimateReport rep = simplex_mle(view, spec.data, k, [&](const RVec& z) { return prob.z_to_point(z); });
  attach_identifiability(prob, k, rep);
  return rep;
}

EstimateReport mle_osr_distribution(const LikelihoodSpec& spec) {
  const auto& prob = std::get<OsrDistProblem>(spec.problem);
  prob.validate();
  const Index k = prob.kappa();
  AffineView view = prob.affine();
  check_shapes(view, spec.data);
  EstimateReport rep = simplex_mle(view, spec.data, k, [&](const RVec& z) { return prob.z_to_point(z); });
  attach_identifiability(prob, k, rep);
  return rep;
}

// ---- superoperator -----------------------------------------------------------

EstimateReport mle_superoperator(const LikelihoodSpec& spec, std::optional<double> trace_cap) {
  const auto& prob = std::get<SuperopProblem>(spec.problem);
  const Index n = prob.dim();
  // Orthonormal-basis completeness pins Tr X = n (trace both sides of
  // sum X_ij B_i^H B_j = I), so a cap below n is infeasible and any cap at or
  // above n is never active; it is validated and echoed rather than enforced.
  if (trace_cap && *trace_cap < static_cast<double>(n) - 1e-8)
    throw InfeasibleTraceCap("mle_superoperator: trace cap below the fixed trace n");
  AffineView view = prob.affine();
  check_shapes(view, spec.data);
  SmoothFn nll = make_nll(view, spec.data);
  const SuperopFreeBasis& fb = superop_free_basis(prob.op_basis);
  LogDetBarrier logdet{fb.xbar, &fb.null_elems, 0};
  SmoothFn phi = [&](const RVec& z, RVec* g, RMat* h) { return logdet(z, g, h); };
  SolveOutput s =
      solve_barrier_problem(nll, phi, static_cast<double>(n * n), RVec::Zero(view.d));
  EstimateReport rep;
  Superoperator x = prob.z_to_point(s.z);
  rep.neg_loglik = s.objective;
  rep.lower_bound = empirical_lower_bound(spec.data);
  rep.gap = s.gap;
  rep.kkt_residual = s.kkt;
  rep.iterations = s.iterations;
  rep.converged = s.converged;
  rep.fitted_probs = fitted_probs(view, s.z);
  rep.trace_x = x.x.trace().real();
  rep.trace_cap = trace_cap;
  Eigh ed = eigh(x.x);
  rep.kraus_rank = (ed.values.array() > 1e-6).count();
  rep.eigenvalues = ed.values;
  rep.estimate = std::move(x);
  return rep;
}

// ---- Hamiltonian ---------------------------------------------------------------

namespace {

double hamiltonian_nll(const HamiltonianProblem& prob, const CountData& data, const RVec& theta) {
  std::vector<RVec> p = prob.probs(theta);
  double val = 0.0;
  for (Index g = 0; g < static_cast<Index>(p.size()); ++g) {
    const RVec& n = data.counts[static_cast<size_t>(g)];
    for (Index a = 0; a < n.size(); ++a) {
      if (n(a) <= 0) continue;
      if (p[static_cast<size_t>(g)](a) <= 0) return kInf;
      val -= n(a) * std::log(p[static_cast<size_t>(g)](a));
    }
  }
  return val;
}

}  // namespace

EstimateReport mle_hamiltonian(const LikelihoodSpec& spec, const GridRefineSettings& settings) {
  const auto& prob = std::get<HamiltonianProblem>(spec.problem);
  prob.model.validate();
  if (spec.data.n_cfg() != prob.n_cfg()) throw DimensionMismatch("mle_hamiltonian: config count mismatch");
  const Index nth = prob.model.n_theta();
  if (settings.points_per_dim < 1) throw EmptyGrid("mle_hamiltonian: empty grid");

  // grid coordinates per dimension (a single point when lo == hi)
  std::vector<RVec> axes;
  Index total = 1;
  for (Index i = 0; i < nth; ++i) {
    const double lo = prob.model.theta_lo(i), hi = prob.model.theta_hi(i);
    Index pts = (hi - lo < 1e-15) ? 1 : settings.points_per_dim;
    RVec ax(pts);
    for (Index j = 0; j < pts; ++j)
      ax(j) = (pts == 1) ? lo : lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(pts - 1);
    total *= pts;
    axes.push_back(std::move(ax));
  }
  auto theta_at = [&](Index flat) {
    RVec th(nth);
    for (Index i = nth - 1; i >= 0; --i) {
      const Index p = axes[static_cast<size_t>(i)].size();
      th(i) = axes[static_cast<size_t>(i)](flat % p);
      flat /= p;
    }
    return th;
  };

  std::vector<double> values(static_cast<size_t>(total));
#ifdef TOMOED_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (Index k = 0; k < total; ++k)
    values[static_cast<size_t>(k)] = hamiltonian_nll(prob, spec.data, theta_at(k));

  // grid-local minima: value <= all axis neighbours
  std::vector<Index> minima;
  for (Index k = 0; k < total; ++k) {
    bool is_min = true;
    Index rem = k, stride = 1;
    for (Index i = nth - 1; i >= 0 && is_min; --i) {
      const Index p = axes[static_cast<size_t>(i)].size();
      const Index pos = rem % p;
      if (pos > 0 && values[static_cast<size_t>(k - stride)] < values[static_cast<size_t>(k)]) is_min = false;
      if (pos + 1 < p && values[static_cast<size_t>(k + stride)] < values[static_cast<size_t>(k)]) is_min = false;
      rem /= p;
      stride *= p;
    }
    if (is_min) minima.push_back(k);
  }

  // coordinate-wise Newton refinement with finite differences, projected to the box
  auto refine = [&](RVec th) {
    for (int sweep = 0; sweep < settings.max_refine_sweeps; ++sweep) {
      double max_proj_grad = 0.0;
      for (Index i = 0; i < nth; ++i) {
        const double h = 1e-5 * (1.0 + std::abs(th(i)));
        RVec tp = th, tm = th;
        tp(i) = std::min(tp(i) + h, prob.model.theta_hi(i));
        tm(i) = std::max(tm(i) - h, prob.model.theta_lo(i));
        const double span = tp(i) - tm(i);
        if (span <= 0) continue;
        const double f0 = hamiltonian_nll(prob, spec.data, th);
        const double fp = hamiltonian_nll(prob, spec.data, tp);
        const double fm = hamiltonian_nll(prob, spec.data, tm);
        const double g = (fp - fm) / span;
        const double hh = (fp - 2 * f0 + fm) / (0.25 * span * span);
        double step = (hh > 1e-12) ? -g / hh : -g * h;
        double t_new = std::clamp(th(i) + step, prob.model.theta_lo(i), prob.model.theta_hi(i));
        // backtrack until improvement
        double fnew = kInf;
        for (int bt = 0; bt < 40; ++bt) {
          RVec cand = th;
          cand(i) = t_new;
          fnew = hamiltonian_nll(prob, spec.data, cand);
          if (fnew <= f0) break;
          t_new = th(i) + 0.5 * (t_new - th(i));
        }
        if (fnew <= f0) th(i) = t_new;
        // projected gradient for the bound-aware stationarity check
        double pg = g;
        if (th(i) <= prob.model.theta_lo(i) + 1e-14 && g > 0) pg = 0;
        if (th(i) >= prob.model.theta_hi(i) - 1e-14 && g < 0) pg = 0;
        max_proj_grad = std::max(max_proj_grad, std::abs(pg));
      }
      if (max_proj_grad <= settings.grad_tol) break;
    }
    return th;
  };

  EstimateReport rep;
  double best = kInf;
  RVec best_th;
  for (Index k : minima) {
    RVec th = refine(theta_at(k));
    const double v = hamiltonian_nll(prob, spec.data, th);
    rep.local_minima.push_back(th);
    rep.local_minima_values.push_back(v);
    const bool better = v < best - 1e-12 * (1 + std::abs(best));
    const bool tie = std::abs(v - best) <= 1e-12 * (1 + std::abs(best));
    if (better || (tie && std::lexicographical_compare(th.data(), th.data() + nth, best_th.data(),
                                                       best_th.data() + nth))) {
      best = v;
      best_th = th;
    }
  }
  rep.estimate = best_th;
  rep.neg_loglik = best;
  rep.lower_bound = empirical_lower_bound(spec.data);
  rep.gap = std::numeric_limits<double>::quiet_NaN();  // non-convex: no certificate
  rep.converged = std::isfinite(best);
  rep.iterations = static_cast<int>(minima.size());
  return rep;
}

}  // namespace tomoed
