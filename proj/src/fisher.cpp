#include "tomoed/fisher.hpp"

#include <cmath>

#ifdef TOMOED_HAVE_OPENMP
#include <omp.h>
#endif

namespace tomoed {

RMat FisherModel::aggregate(const RVec& w) const {
  if (w.size() != n_cfg()) throw DimensionMismatch("fisher aggregate: allocation size mismatch");
  RMat g = RMat::Zero(d, d);
  for (Index i = 0; i < n_cfg(); ++i)
    if (w(i) != 0.0) g += w(i) * blocks[static_cast<size_t>(i)];
  return g;
}

namespace {

RMat affine_block(const AffineView& v, const RVec& z, Index g, double zero_tol) {
  const RVec p = v.probs(g, z);
  const RMat& a = v.coef[static_cast<size_t>(g)];
  RMat block = RMat::Zero(v.d, v.d);
  for (Index al = 0; al < p.size(); ++al) {
    if (v.structurally_zero[static_cast<size_t>(g)][static_cast<size_t>(al)]) continue;
    if (p(al) <= zero_tol)
      throw ZeroProbability("fisher_blocks: zero probability at configuration " + std::to_string(g) +
                            ", outcome " + std::to_string(al));
    block.noalias() += (a.row(al).transpose() * a.row(al)) / p(al);
  }
  return 0.5 * (block + block.transpose());
}

std::vector<std::string> config_labels(const ConfigurationEnsemble& ens) {
  std::vector<std::string> out;
  for (const Configuration& c : ens.configs) out.push_back(c.label);
  return out;
}

// central-difference Fisher block for one Hamiltonian configuration
RMat hamiltonian_block(const HamiltonianProblem& prob, const RVec& theta, Index beta, Index tau,
                       const FisherOptions& opts) {
  const Index nth = theta.size();
  const DensityMatrix& rho0 = prob.model.inputs[static_cast<size_t>(beta)];
  const double t = prob.model.sample_times[static_cast<size_t>(tau)];
  auto probs_at = [&](const RVec& th) {
    CMat u = prob.model.propagator(t, th);
    CMat rho_t = u * rho0.rho * u.adjoint();
    RVec p(prob.model.povm.n_out());
    for (Index a = 0; a < p.size(); ++a)
      p(a) = (prob.model.povm.elements[static_cast<size_t>(a)] * rho_t).trace().real();
    return p;
  };
  const RVec p0 = probs_at(theta);
  const Index m = p0.size();
  RMat grad(m, nth);       // dp_alpha / dtheta_i
  RMat curv_diag(m, nth);  // d2p_alpha / dtheta_i^2
  RVec h(nth);
  for (Index i = 0; i < nth; ++i) {
    h(i) = opts.fd_step_scale * (1.0 + std::abs(theta(i)));
    RVec tp = theta, tm = theta;
    tp(i) += h(i);
    tm(i) -= h(i);
    RVec pp = probs_at(tp), pm = probs_at(tm);
    grad.col(i) = (pp - pm) / (2 * h(i));
    curv_diag.col(i) = (pp - 2 * p0 + pm) / (h(i) * h(i));
  }
  RMat block = RMat::Zero(nth, nth);
  for (Index a = 0; a < m; ++a) {
    if (p0(a) > opts.zero_prob_tol) {
      block.noalias() += grad.row(a).transpose() * grad.row(a) / p0(a);
    } else if (grad.row(a).cwiseAbs().maxCoeff() <= 1e-6) {
      // p has a quadratic zero here: (dp)^2/p has the finite limit 2 p'' per
      // parameter, estimated by the same central differences.
      for (Index i = 0; i < nth; ++i) block(i, i) += 2.0 * curv_diag(a, i);
    } else {
      throw ZeroProbability("fisher_blocks: zero probability with nonzero gradient at beta=" +
                            std::to_string(beta) + ", tau=" + std::to_string(tau));
    }
  }
  if (opts.keep_hessian_term) {
    // subtract sum_alpha d2p (mixed partials via central differences)
    for (Index i = 0; i < nth; ++i) {
      for (Index j = i; j < nth; ++j) {
        double d2 = 0.0;
        if (i == j) {
          d2 = curv_diag.col(i).sum();
        } else {
          RVec tpp = theta, tpm = theta, tmp = theta, tmm = theta;
          tpp(i) += h(i); tpp(j) += h(j);
          tpm(i) += h(i); tpm(j) -= h(j);
          tmp(i) -= h(i); tmp(j) += h(j);
          tmm(i) -= h(i); tmm(j) -= h(j);
          d2 = (probs_at(tpp).sum() - probs_at(tpm).sum() - probs_at(tmp).sum() + probs_at(tmm).sum()) /
               (4 * h(i) * h(j));
        }
        block(i, j) -= d2;
        if (j != i) block(j, i) -= d2;
      }
    }
  }
  return 0.5 * (block + block.transpose());
}

}  // namespace

FisherModel fisher_blocks(const EstimationProblem& problem, const ParamPoint& surrogate,
                          const FisherOptions& opts) {
  FisherModel out;
  std::visit(
      [&](const auto& prob) {
        using P = std::decay_t<decltype(prob)>;
        if constexpr (std::is_same_v<P, HamiltonianProblem>) {
          const RVec& theta = std::get<RVec>(surrogate);
          out.parameterization = "hamiltonian";
          out.d = theta.size();
          const Index nb = static_cast<Index>(prob.model.inputs.size());
          const Index nt = static_cast<Index>(prob.model.sample_times.size());
          out.blocks.assign(static_cast<size_t>(nb * nt), RMat());
          std::exception_ptr err;
#ifdef TOMOED_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic) if (opts.exec == Exec::Parallel)
#endif
          for (Index g = 0; g < nb * nt; ++g) {
            try {
              out.blocks[static_cast<size_t>(g)] = hamiltonian_block(prob, theta, g / nt, g % nt, opts);
            } catch (...) {
#ifdef TOMOED_HAVE_OPENMP
#pragma omp critical
#endif
              if (!err) err = std::current_exception();
            }
          }
          if (err) std::rethrow_exception(err);
          for (Index g = 0; g < nb * nt; ++g) out.labels.push_back(prob.config_label(g));
        } else {
          AffineView view = prob.affine();
          RVec z;
          if constexpr (std::is_same_v<P, StateProblem>) {
            out.parameterization = "state";
            z = prob.point_to_z(std::get<DensityMatrix>(surrogate));
          } else if constexpr (std::is_same_v<P, StateDistProblem>) {
            out.parameterization = "state-dist";
            z = prob.point_to_z(std::get<RVec>(surrogate));
          } else if constexpr (std::is_same_v<P, SuperopProblem>) {
            out.parameterization = "superop";
            z = prob.point_to_z(std::get<Superoperator>(surrogate));
          } else {
            out.parameterization = "osr-dist";
            z = prob.point_to_z(std::get<RVec>(surrogate));
          }
          out.d = view.d;
          const Index m = view.n_cfg();
          out.blocks.assign(static_cast<size_t>(m), RMat());
          std::exception_ptr err;
#ifdef TOMOED_HAVE_OPENMP
#pragma omp parallel for schedule(static) if (opts.exec == Exec::Parallel)
#endif
          for (Index g = 0; g < m; ++g) {
            try {
              out.blocks[static_cast<size_t>(g)] = affine_block(view, z, g, opts.zero_prob_tol);
            } catch (...) {
#ifdef TOMOED_HAVE_OPENMP
#pragma omp critical
#endif
              if (!err) err = std::current_exception();
            }
          }
          if (err) std::rethrow_exception(err);
          if constexpr (std::is_same_v<P, StateProblem> || std::is_same_v<P, SuperopProblem> ||
                        std::is_same_v<P, OsrDistProblem>) {
            out.labels = config_labels(prob.ensemble);
          } else if constexpr (std::is_same_v<P, StateDistProblem>) {
            out.labels = prob.labels.empty() ? std::vector<std::string>(static_cast<size_t>(m))
                                             : prob.labels;
          }
        }
      },
      problem);
  if (out.labels.size() != out.blocks.size()) out.labels.resize(out.blocks.size());
  return out;
}

BoundReport crb_value(const FisherModel& model, const RVec& allocation) {
  if (allocation.minCoeff() < 0) throw InvalidModel("crb_value: negative allocation");
  if (allocation.maxCoeff() <= 0) throw InvalidModel("crb_value: allocation all zero");
  BoundReport rep;
  rep.g = model.aggregate(allocation);
  Eigen::SelfAdjointEigenSolver<RMat> es(rep.g);
  const RVec& ev = es.eigenvalues();
  if (ev(0) <= 0 || ev(ev.size() - 1) / ev(0) > 1e12) {
    rep.identifiable = false;
    rep.condition = (ev(0) > 0) ? ev(ev.size() - 1) / ev(0) : std::numeric_limits<double>::infinity();
    throw NotIdentifiable("crb_value: information matrix is singular (condition > 1e12)");
  }
  rep.condition = ev(ev.size() - 1) / ev(0);
  rep.value = ev.cwiseInverse().sum();
  return rep;
}

IdentifiabilityRecord identifiability(const FisherModel& model, double cond_threshold) {
  IdentifiabilityRecord rec;
  RMat g = model.aggregate(RVec::Ones(model.n_cfg()));
  Eigen::SelfAdjointEigenSolver<RMat> es(g);
  rec.spectrum = es.eigenvalues();
  const double top = rec.spectrum(rec.spectrum.size() - 1);
  const double thresh = top / cond_threshold;
  Index k = 0;
  while (k < rec.spectrum.size() && rec.spectrum(k) < thresh) ++k;
  rec.rank = rec.spectrum.size() - k;
  rec.near_null = es.eigenvectors().leftCols(k);
  rec.condition = (rec.spectrum(0) > 0) ? top / rec.spectrum(0) : std::numeric_limits<double>::infinity();
  rec.identifiable = (k == 0);
  return rec;
}

double channel_det_R(Complex a, Complex b) {
  const double norm = std::norm(a) + std::norm(b);
  if (std::abs(norm - 1.0) > 1e-10) throw NotNormalized("channel_det_R: |a|^2+|b|^2 != 1");
  return (std::norm(b) - std::norm(a)) * (a * std::conj(b)).real();
}

}  // namespace tomoed
