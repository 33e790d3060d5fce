#include "tomoed/barrier.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace tomoed {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

NewtonResult newton_minimize(const SmoothFn& f, RVec z0, double tol, int max_iter, double alpha,
                             double beta) {
  NewtonResult res;
  res.z = std::move(z0);
  const Index d = res.z.size();
  RVec grad(d);
  RMat hess(d, d);
  for (int it = 0; it < max_iter; ++it) {
    double f0 = f(res.z, &grad, &hess);
    if (!std::isfinite(f0)) throw Error("newton: infeasible start");
    res.value = f0;
    // solve H dz = -g with a Levenberg fallback for marginal Hessians
    Eigen::LLT<RMat> llt(hess);
    RVec dz;
    if (llt.info() == Eigen::Success) {
      dz = llt.solve(-grad);
    } else {
      RMat reg = hess;
      double lam = 1e-12 * (1.0 + hess.diagonal().cwiseAbs().maxCoeff());
      for (int k = 0; k < 60; ++k) {
        reg = hess + lam * RMat::Identity(d, d);
        Eigen::LLT<RMat> l2(reg);
        if (l2.info() == Eigen::Success) {
          dz = l2.solve(-grad);
          break;
        }
        lam *= 10;
      }
      if (dz.size() == 0) throw Error("newton: hessian factorization failed");
    }
    const double dec2 = -grad.dot(dz);  // lambda^2
    res.iters = it + 1;
    if (dec2 / 2 <= tol * (1.0 + std::abs(f0))) {
      res.converged = true;
      return res;
    }
    double step = 1.0;
    double ft = kInf;
    while (step > 1e-16) {
      ft = f(res.z + step * dz, nullptr, nullptr);
      if (ft <= f0 - alpha * step * dec2) break;
      step *= beta;
    }
    if (!(ft < f0)) {  // no progress possible
      res.converged = dec2 / 2 <= 1e3 * tol * (1.0 + std::abs(f0));
      return res;
    }
    res.z += step * dz;
    res.value = ft;
  }
  return res;
}

BarrierResult barrier_minimize(const SmoothFn& f, const SmoothFn& phi, double degree, RVec z0,
                               const BarrierOptions& opts) {
  BarrierResult out;
  out.z = std::move(z0);
  double mu = opts.mu0;
  int total = 0;
  while (true) {
    SmoothFn stage = [&](const RVec& z, RVec* g, RMat* h) -> double {
      RVec gf, gp;
      RMat hf, hp;
      double vf = f(z, g ? &gf : nullptr, h ? &hf : nullptr);
      if (!std::isfinite(vf)) return kInf;
      double vp = phi(z, g ? &gp : nullptr, h ? &hp : nullptr);
      if (!std::isfinite(vp)) return kInf;
      if (g) *g = gf + mu * gp;
      if (h) *h = hf + mu * hp;
      return vf + mu * vp;
    };
    NewtonResult nr = newton_minimize(stage, out.z, opts.newton_tol, opts.max_newton_per_stage,
                                      opts.alpha, opts.beta);
    out.z = nr.z;
    total += nr.iters;
    if (total > opts.max_total_newton)
      throw SolverMaxIter("barrier: newton iteration budget exhausted");
    if (degree * mu <= opts.gap_tol) {
      RVec g;
      stage(out.z, &g, nullptr);
      out.grad_norm = g.norm();
      out.converged = nr.converged;
      break;
    }
    mu *= opts.mu_factor;
  }
  out.mu_final = mu;
  out.gap = degree * mu;
  out.newton_iters = total;
  out.objective = f(out.z, nullptr, nullptr);
  return out;
}

}  // namespace tomoed
