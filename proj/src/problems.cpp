#include "tomoed/problems.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace tomoed {

namespace {

constexpr double kZeroElementTol = 1e-14;

bool matrix_is_zero(const CMat& m) { return m.cwiseAbs().maxCoeff() <= kZeroElementTol; }

RVec simplex_base(Index k) { return RVec::Constant(k, 1.0 / static_cast<double>(k)); }

// orthonormal nullspace of the all-ones row, cached per k
const RMat& ones_nullspace(Index k) {
  static std::mutex mu;
  static std::map<Index, RMat> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(k);
  if (it == cache.end()) {
    RMat row = RMat::Ones(1, k);
    it = cache.emplace(k, nullspace_basis_real(row)).first;
  }
  return it->second;
}

AffineView simplex_affine(const std::vector<RMat>& avecs, Index k) {
  // avecs[g]: n_out x k matrix of a-vectors; p = a^T f, f = 1/k + Ceq z
  const RMat& ceq = ones_nullspace(k);
  AffineView v;
  v.d = k - 1;
  for (const RMat& ag : avecs) {
    v.base.push_back(ag * simplex_base(k));
    v.coef.push_back(ag * ceq);
    std::vector<bool> zero;
    for (Index a = 0; a < ag.rows(); ++a)
      zero.push_back(ag.row(a).cwiseAbs().maxCoeff() <= kZeroElementTol);
    v.structurally_zero.push_back(std::move(zero));
  }
  return v;
}

}  // namespace

// ---- state ----------------------------------------------------------------

AffineView StateProblem::affine() const {
  const Index n = dim();
  HermBasis basis = HermBasis::canonical(n);
  AffineView v;
  v.d = n * n - 1;
  for (const Configuration& c : ensemble.configs) {
    const Index m = c.povm.n_out();
    RVec base(m);
    RMat coef(m, v.d);
    std::vector<bool> zero;
    for (Index a = 0; a < m; ++a) {
      const CMat& o = c.povm.elements[static_cast<size_t>(a)];
      RVec x = basis.coords(o);
      base(a) = x(0) / std::sqrt(static_cast<double>(n));  // Tr(O)/n
      coef.row(a) = x.tail(v.d).transpose();
      zero.push_back(matrix_is_zero(o));
    }
    v.base.push_back(std::move(base));
    v.coef.push_back(std::move(coef));
    v.structurally_zero.push_back(std::move(zero));
  }
  return v;
}

RVec StateProblem::point_to_z(const DensityMatrix& rho) const {
  HermBasis basis = HermBasis::canonical(dim());
  return basis.coords(rho.rho).tail(dim() * dim() - 1);
}

DensityMatrix StateProblem::z_to_point(const RVec& z) const {
  const Index n = dim();
  HermBasis basis = HermBasis::canonical(n);
  RVec x(n * n);
  x(0) = 1.0 / std::sqrt(static_cast<double>(n));
  x.tail(n * n - 1) = z;
  return DensityMatrix{basis.from_coords(x)};
}

// ---- state distribution ----------------------------------------------------

AffineView StateDistProblem::affine() const {
  std::vector<RMat> avecs;
  for (const PovmSet& povm : povms) {
    RMat ag(povm.n_out(), n_in());
    for (Index a = 0; a < povm.n_out(); ++a)
      for (Index i = 0; i < n_in(); ++i)
        ag(a, i) = (povm.elements[static_cast<size_t>(a)] * input_states[static_cast<size_t>(i)].rho)
                       .trace()
                       .real();
    avecs.push_back(std::move(ag));
  }
  return simplex_affine(avecs, n_in());
}

RVec StateDistProblem::point_to_z(const RVec& f) const {
  return ones_nullspace(n_in()).transpose() * (f - simplex_base(n_in()));
}

RVec StateDistProblem::z_to_point(const RVec& z) const {
  return simplex_base(n_in()) + ones_nullspace(n_in()) * z;
}

// ---- superoperator ---------------------------------------------------------

const SuperopFreeBasis& superop_free_basis(const HermBasis& op_basis) {
  static std::mutex mu;
  static std::map<Index, SuperopFreeBasis> cache;
  const Index n = op_basis.matrix_dim();
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  const Index n2 = n * n;
  const Index n4 = n2 * n2;
  HermBasis xframe = HermBasis::elementary(n2);   // coordinates on Herm(n^2)
  HermBasis cframe = HermBasis::elementary(n);    // coordinates on Herm(n)
  // constraint map Phi(E) = sum_ij E_ij B_i^H B_j, real matrix in coordinates
  RMat a(n2, n4);
  for (Index m = 0; m < n4; ++m) {
    const CMat& e = xframe[m];
    CMat phi = CMat::Zero(n, n);
    for (Index i = 0; i < n2; ++i)
      for (Index j = 0; j < n2; ++j) {
        if (e(i, j) == Complex(0, 0)) continue;
        phi += e(i, j) * (op_basis[i].adjoint() * op_basis[j]);
      }
    a.col(m) = cframe.coords(phi);
  }
  RMat null = nullspace_basis_real(a);
  SuperopFreeBasis fb;
  for (Index m = 0; m < null.cols(); ++m) fb.null_elems.push_back(xframe.from_coords(null.col(m)));
  fb.xbar = CMat::Identity(n2, n2) / static_cast<double>(n);
  it = cache.emplace(n, std::move(fb)).first;
  return it->second;
}

const std::vector<std::vector<CMat>>& SuperopProblem::r_matrices() const {
  if (r_cache_.empty()) r_cache_ = build_R_matrices(ensemble, op_basis);
  return r_cache_;
}

AffineView SuperopProblem::affine() const {
  const SuperopFreeBasis& fb = superop_free_basis(op_basis);
  const Index d = static_cast<Index>(fb.null_elems.size());
  AffineView v;
  v.d = d;
  for (const std::vector<CMat>& per : r_matrices()) {
    const Index m = static_cast<Index>(per.size());
    RVec base(m);
    RMat coef(m, d);
    std::vector<bool> zero;
    for (Index a = 0; a < m; ++a) {
      const CMat& r = per[static_cast<size_t>(a)];
      base(a) = (fb.xbar * r).trace().real();
      for (Index k = 0; k < d; ++k) coef(a, k) = (fb.null_elems[static_cast<size_t>(k)] * r).trace().real();
      zero.push_back(matrix_is_zero(r));
    }
    v.base.push_back(std::move(base));
    v.coef.push_back(std::move(coef));
    v.structurally_zero.push_back(std::move(zero));
  }
  return v;
}

RVec SuperopProblem::point_to_z(const Superoperator& x) const {
  const SuperopFreeBasis& fb = superop_free_basis(op_basis);
  const Index d = static_cast<Index>(fb.null_elems.size());
  RVec z(d);
  CMat delta = x.x - fb.xbar;
  for (Index k = 0; k < d; ++k)
    z(k) = (fb.null_elems[static_cast<size_t>(k)].adjoint() * delta).trace().real();
  return z;
}

Superoperator SuperopProblem::z_to_point(const RVec& z) const {
  const SuperopFreeBasis& fb = superop_free_basis(op_basis);
  CMat x = fb.xbar;
  for (Index k = 0; k < z.size(); ++k) x += z(k) * fb.null_elems[static_cast<size_t>(k)];
  return Superoperator{std::move(x), op_basis};
}

// ---- OSR distribution -------------------------------------------------------

void OsrDistProblem::validate() const {
  if (weight_check.size() == 0) return;
  if (weight_check.size() != kappa()) throw DimensionMismatch("osr dist: weight size mismatch");
  const Index n = ensemble.dim();
  CMat sum = CMat::Zero(n, n);
  for (Index k = 0; k < kappa(); ++k)
    for (const CMat& kb : kraus_bar[static_cast<size_t>(k)])
      sum += weight_check(k) * (kb.adjoint() * kb);
  sum -= CMat::Identity(n, n);
  if (sum.cwiseAbs().maxCoeff() > 1e-8)
    throw InvalidModel("osr dist: weighted completeness sum q_k Kbar^H Kbar != I fails");
}

AffineView OsrDistProblem::affine() const {
  std::vector<RMat> avecs;
  for (const Configuration& c : ensemble.configs) {
    RMat ag(c.povm.n_out(), kappa());
    for (Index a = 0; a < c.povm.n_out(); ++a)
      for (Index k = 0; k < kappa(); ++k) {
        double acc = 0.0;
        for (const CMat& kb : kraus_bar[static_cast<size_t>(k)])
          acc += (c.povm.elements[static_cast<size_t>(a)] * kb * c.input.rho * kb.adjoint())
                     .trace()
                     .real();
        ag(a, k) = acc;
      }
    avecs.push_back(std::move(ag));
  }
  return simplex_affine(avecs, kappa());
}

RVec OsrDistProblem::point_to_z(const RVec& q) const {
  return ones_nullspace(kappa()).transpose() * (q - simplex_base(kappa()));
}

RVec OsrDistProblem::z_to_point(const RVec& z) const {
  return simplex_base(kappa()) + ones_nullspace(kappa()) * z;
}

// ---- Hamiltonian ------------------------------------------------------------

std::vector<RVec> HamiltonianProblem::probs(const RVec& theta) const {
  std::vector<RVec> out;
  out.reserve(static_cast<size_t>(n_cfg()));
  for (const DensityMatrix& rho0 : model.inputs) {
    for (double t : model.sample_times) {
      CMat u = model.propagator(t, theta);
      CMat rho_t = u * rho0.rho * u.adjoint();
      RVec p(model.povm.n_out());
      for (Index a = 0; a < model.povm.n_out(); ++a)
        p(a) = (model.povm.elements[static_cast<size_t>(a)] * rho_t).trace().real();
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::string HamiltonianProblem::config_label(Index g) const {
  const Index nt = static_cast<Index>(model.sample_times.size());
  const Index beta = g / nt, tau = g % nt;
  return "beta=" + std::to_string(beta) + ",t=" + std::to_string(model.sample_times[static_cast<size_t>(tau)]);
}

// ---- generic dispatch -------------------------------------------------------

namespace {

std::vector<RVec> clamp_probs(std::vector<RVec> p) {
  for (RVec& pg : p) {
    for (Index a = 0; a < pg.size(); ++a) {
      if (pg(a) < -1e-12) throw InfeasiblePoint("outcome_probs: negative probability");
      if (pg(a) < 0) pg(a) = 0;
    }
    const double s = pg.sum();
    if (std::abs(s - 1.0) > 1e-9)
      throw InfeasiblePoint("outcome_probs: probabilities do not sum to 1");
  }
  return p;
}

std::vector<RVec> affine_probs(const AffineView& v, const RVec& z) {
  std::vector<RVec> p;
  p.reserve(static_cast<size_t>(v.n_cfg()));
  for (Index g = 0; g < v.n_cfg(); ++g) p.push_back(v.probs(g, z));
  return p;
}

}  // namespace

std::vector<RVec> outcome_probs(const EstimationProblem& problem, const ParamPoint& point) {
  return std::visit(
      [&](const auto& prob) -> std::vector<RVec> {
        using P = std::decay_t<decltype(prob)>;
        if constexpr (std::is_same_v<P, StateProblem>) {
          const auto& rho = std::get<DensityMatrix>(point);
          rho.validate();
          return clamp_probs(affine_probs(prob.affine(), prob.point_to_z(rho)));
        } else if constexpr (std::is_same_v<P, StateDistProblem> ||
                             std::is_same_v<P, OsrDistProblem>) {
          const RVec& f = std::get<RVec>(point);
          if (f.minCoeff() < -1e-8 || std::abs(f.sum() - 1.0) > 1e-8)
            throw InfeasiblePoint("outcome_probs: point not on the simplex");
          return clamp_probs(affine_probs(prob.affine(), prob.point_to_z(f)));
        } else if constexpr (std::is_same_v<P, SuperopProblem>) {
          const auto& x = std::get<Superoperator>(point);
          x.validate();
          return clamp_probs(affine_probs(prob.affine(), prob.point_to_z(x)));
        } else {
          static_assert(std::is_same_v<P, HamiltonianProblem>);
          const RVec& th = std::get<RVec>(point);
          if (((th - prob.model.theta_lo).minCoeff() < -1e-8) ||
              ((prob.model.theta_hi - th).minCoeff() < -1e-8))
            throw InfeasiblePoint("outcome_probs: theta outside Theta");
          return clamp_probs(prob.probs(th));
        }
      },
      problem);
}

Index free_dim(const EstimationProblem& problem) {
  return std::visit(
      [](const auto& prob) -> Index {
        using P = std::decay_t<decltype(prob)>;
        if constexpr (std::is_same_v<P, StateProblem>) {
          return prob.dim() * prob.dim() - 1;
        } else if constexpr (std::is_same_v<P, StateDistProblem>) {
          return prob.n_in() - 1;
        } else if constexpr (std::is_same_v<P, SuperopProblem>) {
          const Index n2 = prob.dim() * prob.dim();
          return n2 * n2 - n2;
        } else if constexpr (std::is_same_v<P, OsrDistProblem>) {
          return prob.kappa() - 1;
        } else {
          return prob.model.n_theta();
        }
      },
      problem);
}

}  // namespace tomoed
