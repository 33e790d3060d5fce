#include "tomoed/qmodel.hpp"

#include <algorithm>
#include <cmath>

namespace tomoed {

DensityMatrix DensityMatrix::pure(const CVec& psi) {
  const double n = psi.norm();
  if (n <= 0) throw NotNormalized("pure: zero vector");
  CVec u = psi / n;
  return DensityMatrix{u * u.adjoint()};
}

void DensityMatrix::validate() const {
  require_hermitian(rho);
  if (std::abs(rho.trace().real() - 1.0) > 1e-10 || std::abs(rho.trace().imag()) > 1e-10)
    throw InvalidModel("density matrix: trace != 1");
  Eigh ed = eigh(rho);
  if (ed.values.minCoeff() < -1e-10) throw NotPSD("density matrix: negative eigenvalue");
}

void PovmSet::validate(double tol) const {
  if (elements.empty()) throw InvalidModel("povm: empty");
  const Index n = elements[0].rows();
  CMat sum = CMat::Zero(n, n);
  for (const CMat& m : elements) {
    if (m.rows() != n || m.cols() != n) throw DimensionMismatch("povm: ragged elements");
    require_hermitian(m, 1e-10);
    if (m.cwiseAbs().maxCoeff() > 1e-14) {
      Eigh ed = eigh(m);
      if (ed.values.minCoeff() < -tol) throw NotPSD("povm: element not PSD");
    }
    sum += m;
  }
  sum -= CMat::Identity(n, n);
  if (sum.cwiseAbs().maxCoeff() > tol) throw InvalidModel("povm: elements do not sum to identity");
  if (!labels.empty() && labels.size() != elements.size())
    throw InvalidModel("povm: label count mismatch");
}

void NoiseMixer::validate() const {
  for (Index j = 0; j < nu.cols(); ++j) {
    double colsum = 0;
    for (Index i = 0; i < nu.rows(); ++i) {
      if (nu(i, j) < 0.0 || nu(i, j) > 1.0) throw InvalidModel("noise mixer: entry outside [0,1]");
      colsum += nu(i, j);
    }
    if (std::abs(colsum - 1.0) > 1e-12) throw InvalidModel("noise mixer: column sum != 1");
  }
}

void KrausSet::validate(double tol) const {
  if (matrices.empty()) throw InvalidModel("kraus: empty");
  const Index n = matrices[0].rows();
  CMat sum = CMat::Zero(n, n);
  for (const CMat& k : matrices) {
    if (k.rows() != n || k.cols() != n) throw DimensionMismatch("kraus: ragged matrices");
    sum += k.adjoint() * k;
  }
  sum -= CMat::Identity(n, n);
  if (sum.cwiseAbs().maxCoeff() > tol) throw InvalidModel("kraus: sum K^H K != I");
}

void Superoperator::validate(double tol) const {
  const Index n = dim();
  const Index n2 = n * n;
  if (x.rows() != n2 || x.cols() != n2) throw DimensionMismatch("superoperator: X must be n^2 x n^2");
  if (basis.dim() != n2) throw BadBasis("superoperator: basis must have n^2 elements");
  require_hermitian(x, 1e-8);
  Eigh ed = eigh(x);
  if (ed.values.minCoeff() < -tol) throw NotPSD("superoperator: X not PSD");
  CMat comp = CMat::Zero(n, n);
  for (Index i = 0; i < n2; ++i)
    for (Index j = 0; j < n2; ++j) comp += x(i, j) * (basis[i].adjoint() * basis[j]);
  comp -= CMat::Identity(n, n);
  if (comp.cwiseAbs().maxCoeff() > tol)
    throw InvalidModel("superoperator: completeness sum X_ij B_i^H B_j != I");
}

void ConfigurationEnsemble::validate() const {
  if (configs.empty()) throw InvalidModel("ensemble: empty");
  const Index n = configs[0].input.dim();
  for (const Configuration& c : configs) {
    if (c.input.dim() != n || c.povm.dim() != n) throw DimensionMismatch("ensemble: mixed dimensions");
    c.povm.validate();
    c.input.validate();
  }
  std::vector<std::string> ls;
  for (const Configuration& c : configs) ls.push_back(c.label);
  std::sort(ls.begin(), ls.end());
  if (std::adjacent_find(ls.begin(), ls.end()) != ls.end())
    throw InvalidModel("ensemble: duplicate configuration labels");
}

RVec CountData::trials() const {
  RVec t(n_cfg());
  for (Index g = 0; g < n_cfg(); ++g) t(g) = counts[static_cast<size_t>(g)].sum();
  return t;
}

double CountData::total() const { return trials().sum(); }

void CountData::validate() const {
  for (const RVec& c : counts)
    if (c.minCoeff() < 0) throw InvalidModel("counts: negative entry");
}

void HamiltonianModel::validate() const {
  if (theta_lo.size() != theta_hi.size()) throw DimensionMismatch("hamiltonian: bound size mismatch");
  if ((theta_hi - theta_lo).minCoeff() < 0) throw InvalidModel("hamiltonian: empty box");
  if (sample_times.empty()) throw InvalidModel("hamiltonian: no sample times");
  if (inputs.empty()) throw InvalidModel("hamiltonian: no input states");
  povm.validate();
}

CMat HamiltonianModel::propagator(double t, const RVec& theta) const {
  // piecewise-constant H between knots; constant H when no knots given
  std::vector<double> cut{0.0};
  for (double k : time_knots)
    if (k > 0.0 && k < t) cut.push_back(k);
  cut.push_back(t);
  std::sort(cut.begin(), cut.end());
  const Index n = hamiltonian(0.0, theta).rows();
  CMat u = CMat::Identity(n, n);
  for (size_t s = 0; s + 1 < cut.size(); ++s) {
    const double dt = cut[s + 1] - cut[s];
    if (dt <= 0) continue;
    u = herm_expm(hamiltonian(cut[s], theta), dt) * u;
  }
  return u;
}

PovmSet apply_noise(const PovmSet& clean, const NoiseMixer& mixer) {
  if (mixer.nu.cols() != clean.n_out())
    throw DimensionMismatch("apply_noise: mixer columns != clean outcomes");
  mixer.validate();
  const Index n = clean.dim();
  PovmSet out;
  out.elements.assign(static_cast<size_t>(mixer.nu.rows()), CMat::Zero(n, n));
  for (Index a = 0; a < mixer.nu.rows(); ++a)
    for (Index b = 0; b < mixer.nu.cols(); ++b)
      out.elements[static_cast<size_t>(a)] += mixer.nu(a, b) * clean.elements[static_cast<size_t>(b)];
  return out;
}

PovmSet povm_pullback(const KrausSet& kraus, const PovmSet& m) {
  if (kraus.dim() != m.dim()) throw DimensionMismatch("povm_pullback: dimension mismatch");
  const Index n = m.dim();
  PovmSet out;
  out.labels = m.labels;
  out.elements.reserve(m.elements.size());
  for (const CMat& ma : m.elements) {
    CMat o = CMat::Zero(n, n);
    for (const CMat& k : kraus.matrices) o += k.adjoint() * ma * k;
    out.elements.push_back(std::move(o));
  }
  return out;
}

std::vector<std::vector<CMat>> build_R_matrices(const ConfigurationEnsemble& ensemble,
                                                const HermBasis& basis) {
  const Index n = ensemble.dim();
  const Index n2 = n * n;
  if (basis.dim() != n2 || basis.matrix_dim() != n)
    throw BadBasis("build_R_matrices: basis must have n^2 elements of size n");
  {
    // basis must span: stack coordinates of elements and check rank
    CMat stacked(n2, n2);
    for (Index i = 0; i < n2; ++i) stacked.col(i) = vec(basis[i]);
    Eigen::JacobiSVD<CMat> svd(stacked);
    if (svd.singularValues()(n2 - 1) < 1e-12 * svd.singularValues()(0))
      throw BadBasis("build_R_matrices: basis does not span n x n matrices");
  }
  std::vector<std::vector<CMat>> out;
  out.reserve(static_cast<size_t>(ensemble.n_cfg()));
  for (const Configuration& c : ensemble.configs) {
    std::vector<CMat> per;
    per.reserve(c.povm.elements.size());
    for (const CMat& o : c.povm.elements) {
      CMat r(n2, n2);
      for (Index i = 0; i < n2; ++i)
        for (Index j = 0; j < n2; ++j)
          r(i, j) = (basis[j] * c.input.rho * basis[i].adjoint() * o).trace();
      per.push_back(std::move(r));
    }
    out.push_back(std::move(per));
  }
  return out;
}

KrausWithWeights kraus_from_superoperator(const Superoperator& x, double drop_tol) {
  require_hermitian(x.x, 1e-8);
  Eigh ed = eigh(x.x);
  if (ed.values.minCoeff() < -1e-8) throw NotPSD("kraus_from_superoperator: X not PSD");
  const Index n2 = x.x.rows();
  KrausWithWeights out;
  std::vector<double> w;
  // eigenvalues ascending; emit descending, dropping the numerically zero ones.
  // K_k = sqrt(s_k) sum_i V_ik B_i reproduces Q(rho) = sum_ij X_ij B_i rho B_j^H.
  for (Index k = n2 - 1; k >= 0; --k) {
    const double s = ed.values(k);
    if (s <= drop_tol) break;
    CMat km = CMat::Zero(x.dim(), x.dim());
    for (Index i = 0; i < n2; ++i) km += std::sqrt(s) * ed.vectors(i, k) * x.basis[i];
    out.kraus.matrices.push_back(std::move(km));
    w.push_back(s);
  }
  out.weights = Eigen::Map<RVec>(w.data(), static_cast<Index>(w.size()));
  return out;
}

Superoperator superoperator_from_kraus(const KrausSet& kraus, const HermBasis& basis) {
  const Index n2 = basis.dim();
  CVec c(n2);
  CMat x = CMat::Zero(n2, n2);
  for (const CMat& k : kraus.matrices) {
    for (Index i = 0; i < n2; ++i) c(i) = (basis[i].adjoint() * k).trace();
    x += c * c.adjoint();
  }
  return Superoperator{std::move(x), basis};
}

CMat apply_superoperator(const Superoperator& x, const CMat& rho) {
  const Index n = x.dim();
  const Index n2 = n * n;
  CMat out = CMat::Zero(n, n);
  for (Index i = 0; i < n2; ++i) {
    CMat bi_rho = x.basis[i] * rho;
    for (Index j = 0; j < n2; ++j) out += x.x(i, j) * (bi_rho * x.basis[j].adjoint());
  }
  return out;
}

}  // namespace tomoed
