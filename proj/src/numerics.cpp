#include "tomoed/numerics.hpp"

#include <Eigen/SVD>

namespace tomoed {

bool is_hermitian(const CMat& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

void require_hermitian(const CMat& m, double tol) {
  if (!is_hermitian(m, tol)) throw NotHermitian("matrix is not Hermitian within tolerance");
}

bool is_unitary(const CMat& m, double tol) {
  if (m.rows() != m.cols()) return false;
  CMat r = m.adjoint() * m;
  r -= CMat::Identity(m.rows(), m.cols());
  return r.norm() <= tol;
}

CVec vec(const CMat& m) {
  CVec v(m.size());
  Index k = 0;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) v(k++) = m(i, j);
  return v;
}

CMat unvec(const CVec& v, Index rows, Index cols) {
  if (v.size() != rows * cols) throw DimensionMismatch("unvec: size mismatch");
  CMat m(rows, cols);
  Index k = 0;
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = v(k++);
  return m;
}

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Eigh eigh(const CMat& h) {
  require_hermitian(h);
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (h + h.adjoint()));
  if (es.info() != Eigen::Success) throw Error("eigh: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

CMat nullspace_basis(const CMat& a, double rel_tol) {
  if (a.cols() <= a.rows()) throw DimensionMismatch("nullspace_basis: expected a wide matrix");
  Eigen::JacobiSVD<CMat> svd(a, Eigen::ComputeFullV);
  const RVec& s = svd.singularValues();
  if (s(a.rows() - 1) < rel_tol * s(0))
    throw RankDeficient("nullspace_basis: input is numerically rank deficient");
  return svd.matrixV().rightCols(a.cols() - a.rows());
}

RMat nullspace_basis_real(const RMat& a, double rel_tol) {
  if (a.cols() <= a.rows()) throw DimensionMismatch("nullspace_basis: expected a wide matrix");
  Eigen::JacobiSVD<RMat> svd(a, Eigen::ComputeFullV);
  const RVec& s = svd.singularValues();
  if (s(a.rows() - 1) < rel_tol * s(0))
    throw RankDeficient("nullspace_basis: input is numerically rank deficient");
  return svd.matrixV().rightCols(a.cols() - a.rows());
}

CMat herm_expm(const CMat& h, double t, PhaseSign sign) {
  Eigh ed = eigh(h);
  const double s = (sign == PhaseSign::MinusI) ? -1.0 : 1.0;
  CVec phases(ed.values.size());
  for (Index k = 0; k < ed.values.size(); ++k)
    phases(k) = std::exp(Complex(0.0, s * t * ed.values(k)));
  return ed.vectors * phases.asDiagonal() * ed.vectors.adjoint();
}

}  // namespace tomoed
