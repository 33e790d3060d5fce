#include "tomoed/fidelity.hpp"

#include <Eigen/Eigenvalues>

#include "tomoed/barrier.hpp"

namespace tomoed {

FidelityResult worst_case_fidelity(const CMat& u_des, const CMat& u_act) {
  if (u_des.rows() != u_act.rows() || u_des.cols() != u_act.cols())
    throw DimensionMismatch("worst_case_fidelity: dimension mismatch");
  if (!is_unitary(u_des) || !is_unitary(u_act))
    throw NotUnitary("worst_case_fidelity: inputs must be unitary within 1e-8");
  const Index n = u_des.rows();
  CMat u = u_des.adjoint() * u_act;
  // u is unitary hence normal: the Schur form is diagonal and Q is a proper
  // orthonormal eigenbasis even with degenerate eigenvalues
  Eigen::ComplexSchur<CMat> schur(u);
  CVec omega = schur.matrixT().diagonal();
  CMat v = schur.matrixU();
  RVec a = omega.real();
  RVec b = omega.imag();

  // min z^T (a a^T + b b^T) z on the simplex, z = 1/n + C y
  RMat m = a * a.transpose() + b * b.transpose();
  RMat ones = RMat::Ones(1, n);
  RMat c = nullspace_basis_real(ones);
  RVec f0 = RVec::Constant(n, 1.0 / static_cast<double>(n));
  SmoothFn quad = [&](const RVec& y, RVec* g, RMat* h) -> double {
    RVec z = f0 + c * y;
    if (g) *g = 2.0 * c.transpose() * (m * z);
    if (h) *h = 2.0 * c.transpose() * m * c;
    return z.dot(m * z);
  };
  SmoothFn phi = [&](const RVec& y, RVec* g, RMat* h) -> double {
    RVec z = f0 + c * y;
    if (z.minCoeff() <= 0) return std::numeric_limits<double>::infinity();
    if (g) *g = -c.transpose() * z.cwiseInverse();
    if (h) *h = c.transpose() * z.array().square().inverse().matrix().asDiagonal() * c;
    return -z.array().log().sum();
  };
  BarrierResult r = barrier_minimize(quad, phi, static_cast<double>(n), RVec::Zero(n - 1));

  FidelityResult out;
  out.z = (f0 + c * r.z).cwiseMax(0.0);
  out.z /= out.z.sum();
  out.value = std::clamp(out.z.dot(m * out.z), 0.0, 1.0);
  out.psi = v * out.z.cwiseSqrt();  // free phases of x chosen real non-negative
  return out;
}

}  // namespace tomoed
