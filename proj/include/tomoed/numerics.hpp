#pragma once

#include <Eigen/Dense>
#include <complex>

#include "tomoed/errors.hpp"

namespace tomoed {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using Index = Eigen::Index;

/// Execution policy for the data-parallel kernels; Serial is the reference
/// path the tests compare against.
enum class Exec { Serial, Parallel };

inline double frob(const CMat& m) { return m.norm(); }

bool is_hermitian(const CMat& m, double tol = 1e-12);
void require_hermitian(const CMat& m, double tol = 1e-12);
bool is_unitary(const CMat& m, double tol = 1e-8);

/// Row-major stacking: rows of m concatenated into one vector.
CVec vec(const CMat& m);
CMat unvec(const CVec& v, Index rows, Index cols);

CMat kron(const CMat& a, const CMat& b);

/// Hermitian eigendecomposition, eigenvalues ascending.
struct Eigh {
  RVec values;
  CMat vectors;  // columns are eigenvectors
};
Eigh eigh(const CMat& h);

/// Orthonormal basis for the right nullspace of a wide full-row-rank matrix.
/// Throws RankDeficient when sigma_min/sigma_max < rel_tol.
CMat nullspace_basis(const CMat& a, double rel_tol = 1e-12);
RMat nullspace_basis_real(const RMat& a, double rel_tol = 1e-12);

enum class PhaseSign { MinusI, PlusI };

/// exp(sign * i * t * h) for Hermitian h, via eigendecomposition.
/// Default sign gives the propagator convention exp(-i t h).
CMat herm_expm(const CMat& h, double t, PhaseSign sign = PhaseSign::MinusI);

}  // namespace tomoed
