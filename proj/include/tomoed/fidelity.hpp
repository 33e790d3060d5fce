#pragma once

#include "tomoed/numerics.hpp"

namespace tomoed {

struct FidelityResult {
  double value = 0.0;  // worst-case gate fidelity in [0, 1]
  RVec z;              // optimal simplex weights over eigenvectors of Udes^H Uact
  CVec psi;            // a worst-case state reconstructed as V sqrt(z)
};

/// Worst-case gate fidelity min_psi |(Udes psi)^H (Uact psi)|^2 via the
/// simplex QP over z = |V^H psi|^2 with (a, b) = Re/Im eig(Udes^H Uact).
FidelityResult worst_case_fidelity(const CMat& u_des, const CMat& u_act);

}  // namespace tomoed
