#pragma once

#include <vector>

#include "tomoed/numerics.hpp"

namespace tomoed {

/// Orthonormal Hermitian operator basis under <A,B> = Tr(A^H B).
///
/// Canonical bases put the normalized identity I/sqrt(n) first so that the
/// remaining elements span the traceless directions. For n = 2^q the basis is
/// the normalized Pauli tensor-power basis; otherwise a generalized Gell-Mann
/// construction is used.
class HermBasis {
 public:
  static HermBasis canonical(Index n);
  /// Elementary Hermitian basis of n x n (diagonal units + sym/antisym pairs).
  /// Not identity-first; used as a coordinate frame for superoperator space.
  static HermBasis elementary(Index n);

  Index dim() const { return static_cast<Index>(elems_.size()); }
  Index matrix_dim() const { return elems_.empty() ? 0 : elems_[0].rows(); }
  const CMat& operator[](Index i) const { return elems_[static_cast<size_t>(i)]; }
  const std::vector<CMat>& elements() const { return elems_; }
  bool identity_first() const { return identity_first_; }

  /// Real coordinates Tr(B_i^H h) of a Hermitian matrix.
  RVec coords(const CMat& h) const;
  CMat from_coords(const RVec& x) const;

 private:
  explicit HermBasis(std::vector<CMat> elems, bool identity_first)
      : elems_(std::move(elems)), identity_first_(identity_first) {}
  std::vector<CMat> elems_;
  bool identity_first_ = false;
};

}  // namespace tomoed
