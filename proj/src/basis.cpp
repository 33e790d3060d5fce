#include "tomoed/basis.hpp"

#include <cmath>

namespace tomoed {

namespace {

std::vector<CMat> pauli2() {
  CMat I = CMat::Identity(2, 2);
  CMat X(2, 2), Y(2, 2), Z(2, 2);
  X << 0, 1, 1, 0;
  Y << 0, Complex(0, -1), Complex(0, 1), 0;
  Z << 1, 0, 0, -1;
  return {I, X, Y, Z};
}

}  // namespace

HermBasis HermBasis::canonical(Index n) {
  if (n < 1) throw DimensionMismatch("basis: n must be positive");
  // power of two: normalized Pauli tensor powers, identity first
  if ((n & (n - 1)) == 0 && n >= 2) {
    std::vector<CMat> cur = {CMat::Identity(1, 1)};
    Index m = 1;
    auto p = pauli2();
    while (m < n) {
      std::vector<CMat> next;
      next.reserve(cur.size() * 4);
      for (const CMat& a : cur)
        for (const CMat& b : p) next.push_back(kron(a, b));
      cur = std::move(next);
      m *= 2;
    }
    const double norm = std::sqrt(static_cast<double>(n));
    for (CMat& e : cur) e /= norm;
    return HermBasis(std::move(cur), true);
  }
  // generalized Gell-Mann: identity, diagonal traceless, sym, antisym
  std::vector<CMat> out;
  out.push_back(CMat::Identity(n, n) / std::sqrt(static_cast<double>(n)));
  for (Index k = 1; k < n; ++k) {
    CMat d = CMat::Zero(n, n);
    for (Index j = 0; j < k; ++j) d(j, j) = 1.0;
    d(k, k) = -static_cast<double>(k);
    out.push_back(d / std::sqrt(static_cast<double>(k * (k + 1))));
  }
  const double r = 1.0 / std::sqrt(2.0);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      CMat s = CMat::Zero(n, n);
      s(i, j) = r;
      s(j, i) = r;
      out.push_back(s);
      CMat a = CMat::Zero(n, n);
      a(i, j) = Complex(0, -r);
      a(j, i) = Complex(0, r);
      out.push_back(a);
    }
  return HermBasis(std::move(out), true);
}

HermBasis HermBasis::elementary(Index n) {
  std::vector<CMat> out;
  out.reserve(static_cast<size_t>(n * n));
  for (Index k = 0; k < n; ++k) {
    CMat e = CMat::Zero(n, n);
    e(k, k) = 1.0;
    out.push_back(e);
  }
  const double r = 1.0 / std::sqrt(2.0);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      CMat s = CMat::Zero(n, n);
      s(i, j) = r;
      s(j, i) = r;
      out.push_back(s);
      CMat a = CMat::Zero(n, n);
      a(i, j) = Complex(0, -r);
      a(j, i) = Complex(0, r);
      out.push_back(a);
    }
  return HermBasis(std::move(out), false);
}

RVec HermBasis::coords(const CMat& h) const {
  RVec x(dim());
  for (Index i = 0; i < dim(); ++i)
    x(i) = (elems_[static_cast<size_t>(i)].adjoint() * h).trace().real();
  return x;
}

CMat HermBasis::from_coords(const RVec& x) const {
  if (x.size() != dim()) throw DimensionMismatch("from_coords: coordinate size mismatch");
  CMat h = CMat::Zero(matrix_dim(), matrix_dim());
  for (Index i = 0; i < dim(); ++i) h += x(i) * elems_[static_cast<size_t>(i)];
  return h;
}

}  // namespace tomoed
