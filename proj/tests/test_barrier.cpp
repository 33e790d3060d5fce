#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "tomoed/barrier.hpp"

using namespace tomoed;

TEST_CASE("newton minimizes a quadratic in one step") {
  RMat a(2, 2);
  a << 4, 1, 1, 3;
  RVec b(2);
  b << 1, -2;
  SmoothFn f = [&](const RVec& z, RVec* g, RMat* h) {
    if (g) *g = a * z - b;
    if (h) *h = a;
    return 0.5 * z.dot(a * z) - b.dot(z);
  };
  NewtonResult r = newton_minimize(f, RVec::Zero(2), 1e-14, 50);
  CHECK(r.converged);
  RVec expect = a.ldlt().solve(b);
  CHECK((r.z - expect).norm() <= 1e-10);
}

TEST_CASE("barrier solves a box-constrained quadratic to its boundary") {
  // minimize (z - 2)^2 subject to z <= 1; optimum at the constraint
  SmoothFn f = [](const RVec& z, RVec* g, RMat* h) {
    if (g) (*g) = RVec::Constant(1, 2 * (z(0) - 2.0));
    if (h) (*h) = RMat::Constant(1, 1, 2.0);
    return (z(0) - 2.0) * (z(0) - 2.0);
  };
  SmoothFn phi = [](const RVec& z, RVec* g, RMat* h) -> double {
    const double s = 1.0 - z(0);
    if (s <= 0) return std::numeric_limits<double>::infinity();
    if (g) (*g) = RVec::Constant(1, 1.0 / s);
    if (h) (*h) = RMat::Constant(1, 1, 1.0 / (s * s));
    return -std::log(s);
  };
  BarrierResult r = barrier_minimize(f, phi, 1.0, RVec::Zero(1));
  CHECK(std::abs(r.z(0) - 1.0) <= 1e-6);
  CHECK(r.gap <= 1e-9);
  // certified bound: f(z) - gap <= f(z*) = 1
  CHECK(r.objective - r.gap <= 1.0 + 1e-9);
  CHECK(r.objective >= 1.0 - 1e-9);
}

TEST_CASE("barrier respects the domain during line search") {
  // f has a pole just outside the barrier domain; line search must not step out
  SmoothFn f = [](const RVec& z, RVec* g, RMat* h) {
    if (g) (*g) = RVec::Constant(1, 1.0);
    if (h) (*h) = RMat::Constant(1, 1, 0.0);
    return z(0);
  };
  SmoothFn phi = [](const RVec& z, RVec* g, RMat* h) -> double {
    if (std::abs(z(0)) >= 1) return std::numeric_limits<double>::infinity();
    const double s = 1 - z(0) * z(0);
    if (g) (*g) = RVec::Constant(1, 2 * z(0) / s);
    if (h) (*h) = RMat::Constant(1, 1, 2 / s + 4 * z(0) * z(0) / (s * s));
    return -std::log(s);
  };
  BarrierResult r = barrier_minimize(f, phi, 2.0, RVec::Zero(1));
  CHECK(std::abs(r.z(0) + 1.0) <= 1e-4);  // pushed to z = -1
  CHECK(std::abs(r.z(0)) < 1.0);
}
