#include <doctest.h>

#include <cmath>
#include <random>

#include "mwe/mesh.hpp"
#include "mwe/resolvent.hpp"
#include "mwe/specfun.hpp"

using namespace mwe;
using mesh::EndSpec;
using mesh::ManifoldMesh;

namespace {

// Coarse uniform two-end mesh with small spectral radius; the operator
// identity and quadrature checks run here.
ManifoldMesh identity_mesh() {
  EndSpec e3{.n = 3, .r_min = 0.05, .r_max = 192.05, .cells = 32,
             .grid = mesh::RadialGrid::uniform};
  EndSpec e4 = e3;
  e4.n = 4;
  return mesh::build_mesh({e3, e4}, 1);
}

double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("resolvent at t=0 is the identity kernel") {
  const auto m = identity_mesh();
  const auto t0 = resolvent::resolvent_matrix(m, 0.0, 2);
  for (int i = 0; i < m.size(); ++i) {
    CHECK(t0.values(i, i) == doctest::Approx(1.0 / m.mu()(i)));
  }
  CHECK(t0.values(0, 1) == 0.0);
}

TEST_CASE("resolvent kernels conserve mass, stay positive, stay symmetric") {
  const auto m = identity_mesh();
  for (double t : {0.5, 10.0, 400.0}) {
    for (int mm : {1, 2, 3}) {
      const auto ker = resolvent::resolvent_matrix(m, t, mm);
      const Eigen::VectorXd row_sums = ker.apply(Eigen::VectorXd::Ones(m.size()));
      for (int i = 0; i < m.size(); ++i) CHECK(std::abs(row_sums(i) - 1.0) < 1e-10);
      CHECK(ker.values.minCoeff() > -1e-12);
      const double scale = ker.values.cwiseAbs().maxCoeff();
      CHECK((ker.values - ker.values.transpose()).cwiseAbs().maxCoeff() < 1e-12 * scale);
    }
  }
}

TEST_CASE("solve path agrees with the dense eigensolver oracle") {
  const auto m = identity_mesh();
  const auto spec = resolvent::spectrum(m);
  for (double t : {1.0, 25.0}) {
    for (int mm : {1, 3}) {
      const auto ker = resolvent::resolvent_matrix(m, t, mm);
      const Eigen::MatrixXd oracle = spec.resolvent_kernel(t, mm);
      CHECK((ker.values - oracle).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("resolvent contraction on L^p") {
  const auto m = identity_mesh();
  std::mt19937 gen(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const resolvent::ResolventSolver solver(m, 30.0);
  for (int trial = 0; trial < 8; ++trial) {
    Eigen::VectorXd f(m.size());
    for (int i = 0; i < m.size(); ++i) f(i) = u(gen);
    const Eigen::VectorXd g = solver.apply(f, 2);
    for (double p : {1.0, 2.0, std::numeric_limits<double>::infinity()}) {
      CHECK(m.lp_norm(g, p) <= m.lp_norm(f, p) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("horizontal identity holds to 1e-12") {
  const auto m = identity_mesh();
  CHECK(resolvent::horizontal_identity_check(m, 5.0, 1) < 1e-12);
  CHECK(resolvent::horizontal_identity_check(m, 100.0, 3) < 1e-12);
  // scalar sanity: lambda=2, t=1, m=2 gives 2/9 on both sides
  const double a = 2.0;
  CHECK(a * std::pow(1.0 + a, -2) == doctest::Approx(2.0 / 9.0));
  CHECK(std::pow(1.0 + a, -1) - std::pow(1.0 + a, -2) == doctest::Approx(2.0 / 9.0));
}

TEST_CASE("horizontal apply matches the difference of resolvents") {
  const auto m = identity_mesh();
  const resolvent::ResolventSolver solver(m, 7.0);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(m.size());
  f(3) = 1.0;
  const Eigen::VectorXd h = resolvent::horizontal_apply(m, solver, 2, f);
  // t L (1+tL)^{-2} f directly
  const Eigen::VectorXd u = solver.apply(f, 2);
  const Eigen::VectorXd direct = 7.0 * m.apply_laplacian(u);
  CHECK((h - direct).cwiseAbs().maxCoeff() < 1e-9);
  // constants are annihilated
  const Eigen::VectorXd z = resolvent::horizontal_apply(m, solver, 1,
                                                        Eigen::VectorXd::Ones(m.size()));
  CHECK(z.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("semigroup representation check") {
  const auto m = identity_mesh();
  // exact at t = 0
  CHECK(resolvent::semigroup_representation_check(m, 0.0, 1, 64) < 1e-12);
  // the pinned configuration: m=3, t=10, 64 points
  const double e64 = resolvent::semigroup_representation_check(m, 10.0, 3, 64);
  CHECK(e64 < 1e-8);
  // error decreases monotonically as points double
  const double e32 = resolvent::semigroup_representation_check(m, 10.0, 3, 32);
  const double e128 = resolvent::semigroup_representation_check(m, 10.0, 3, 128);
  CHECK(e64 <= e32 * 1.001 + 1e-13);
  CHECK(e128 <= e64 * 1.001 + 1e-13);
  CHECK_THROWS_AS(resolvent::semigroup_representation_check(m, 1.0, 1, 8),
                  std::domain_error);
}

TEST_CASE("vertical operator kills constants") {
  const auto m = identity_mesh();
  const resolvent::ResolventSolver solver(m, 12.0);
  const Eigen::VectorXd v =
      resolvent::vertical_apply(m, solver, 2, Eigen::VectorXd::Ones(m.size()));
  CHECK(v.cwiseAbs().maxCoeff() < 1e-10);
  CHECK_THROWS_AS(resolvent::vertical_matrix(m, -1.0, 1), std::domain_error);
}

TEST_CASE("vertical kernel column matches the closed-form gradient") {
  // single R^3 end, k = 0.1; the paper normalization is
  // sqrt(t) grad (1+tD)^{-m} = k^{2m-1} grad (k^2+D)^{-m}
  EndSpec e{.n = 3, .r_min = 0.05, .r_max = 64.0, .cells = 512};
  const auto m = mesh::build_single_end_probe(e);
  const double k = 0.1, t = 1.0 / (k * k);
  const auto v = resolvent::vertical_matrix(m, t, 1);
  for (int x = 0; x < m.size(); ++x) {
    const double r = m.vertices[x].r;
    if (r < 3.0 || r > 12.0) continue;
    const double expect = k * specfun::euclid_resolvent_gradient({3, 1, k, r});
    CHECK_MESSAGE(rel_err(v.values(x, 0), expect) < 0.05, "r=", r);
  }
}

TEST_CASE("vertical matrix dominates exact applications") {
  const auto m = identity_mesh();
  const double t = 9.0;
  const auto v = resolvent::vertical_matrix(m, t, 1);
  const resolvent::ResolventSolver solver(m, t);
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd f(m.size());
    for (int i = 0; i < m.size(); ++i) f(i) = u(gen);
    const Eigen::VectorXd exact = resolvent::vertical_apply(m, solver, 1, f);
    const Eigen::VectorXd bound = v.apply(f);
    for (int i = 0; i < m.size(); ++i) CHECK(exact(i) <= bound(i) * (1.0 + 1e-9) + 1e-15);
  }
}
