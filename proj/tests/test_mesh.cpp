#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "mwe/mesh.hpp"
#include "mwe/specfun.hpp"

using namespace mwe;
using mesh::EndSpec;
using mesh::ManifoldMesh;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Dense solve of (L + k^2) u = delta_anchor / mu_anchor, i.e. (W + k^2 M) u = e_anchor.
Eigen::VectorXd dense_resolvent_column(const ManifoldMesh& m, double k, int source) {
  Eigen::MatrixXd a = Eigen::MatrixXd(m.conductance_laplacian());
  for (int i = 0; i < m.size(); ++i) {
    a(i, i) += (k * k + m.potential()(i)) * m.mu()(i);
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m.size());
  rhs(source) = 1.0;
  return a.ldlt().solve(rhs);
}

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("build_mesh measure additivity") {
  EndSpec e3{.n = 3, .r_min = 1.0, .r_max = 32.0, .cells = 64};
  EndSpec e4{.n = 4, .r_min = 1.0, .r_max = 32.0, .cells = 64};
  const auto m = mesh::build_mesh({e3, e4}, 1);
  const double vol3 = 4.0 * kPi / 3.0 * (std::pow(32.0, 3) - 1.0);
  const double vol4 = 0.5 * kPi * kPi * (std::pow(32.0, 4) - 1.0);
  CHECK(rel_err(m.total_measure(), vol3 + vol4 + 1.0) < 1e-12);
  CHECK(m.anchors.size() == 2);
  CHECK(m.vertices[m.anchors[0]].r == doctest::Approx(1.0));
}

TEST_CASE("build_mesh configuration errors") {
  EndSpec ok{.n = 3, .r_min = 1.0, .r_max = 8.0, .cells = 16};
  CHECK_THROWS_AS(mesh::build_mesh({ok}, 1), std::invalid_argument);
  EndSpec bad = ok;
  bad.r_max = 0.5;  // non-increasing radial grid
  CHECK_THROWS_AS(mesh::build_mesh({ok, bad}, 1), std::invalid_argument);
  bad = ok;
  bad.cells = 4;
  CHECK_THROWS_AS(mesh::build_mesh({ok, bad}, 1), std::invalid_argument);
}

TEST_CASE("probe mesh laplacian is PSD with constant kernel") {
  EndSpec e{.n = 3, .r_min = 0.5, .r_max = 16.0, .cells = 32};
  const auto m = mesh::build_single_end_probe(e);
  // symmetrized operator D^{1/2} L D^{-1/2}
  Eigen::MatrixXd b = Eigen::MatrixXd(m.conductance_laplacian());
  Eigen::VectorXd s = m.mu().cwiseSqrt();
  for (int i = 0; i < m.size(); ++i)
    for (int j = 0; j < m.size(); ++j) b(i, j) /= s(i) * s(j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
  CHECK(es.eigenvalues().minCoeff() > -1e-10);
  CHECK(std::abs(es.eigenvalues()(0)) < 1e-10);
  // constant function is in the kernel
  const Eigen::VectorXd lu = m.apply_laplacian(Eigen::VectorXd::Ones(m.size()));
  CHECK(lu.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("laplacian is mu-symmetric") {
  EndSpec e3{.n = 3, .r_min = 1.0, .r_max = 32.0, .cells = 48};
  EndSpec e4{.n = 4, .r_min = 1.0, .r_max = 32.0, .cells = 48};
  const auto m = mesh::build_mesh({e3, e4}, 2);
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd f(m.size()), g(m.size());
    for (int i = 0; i < m.size(); ++i) { f(i) = u(gen); g(i) = u(gen); }
    const double lhs = (m.apply_laplacian(f).cwiseProduct(g).cwiseProduct(m.mu())).sum();
    const double rhs = (m.apply_laplacian(g).cwiseProduct(f).cwiseProduct(m.mu())).sum();
    CHECK(std::abs(lhs - rhs) < 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("probe resolvent column matches the R^3 closed form") {
  EndSpec e{.n = 3, .r_min = 0.05, .r_max = 64.0, .cells = 512};
  const auto m = mesh::build_single_end_probe(e);
  const double k = 0.1;
  const Eigen::VectorXd u = dense_resolvent_column(m, k, 0);
  for (int v = 0; v < m.size(); ++v) {
    const double r = m.vertices[v].r;
    if (r < 2.0 || r > 16.0) continue;
    const double expect = std::exp(-k * r) / (4.0 * kPi * r);
    CHECK_MESSAGE(rel_err(u(v), expect) < 0.02, "r=", r);
  }
}

TEST_CASE("gradient magnitude basics") {
  EndSpec e{.n = 3, .r_min = 0.5, .r_max = 32.0, .cells = 128};
  const auto m = mesh::build_single_end_probe(e);
  // constants
  const Eigen::VectorXd z = m.gradient_magnitude(Eigen::VectorXd::Ones(m.size()));
  CHECK(z.maxCoeff() == 0.0);
  // unit radial slope
  Eigen::VectorXd r(m.size());
  for (int i = 0; i < m.size(); ++i) r(i) = m.vertices[i].r;
  const Eigen::VectorXd g = m.gradient_magnitude(r);
  for (int i = 0; i < m.size(); ++i) CHECK(std::abs(g(i) - 1.0) < 1e-12);
  // triangle inequality on random pairs
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd f1(m.size()), f2(m.size());
  for (int i = 0; i < m.size(); ++i) { f1(i) = u(gen); f2(i) = u(gen); }
  const Eigen::VectorXd ga = m.gradient_magnitude(f1);
  const Eigen::VectorXd gb = m.gradient_magnitude(f2);
  const Eigen::VectorXd gs = m.gradient_magnitude(f1 + f2);
  for (int i = 0; i < m.size(); ++i) CHECK(gs(i) <= ga(i) + gb(i) + 1e-12);
}

TEST_CASE("gradient of the closed-form kernel matches specfun") {
  EndSpec e{.n = 3, .r_min = 0.05, .r_max = 64.0, .cells = 512};
  const auto m = mesh::build_single_end_probe(e);
  const double k = 0.2;
  Eigen::VectorXd f(m.size());
  for (int i = 0; i < m.size(); ++i) {
    const double r = m.vertices[i].r;
    f(i) = std::exp(-k * r) / (4.0 * kPi * r);
  }
  const Eigen::VectorXd g = m.gradient_magnitude(f);
  for (int i = 0; i < m.size(); ++i) {
    const double r = m.vertices[i].r;
    if (r < 2.0 || r > 16.0) continue;
    const double expect = specfun::euclid_resolvent_gradient({3, 1, k, r});
    CHECK_MESSAGE(rel_err(g(i), expect) < 0.03, "r=", r);
  }
}

TEST_CASE("lp norms") {
  EndSpec e3{.n = 3, .r_min = 1.0, .r_max = 16.0, .cells = 32};
  EndSpec e4{.n = 4, .r_min = 1.0, .r_max = 16.0, .cells = 32};
  const auto m = mesh::build_mesh({e3, e4}, 1);
  // indicator of a single vertex, p = 1 -> its measure
  Eigen::VectorXd f = Eigen::VectorXd::Zero(m.size());
  f(5) = 1.0;
  CHECK(rel_err(m.lp_norm(f, 1.0), m.mu()(5)) < 1e-14);
  CHECK(m.lp_norm(Eigen::VectorXd::Ones(m.size()),
                  std::numeric_limits<double>::infinity()) == 1.0);
  CHECK_THROWS_AS(m.lp_norm(f, 0.5), std::domain_error);
  // Hoelder on random pairs
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd a(m.size()), b(m.size());
    for (int i = 0; i < m.size(); ++i) { a(i) = u(gen); b(i) = u(gen); }
    const double p = 1.0 + 4.0 * std::abs(u(gen));
    const double q = p / (p - 1.0);
    const double inner = (a.cwiseProduct(b).cwiseProduct(m.mu())).sum();
    CHECK(inner <= m.lp_norm(a, p) * m.lp_norm(b, q) + 1e-12);
  }
}

TEST_CASE("end ball growth has the right exponent") {
  EndSpec e3{.n = 3, .r_min = 1.0, .r_max = 64.0, .cells = 96};
  EndSpec e4{.n = 4, .r_min = 1.0, .r_max = 64.0, .cells = 96};
  const auto m = mesh::build_mesh({e3, e4}, 1);
  for (size_t end = 0; end < 2; ++end) {
    // mass of the end-ball up to radial coordinate R; the anchor sits at
    // r_min so the outer radius is the right abscissa for the growth law
    std::vector<double> lx, ly;
    for (double rad = 4.0; rad <= 16.0; rad *= 1.3) {
      double mass = 0.0;
      for (int v = 0; v < m.size(); ++v) {
        if (m.vertices[v].end == static_cast<int>(end) && m.vertices[v].r <= rad) {
          mass += m.mu()(v);
        }
      }
      lx.push_back(std::log(rad));
      ly.push_back(std::log(mass));
    }
    const double slope = fitted_slope(lx, ly);
    const double n = m.ends[end].n;
    CHECK_MESSAGE(std::abs(slope - n) < 0.1, "end=", end, " slope=", slope);
  }
}

TEST_CASE("doubling ratio distinguishes equal and unequal ends") {
  auto make = [](int n2, double rmax) {
    EndSpec a{.n = 3, .r_min = 1.0, .r_max = rmax, .cells = 64};
    EndSpec b{.n = n2, .r_min = 1.0, .r_max = rmax, .cells = 64};
    return mesh::build_mesh({a, b}, 1);
  };
  const double equal_small = mesh::doubling_ratio(make(3, 32.0));
  const double equal_large = mesh::doubling_ratio(make(3, 64.0));
  CHECK(equal_small < 24.0);
  CHECK(equal_large < 24.0);
  CHECK(equal_large / equal_small < 1.3);

  // witness slice on the small end grows once the ball crosses to the
  // larger-dimensional end
  const double mixed_small = mesh::doubling_end_profile(make(4, 32.0), 0);
  const double mixed_large = mesh::doubling_end_profile(make(4, 64.0), 0);
  CHECK(mixed_large / mixed_small > 1.4);
  const double equal_profile = mesh::doubling_end_profile(make(3, 64.0), 0);
  CHECK(equal_profile < mixed_large);

  // single end in R^3 is doubling
  EndSpec probe{.n = 3, .r_min = 1.0, .r_max = 64.0, .cells = 128};
  CHECK(mesh::doubling_ratio(mesh::build_single_end_probe(probe)) < 16.0);
}

TEST_CASE("doubling ratio against brute-force enumeration") {
  EndSpec a{.n = 3, .r_min = 1.0, .r_max = 8.0, .cells = 16};
  EndSpec b{.n = 4, .r_min = 1.0, .r_max = 8.0, .cells = 16};
  const auto m = mesh::build_mesh({a, b}, 1);
  // Floyd-Warshall distances
  const int n = m.size();
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(n, n, 1e30);
  for (int i = 0; i < n; ++i) d(i, i) = 0.0;
  for (const auto& e : m.edges) {
    d(e.u, e.v) = std::min(d(e.u, e.v), e.length);
    d(e.v, e.u) = d(e.u, e.v);
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
  double brute = 1.0;
  for (int x = 0; x < n; ++x) {
    for (double t = 2.0; t <= 8.0; t *= 1.25) {
      double small = 0.0, big = 0.0;
      for (int v = 0; v < n; ++v) {
        if (d(x, v) <= t) small += m.mu()(v);
        if (d(x, v) <= 2.0 * t) big += m.mu()(v);
      }
      if (small > 0.0 && big < 0.999 * m.total_measure()) {
        brute = std::max(brute, big / small);
      }
    }
  }
  const double impl = mesh::doubling_ratio(m);
  CHECK(impl <= brute * 1.0001);  // impl samples a subset of centers
  CHECK(impl >= brute * 0.5);     // but should not miss the bulk of the sup
}

TEST_CASE("cross-mode copies carry potentials and stay connected") {
  EndSpec a{.n = 3, .cross_modes = 3, .r_min = 1.0, .r_max = 8.0, .cells = 16};
  EndSpec b{.n = 3, .r_min = 1.0, .r_max = 8.0, .cells = 16};
  const auto m = mesh::build_mesh({a, b}, 1);
  CHECK(m.size() == 1 + 3 * 17 + 17);
  double maxpot = 0.0;
  for (const auto& v : m.vertices) maxpot = std::max(maxpot, v.potential);
  CHECK(maxpot == doctest::Approx(4.0));
  const Eigen::VectorXd dist = m.distances_from(0);
  CHECK(dist.maxCoeff() < 1e29);  // connected
}
