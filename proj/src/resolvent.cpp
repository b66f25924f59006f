#include "mwe/resolvent.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "mwe/specfun.hpp"

namespace mwe::resolvent {

using mesh::ManifoldMesh;

std::string KernelMatrix::slice_csv(int y) const {
  std::string out = "x,y,value\n";
  char buf[96];
  for (int x = 0; x < values.rows(); ++x) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%.17g\n", x, y, values(x, y));
    out += buf;
  }
  return out;
}

ResolventSolver::ResolventSolver(const ManifoldMesh& mesh, double t)
    : mesh_(&mesh), t_(t) {
  if (t < 0.0) throw std::domain_error("resolvent: t must be >= 0");
  Eigen::SparseMatrix<double> a = t * mesh.conductance_laplacian();
  // add M + t M P on the diagonal
  Eigen::SparseMatrix<double> diag(mesh.size(), mesh.size());
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(mesh.size());
  for (int i = 0; i < mesh.size(); ++i) {
    trips.emplace_back(i, i, mesh.mu()(i) * (1.0 + t * mesh.potential()(i)));
  }
  diag.setFromTriplets(trips.begin(), trips.end());
  a += diag;
  llt_.compute(a);
  if (llt_.info() != Eigen::Success) {
    throw std::runtime_error("resolvent: Cholesky factorization failed");
  }
}

Eigen::VectorXd ResolventSolver::apply(const Eigen::VectorXd& f, int m) const {
  if (m < 0) throw std::domain_error("resolvent: m must be >= 0");
  Eigen::VectorXd u = f;
  for (int j = 0; j < m; ++j) {
    const Eigen::VectorXd rhs = mesh_->mu().cwiseProduct(u);
    u = llt_.solve(rhs);
    if (llt_.info() != Eigen::Success) {
      throw std::runtime_error("resolvent: solve failed");
    }
  }
  return u;
}

KernelMatrix resolvent_matrix(const ManifoldMesh& mesh, double t, int m) {
  if (m < 1) throw std::domain_error("resolvent_matrix: m must be >= 1");
  KernelMatrix out;
  out.mu = mesh.mu();
  out.t = t;
  out.k = (t > 0.0) ? 1.0 / std::sqrt(t) : 0.0;
  out.m = m;
  out.kind = KernelKind::resolvent;
  const int n = mesh.size();
  out.values.resize(n, n);
  if (t == 0.0) {
    out.values.setZero();
    for (int i = 0; i < n; ++i) out.values(i, i) = 1.0 / mesh.mu()(i);
    return out;
  }
  const ResolventSolver solver(mesh, t);
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(n);
  for (int y = 0; y < n; ++y) {
    delta(y) = 1.0 / mesh.mu()(y);
    out.values.col(y) = solver.apply(delta, m);
    delta(y) = 0.0;
  }
  return out;
}

KernelMatrix vertical_matrix(const ManifoldMesh& mesh, double t, int m) {
  if (!(t > 0.0)) throw std::domain_error("vertical_matrix: t must be > 0");
  KernelMatrix base = resolvent_matrix(mesh, t, m);
  KernelMatrix out;
  out.mu = base.mu;
  out.t = t;
  out.k = 1.0 / std::sqrt(t);
  out.m = m;
  out.kind = KernelKind::vertical;
  const int n = mesh.size();
  out.values.resize(n, n);
  const double root_t = std::sqrt(t);
  for (int y = 0; y < n; ++y) {
    out.values.col(y) = root_t * mesh.gradient_magnitude(base.values.col(y));
  }
  return out;
}

Eigen::VectorXd vertical_apply(const ManifoldMesh& mesh,
                               const ResolventSolver& solver, int m,
                               const Eigen::VectorXd& f) {
  return std::sqrt(solver.t()) * mesh.gradient_magnitude(solver.apply(f, m));
}

Eigen::VectorXd horizontal_apply(const ManifoldMesh& mesh,
                                 const ResolventSolver& solver, int m,
                                 const Eigen::VectorXd& f) {
  (void)mesh;
  if (m < 1) throw std::domain_error("horizontal_apply: m must be >= 1");
  // t L (1+tL)^{-m} = (1+tL)^{-(m-1)} - (1+tL)^{-m}
  const Eigen::VectorXd um1 = solver.apply(f, m - 1);
  const Eigen::VectorXd um = solver.apply(um1, 1);
  return um1 - um;
}

Spectrum spectrum(const ManifoldMesh& mesh) {
  const int n = mesh.size();
  Eigen::VectorXd root = mesh.mu().cwiseSqrt();
  Eigen::MatrixXd b = Eigen::MatrixXd(mesh.conductance_laplacian());
  for (int i = 0; i < n; ++i) {
    b(i, i) += mesh.mu()(i) * mesh.potential()(i);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) /= root(i) * root(j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("spectrum: eigendecomposition failed");
  }
  Spectrum s;
  s.mesh = &mesh;
  s.lambda = es.eigenvalues().cwiseMax(0.0);
  s.phi = es.eigenvectors();
  for (int i = 0; i < n; ++i) s.phi.row(i) /= root(i);
  return s;
}

Eigen::VectorXd Spectrum::coefficients(const Eigen::VectorXd& f) const {
  return phi.transpose() * f.cwiseProduct(mesh->mu());
}

Eigen::VectorXd Spectrum::heat_apply(double s, const Eigen::VectorXd& f) const {
  const Eigen::VectorXd c = coefficients(f);
  return phi * (-s * lambda.array()).exp().matrix().cwiseProduct(c);
}

Eigen::MatrixXd Spectrum::scalar_kernel(const Eigen::VectorXd& g) const {
  return phi * g.asDiagonal() * phi.transpose();
}

Eigen::MatrixXd Spectrum::heat_kernel(double s) const {
  return scalar_kernel((-s * lambda.array()).exp().matrix());
}

Eigen::MatrixXd Spectrum::resolvent_kernel(double t, int m) const {
  Eigen::VectorXd g = (1.0 + t * lambda.array()).pow(-m).matrix();
  return scalar_kernel(g);
}

double horizontal_identity_check(const ManifoldMesh& mesh, double t, int m) {
  if (m < 1) throw std::domain_error("horizontal_identity_check: m must be >= 1");
  const Spectrum s = spectrum(mesh);
  const int n = mesh.size();
  Eigen::VectorXd lhs(n), rhs(n);
  for (int j = 0; j < n; ++j) {
    const double a = t * s.lambda(j);
    lhs(j) = a * std::pow(1.0 + a, -m);
    rhs(j) = std::pow(1.0 + a, -(m - 1)) - std::pow(1.0 + a, -m);
  }
  const Eigen::MatrixXd diff = s.scalar_kernel(lhs - rhs);
  return diff.cwiseAbs().maxCoeff();
}

double semigroup_representation_check(const ManifoldMesh& mesh, double t, int m,
                                      int quad_points) {
  if (quad_points < 32) {
    throw std::domain_error("semigroup check: need at least 32 quadrature points");
  }
  const KernelMatrix exact = resolvent_matrix(mesh, t, m);
  const Spectrum s = spectrum(mesh);
  const auto q = specfun::gauss_laguerre(quad_points);
  const double gamma_m = std::tgamma(m);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(mesh.size());
  for (int j = 0; j < mesh.size(); ++j) {
    double acc = 0.0;
    for (size_t i = 0; i < q.nodes.size(); ++i) {
      acc += q.weights[i] * std::pow(q.nodes[i], m - 1) *
             std::exp(-q.nodes[i] * t * s.lambda(j));
    }
    g(j) = acc / gamma_m;
  }
  const Eigen::MatrixXd quad = s.scalar_kernel(g);
  const Eigen::MatrixXd ref = exact.values;
  const double scale = ref.cwiseAbs().maxCoeff();
  double worst = 0.0;
  for (int i = 0; i < ref.rows(); ++i) {
    for (int j = 0; j < ref.cols(); ++j) {
      const double denom = std::max(std::abs(ref(i, j)), 1e-3 * scale);
      worst = std::max(worst, std::abs(quad(i, j) - ref(i, j)) / denom);
    }
  }
  return worst;
}

}  // namespace mwe::resolvent
