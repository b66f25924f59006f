#pragma once

// Discrete resolvent machinery on a ManifoldMesh: (I + tL)^{-m} solves,
// exact kernel matrices, the vertical (gradient) kernel, the horizontal
// identity, and the Gamma-integral semigroup representation check.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "mwe/mesh.hpp"

namespace mwe::resolvent {

enum class KernelKind { resolvent, vertical, horizontal, heat, remainder };

// Dense kernel T(x,y) with attached vertex measures; acts on f by
// (Tf)(x) = sum_y T(x,y) f(y) mu_y.
struct KernelMatrix {
  Eigen::MatrixXd values;
  Eigen::VectorXd mu;
  double t = 0.0;
  double k = 0.0;
  int m = 1;
  KernelKind kind = KernelKind::resolvent;

  Eigen::VectorXd apply(const Eigen::VectorXd& f) const {
    return values * f.cwiseProduct(mu);
  }
  std::string slice_csv(int y) const;  // rows (x, y, value)
};

// Factorized (M + t(W + M P)) solver; apply() computes (I + tL)^{-m} f.
class ResolventSolver {
 public:
  ResolventSolver(const mesh::ManifoldMesh& mesh, double t);
  Eigen::VectorXd apply(const Eigen::VectorXd& f, int m = 1) const;
  double t() const { return t_; }

 private:
  const mesh::ManifoldMesh* mesh_;
  double t_;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt_;
};

// Columns solve (I + tL)^m u = delta_y / mu_y.
KernelMatrix resolvent_matrix(const mesh::ManifoldMesh& mesh, double t, int m);

// V(x,y) = sqrt(t) |grad_x T_m(.,y)|(x); dominates the vertical operator on
// kernels, exact on delta functions.
KernelMatrix vertical_matrix(const mesh::ManifoldMesh& mesh, double t, int m);

// Exact signed application sqrt(t) |grad (I + tL)^{-m} f|.
Eigen::VectorXd vertical_apply(const mesh::ManifoldMesh& mesh,
                               const ResolventSolver& solver, int m,
                               const Eigen::VectorXd& f);

// tL(I + tL)^{-m} f computed via the resolvent-difference identity.
Eigen::VectorXd horizontal_apply(const mesh::ManifoldMesh& mesh,
                                 const ResolventSolver& solver, int m,
                                 const Eigen::VectorXd& f);

// Eigenpairs of L in the mu-inner product: L phi_j = lambda_j phi_j with
// <phi_i, phi_j>_mu = delta_ij.  Dense; meant for small meshes.
struct Spectrum {
  Eigen::VectorXd lambda;
  Eigen::MatrixXd phi;          // columns phi_j
  const mesh::ManifoldMesh* mesh = nullptr;

  Eigen::VectorXd coefficients(const Eigen::VectorXd& f) const;
  Eigen::VectorXd heat_apply(double s, const Eigen::VectorXd& f) const;
  Eigen::MatrixXd heat_kernel(double s) const;                // e^{-sL} kernel
  Eigen::MatrixXd resolvent_kernel(double t, int m) const;    // (1+tL)^{-m} kernel
  Eigen::MatrixXd scalar_kernel(const Eigen::VectorXd& g) const;  // sum g(lambda_j) phi phi^T
};
Spectrum spectrum(const mesh::ManifoldMesh& mesh);

// Max entry deviation between t L (1+tL)^{-m} and (1+tL)^{-(m-1)} - (1+tL)^{-m},
// both assembled spectrally.
double horizontal_identity_check(const mesh::ManifoldMesh& mesh, double t, int m);

// Compares resolvent_matrix against Gauss-Laguerre quadrature of the heat
// semigroup applied spectrally.  Returns the max entry error relative to the
// kernel scale: max |a - b| / max(|b|, 1e-3 * max|b|).
double semigroup_representation_check(const mesh::ManifoldMesh& mesh, double t,
                                      int m, int quad_points);

}  // namespace mwe::resolvent
