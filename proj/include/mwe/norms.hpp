#pragma once

// Operator-norm machinery: exact mixed (Schur) norms, interpolation upper
// bounds, Boyd-style power-iteration lower bounds, the explicit lower-bound
// test family, the alpha/beta/gamma exponent case table, and log-log scaling
// fits against sqrt(t).

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mwe/mesh.hpp"
#include "mwe/resolvent.hpp"

namespace mwe::norms {

enum class MixedNormMode { L1x_LinfY, LinfX_L1y };

// sup_y sum_x |T(x,y)| mu_x  (or transposed); the exact 1->1 / inf->inf
// operator norms of a kernel operator.
double mixed_norm(const resolvent::KernelMatrix& T, MixedNormMode mode);

struct PnormBounds {
  double lower = 0.0;
  double upper = 0.0;
};

struct PnormOptions {
  int restarts = 5;
  int max_iterations = 200;
  double tolerance = 1e-8;  // relative change of the estimate
  uint64_t seed = 0;
};

// lower: max of power iteration, coordinate deltas, random sampling, and any
// caller-provided candidate functions; upper: Riesz-Thorin interpolation of
// the two mixed norms.  lower <= upper enforced.
PnormBounds pnorm_bounds(const resolvent::KernelMatrix& T, double p,
                         const PnormOptions& opts = {},
                         const std::vector<Eigen::VectorXd>& extra_candidates = {});

struct CaseAnalysis {
  int n_i = 3;
  int n_j = 3;
  double p = 2.0;
  double alpha = 0.0;  // -(n_i - 1) p + n_i
  double beta = 0.0;   // -(n_j - 2) p' + n_j
  int case_label = 0;  // 1..4
  double k_exponent = 0.0;
};

// The four-case table for the k-growth of the parametrix separable term,
// keeping the prefactor k explicit:
//   case 2 (alpha<0, beta>0): n_j/p - 1
//   case 3 (alpha>0, beta<0): n_i/p'
//   case 4 (alpha<0, beta<0): 1
// Case 1 (alpha>0, beta>0) is impossible for n_i, n_j >= 3.
CaseAnalysis case_analysis(int n_i, int n_j, double p);

// f with |f|^p ~ |g|^{p'} for g(y) = d(x_i°,y)^{2-n_i} e^{-c k d(x_i°,y)},
// supported on end i (mode 0), normalized to ||f||_p = 1.
Eigen::VectorXd lower_bound_family(const mesh::ManifoldMesh& mesh, double p,
                                   double k, int end_id, double c = 1.0);

struct SlopeFit {
  double slope = 0.0;
  double stderr_slope = 0.0;
};

// Least-squares slope of log(value) against log(sqrt(t)).
// Requires >= 5 points spanning >= 2 decades of t and positive values.
SlopeFit exponent_fit(const std::vector<double>& t_grid,
                      const std::vector<double>& values);

// Geometric grid from lo to hi inclusive, with step as close to the
// requested ratio as possible.
std::vector<double> dyadic_grid(double lo, double hi, double ratio);

// Exact L^2 -> L^2 norm of f -> sqrt(t) |grad (1+tL)^{-m} f| via power
// iteration on the self-adjoint composition (Rayleigh quotients are
// certified lower bounds; converged value is the norm).
double vertical_l2_norm(const mesh::ManifoldMesh& mesh, double t, int m,
                        int iterations = 60);

struct NormReportRow {
  double t = 0.0;
  double p = 2.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct NormReport {
  double p = 2.0;
  double target_slope = 0.0;  // max(0, 1 - n*/p)
  SlopeFit lower_fit;
  SlopeFit upper_fit;
  SlopeFit family_fit;  // slope of the explicit-family lower bound alone
  std::vector<NormReportRow> rows;
  std::string to_csv() const;
};

// Full pipeline for the vertical operator's p->p norm across a t-grid:
// interpolation upper bounds and certified lower bounds from exact signed
// applications (delta columns, the explicit family, power-iteration seeds,
// random fields, and the exact p=2 composition).
NormReport vertical_norm_report(const mesh::ManifoldMesh& mesh, int m, double p,
                                const std::vector<double>& t_grid, uint64_t seed);

}  // namespace mwe::norms
