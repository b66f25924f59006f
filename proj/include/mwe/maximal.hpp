#pragma once

// Maximal operators over a dyadic t-grid (vertical, horizontal, Stein),
// weak-(1,1) constants, Fefferman-Stein vector-valued ratios, the vertical
// square function, and randomized R-/l2-boundedness estimates.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mwe/mesh.hpp"
#include "mwe/resolvent.hpp"

namespace mwe::maximal {

enum class Kind { vertical, horizontal, stein_res, stein_exp };

struct MaximalResult {
  Kind kind = Kind::vertical;
  int m = 1;
  Eigen::VectorXd value;
  Eigen::VectorXd argmax_t;
  std::string to_csv(const mesh::ManifoldMesh& mesh) const;  // vertex,r,end,value,argmax_t
};

MaximalResult vertical_maximal(const mesh::ManifoldMesh& mesh, int m,
                               const Eigen::VectorXd& f,
                               const std::vector<double>& t_grid);

MaximalResult horizontal_maximal(const mesh::ManifoldMesh& mesh, int m,
                                 const Eigen::VectorXd& f,
                                 const std::vector<double>& t_grid);

// sup_t |(1 + tL)^{-m} f| over the grid.
MaximalResult stein_resolvent_maximal(const mesh::ManifoldMesh& mesh, int m,
                                      const Eigen::VectorXd& f,
                                      const std::vector<double>& t_grid);

// sup_s |sqrt(s) grad e^{-sL} f| over the grid, computed spectrally.
// Exploratory only: no boundedness target is attached to this operator.
MaximalResult heat_vertical_maximal(const mesh::ManifoldMesh& mesh,
                                    const Eigen::VectorXd& f,
                                    const std::vector<double>& s_grid);

// max over vertices of M^{res}_m f - M^{exp} f for f >= 0.  The heat maximal
// function is evaluated on the sigma-set {s_i t} induced by the
// Gauss-Laguerre nodes, which makes the quadrature average a convex
// combination of sampled heat values; the result is then bounded by the
// quadrature error alone.  Extra heat times may be supplied in s_grid.
double stein_domination_check(const mesh::ManifoldMesh& mesh, int m,
                              const Eigen::VectorXd& f,
                              const std::vector<double>& t_grid,
                              const std::vector<double>& s_grid = {},
                              int quad_points = 96);

// max over the family of sup_lambda lambda mu{ Mf > lambda }; every member
// must have unit L^1 norm.
double weak11_constant(const mesh::ManifoldMesh& mesh, Kind kind, int m,
                       const std::vector<Eigen::VectorXd>& family,
                       const std::vector<double>& t_grid);

// || (sum_j (M f_j)^2)^{1/2} ||_p / || (sum_j f_j^2)^{1/2} ||_p for the
// vertical maximal operator.
double fefferman_stein_ratio(const mesh::ManifoldMesh& mesh, int m,
                             const std::vector<Eigen::VectorXd>& fs, double p,
                             const std::vector<double>& t_grid);

struct SquareResult {
  int m = 1;
  std::vector<double> t_grid;
  Eigen::VectorXd value;
  std::string to_csv(const mesh::ManifoldMesh& mesh) const;
};

// Midpoint quadrature in log t of the vertical square function.
SquareResult square_function(const mesh::ManifoldMesh& mesh, int m,
                             const Eigen::VectorXd& f,
                             const std::vector<double>& t_grid);

struct RBoundEstimate {
  double p = 2.0;
  int t_count = 1;
  int trials = 1;
  uint64_t seed = 0;
  double best_l2_ratio = 0.0;
  double rademacher_ratio = 0.0;  // E||sum eps_j T_j f_j||_p / E||sum eps_j f_j||_p
  std::vector<double> trial_ratios;
  std::string to_csv() const;  // trial, ratio
};

// mixed: sharp bump translates, smooth translates, and random fields --
// widest search, used when hunting for growth.  smooth: scale-adapted smooth
// translates only -- concentrated trial quality, used for stability checks.
enum class DrawMix { mixed, smooth };

// Randomized lower estimates for the l2-bound and the Rademacher average of
// { sqrt(t) grad (1+tL)^{-m} : t in [t_lo, t_hi] }.  Deterministic given the
// seed; >= 256 sign samples per trial for the Rademacher average.
RBoundEstimate rbound_estimate(const mesh::ManifoldMesh& mesh, int m, double p,
                               int t_count, int trials, uint64_t seed,
                               double t_lo, double t_hi, int sign_samples = 256,
                               DrawMix mix = DrawMix::mixed);

}  // namespace mwe::maximal
