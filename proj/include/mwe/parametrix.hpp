#pragma once

// Parametrix ingredients for the glued resolvent: per-end cutoffs phi_i,
// solutions u_i of (L + k^2) u = -L phi_i, the omega weight envelopes, the
// explicit kernels G1 (diagonal ends) and G3 (separable), and the check that
// the numerically exact remainder obeys the omega-product envelopes.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mwe/mesh.hpp"
#include "mwe/resolvent.hpp"

namespace mwe::parametrix {

// C^2 ramp: 0 for r <= lo, 1 for r >= hi, quintic in between.
struct CutoffProfile {
  double lo = 2.0;
  double hi = 4.0;
  double operator()(double r) const;
  // phi_i as a vertex function (mode-0 chain of the given end).
  Eigen::VectorXd field(const mesh::ManifoldMesh& mesh, int end_id) const;
};

// omega_a(x, k): 1 on the hub, <d(x_i°,x)>^{-(n_i - a)} exp(-c k d) on end i.
Eigen::VectorXd omega(const mesh::ManifoldMesh& mesh, int a, double k,
                      double c = 0.5);

struct KeyLemmaSolution {
  int end_id = 0;
  double k = 0.0;
  Eigen::VectorXd u;
  Eigen::VectorXd grad;  // |grad u|
  double residual = 0.0;
};

// Solves (L + k^2) u_i = v_i with v_i = -L phi_i; residual <= 1e-10.
KeyLemmaSolution key_lemma_solve(const mesh::ManifoldMesh& mesh, int end_id,
                                 double k, const CutoffProfile& cutoff = {});

struct ParametrixKernels {
  resolvent::KernelMatrix g1;
  resolvent::KernelMatrix g3;
};

// G1: per-end radial closed-form kernels masked by phi_i(x) phi_i(y);
// G3: closed-form kernel at (x_i°, y) times u_i(x,k) times phi_i(y).
// Differentiated to order m via the exact kernel recursion (G parts) and
// finite differences in k^2 (u_i parts).
ParametrixKernels assemble_g1_g3(const mesh::ManifoldMesh& mesh, double k, int m,
                                 const CutoffProfile& cutoff = {});

struct RemainderRow {
  double k = 0.0;
  double sup_ratio = 0.0;       // sup |H_rem| / (k^{-2(m-1)} w2 x w2)
  double grad_sup_ratio = 0.0;  // sup |grad_x H_rem| / (k^{-2(m-1)} w1 x w2)
};

struct RemainderOptions {
  double c = 0.5;          // envelope decay constant; fitted if fit_c
  bool fit_c = true;
  double kr_cap = 2.0;     // window: r <= kr_cap / k
  double r_cap_frac = 0.25;  // and r <= r_cap_frac * r_max
  CutoffProfile cutoff;
};

struct RemainderReport {
  int m = 1;
  double c = 0.5;
  std::vector<RemainderRow> rows;
  double spread() const;       // max/min of sup_ratio over k
  double grad_spread() const;
  std::string to_csv() const;  // k, sup_ratio, grad_sup_ratio
};

// H_rem(k) = exact discrete (L + k^2)^{-m} minus the assembled G1 part,
// measured against the omega envelopes inside the trusted window.
RemainderReport remainder_bound_check(const mesh::ManifoldMesh& mesh,
                                      const std::vector<double>& k_grid, int m,
                                      const RemainderOptions& opts = {});

}  // namespace mwe::parametrix
