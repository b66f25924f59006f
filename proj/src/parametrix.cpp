#include "mwe/parametrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "mwe/specfun.hpp"

namespace mwe::parametrix {

using mesh::ManifoldMesh;
using resolvent::KernelMatrix;

double CutoffProfile::operator()(double r) const {
  if (r <= lo) return 0.0;
  if (r >= hi) return 1.0;
  const double s = (r - lo) / (hi - lo);
  return std::clamp(s * s * s * (10.0 + s * (-15.0 + 6.0 * s)), 0.0, 1.0);
}

Eigen::VectorXd CutoffProfile::field(const ManifoldMesh& mesh, int end_id) const {
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(mesh.size());
  for (int v = 0; v < mesh.size(); ++v) {
    if (mesh.vertices[v].end == end_id && mesh.vertices[v].mode == 0) {
      phi(v) = (*this)(mesh.vertices[v].r);
    }
  }
  return phi;
}

Eigen::VectorXd omega(const ManifoldMesh& mesh, int a, double k, double c) {
  if (a != 1 && a != 2) throw std::domain_error("omega: a must be 1 or 2");
  if (!(k > 0.0) || k > 1.0) throw std::domain_error("omega: k must be in (0, 1]");
  Eigen::VectorXd w(mesh.size());
  for (int v = 0; v < mesh.size(); ++v) {
    const auto& vert = mesh.vertices[v];
    if (vert.end == mesh::kCenter) {
      w(v) = 1.0;
    } else {
      const int n = mesh.ends[vert.end].n;
      const double d = vert.r;
      const double bracket = std::sqrt(1.0 + d * d);
      w(v) = std::pow(bracket, -(n - a)) * std::exp(-c * k * d);
    }
  }
  return w;
}

KeyLemmaSolution key_lemma_solve(const ManifoldMesh& mesh, int end_id, double k,
                                 const CutoffProfile& cutoff) {
  if (!(k > 0.0) || k > 1.0) {
    throw std::domain_error("key_lemma_solve: k must be in (0, 1]");
  }
  const Eigen::VectorXd phi = cutoff.field(mesh, end_id);
  const Eigen::VectorXd v = -mesh.apply_laplacian(phi);
  // (L + k^2) u = v  solved as (I + tL) u = v / (1 + ...) with t = 1/k^2:
  // (L + k^2) = k^2 (I + t L)
  const double t = 1.0 / (k * k);
  const resolvent::ResolventSolver solver(mesh, t);
  const Eigen::VectorXd u = solver.apply(v, 1) * t;
  KeyLemmaSolution out;
  out.end_id = end_id;
  out.k = k;
  out.u = u;
  out.grad = mesh.gradient_magnitude(u);
  const Eigen::VectorXd resid = mesh.apply_laplacian(u) + k * k * u - v;
  const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
  out.residual = resid.cwiseAbs().maxCoeff() / scale;
  if (out.residual > 1e-10) {
    throw std::runtime_error("key_lemma_solve: residual too large");
  }
  return out;
}

namespace {

// d^j/d(k^2)^j of the full-space kernel at distance r, via the exact order
// recursion: d^j G_1 = (-1)^j j! G_{j+1}.
double euclid_dk2(int n, int j, double k, double r) {
  const double sign = (j % 2 == 0) ? 1.0 : -1.0;
  return sign * std::tgamma(j + 1.0) *
         specfun::euclid_resolvent_kernel({n, j + 1, k, r});
}

// finite-difference derivatives of u_i in k^2 (order 0, 1, 2)
Eigen::VectorXd u_dk2(const ManifoldMesh& mesh, int end_id, double k, int order,
                      const CutoffProfile& cutoff) {
  if (order == 0) return key_lemma_solve(mesh, end_id, k, cutoff).u;
  const double s = k * k;
  const double h = std::max(1e-3 * s, 1e-10);
  const Eigen::VectorXd up =
      key_lemma_solve(mesh, end_id, std::sqrt(s + h), cutoff).u;
  const Eigen::VectorXd um =
      key_lemma_solve(mesh, end_id, std::sqrt(s - h), cutoff).u;
  if (order == 1) return (up - um) / (2.0 * h);
  const Eigen::VectorXd u0 = key_lemma_solve(mesh, end_id, k, cutoff).u;
  if (order == 2) return (up - 2.0 * u0 + um) / (h * h);
  throw std::invalid_argument("u_dk2: order > 2 not supported");
}

double binomial(int n, int k) {
  return std::round(std::tgamma(n + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(n - k + 1.0)));
}

}  // namespace

ParametrixKernels assemble_g1_g3(const ManifoldMesh& mesh, double k, int m,
                                 const CutoffProfile& cutoff) {
  if (!(k > 0.0) || k > 1.0) {
    throw std::domain_error("assemble_g1_g3: k must be in (0, 1]");
  }
  if (m < 1 || m > 3) {
    throw std::invalid_argument("assemble_g1_g3: m must be in {1,2,3}");
  }
  const int nv = mesh.size();
  ParametrixKernels out;
  for (KernelMatrix* km : {&out.g1, &out.g3}) {
    km->values = Eigen::MatrixXd::Zero(nv, nv);
    km->mu = mesh.mu();
    km->k = k;
    km->t = 1.0 / (k * k);
    km->m = m;
    km->kind = resolvent::KernelKind::resolvent;
  }

  for (size_t end = 0; end < mesh.ends.size(); ++end) {
    const int n = mesh.ends[end].n;
    const Eigen::VectorXd phi = cutoff.field(mesh, static_cast<int>(end));
    std::vector<int> chain;
    for (int v = 0; v < nv; ++v) {
      if (mesh.vertices[v].end == static_cast<int>(end) && mesh.vertices[v].mode == 0) {
        chain.push_back(v);
      }
    }
    // G1 block: radial end kernel masked by phi(x) phi(y)
    for (int x : chain) {
      if (phi(x) == 0.0) continue;
      for (int y : chain) {
        if (phi(y) == 0.0) continue;
        out.g1.values(x, y) = phi(x) * phi(y) *
            specfun::radial_end_kernel(n, m, k, mesh.vertices[y].r, mesh.vertices[x].r);
      }
    }
    // G3 block: sum_j C(m-1,j) d^j G(x_i°, y) * d^{m-1-j} u_i(x), with the
    // (-1)^{m-1}/(m-1)! prefactor of the order recursion
    const double prefactor =
        ((m - 1) % 2 == 0 ? 1.0 : -1.0) / std::tgamma(static_cast<double>(m));
    for (int j = 0; j <= m - 1; ++j) {
      const Eigen::VectorXd du =
          u_dk2(mesh, static_cast<int>(end), k, m - 1 - j, cutoff);
      for (int y : chain) {
        if (phi(y) == 0.0) continue;
        const double gval = euclid_dk2(n, j, k, mesh.vertices[y].r);
        const double coef = prefactor * binomial(m - 1, j) * gval * phi(y);
        out.g3.values.col(y) += coef * du;
      }
    }
  }
  return out;
}

double RemainderReport::spread() const {
  double lo = rows.front().sup_ratio, hi = lo;
  for (const auto& r : rows) {
    lo = std::min(lo, r.sup_ratio);
    hi = std::max(hi, r.sup_ratio);
  }
  return hi / lo;
}

double RemainderReport::grad_spread() const {
  double lo = rows.front().grad_sup_ratio, hi = lo;
  for (const auto& r : rows) {
    lo = std::min(lo, r.grad_sup_ratio);
    hi = std::max(hi, r.grad_sup_ratio);
  }
  return hi / lo;
}

std::string RemainderReport::to_csv() const {
  std::string out = "k,sup_ratio,grad_sup_ratio\n";
  char buf[128];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g\n", r.k, r.sup_ratio,
                  r.grad_sup_ratio);
    out += buf;
  }
  return out;
}

namespace {

struct RemainderData {
  double k = 0.0;
  Eigen::MatrixXd h;       // remainder kernel
  Eigen::MatrixXd grad_h;  // |grad_x| of each column
  std::vector<int> window;
};

RemainderRow evaluate_row(const ManifoldMesh& mesh, const RemainderData& data,
                          int m, double c) {
  const Eigen::VectorXd w1 = omega(mesh, 1, data.k, c);
  const Eigen::VectorXd w2 = omega(mesh, 2, data.k, c);
  const double scale = std::pow(data.k, 2.0 * (m - 1));  // 1/k^{-2(m-1)}
  RemainderRow row;
  row.k = data.k;
  for (int x : data.window) {
    for (int y : data.window) {
      row.sup_ratio = std::max(
          row.sup_ratio, scale * std::abs(data.h(x, y)) / (w2(x) * w2(y)));
      row.grad_sup_ratio = std::max(
          row.grad_sup_ratio, scale * data.grad_h(x, y) / (w1(x) * w2(y)));
    }
  }
  return row;
}

}  // namespace

RemainderReport remainder_bound_check(const ManifoldMesh& mesh,
                                      const std::vector<double>& k_grid, int m,
                                      const RemainderOptions& opts) {
  if (k_grid.empty()) throw std::domain_error("remainder_bound_check: empty grid");
  std::vector<RemainderData> data;
  for (double k : k_grid) {
    if (!(k > 0.0) || k > 1.0) {
      throw std::domain_error("remainder_bound_check: k must be in (0, 1]");
    }
    RemainderData d;
    d.k = k;
    const double t = 1.0 / (k * k);
    const KernelMatrix exact = resolvent::resolvent_matrix(mesh, t, m);
    const ParametrixKernels pk = assemble_g1_g3(mesh, k, m, opts.cutoff);
    d.h = std::pow(t, m) * exact.values - pk.g1.values;
    d.grad_h.resize(mesh.size(), mesh.size());
    for (int y = 0; y < mesh.size(); ++y) {
      d.grad_h.col(y) = mesh.gradient_magnitude(d.h.col(y));
    }
    for (int v = 0; v < mesh.size(); ++v) {
      const auto& vert = mesh.vertices[v];
      if (vert.end == mesh::kCenter) {
        d.window.push_back(v);
        continue;
      }
      if (vert.mode != 0) continue;
      const double rcap = std::min(opts.r_cap_frac * mesh.ends[vert.end].r_max,
                                   opts.kr_cap / k);
      if (vert.r <= rcap) d.window.push_back(v);
    }
    data.push_back(std::move(d));
  }

  auto build = [&](double c) {
    RemainderReport rep;
    rep.m = m;
    rep.c = c;
    for (const auto& d : data) rep.rows.push_back(evaluate_row(mesh, d, m, c));
    return rep;
  };

  RemainderReport best = build(opts.c);
  if (opts.fit_c && k_grid.size() > 1) {
    for (double c = 0.3; c <= 1.001; c += 0.1) {
      const RemainderReport cand = build(c);
      if (std::max(cand.spread(), cand.grad_spread()) <
          std::max(best.spread(), best.grad_spread())) {
        best = cand;
      }
    }
  }
  return best;
}

}  // namespace mwe::parametrix
