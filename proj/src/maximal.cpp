#include "mwe/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "mwe/rng.hpp"
#include "mwe/specfun.hpp"

namespace mwe::maximal {

using mesh::ManifoldMesh;

namespace {

void check_grid(const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw std::domain_error("maximal: empty t grid");
  for (double t : t_grid) {
    if (!(t > 0.0)) throw std::domain_error("maximal: t values must be positive");
  }
}

template <typename Apply>
MaximalResult grid_supremum(const ManifoldMesh& mesh, Kind kind, int m,
                            const std::vector<double>& t_grid, Apply&& apply) {
  check_grid(t_grid);
  MaximalResult out;
  out.kind = kind;
  out.m = m;
  out.value = Eigen::VectorXd::Zero(mesh.size());
  out.argmax_t = Eigen::VectorXd::Constant(mesh.size(), t_grid.front());
  for (double t : t_grid) {
    const Eigen::VectorXd v = apply(t);
    for (int x = 0; x < mesh.size(); ++x) {
      const double a = std::abs(v(x));
      if (a > out.value(x)) {
        out.value(x) = a;
        out.argmax_t(x) = t;
      }
    }
  }
  return out;
}

}  // namespace

std::string MaximalResult::to_csv(const ManifoldMesh& mesh) const {
  std::string out = "vertex,r,end,value,argmax_t\n";
  char buf[160];
  for (int x = 0; x < mesh.size(); ++x) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%d,%.17g,%.17g\n", x,
                  mesh.vertices[x].r, mesh.vertices[x].end, value(x), argmax_t(x));
    out += buf;
  }
  return out;
}

MaximalResult vertical_maximal(const ManifoldMesh& mesh, int m,
                               const Eigen::VectorXd& f,
                               const std::vector<double>& t_grid) {
  return grid_supremum(mesh, Kind::vertical, m, t_grid, [&](double t) {
    const resolvent::ResolventSolver solver(mesh, t);
    return resolvent::vertical_apply(mesh, solver, m, f);
  });
}

MaximalResult horizontal_maximal(const ManifoldMesh& mesh, int m,
                                 const Eigen::VectorXd& f,
                                 const std::vector<double>& t_grid) {
  return grid_supremum(mesh, Kind::horizontal, m, t_grid, [&](double t) {
    const resolvent::ResolventSolver solver(mesh, t);
    return resolvent::horizontal_apply(mesh, solver, m, f);
  });
}

MaximalResult stein_resolvent_maximal(const ManifoldMesh& mesh, int m,
                                      const Eigen::VectorXd& f,
                                      const std::vector<double>& t_grid) {
  return grid_supremum(mesh, Kind::stein_res, m, t_grid, [&](double t) {
    const resolvent::ResolventSolver solver(mesh, t);
    return solver.apply(f, m);
  });
}

MaximalResult heat_vertical_maximal(const ManifoldMesh& mesh,
                                    const Eigen::VectorXd& f,
                                    const std::vector<double>& s_grid) {
  const resolvent::Spectrum spec = resolvent::spectrum(mesh);
  return grid_supremum(mesh, Kind::stein_exp, 1, s_grid, [&](double s) {
    return (std::sqrt(s) * mesh.gradient_magnitude(spec.heat_apply(s, f))).eval();
  });
}

double stein_domination_check(const ManifoldMesh& mesh, int m,
                              const Eigen::VectorXd& f,
                              const std::vector<double>& t_grid,
                              const std::vector<double>& s_grid,
                              int quad_points) {
  check_grid(t_grid);
  if (f.minCoeff() < 0.0) {
    throw std::domain_error("stein_domination_check: f must be non-negative");
  }
  const MaximalResult res = stein_resolvent_maximal(mesh, m, f, t_grid);
  const resolvent::Spectrum spec = resolvent::spectrum(mesh);
  const auto quad = specfun::gauss_laguerre(quad_points);

  std::vector<double> sigmas = s_grid;
  sigmas.push_back(0.0);
  for (double t : t_grid) {
    for (double s : quad.nodes) sigmas.push_back(s * t);
  }
  std::sort(sigmas.begin(), sigmas.end());
  sigmas.erase(std::unique(sigmas.begin(), sigmas.end()), sigmas.end());

  Eigen::VectorXd heat_max = Eigen::VectorXd::Zero(mesh.size());
  for (double s : sigmas) {
    const Eigen::VectorXd h = (s == 0.0) ? f : spec.heat_apply(s, f);
    heat_max = heat_max.cwiseMax(h.cwiseAbs());
  }
  return (res.value - heat_max).maxCoeff();
}

double weak11_constant(const ManifoldMesh& mesh, Kind kind, int m,
                       const std::vector<Eigen::VectorXd>& family,
                       const std::vector<double>& t_grid) {
  if (family.empty()) throw std::domain_error("weak11_constant: empty family");
  double best = 0.0;
  for (const auto& f : family) {
    if (std::abs(mesh.lp_norm(f, 1.0) - 1.0) > 1e-8) {
      throw std::domain_error("weak11_constant: family members must have unit L1 norm");
    }
    MaximalResult mr;
    switch (kind) {
      case Kind::vertical: mr = vertical_maximal(mesh, m, f, t_grid); break;
      case Kind::horizontal: mr = horizontal_maximal(mesh, m, f, t_grid); break;
      default: mr = stein_resolvent_maximal(mesh, m, f, t_grid); break;
    }
    std::vector<std::pair<double, double>> pairs(mesh.size());
    for (int x = 0; x < mesh.size(); ++x) pairs[x] = {mr.value(x), mesh.mu()(x)};
    std::sort(pairs.begin(), pairs.end(), std::greater<>());
    double cum = 0.0;
    for (const auto& [v, mu] : pairs) {
      cum += mu;
      best = std::max(best, v * cum);
    }
  }
  return best;
}

double fefferman_stein_ratio(const ManifoldMesh& mesh, int m,
                             const std::vector<Eigen::VectorXd>& fs, double p,
                             const std::vector<double>& t_grid) {
  if (fs.empty()) throw std::domain_error("fefferman_stein_ratio: empty sequence");
  if (!(p > 1.0) || std::isinf(p)) {
    throw std::domain_error("fefferman_stein_ratio: p must be in (1, inf)");
  }
  Eigen::VectorXd num_sq = Eigen::VectorXd::Zero(mesh.size());
  Eigen::VectorXd den_sq = Eigen::VectorXd::Zero(mesh.size());
  for (const auto& f : fs) {
    const MaximalResult mr = vertical_maximal(mesh, m, f, t_grid);
    num_sq += mr.value.cwiseAbs2();
    den_sq += f.cwiseAbs2();
  }
  const double num = mesh.lp_norm(num_sq.cwiseSqrt(), p);
  const double den = mesh.lp_norm(den_sq.cwiseSqrt(), p);
  return num / den;
}

std::string SquareResult::to_csv(const ManifoldMesh& mesh) const {
  std::string out = "vertex,r,end,value\n";
  char buf[128];
  for (int x = 0; x < mesh.size(); ++x) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%d,%.17g\n", x, mesh.vertices[x].r,
                  mesh.vertices[x].end, value(x));
    out += buf;
  }
  return out;
}

SquareResult square_function(const ManifoldMesh& mesh, int m,
                             const Eigen::VectorXd& f,
                             const std::vector<double>& t_grid) {
  check_grid(t_grid);
  if (m < 1) throw std::domain_error("square_function: m must be >= 1");
  SquareResult out;
  out.m = m;
  out.t_grid = t_grid;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(mesh.size());
  for (size_t j = 0; j < t_grid.size(); ++j) {
    // midpoint weight in log t
    double w;
    if (t_grid.size() == 1) {
      w = 1.0;
    } else if (j == 0) {
      w = std::log(t_grid[1] / t_grid[0]);
    } else if (j + 1 == t_grid.size()) {
      w = std::log(t_grid[j] / t_grid[j - 1]);
    } else {
      w = 0.5 * std::log(t_grid[j + 1] / t_grid[j - 1]);
    }
    const resolvent::ResolventSolver solver(mesh, t_grid[j]);
    const Eigen::VectorXd v = resolvent::vertical_apply(mesh, solver, m, f);
    acc += w * v.cwiseAbs2();
  }
  out.value = acc.cwiseSqrt();
  return out;
}

std::string RBoundEstimate::to_csv() const {
  std::string out = "trial,ratio\n";
  char buf[64];
  for (size_t i = 0; i < trial_ratios.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i, trial_ratios[i]);
    out += buf;
  }
  return out;
}

RBoundEstimate rbound_estimate(const ManifoldMesh& mesh, int m, double p,
                               int t_count, int trials, uint64_t seed,
                               double t_lo, double t_hi, int sign_samples,
                               DrawMix mix) {
  if (t_count < 1 || trials < 1) {
    throw std::domain_error("rbound_estimate: need t_count >= 1 and trials >= 1");
  }
  if (!(t_hi >= t_lo) || !(t_lo > 0.0)) {
    throw std::domain_error("rbound_estimate: bad t range");
  }
  RBoundEstimate out;
  out.p = p;
  out.t_count = t_count;
  out.trials = trials;
  out.seed = seed;

  double best_rad = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    rng::Stream stream(rng::derive(seed, trial));
    // Alternate two sequence samplers: stratified draws covering the whole
    // range, and draws clustered in the top decade.  Both are legitimate
    // sequences from the family; the clustered ones probe its upper edge.
    std::vector<double> ts(t_count);
    double lo_eff = t_lo, hi_eff = t_hi;
    if (mix == DrawMix::mixed && trial % 2 == 1) {
      lo_eff = std::max(t_lo, t_hi / 10.0);
    }
    const double span = std::log(hi_eff) - std::log(lo_eff);
    for (int j = 0; j < t_count; ++j) {
      ts[j] = (hi_eff == lo_eff)
                  ? lo_eff
                  : std::exp(std::log(lo_eff) +
                             span * (j + stream.uniform()) / t_count);
    }
    std::vector<Eigen::VectorXd> fs(t_count);
    for (int j = 0; j < t_count; ++j) {
      Eigen::VectorXd f = Eigen::VectorXd::Zero(mesh.size());
      const int end = stream.index(static_cast<int>(mesh.ends.size()));
      const double r_max = mesh.ends[end].r_max;
      const double scale = std::min(std::sqrt(ts[j]), r_max / 4.0);
      switch (mix == DrawMix::smooth ? 1 : stream.index(4)) {
        case 0: {
          // sharp bump translate adapted to the drawn scale
          const double center = std::exp(
              stream.uniform(std::log(2.0), std::log(std::max(2.5, r_max / 4.0))));
          for (int v = 0; v < mesh.size(); ++v) {
            if (mesh.vertices[v].end != end || mesh.vertices[v].mode != 0) continue;
            const double r = mesh.vertices[v].r;
            if (std::abs(r - center) <= 0.5 * std::min(scale, center)) f(v) = 1.0;
          }
          break;
        }
        case 1: {
          // smooth translate at the drawn scale
          const double center =
              stream.uniform() < 0.5
                  ? 0.0
                  : std::exp(stream.uniform(std::log(2.0),
                                            std::log(std::max(2.5, r_max / 4.0))));
          for (int v = 0; v < mesh.size(); ++v) {
            if (mesh.vertices[v].end != end || mesh.vertices[v].mode != 0) continue;
            const double z = (mesh.vertices[v].r - center) / scale;
            f(v) = std::exp(-z * z);
          }
          break;
        }
        case 2: {
          // decaying profile matched to the resolvent tail at the drawn scale
          const double k = std::min(1.0, 1.0 / std::sqrt(ts[j]));
          const double c = stream.uniform(0.5, 1.5);
          const double expo = (p > 1.01) ? 1.0 / (p - 1.0) : 1.0;
          const int n = mesh.ends[end].n;
          for (int v = 0; v < mesh.size(); ++v) {
            if (mesh.vertices[v].end != end || mesh.vertices[v].mode != 0) continue;
            const double r = mesh.vertices[v].r;
            f(v) = std::pow(std::pow(r, 2.0 - n) * std::exp(-c * k * r), expo);
          }
          break;
        }
        default: {
          for (int v = 0; v < mesh.size(); ++v) {
            if (mesh.vertices[v].end != end || mesh.vertices[v].mode != 0) continue;
            f(v) = stream.rademacher() * stream.uniform();
          }
          if (stream.uniform() < 0.5) {
            // smoothed noise keeps energy at the operator's own scale
            const resolvent::ResolventSolver smoother(mesh, ts[j]);
            f = smoother.apply(f, 1);
          }
          break;
        }
      }
      if (mesh.lp_norm(f, p) == 0.0) f(mesh.anchors[end]) = 1.0;
      fs[j] = f;
    }

    // l2 ratio on this draw; every sub-sequence is also a valid sequence, so
    // score the trial by the better of the combined ratio and its best pair
    Eigen::VectorXd num_sq = Eigen::VectorXd::Zero(mesh.size());
    Eigen::VectorXd den_sq = Eigen::VectorXd::Zero(mesh.size());
    std::vector<Eigen::VectorXd> grads(t_count);
    double best_single = 0.0;
    for (int j = 0; j < t_count; ++j) {
      const resolvent::ResolventSolver solver(mesh, ts[j]);
      const Eigen::VectorXd u = solver.apply(fs[j], m);
      grads[j] = std::sqrt(ts[j]) * mesh.gradient_components(u);
      const Eigen::VectorXd mag = mesh.component_magnitude(grads[j]);
      num_sq += mag.cwiseAbs2();
      den_sq += fs[j].cwiseAbs2();
      best_single = std::max(best_single,
                             mesh.lp_norm(mag, p) / mesh.lp_norm(fs[j], p));
    }
    const double combined = mesh.lp_norm(num_sq.cwiseSqrt(), p) /
                            mesh.lp_norm(den_sq.cwiseSqrt(), p);
    const double ratio = std::max(combined, best_single);
    out.trial_ratios.push_back(ratio);
    out.best_l2_ratio = std::max(out.best_l2_ratio, ratio);

    // Monte-Carlo Rademacher average with signed gradient fields
    rng::Stream signs(rng::derive(seed, 0x10000 + trial));
    double num_acc = 0.0, den_acc = 0.0;
    for (int s = 0; s < sign_samples; ++s) {
      Eigen::VectorXd gsum = Eigen::VectorXd::Zero(mesh.gradient_slots());
      Eigen::VectorXd fsum = Eigen::VectorXd::Zero(mesh.size());
      for (int j = 0; j < t_count; ++j) {
        const double eps = signs.rademacher();
        gsum += eps * grads[j];
        fsum += eps * fs[j];
      }
      num_acc += mesh.lp_norm(mesh.component_magnitude(gsum), p);
      den_acc += mesh.lp_norm(fsum, p);
    }
    if (den_acc > 0.0) best_rad = std::max(best_rad, num_acc / den_acc);
  }
  out.rademacher_ratio = best_rad;
  return out;
}

}  // namespace mwe::maximal
