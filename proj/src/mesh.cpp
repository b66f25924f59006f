#include "mwe/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <stdexcept>

#include "mwe/specfun.hpp"

namespace mwe::mesh {

namespace {

std::vector<double> radial_nodes(const EndSpec& e) {
  std::vector<double> r(e.cells + 1);
  if (e.grid == RadialGrid::geometric) {
    const double rho = std::pow(e.r_max / e.r_min, 1.0 / e.cells);
    for (int j = 0; j <= e.cells; ++j) r[j] = e.r_min * std::pow(rho, j);
  } else {
    const double h = (e.r_max - e.r_min) / e.cells;
    for (int j = 0; j <= e.cells; ++j) r[j] = e.r_min + j * h;
  }
  r.back() = e.r_max;
  return r;
}

// Exact volume of the radial cell [a, b] in R^n.
double cell_measure(int n, double a, double b) {
  return specfun::sphere_area(n) / n * (std::pow(b, n) - std::pow(a, n));
}

void validate_end(const EndSpec& e) {
  if (e.n < 1) throw std::invalid_argument("end spec: dimension must be >= 1");
  if (!(e.r_max > e.r_min) || !(e.r_min > 0)) {
    throw std::invalid_argument("end spec: need r_max > r_min > 0");
  }
  if (e.cells < 16) throw std::invalid_argument("end spec: need at least 16 cells");
  if (e.cross_modes < 1) throw std::invalid_argument("end spec: cross_modes must be >= 1");
}

void append_chain(ManifoldMesh& m, const EndSpec& spec, int end_id, int mode,
                  double mode_eigenvalue, int* first_vertex) {
  const auto r = radial_nodes(spec);
  const int base = m.size();
  *first_vertex = base;
  for (int j = 0; j <= spec.cells; ++j) {
    const double lo = (j == 0) ? r[0] : 0.5 * (r[j - 1] + r[j]);
    const double hi = (j == spec.cells) ? r[spec.cells] : 0.5 * (r[j] + r[j + 1]);
    Vertex v;
    v.end = end_id;
    v.mode = mode;
    v.r = r[j];
    v.mu = cell_measure(spec.n, lo, hi);
    v.potential = mode_eigenvalue;
    m.vertices.push_back(v);
  }
  for (int j = 0; j < spec.cells; ++j) {
    Edge e;
    e.u = base + j;
    e.v = base + j + 1;
    e.length = r[j + 1] - r[j];
    const double rmid = 0.5 * (r[j] + r[j + 1]);
    e.conductance = specfun::sphere_area(spec.n) * std::pow(rmid, spec.n - 1) / e.length;
    m.edges.push_back(e);
  }
}

}  // namespace

void ManifoldMesh::finalize() {
  const int n = size();
  mu_.resize(n);
  potential_.resize(n);
  for (int i = 0; i < n; ++i) {
    mu_(i) = vertices[i].mu;
    potential_(i) = vertices[i].potential;
    if (!(mu_(i) > 0)) throw std::invalid_argument("mesh: vertex measure must be positive");
  }
  incident.assign(n, {});
  for (size_t e = 0; e < edges.size(); ++e) {
    incident[edges[e].u].push_back(static_cast<int>(e));
    incident[edges[e].v].push_back(static_cast<int>(e));
  }
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(edges.size() * 4);
  for (const auto& e : edges) {
    trips.emplace_back(e.u, e.u, e.conductance);
    trips.emplace_back(e.v, e.v, e.conductance);
    trips.emplace_back(e.u, e.v, -e.conductance);
    trips.emplace_back(e.v, e.u, -e.conductance);
  }
  w_.resize(n, n);
  w_.setFromTriplets(trips.begin(), trips.end());
  grad_weight_.assign(n, {});
  for (int x = 0; x < n; ++x) {
    double tot = 0.0;
    for (int e : incident[x]) tot += edges[e].conductance;
    grad_weight_[x].reserve(incident[x].size());
    for (int e : incident[x]) grad_weight_[x].push_back(edges[e].conductance / tot);
  }
}

Eigen::VectorXd ManifoldMesh::apply_laplacian(const Eigen::VectorXd& f) const {
  // edge-difference form: exact zero on constants
  Eigen::VectorXd out = potential_.cwiseProduct(f);
  for (const auto& e : edges) {
    const double flux = e.conductance * (f(e.u) - f(e.v));
    out(e.u) += flux / mu_(e.u);
    out(e.v) -= flux / mu_(e.v);
  }
  return out;
}

Eigen::VectorXd ManifoldMesh::gradient_magnitude(const Eigen::VectorXd& f) const {
  if (f.size() != size()) throw std::invalid_argument("gradient: size mismatch");
  Eigen::VectorXd out(size());
  for (int x = 0; x < size(); ++x) {
    double acc = potential_(x) * f(x) * f(x);
    for (size_t idx = 0; idx < incident[x].size(); ++idx) {
      const Edge& e = edges[incident[x][idx]];
      const int y = (e.u == x) ? e.v : e.u;
      const double slope = (f(y) - f(x)) / e.length;
      acc += grad_weight_[x][idx] * slope * slope;
    }
    out(x) = std::sqrt(acc);
  }
  return out;
}

int ManifoldMesh::gradient_slots() const {
  int slots = 0;
  for (int x = 0; x < size(); ++x) slots += static_cast<int>(incident[x].size()) + 1;
  return slots;
}

Eigen::VectorXd ManifoldMesh::gradient_components(const Eigen::VectorXd& f) const {
  if (f.size() != size()) throw std::invalid_argument("gradient: size mismatch");
  Eigen::VectorXd flat(gradient_slots());
  int pos = 0;
  for (int x = 0; x < size(); ++x) {
    for (size_t idx = 0; idx < incident[x].size(); ++idx) {
      const Edge& e = edges[incident[x][idx]];
      const int y = (e.u == x) ? e.v : e.u;
      flat(pos++) = std::sqrt(grad_weight_[x][idx]) * (f(y) - f(x)) / e.length;
    }
    flat(pos++) = std::sqrt(potential_(x)) * f(x);
  }
  return flat;
}

Eigen::VectorXd ManifoldMesh::component_magnitude(const Eigen::VectorXd& flat) const {
  if (flat.size() != gradient_slots()) {
    throw std::invalid_argument("component_magnitude: size mismatch");
  }
  Eigen::VectorXd out(size());
  int pos = 0;
  for (int x = 0; x < size(); ++x) {
    const int width = static_cast<int>(incident[x].size()) + 1;
    out(x) = flat.segment(pos, width).norm();
    pos += width;
  }
  return out;
}

Eigen::SparseMatrix<double> ManifoldMesh::gradient_quadratic_form() const {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(edges.size() * 4 + size());
  for (int x = 0; x < size(); ++x) {
    if (potential_(x) > 0.0) trips.emplace_back(x, x, mu_(x) * potential_(x));
    for (size_t idx = 0; idx < incident[x].size(); ++idx) {
      const Edge& e = edges[incident[x][idx]];
      const int y = (e.u == x) ? e.v : e.u;
      const double c = mu_(x) * grad_weight_[x][idx] / (e.length * e.length);
      trips.emplace_back(x, x, c);
      trips.emplace_back(y, y, c);
      trips.emplace_back(x, y, -c);
      trips.emplace_back(y, x, -c);
    }
  }
  Eigen::SparseMatrix<double> g(size(), size());
  g.setFromTriplets(trips.begin(), trips.end());
  return g;
}

double ManifoldMesh::lp_norm(const Eigen::VectorXd& f, double p) const {
  if (f.size() != size()) throw std::invalid_argument("lp_norm: size mismatch");
  if (std::isinf(p)) return f.cwiseAbs().maxCoeff();
  if (!(p >= 1.0)) throw std::domain_error("lp_norm: p must be >= 1");
  double acc = 0.0;
  for (int i = 0; i < size(); ++i) acc += std::pow(std::abs(f(i)), p) * mu_(i);
  return std::pow(acc, 1.0 / p);
}

Eigen::VectorXd ManifoldMesh::distances_from(int source) const {
  const double inf = std::numeric_limits<double>::infinity();
  Eigen::VectorXd dist = Eigen::VectorXd::Constant(size(), inf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist(source) = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    auto [d, x] = heap.top();
    heap.pop();
    if (d > dist(x)) continue;
    for (int ei : incident[x]) {
      const Edge& e = edges[ei];
      const int y = (e.u == x) ? e.v : e.u;
      const double nd = d + e.length;
      if (nd < dist(y)) {
        dist(y) = nd;
        heap.emplace(nd, y);
      }
    }
  }
  return dist;
}

std::string ManifoldMesh::to_csv() const {
  std::string out = "vertex,end,r,mu\n";
  char buf[128];
  for (int i = 0; i < size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g\n", i, vertices[i].end,
                  vertices[i].r, vertices[i].mu);
    out += buf;
  }
  return out;
}

ManifoldMesh build_mesh(const std::vector<EndSpec>& ends, int center_size) {
  if (ends.size() < 2) {
    throw std::invalid_argument("build_mesh: need at least 2 ends");
  }
  if (center_size < 1) throw std::invalid_argument("build_mesh: center_size must be >= 1");
  for (const auto& e : ends) validate_end(e);

  ManifoldMesh m;
  m.ends = ends;
  m.center_size = center_size;
  for (int c = 0; c < center_size; ++c) {
    Vertex v;  // hub vertex: unit measure, r = 0
    m.vertices.push_back(v);
  }
  // hub clique
  for (int a = 0; a < center_size; ++a) {
    for (int b = a + 1; b < center_size; ++b) {
      Edge e;
      e.u = a;
      e.v = b;
      e.length = ends[0].r_min;
      e.conductance = 1.0;
      m.edges.push_back(e);
    }
  }
  m.anchors.resize(ends.size());
  for (size_t i = 0; i < ends.size(); ++i) {
    const EndSpec& spec = ends[i];
    for (int mode = 0; mode < spec.cross_modes; ++mode) {
      int first = 0;
      // cross-section spectrum of the unit circle: lambda_j = j^2
      append_chain(m, spec, static_cast<int>(i), mode, double(mode) * mode, &first);
      if (mode == 0) m.anchors[i] = first;
      // joint to every hub vertex, flux constant split across the hub
      const double w =
          specfun::sphere_area(spec.n) * std::pow(spec.r_min, spec.n - 2) / center_size;
      for (int c = 0; c < center_size; ++c) {
        Edge e;
        e.u = c;
        e.v = first;
        e.length = spec.r_min;
        e.conductance = w;
        m.edges.push_back(e);
      }
    }
  }
  m.finalize();
  return m;
}

ManifoldMesh build_single_end_probe(const EndSpec& spec) {
  validate_end(spec);
  ManifoldMesh m;
  m.ends = {spec};
  m.center_size = 0;
  int first = 0;
  append_chain(m, spec, 0, 0, 0.0, &first);
  m.anchors = {first};
  m.finalize();
  return m;
}

namespace {

double ball_measure(const ManifoldMesh& mesh, const Eigen::VectorXd& dist, double t) {
  double acc = 0.0;
  for (int v = 0; v < mesh.size(); ++v) {
    if (dist(v) <= t) acc += mesh.mu()(v);
  }
  return acc;
}

}  // namespace

double doubling_ratio(const ManifoldMesh& mesh) {
  // sample centers: the hub (if any) and log-spaced radii along each end
  std::vector<int> samples;
  if (mesh.center_size > 0) samples.push_back(0);
  for (size_t i = 0; i < mesh.ends.size(); ++i) {
    const EndSpec& spec = mesh.ends[i];
    for (double target = spec.r_min; target <= spec.r_max; target *= 2.0) {
      int best = mesh.anchors[i];
      double bestgap = std::numeric_limits<double>::infinity();
      for (int v = mesh.anchors[i]; v < mesh.size() && mesh.vertices[v].end == int(i) &&
                                    mesh.vertices[v].mode == 0;
           ++v) {
        const double gap = std::abs(mesh.vertices[v].r - target);
        if (gap < bestgap) {
          bestgap = gap;
          best = v;
        }
      }
      samples.push_back(best);
    }
  }
  std::sort(samples.begin(), samples.end());
  samples.erase(std::unique(samples.begin(), samples.end()), samples.end());

  double worst = 1.0;
  double r_top = 0.0, r_glue = 0.0;
  for (const auto& e : mesh.ends) {
    r_top = std::max(r_top, e.r_max);
    r_glue = std::max(r_glue, e.r_min);
  }
  for (int x : samples) {
    const Eigen::VectorXd dist = mesh.distances_from(x);
    // scales below the gluing radius only probe the hub normalization
    for (double t = 2.0 * r_glue; t <= r_top; t *= 1.25) {
      const double small = ball_measure(mesh, dist, t);
      const double big = ball_measure(mesh, dist, 2.0 * t);
      if (small <= 0.0) continue;
      if (big >= mesh.total_measure() * 0.999) continue;  // ball saturated
      worst = std::max(worst, big / small);
    }
  }
  return worst;
}

double doubling_end_profile(const ManifoldMesh& mesh, int end_id) {
  if (end_id < 0 || end_id >= static_cast<int>(mesh.ends.size())) {
    throw std::invalid_argument("doubling_end_profile: bad end id");
  }
  double worst = 1.0;
  const Eigen::VectorXd hub_dist = mesh.distances_from(0);
  for (int x = 0; x < mesh.size(); ++x) {
    if (mesh.vertices[x].end != end_id || mesh.vertices[x].mode != 0) continue;
    const double t = hub_dist(x);
    if (t < 4.0 * mesh.ends[end_id].r_min) continue;
    const Eigen::VectorXd dist = mesh.distances_from(x);
    const double small = ball_measure(mesh, dist, t);
    const double big = ball_measure(mesh, dist, 2.0 * t);
    if (small <= 0.0) continue;
    worst = std::max(worst, big / small);
  }
  return worst;
}

}  // namespace mwe::mesh
