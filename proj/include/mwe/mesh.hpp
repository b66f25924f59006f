#pragma once

// Discrete model of a manifold with ends: a measure-weighted radial graph.
// Each end is a radial chain carrying the volume weight of R^n (optionally
// tensored with cross-section eigenmode copies); a small hub of unit-measure
// vertices models the compact center and joins the ends at their gluing
// radius.

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace mwe::mesh {

enum class RadialGrid { geometric, uniform };

struct EndSpec {
  int n = 3;               // asymptotic dimension
  int cross_modes = 1;     // retained cross-section eigenmodes
  double r_min = 1.0;      // gluing radius
  double r_max = 64.0;     // truncation radius (reflecting boundary)
  int cells = 192;         // radial cells
  RadialGrid grid = RadialGrid::geometric;
};

constexpr int kCenter = -1;

struct Vertex {
  int end = kCenter;       // end id, or kCenter for hub vertices
  int mode = 0;            // cross-section mode index
  double r = 0.0;          // radial coordinate d(x_i^o, x); 0 on the hub
  double mu = 1.0;         // vertex measure
  double potential = 0.0;  // cross-section eigenvalue on mode copies
};

struct Edge {
  int u = 0, v = 0;
  double length = 1.0;
  double conductance = 1.0;
};

class ManifoldMesh {
 public:
  std::vector<EndSpec> ends;
  int center_size = 1;
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  std::vector<std::vector<int>> incident;  // edge ids per vertex
  std::vector<int> anchors;                // first chain vertex per end

  int size() const { return static_cast<int>(vertices.size()); }

  const Eigen::VectorXd& mu() const { return mu_; }
  const Eigen::VectorXd& potential() const { return potential_; }

  // Conductance Laplacian W (plain-symmetric PSD); L f = W f ./ mu + potential .* f.
  const Eigen::SparseMatrix<double>& conductance_laplacian() const { return w_; }
  Eigen::VectorXd apply_laplacian(const Eigen::VectorXd& f) const;

  // Pointwise gradient magnitude:
  //   |grad f|(x)^2 = sum_{e ~ x} w_norm(x,e) ((f(y)-f(x))/len_e)^2
  //                   + potential(x) f(x)^2,
  // with conductance-proportional weights normalized to sum to 1 at x.
  Eigen::VectorXd gradient_magnitude(const Eigen::VectorXd& f) const;

  double lp_norm(const Eigen::VectorXd& f, double p) const;

  // Quadratic form with f' G f = sum_x mu_x |grad f|(x)^2.
  Eigen::SparseMatrix<double> gradient_quadratic_form() const;

  // Signed gradient representation: one slot per (vertex, incident edge)
  // plus one potential slot per vertex.  component_magnitude recovers the
  // per-vertex |grad f|; gradient fields of different functions add slotwise.
  int gradient_slots() const;
  Eigen::VectorXd gradient_components(const Eigen::VectorXd& f) const;
  Eigen::VectorXd component_magnitude(const Eigen::VectorXd& flat) const;

  double total_measure() const { return mu_.sum(); }

  // Shortest-path distances from a vertex (edge lengths as metric).
  Eigen::VectorXd distances_from(int source) const;

  // CSV summary: vertex id, end id, r, mu.
  std::string to_csv() const;

  void finalize();  // builds mu_, w_, normalized gradient weights

 private:
  Eigen::VectorXd mu_;
  Eigen::VectorXd potential_;
  Eigen::SparseMatrix<double> w_;
  std::vector<std::vector<double>> grad_weight_;  // per vertex, per incident edge
};

// Glued mesh with >= 2 ends and a hub of center_size unit-measure vertices.
ManifoldMesh build_mesh(const std::vector<EndSpec>& ends, int center_size = 1);

// Single radial chain with reflecting boundaries, no hub; internal testing
// mode used to compare against closed-form R^n kernels.
ManifoldMesh build_single_end_probe(const EndSpec& spec);

// sup over sampled (x, t) of mu(B(x,2t))/mu(B(x,t)) with graph-metric balls,
// scales restricted to t above the gluing radius.
double doubling_ratio(const ManifoldMesh& mesh);

// The non-doubling witness slice: sup over x on the given end, with the ball
// radius matched to d(x, center), of mu(B(x,2t))/mu(B(x,t)).  Grows with
// r_max when another end has larger dimension; stays bounded otherwise.
double doubling_end_profile(const ManifoldMesh& mesh, int end_id);

}  // namespace mwe::mesh
