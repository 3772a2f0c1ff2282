#pragma once

// Random system generators and brute-force oracles shared by the unit and
// acceptance suites. Nothing here calls into the code paths it is used to
// check.

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "wac/consensus.hpp"
#include "wac/graph.hpp"
#include "wac/linalg.hpp"

namespace wac::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline std::size_t uniform_int(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// Each ordered pair (i, j), i != j, is an edge with probability p.
inline Digraph random_digraph(Rng& rng, std::size_t n, double p) {
  std::bernoulli_distribution coin(p);
  std::vector<Digraph::Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && coin(rng)) edges.emplace_back(i, j);
  return Digraph(n, edges);
}

inline Digraph random_undirected(Rng& rng, std::size_t n, double p) {
  std::bernoulli_distribution coin(p);
  std::vector<Digraph::Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (coin(rng)) {
        edges.emplace_back(i, j);
        edges.emplace_back(j, i);
      }
  return Digraph(n, edges);
}

// Reachability by Floyd-Warshall transitive closure.
inline std::vector<std::vector<bool>> transitive_closure(const Digraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    r[i][i] = true;
    for (std::size_t j : g.out_neighbors(i)) r[i][j] = true;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (r[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (r[k][j]) r[i][j] = true;
  return r;
}

inline bool closure_strongly_connected(const Digraph& g) {
  for (const auto& row : transitive_closure(g))
    for (bool b : row)
      if (!b) return false;
  return true;
}

// Graph drawn per the acceptance regime: n in [2, 25], density in [0.2, 0.9],
// resampled until strongly connected.
struct RandomSystem {
  WeightedSystem sys;
  Vector x0;
  double epsilon = 0.0;
};

inline Digraph strongly_connected_digraph(Rng& rng, std::size_t n, double p) {
  for (;;) {
    Digraph g = random_digraph(rng, n, p);
    if (closure_strongly_connected(g)) return g;
  }
}

inline Digraph connected_undirected(Rng& rng, std::size_t n, double p) {
  for (;;) {
    Digraph g = random_undirected(rng, n, p);
    if (closure_strongly_connected(g)) return g;
  }
}

inline Vector random_vector(Rng& rng, std::size_t n, double lo, double hi) {
  Vector x(n);
  for (double& xi : x) xi = uniform(rng, lo, hi);
  return x;
}

// Bound computed directly from the definition min_i w_i / d_i.
inline double oracle_bound(const Digraph& g, const Vector& w) {
  double b = INFINITY;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const auto d = g.out_neighbors(i).size();
    if (d > 0) b = std::min(b, w[i] / static_cast<double>(d));
  }
  return b;
}

struct Regime {
  std::size_t n_min = 2, n_max = 25;
  double p_min = 0.2, p_max = 0.9;
  double w_min = 0.1, w_max = 10.0;
  bool unit_weights = false;
  bool undirected = false;
};

inline RandomSystem random_system(Rng& rng, const Regime& regime = {}) {
  const std::size_t n = uniform_int(rng, regime.n_min, regime.n_max);
  const double p = uniform(rng, regime.p_min, regime.p_max);
  Digraph g = regime.undirected ? connected_undirected(rng, n, p) : strongly_connected_digraph(rng, n, p);
  Vector w = regime.unit_weights ? Vector(n, 1.0) : random_vector(rng, n, regime.w_min, regime.w_max);
  const double eps = 0.9 * oracle_bound(g, w);
  Vector x0 = random_vector(rng, n, -10.0, 10.0);
  return RandomSystem{build_system(std::move(g), std::move(w)), std::move(x0), eps};
}

// P = I - eps * L_w straight from the definition, multiplying eps into the
// weighted Laplacian.
inline DenseMatrix oracle_iteration_matrix(const Digraph& g, const Vector& w, double eps) {
  const std::size_t n = g.node_count();
  DenseMatrix p = DenseMatrix::identity(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(g.out_neighbors(i).size());
    p(i, i) -= eps * (d / w[i]);
    for (std::size_t j : g.out_neighbors(i)) p(i, j) += eps * (1.0 / w[i]);
  }
  return p;
}

inline Vector dense_apply(const DenseMatrix& m, const Vector& x) {
  Vector y(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) y[i] += m(i, j) * x[j];
  return y;
}

// x <- P x repeated `steps` times with the dense oracle matrix.
inline Vector brute_force_iterate(const DenseMatrix& p, Vector x, std::size_t steps) {
  for (std::size_t k = 0; k < steps; ++k) x = dense_apply(p, x);
  return x;
}

inline DenseMatrix dense_product(const DenseMatrix& a, const DenseMatrix& b) {
  const std::size_t n = a.size();
  DenseMatrix c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += a(i, k) * b(k, j);
      c(i, j) = acc;
    }
  return c;
}

// m^(2^squarings).
inline DenseMatrix repeated_square(DenseMatrix m, int squarings) {
  for (int s = 0; s < squarings; ++s) m = dense_product(m, m);
  return m;
}

// Left Perron vector of a nonnegative matrix by plain power iteration on its
// transpose, normalized to unit sum. Runs until successive iterates agree to
// `tol` in the sum norm.
inline Vector left_perron_vector(const DenseMatrix& p, double tol = 1e-14, std::size_t max_iter = 5'000'000) {
  const std::size_t n = p.size();
  Vector y(n, 1.0 / static_cast<double>(n));
  for (std::size_t k = 0; k < max_iter; ++k) {
    Vector z(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) z[j] += p(i, j) * y[i];
    double s = 0.0;
    for (double zi : z) s += zi;
    double diff = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      z[j] /= s;
      diff += std::abs(z[j] - y[j]);
    }
    y = std::move(z);
    if (diff < tol) break;
  }
  return y;
}

}  // namespace wac::testing
