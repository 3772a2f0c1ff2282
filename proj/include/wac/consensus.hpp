#pragma once

// Discrete-time weighted-average consensus on a digraph:
//
//   x_i <- x_i + (eps / w_i) * sum_{j in N_i} (x_j - x_i)
//
// i.e. x <- P_w x with P_w = I - eps * W^{-1} L. For a strongly connected
// graph and eps < min_i w_i / d_i the iterates converge to alpha * e, where
// alpha = v^T x0 / |v|_1 and v > 0 spans the null space of (W^{-1} L)^T.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wac/error.hpp"
#include "wac/graph.hpp"
#include "wac/linalg.hpp"
#include "wac/trace.hpp"

namespace wac {

struct WeightedSystem {
  Digraph graph;
  Vector weights;            // w, strictly positive
  DegreeVector degrees;      // d
  DenseMatrix laplacian;     // L = D - A
  DenseMatrix weighted_laplacian;  // L_w = W^{-1} L

  std::size_t size() const noexcept { return weights.size(); }
};

inline WeightedSystem build_system(Digraph graph, Vector weights) {
  const std::size_t n = graph.node_count();
  if (weights.size() != n) {
    throw DimensionError("weights: expected " + std::to_string(n) + " values, got " + std::to_string(weights.size()));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(weights[i]) || !(weights[i] > 0.0)) {
      throw DomainError("weight of node " + std::to_string(i) + " must be positive and finite");
    }
  }
  DegreeVector degrees = out_degrees(graph);
  DenseMatrix l = laplacian(graph);
  DenseMatrix lw(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) lw(i, j) = l(i, j) / weights[i];
  return WeightedSystem{std::move(graph), std::move(weights), std::move(degrees), std::move(l), std::move(lw)};
}

// min_i w_i / d_i over nodes with d_i > 0; +inf when no node has an out-edge.
// Admissible step sizes lie strictly below it.
inline double epsilon_bound(const WeightedSystem& sys) {
  double bound = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sys.size(); ++i) {
    if (sys.degrees[i] > 0) bound = std::min(bound, sys.weights[i] / static_cast<double>(sys.degrees[i]));
  }
  return bound;
}

// 0.9 of the bound; 1 when the bound is infinite (edgeless graph, P_w = I).
inline double default_epsilon(const WeightedSystem& sys) {
  const double bound = epsilon_bound(sys);
  return std::isfinite(bound) ? 0.9 * bound : 1.0;
}

// P_w together with its step size and whether the convergence theorem
// applies to it.
class IterationMatrix {
 public:
  IterationMatrix(const WeightedSystem& sys, double epsilon)
      : graph_(sys.graph), epsilon_(epsilon), scale_(sys.size()), matrix_(sys.size()) {
    if (!std::isfinite(epsilon) || !(epsilon > 0.0)) throw DomainError("epsilon must be positive and finite");
    const std::size_t n = sys.size();
    // eps / w_i comes first so that jointly rescaling (w, eps) perturbs as
    // little as possible.
    for (std::size_t i = 0; i < n; ++i) {
      scale_[i] = epsilon / sys.weights[i];
      matrix_(i, i) = 1.0 - scale_[i] * static_cast<double>(sys.degrees[i]);
      for (std::size_t j : graph_.out_neighbors(i)) matrix_(i, j) = scale_[i];
    }
    certified_ = epsilon < epsilon_bound(sys) && is_strongly_connected(graph_);
  }

  const DenseMatrix& matrix() const noexcept { return matrix_; }
  double epsilon() const noexcept { return epsilon_; }
  bool certified() const noexcept { return certified_; }
  std::size_t size() const noexcept { return scale_.size(); }

  // eps / w_i per node.
  std::span<const double> step_scale() const noexcept { return scale_; }

  // One synchronous step, out = P_w in, evaluated in difference form
  // x_i + (eps/w_i) * sum_j a_ij (x_j - x_i) with neighbors summed in
  // ascending id order. The agent simulator uses the same arithmetic.
  void apply(std::span<const double> in, std::span<double> out) const {
    const std::size_t n = size();
    if (in.size() != n || out.size() != n) throw DimensionError("iteration step: state length mismatch");
    for (std::size_t i = 0; i < n; ++i) {
      const double xi = in[i];
      double acc = 0.0;
      for (std::size_t j : graph_.out_neighbors(i)) acc += in[j] - xi;  // a_ij = 1 on every listed edge
      out[i] = xi + scale_[i] * acc;
    }
  }

  Vector apply(std::span<const double> in) const {
    Vector out(in.size());
    apply(in, out);
    return out;
  }

 private:
  Digraph graph_;
  double epsilon_;
  Vector scale_;
  DenseMatrix matrix_;
  bool certified_ = false;
};

inline IterationMatrix build_iteration_matrix(const WeightedSystem& sys, double epsilon) {
  return IterationMatrix(sys, epsilon);
}

struct SpectralPrediction {
  Vector v;                    // positive, unit sum norm, L_w^T v = 0
  double alpha = 0.0;          // v^T x0
  double rho_estimate = 0.0;   // dominant eigenvalue of P_w^T by power iteration
  bool rho_converged = false;
  Vector power_vector;         // power-iteration Perron vector of P_w^T
};

// Left null vector of L_w, checked to be entrywise positive.
inline Vector left_null_vector(const WeightedSystem& sys) {
  if (!is_strongly_connected(sys.graph)) throw HypothesisError("graph is not strongly connected");
  Vector v = null_vector(sys.weighted_laplacian.transpose());
  const double smallest = *std::min_element(v.begin(), v.end());
  if (!(smallest > 0.0)) {
    throw HypothesisError("left null vector is not positive (min entry " + std::to_string(smallest) + ")");
  }
  return v;
}

// Predicted consensus value for x0. The dominant-eigenvalue estimate uses
// `epsilon` when certified and the default step size otherwise.
inline SpectralPrediction predict(const WeightedSystem& sys, std::span<const double> x0, double epsilon,
                                  std::size_t power_max_iter = 2000) {
  if (x0.size() != sys.size()) throw DimensionError("initial state length mismatch");
  SpectralPrediction p;
  p.v = left_null_vector(sys);
  p.alpha = dot(p.v, x0);

  IterationMatrix im(sys, epsilon);
  if (!im.certified()) im = IterationMatrix(sys, default_epsilon(sys));
  const Vector start(sys.size(), 1.0 / static_cast<double>(sys.size()));
  auto power = power_iteration(im.matrix().transpose(), start, power_max_iter, 1e-13);
  p.rho_estimate = power.eigenvalue;
  p.rho_converged = power.converged;
  p.power_vector = std::move(power.vector);
  return p;
}

// Iterates x^{k+1} = P_w x^k. Refuses uncertified step sizes unless
// options.allow_uncertified is set.
inline RunTrace run(const WeightedSystem& sys, std::span<const double> x0, double epsilon,
                    const RunOptions& options = {}) {
  if (x0.size() != sys.size()) throw DimensionError("initial state length mismatch");
  if (!all_finite(x0)) throw DomainError("initial state must be finite");
  const IterationMatrix im(sys, epsilon);
  if (!im.certified() && !options.allow_uncertified) {
    throw HypothesisError("epsilon " + std::to_string(epsilon) + " is not certified for this system");
  }
  Vector v;
  double alpha = std::numeric_limits<double>::quiet_NaN();
  if (is_strongly_connected(sys.graph)) {
    v = left_null_vector(sys);
    alpha = dot(v, x0);
  }
  RunTrace trace = drive(x0, [&im](std::span<const double> in, std::span<double> out) { im.apply(in, out); }, v,
                         options);
  trace.predicted_alpha = alpha;
  return trace;
}

// T = e v^T, the limit of P_w^k for a certified step size.
inline DenseMatrix limit_matrix(const WeightedSystem& sys, double epsilon) {
  const IterationMatrix im(sys, epsilon);
  if (!im.certified()) throw HypothesisError("limit matrix requires a certified epsilon");
  const Vector v = left_null_vector(sys);
  const std::size_t n = sys.size();
  DenseMatrix t(n);
  for (std::size_t i = 0; i < n; ++i) std::copy(v.begin(), v.end(), t.row(i).begin());
  return t;
}

// Consensus value of an undirected system straight from the weights:
// sum_i w_i x0_i / sum_i w_i.
inline double undirected_alpha(const WeightedSystem& sys, std::span<const double> x0) {
  if (x0.size() != sys.size()) throw DimensionError("initial state length mismatch");
  if (!is_undirected(sys.graph)) throw HypothesisError("graph is not undirected");
  if (!is_strongly_connected(sys.graph)) throw HypothesisError("graph is not connected");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < sys.size(); ++i) {
    num += sys.weights[i] * x0[i];
    den += sys.weights[i];
  }
  return num / den;
}

}  // namespace wac
