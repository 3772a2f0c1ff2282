#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "wac/error.hpp"
#include "wac/linalg.hpp"

namespace wac {

struct RunOptions {
  double tol = 1e-10;                 // stop once max(x) - min(x) < tol
  std::size_t max_steps = 1'000'000;  // hard cap on iterations
  std::size_t snapshot_limit = 1000;  // recorded states, first and last always kept
  bool allow_uncertified = false;     // run even when the theorem does not apply
};

inline double disagreement(std::span<const double> x) {
  if (x.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return *hi - *lo;
}

// Downsampled record of a run. Entry k of every per-snapshot array refers to
// iteration steps[k].
struct RunTrace {
  std::vector<std::size_t> steps;
  std::vector<Vector> states;
  std::vector<double> disagreement;
  std::vector<double> conserved;  // v^T x^k; NaN when no left null vector is known

  std::optional<std::size_t> converged_at;
  std::size_t steps_run = 0;
  double predicted_alpha = std::numeric_limits<double>::quiet_NaN();
  // max_k |v^T x^k - v^T x^0| / (v^T |x^0|) over every step, not just snapshots.
  double conserved_drift = std::numeric_limits<double>::quiet_NaN();

  const Vector& final_state() const { return states.back(); }
  double final_disagreement() const { return disagreement.back(); }
  double final_value() const {
    const Vector& x = final_state();
    double acc = 0.0;
    for (double xi : x) acc += xi;
    return acc / static_cast<double>(x.size());
  }
};

// Keeps at most `limit` snapshots by doubling the sampling stride whenever the
// buffer fills up; the final state is appended by finish().
class TraceRecorder {
 public:
  explicit TraceRecorder(std::size_t limit) : limit_(limit) {
    if (limit_ < 2) throw DomainError("snapshot limit must be at least 2");
  }

  void observe(std::size_t step, std::span<const double> x, double dis, double cons) {
    if (step % stride_ != 0) return;
    trace_.steps.push_back(step);
    trace_.states.emplace_back(x.begin(), x.end());
    trace_.disagreement.push_back(dis);
    trace_.conserved.push_back(cons);
    if (trace_.steps.size() > limit_ - 1) thin();
  }

  // `step` and friends describe the last observed iterate.
  RunTrace finish(std::size_t step, std::span<const double> x, double dis, double cons) && {
    if (trace_.steps.empty() || trace_.steps.back() != step) {
      trace_.steps.push_back(step);
      trace_.states.emplace_back(x.begin(), x.end());
      trace_.disagreement.push_back(dis);
      trace_.conserved.push_back(cons);
    }
    return std::move(trace_);
  }

 private:
  void thin() {
    stride_ *= 2;
    std::size_t out = 0;
    for (std::size_t k = 0; k < trace_.steps.size(); ++k) {
      if (trace_.steps[k] % stride_ != 0) continue;
      if (out != k) {
        trace_.steps[out] = trace_.steps[k];
        trace_.states[out] = std::move(trace_.states[k]);
      }
      trace_.disagreement[out] = trace_.disagreement[k];
      trace_.conserved[out] = trace_.conserved[k];
      ++out;
    }
    trace_.steps.resize(out);
    trace_.states.resize(out);
    trace_.disagreement.resize(out);
    trace_.conserved.resize(out);
  }

  std::size_t limit_;
  std::size_t stride_ = 1;
  RunTrace trace_;
};

// Iterates x <- step(x) from x0 until the disagreement drops below
// options.tol or options.max_steps is reached. `step(in, out)` must write
// one synchronous update of `in` into `out`. `left` is the conserved-weight
// vector (may be empty).
template <typename Step>
RunTrace drive(std::span<const double> x0, Step&& step, std::span<const double> left, const RunOptions& options) {
  if (!(options.tol > 0.0)) throw DomainError("tolerance must be positive");
  const bool have_left = !left.empty();
  if (have_left && left.size() != x0.size()) throw DimensionError("conserved-weight vector length mismatch");

  TraceRecorder recorder(options.snapshot_limit);
  Vector x(x0.begin(), x0.end());
  Vector next(x.size());

  double scale = 0.0;
  double c0 = std::numeric_limits<double>::quiet_NaN();
  if (have_left) {
    c0 = dot(left, x);
    for (std::size_t i = 0; i < x.size(); ++i) scale += std::abs(left[i]) * std::abs(x[i]);
  }
  double worst_drift = 0.0;

  std::optional<std::size_t> converged_at;
  std::size_t k = 0;
  double dis = 0.0;
  double cons = std::numeric_limits<double>::quiet_NaN();
  for (;;) {
    dis = disagreement(x);
    if (have_left) {
      cons = dot(left, x);
      worst_drift = std::max(worst_drift, std::abs(cons - c0));
    }
    recorder.observe(k, x, dis, cons);
    if (dis < options.tol) {
      converged_at = k;
      break;
    }
    if (k == options.max_steps) break;
    step(std::span<const double>(x), std::span<double>(next));
    std::swap(x, next);
    ++k;
  }

  RunTrace trace = std::move(recorder).finish(k, x, dis, cons);
  trace.converged_at = converged_at;
  trace.steps_run = k;
  if (have_left) trace.conserved_drift = scale > 0.0 ? worst_drift / scale : worst_drift;
  return trace;
}

}  // namespace wac
