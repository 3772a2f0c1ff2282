#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"
#include "wac/consensus.hpp"
#include "wac/error.hpp"
#include "wac/graph.hpp"
#include "wac/linalg.hpp"
#include "wac/trace.hpp"

namespace wac {

// Shortest decimal that reads back to the same double.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw Error("format_double: conversion failed");
  return std::string(buf, ptr);
}

// One finite decimal per line; '#' lines and blank lines are skipped.
inline Vector parse_values(std::string_view text) {
  Vector values;
  std::size_t line_no = 0;
  for (std::size_t pos = 0; pos <= text.size();) {
    const auto nl = text.find('\n', pos);
    const auto line = detail::trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;

    double value = 0.0;
    const auto* end = line.data() + line.size();
    const auto [ptr, ec] = std::from_chars(line.data(), end, value);
    if (ec != std::errc() || ptr != end) throw ParseError(line_no, "expected one number, got '" + std::string(line) + "'");
    if (!std::isfinite(value)) throw ParseError(line_no, "value must be finite");
    values.push_back(value);
  }
  return values;
}

inline Vector read_values(const std::filesystem::path& path) { return parse_values(detail::read_file(path)); }

// splitmix64 stream.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

inline Vector seeded_initial_state(std::size_t n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  Vector x(n);
  for (double& xi : x) xi = rng.uniform();
  return x;
}

// Largest node count for which traces and summaries carry full state vectors.
inline constexpr std::size_t kFullStateLimit = 64;

// Header "step,disagreement,conserved,x_0,...,x_{n-1}"; for n above the
// full-state limit the state columns are replaced by "min,max".
inline void write_trace_csv(std::ostream& out, const RunTrace& trace) {
  const std::size_t n = trace.states.empty() ? 0 : trace.states.front().size();
  const bool full = n <= kFullStateLimit;
  out << "step,disagreement,conserved";
  if (full) {
    for (std::size_t i = 0; i < n; ++i) out << ",x_" << i;
  } else {
    out << ",min,max";
  }
  out << '\n';
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const Vector& x = trace.states[k];
    out << trace.steps[k] << ',' << format_double(trace.disagreement[k]) << ',' << format_double(trace.conserved[k]);
    if (full) {
      for (double xi : x) out << ',' << format_double(xi);
    } else {
      const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
      out << ',' << format_double(*lo) << ',' << format_double(*hi);
    }
    out << '\n';
  }
}

struct SummaryInputs {
  const WeightedSystem& sys;
  double epsilon;
  bool certified;
  const Vector& v;  // empty when unavailable
  const RunTrace& trace;
  std::string_view mode;
};

// Non-finite numbers are emitted as null.
inline nlohmann::ordered_json summary_json(const SummaryInputs& in) {
  using nlohmann::ordered_json;
  auto num = [](double x) { return std::isfinite(x) ? ordered_json(x) : ordered_json(nullptr); };

  const std::size_t n = in.sys.size();
  const double alpha = in.trace.predicted_alpha;
  ordered_json j;
  j["n"] = n;
  j["m"] = in.sys.graph.edge_count();
  j["strongly_connected"] = is_strongly_connected(in.sys.graph);
  j["undirected"] = is_undirected(in.sys.graph);
  j["epsilon"] = num(in.epsilon);
  j["epsilon_bound"] = num(epsilon_bound(in.sys));
  j["certified"] = in.certified;
  j["predicted_alpha"] = num(alpha);
  j["v"] = in.v.empty() ? ordered_json(nullptr) : ordered_json(in.v);
  if (n <= kFullStateLimit) j["final_state"] = in.trace.final_state();
  j["final_value"] = num(in.trace.final_value());
  double worst = std::isfinite(alpha) ? 0.0 : alpha;
  if (std::isfinite(alpha))
    for (double xi : in.trace.final_state()) worst = std::max(worst, std::abs(xi - alpha));
  j["alpha_error"] = num(worst);  // max_i |x_i - alpha|
  j["final_disagreement"] = num(in.trace.final_disagreement());
  j["conserved_drift"] = num(in.trace.conserved_drift);
  j["converged_at"] = in.trace.converged_at ? ordered_json(*in.trace.converged_at) : ordered_json(nullptr);
  j["steps_run"] = in.trace.steps_run;
  j["mode"] = in.mode;
  return j;
}

}  // namespace wac
