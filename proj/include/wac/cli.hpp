#pragma once

// Commands behind the `wac` executable. They take a parsed configuration and
// output streams and return the process exit code, so they can be exercised
// without spawning a process.

#include <bit>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>

#include "wac/agents.hpp"
#include "wac/consensus.hpp"
#include "wac/error.hpp"
#include "wac/graph.hpp"
#include "wac/io.hpp"
#include "wac/trace.hpp"

namespace wac::cli {

// Stable process exit codes.
enum ExitCode : int {
  kSuccess = 0,
  kInputError = 1,
  kHypothesisViolation = 2,
  kNoConvergence = 3,
  kModeMismatch = 4,
};

enum class Mode { kMatrix, kAgents };

inline std::string_view to_string(Mode mode) { return mode == Mode::kMatrix ? "matrix" : "agents"; }

// Adds `delta` to one agent's committed state after one round. Used by tests
// to check that compare notices a divergence.
struct FaultInjection {
  std::size_t node = 0;
  std::size_t round = 1;
  double delta = 1e-9;
};

struct ExperimentConfig {
  std::filesystem::path graph_path;
  std::optional<std::filesystem::path> weights_path;  // default: all ones
  std::optional<std::filesystem::path> x0_path;       // default: seeded uniform [0, 1)
  std::optional<double> epsilon;                      // default: 0.9 * bound
  double tol = 1e-10;
  std::size_t max_steps = 1'000'000;
  Mode mode = Mode::kMatrix;
  bool allow_uncertified = false;
  std::optional<std::filesystem::path> output_path;  // directory for trace.csv and summary.json
  std::size_t snapshot_limit = 1000;
  std::uint64_t seed = 0;
  std::optional<FaultInjection> fault;
};

struct Experiment {
  WeightedSystem sys;
  Vector x0;
  double epsilon = 0.0;
  bool certified = false;
};

inline void validate(const ExperimentConfig& config) {
  if (!(config.tol > 0.0) || !std::isfinite(config.tol)) throw DomainError("--tol must be positive");
  if (config.max_steps < 1) throw DomainError("--max-steps must be at least 1");
  if (config.epsilon && !(*config.epsilon > 0.0 && std::isfinite(*config.epsilon))) {
    throw DomainError("--epsilon must be positive");
  }
  if (config.snapshot_limit < 2) throw DomainError("--snapshots must be at least 2");
}

inline Experiment load_experiment(const ExperimentConfig& config) {
  validate(config);
  Digraph graph = read_edge_list(config.graph_path);
  const std::size_t n = graph.node_count();

  Vector weights = config.weights_path ? read_values(*config.weights_path) : Vector(n, 1.0);
  if (weights.size() != n) {
    throw DimensionError("weights file has " + std::to_string(weights.size()) + " values for " + std::to_string(n) +
                         " nodes");
  }
  Vector x0 = config.x0_path ? read_values(*config.x0_path) : seeded_initial_state(n, config.seed);
  if (x0.size() != n) {
    throw DimensionError("initial state file has " + std::to_string(x0.size()) + " values for " +
                         std::to_string(n) + " nodes");
  }

  Experiment e{build_system(std::move(graph), std::move(weights)), std::move(x0)};
  e.epsilon = config.epsilon.value_or(default_epsilon(e.sys));
  e.certified = IterationMatrix(e.sys, e.epsilon).certified();
  return e;
}

// Why the theorem does not cover this experiment, or empty.
inline std::string hypothesis_failure(const Experiment& e) {
  if (!is_strongly_connected(e.sys.graph)) return "not strongly connected";
  if (!(e.epsilon < epsilon_bound(e.sys))) {
    return "epsilon " + format_double(e.epsilon) + " is not below the bound " + format_double(epsilon_bound(e.sys));
  }
  return {};
}

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const HypothesisError& ex) {
    err << "error: " << ex.what() << '\n';
    return kHypothesisViolation;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kInputError;
  }
}

inline int cmd_check(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Experiment e = load_experiment(config);
    const auto& sys = e.sys;
    const auto [dmin, dmax] = std::minmax_element(sys.degrees.begin(), sys.degrees.end());
    const bool strong = is_strongly_connected(sys.graph);

    out << "nodes: " << sys.size() << '\n'
        << "edges: " << sys.graph.edge_count() << '\n'
        << "strongly_connected: " << (strong ? "true" : "false") << '\n'
        << "undirected: " << (is_undirected(sys.graph) ? "true" : "false") << '\n'
        << "out_degree_min: " << *dmin << '\n'
        << "out_degree_max: " << *dmax << '\n'
        << "epsilon_bound: " << format_double(epsilon_bound(sys)) << '\n'
        << "epsilon: " << format_double(e.epsilon) << '\n'
        << "certified: " << (e.certified ? "true" : "false") << '\n';
    if (strong) {
      const auto p = predict(sys, e.x0, e.epsilon);
      out << "v:";
      for (double vi : p.v) out << ' ' << format_double(vi);
      out << '\n' << "predicted_alpha: " << format_double(p.alpha) << '\n';
      out << "rho_estimate: " << format_double(p.rho_estimate) << '\n';
    }
    if (!e.certified) {
      err << "hypothesis violated: " << hypothesis_failure(e) << '\n';
      return static_cast<int>(kHypothesisViolation);
    }
    return static_cast<int>(kSuccess);
  });
}

inline int cmd_run(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Experiment e = load_experiment(config);
    if (!e.certified && !config.allow_uncertified) {
      err << "hypothesis violated: " << hypothesis_failure(e) << " (pass --allow-uncertified to run anyway)\n";
      return static_cast<int>(kHypothesisViolation);
    }
    RunOptions options;
    options.tol = config.tol;
    options.max_steps = config.max_steps;
    options.snapshot_limit = config.snapshot_limit;
    options.allow_uncertified = config.allow_uncertified;

    const RunTrace trace = config.mode == Mode::kMatrix ? run(e.sys, e.x0, e.epsilon, options)
                                                        : run_agents(e.sys, e.x0, e.epsilon, options);
    const Vector v = is_strongly_connected(e.sys.graph) ? left_null_vector(e.sys) : Vector{};
    const auto summary = summary_json({e.sys, e.epsilon, e.certified, v, trace, to_string(config.mode)});

    if (config.output_path) {
      std::filesystem::create_directories(*config.output_path);
      std::ofstream csv(*config.output_path / "trace.csv", std::ios::binary);
      write_trace_csv(csv, trace);
      std::ofstream json(*config.output_path / "summary.json", std::ios::binary);
      json << summary.dump(2) << '\n';
      if (!csv || !json) throw Error("failed to write outputs under " + config.output_path->string());
    }
    out << summary.dump(2) << '\n';

    if (!trace.converged_at) {
      err << "no convergence within " << config.max_steps << " steps (disagreement "
          << format_double(trace.final_disagreement()) << ")\n";
      return static_cast<int>(kNoConvergence);
    }
    return static_cast<int>(kSuccess);
  });
}

// Runs the matrix recurrence and the agent simulation side by side and
// requires bit-identical states after every step.
inline int cmd_compare(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Experiment e = load_experiment(config);
    if (!e.certified && !config.allow_uncertified) {
      err << "hypothesis violated: " << hypothesis_failure(e) << " (pass --allow-uncertified to run anyway)\n";
      return static_cast<int>(kHypothesisViolation);
    }
    const IterationMatrix im(e.sys, e.epsilon);
    Simulator sim(e.sys, e.x0, e.epsilon);
    if (config.fault) {
      const FaultInjection f = *config.fault;
      sim.set_fault_injector([f](std::size_t round, std::size_t node, double x) {
        return round == f.round && node == f.node ? x + f.delta : x;
      });
    }

    Vector x = e.x0;
    Vector next(x.size());
    std::size_t k = 0;
    while (disagreement(x) >= config.tol && k < config.max_steps) {
      im.apply(x, next);
      sim.step();
      ++k;
      for (std::size_t i = 0; i < next.size(); ++i) {
        const double a = sim.agents()[i].state;
        if (std::bit_cast<std::uint64_t>(a) != std::bit_cast<std::uint64_t>(next[i])) {
          err << "mismatch at step " << k << " node " << i << ": matrix=" << format_double(next[i])
              << " agents=" << format_double(a) << '\n';
          out << "compare: FAIL\n";
          return static_cast<int>(kModeMismatch);
        }
      }
      std::swap(x, next);
    }
    out << "compare: PASS (" << k << " steps, " << x.size() << " nodes, bit-identical)\n";
    return static_cast<int>(kSuccess);
  });
}

}  // namespace wac::cli
