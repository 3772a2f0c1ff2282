// wac: weighted-average consensus experiments from the command line.
//
//   wac check   --graph g.txt [--weights w.txt] [--epsilon E]
//   wac run     --graph g.txt [--weights w.txt] [--x0 x.txt] [--mode matrix|agents] [--out DIR]
//   wac compare --graph g.txt [--weights w.txt] [--x0 x.txt]

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "wac/cli.hpp"

namespace {

void add_common_options(CLI::App& cmd, wac::cli::ExperimentConfig& config, std::optional<std::string>& weights,
                        std::optional<std::string>& x0, std::optional<std::string>& out,
                        std::optional<double>& epsilon, std::string& mode) {
  cmd.add_option("--graph", config.graph_path, "Edge-list file")->required();
  cmd.add_option("--weights", weights, "Node weights, one per line (default: all ones)");
  cmd.add_option("--x0", x0, "Initial states, one per line (default: seeded uniform [0,1))");
  cmd.add_option("--epsilon", epsilon, "Step size (default: 0.9 * min_i w_i/d_i)");
  cmd.add_option("--tol", config.tol, "Stop when max(x) - min(x) < tol")->capture_default_str();
  cmd.add_option("--max-steps", config.max_steps, "Iteration cap")->capture_default_str();
  cmd.add_option("--mode", mode, "Execution mode: matrix or agents")
      ->check(CLI::IsMember({"matrix", "agents"}))
      ->capture_default_str();
  cmd.add_flag("--allow-uncertified", config.allow_uncertified, "Run even when epsilon is not certified");
  cmd.add_option("--out", out, "Output directory for trace.csv and summary.json");
  cmd.add_option("--snapshots", config.snapshot_limit, "Maximum recorded trace rows")->capture_default_str();
  cmd.add_option("--seed", config.seed, "Seed for the default initial state")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-time weighted-average consensus on directed graphs"};
  app.require_subcommand(1);

  wac::cli::ExperimentConfig config;
  std::optional<std::string> weights, x0, out;
  std::optional<double> epsilon;
  std::string mode = "matrix";

  auto* check = app.add_subcommand("check", "Report graph properties, the epsilon bound and the predicted consensus");
  auto* run = app.add_subcommand("run", "Iterate to consensus and write a trace and summary");
  auto* compare = app.add_subcommand("compare", "Check that matrix and agent modes agree bit for bit");
  for (auto* cmd : {check, run, compare}) add_common_options(*cmd, config, weights, x0, out, epsilon, mode);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : wac::cli::kInputError;
  }

  if (weights) config.weights_path = *weights;
  if (x0) config.x0_path = *x0;
  if (out) config.output_path = *out;
  config.epsilon = epsilon;
  config.mode = mode == "agents" ? wac::cli::Mode::kAgents : wac::cli::Mode::kMatrix;

  if (check->parsed()) return wac::cli::cmd_check(config, std::cout, std::cerr);
  if (run->parsed()) return wac::cli::cmd_run(config, std::cout, std::cerr);
  return wac::cli::cmd_compare(config, std::cout, std::cerr);
}
