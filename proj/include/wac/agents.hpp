#pragma once

// Synchronous multi-agent execution of the consensus update. Each round has
// two phases: every agent publishes its committed state to the agents that
// listen to it, then every agent computes its new state from its own inbox
// and all updates are committed together.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wac/consensus.hpp"
#include "wac/error.hpp"
#include "wac/linalg.hpp"

namespace wac {

struct Message {
  std::size_t from = 0;
  std::size_t to = 0;
  double value = 0.0;
};

struct Agent {
  std::size_t id = 0;
  double weight = 1.0;
  double state = 0.0;
  std::vector<std::size_t> neighbors;       // N_i, ascending
  std::vector<std::optional<double>> inbox;  // inbox[k] holds the value sent by neighbors[k]

  void receive(std::size_t from, double value) {
    const auto it = std::lower_bound(neighbors.begin(), neighbors.end(), from);
    if (it == neighbors.end() || *it != from) {
      throw ProtocolError("agent " + std::to_string(id) + " got a message from non-neighbor " +
                          std::to_string(from));
    }
    auto& slot = inbox[static_cast<std::size_t>(it - neighbors.begin())];
    if (slot) {
      throw ProtocolError("agent " + std::to_string(id) + " got two messages from " + std::to_string(from));
    }
    slot = value;
  }

  void clear_inbox() { std::fill(inbox.begin(), inbox.end(), std::nullopt); }
};

// New state of `agent` for the current round; reads nothing but the agent.
inline double local_update(const Agent& agent, double epsilon) {
  const double scale = epsilon / agent.weight;
  double acc = 0.0;
  for (std::size_t k = 0; k < agent.neighbors.size(); ++k) {
    if (!agent.inbox[k]) {
      throw ProtocolError("agent " + std::to_string(agent.id) + " is missing the message from " +
                          std::to_string(agent.neighbors[k]));
    }
    acc += *agent.inbox[k] - agent.state;
  }
  return agent.state + scale * acc;
}

// Carries messages between agents. deliver() hands every queued message to
// its recipient and returns how many were delivered.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void send(const Message& message) = 0;
  virtual std::size_t deliver(std::span<Agent> agents) = 0;
};

class InProcessTransport final : public Transport {
 public:
  void send(const Message& message) override { queue_.push_back(message); }

  std::size_t deliver(std::span<Agent> agents) override {
    for (const auto& m : queue_) {
      if (m.to >= agents.size()) throw ProtocolError("message addressed to unknown agent " + std::to_string(m.to));
      agents[m.to].receive(m.from, m.value);
    }
    const std::size_t count = queue_.size();
    queue_.clear();
    return count;
  }

 private:
  std::vector<Message> queue_;
};

struct RoundReport {
  std::size_t round = 0;
  Vector states;
  std::size_t messages_sent = 0;
};

inline std::vector<Agent> make_agents(const WeightedSystem& sys, std::span<const double> x0) {
  if (x0.size() != sys.size()) throw DimensionError("initial state length mismatch");
  std::vector<Agent> agents(sys.size());
  for (std::size_t i = 0; i < sys.size(); ++i) {
    const auto out = sys.graph.out_neighbors(i);
    agents[i].id = i;
    agents[i].weight = sys.weights[i];
    agents[i].state = x0[i];
    agents[i].neighbors.assign(out.begin(), out.end());
    agents[i].inbox.assign(out.size(), std::nullopt);
  }
  return agents;
}

class Simulator {
 public:
  // Test hook: called after each agent's local update with (round, agent id,
  // computed state); the returned value is what gets committed.
  using FaultInjector = std::function<double(std::size_t, std::size_t, double)>;

  Simulator(std::vector<Agent> agents, double epsilon,
            std::unique_ptr<Transport> transport = std::make_unique<InProcessTransport>())
      : agents_(std::move(agents)), epsilon_(epsilon), transport_(std::move(transport)),
        listeners_(agents_.size()), pending_(agents_.size()) {
    if (!(epsilon_ > 0.0)) throw DomainError("epsilon must be positive");
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      Agent& a = agents_[i];
      if (a.id != i) throw DomainError("agent ids must equal their position");
      if (!std::is_sorted(a.neighbors.begin(), a.neighbors.end())) {
        throw DomainError("agent " + std::to_string(i) + " neighbors are not sorted");
      }
      a.inbox.assign(a.neighbors.size(), std::nullopt);
      for (std::size_t j : a.neighbors) {
        if (j >= agents_.size()) throw DomainError("agent " + std::to_string(i) + " lists unknown neighbor");
        listeners_[j].push_back(i);
      }
    }
  }

  Simulator(const WeightedSystem& sys, std::span<const double> x0, double epsilon)
      : Simulator(make_agents(sys, x0), epsilon) {}

  void set_fault_injector(FaultInjector injector) { fault_ = std::move(injector); }

  std::size_t round() const noexcept { return round_; }
  std::span<const Agent> agents() const noexcept { return agents_; }

  Vector states() const {
    Vector x(agents_.size());
    for (std::size_t i = 0; i < agents_.size(); ++i) x[i] = agents_[i].state;
    return x;
  }

  RoundReport step() {
    for (std::size_t j = 0; j < agents_.size(); ++j)
      for (std::size_t i : listeners_[j]) transport_->send(Message{j, i, agents_[j].state});
    const std::size_t delivered = transport_->deliver(agents_);

    for (std::size_t i = 0; i < agents_.size(); ++i) {
      pending_[i] = local_update(agents_[i], epsilon_);
      if (fault_) pending_[i] = fault_(round_ + 1, i, pending_[i]);
    }
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      agents_[i].state = pending_[i];
      agents_[i].clear_inbox();
    }
    ++round_;
    return RoundReport{round_, states(), delivered};
  }

 private:
  std::vector<Agent> agents_;
  double epsilon_;
  std::unique_ptr<Transport> transport_;
  std::vector<std::vector<std::size_t>> listeners_;  // listeners_[j]: agents with j in their N_i
  Vector pending_;
  std::size_t round_ = 0;
  FaultInjector fault_;
};

// Report 0 carries the initial states; report k the states after round k.
inline std::vector<RoundReport> run_rounds(std::vector<Agent> agents, double epsilon, std::size_t rounds) {
  Simulator sim(std::move(agents), epsilon);
  std::vector<RoundReport> reports;
  reports.reserve(rounds + 1);
  reports.push_back(RoundReport{0, sim.states(), 0});
  for (std::size_t k = 0; k < rounds; ++k) reports.push_back(sim.step());
  return reports;
}

// Agent-mode counterpart of run(): same stopping rule and trace layout.
inline RunTrace run_agents(const WeightedSystem& sys, std::span<const double> x0, double epsilon,
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
  Simulator sim(sys, x0, epsilon);
  RunTrace trace = drive(
      x0,
      [&sim](std::span<const double>, std::span<double> out) {
        sim.step();
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = sim.agents()[i].state;
      },
      v, options);
  trace.predicted_alpha = alpha;
  return trace;
}

}  // namespace wac
