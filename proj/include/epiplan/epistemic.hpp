#pragma once

#include "epiplan/formula.hpp"
#include "epiplan/perspectives.hpp"

#include <atomic>
#include <memory>

namespace epiplan {

// Evaluation environment: one perspective rule shared by all agents, the
// relation registry, and a counter of epistemic-operator evaluations.
class EvalContext {
 public:
  EvalContext(std::shared_ptr<const Perspective> perspective, RelationRegistry relations);

  const Perspective& perspective() const { return *perspective_; }
  const RelationRegistry& relations() const { return relations_; }

  std::uint64_t calls() const { return calls_.load(std::memory_order_relaxed); }
  void count_call() const { calls_.fetch_add(1, std::memory_order_relaxed); }
  void reset_calls() { calls_.store(0); }

 private:
  std::shared_ptr<const Perspective> perspective_;
  RelationRegistry relations_;
  mutable std::atomic<std::uint64_t> calls_{0};
};

bool eval(const EvalContext& ctx, const Formula& f, const LocalState& l);
bool eval(const EvalContext& ctx, const Formula& f, const State& s);

// Greatest fixed point of l' -> intersection of f_i(l') over G, seeded with l.
LocalState fc(const EvalContext& ctx, std::span<const AgentId> group, const LocalState& l);

}  // namespace epiplan
