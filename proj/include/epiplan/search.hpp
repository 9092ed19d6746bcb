#pragma once

#include "epiplan/planning.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace epiplan {

enum class Algorithm : std::uint8_t { Bfs, Novelty };

struct SearchConfig {
  Algorithm algorithm = Algorithm::Bfs;
  int novelty_width = 1;
  std::optional<std::uint64_t> max_nodes;
  std::optional<double> max_seconds;
};

enum class Outcome : std::uint8_t { Solved, Unsolvable, PrunedExhausted, ResourceLimit };

std::string to_string(Outcome o);

struct SearchStats {
  std::optional<std::size_t> plan_length;
  std::uint64_t generated = 0;
  std::uint64_t expanded = 0;
  std::uint64_t distinct_states = 0;
  std::uint64_t external_calls = 0;
  double elapsed = 0.0;
};

struct SearchResult {
  Outcome outcome = Outcome::Unsolvable;
  Plan plan;  // meaningful when outcome == Solved
  SearchStats stats;
};

// Breadth-first search over fluent assignments; the novelty variant prunes
// states that add no new atom (width 1) or atom pair (width 2).
// Throws std::invalid_argument for an invalid configuration.
SearchResult solve(const Task& task, const SearchConfig& cfg = {});

}  // namespace epiplan
