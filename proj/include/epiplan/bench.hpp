#pragma once

#include "epiplan/search.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace epiplan {

enum class Family : std::uint8_t { Corridor, Grapevine, Bbl, Sn };

std::string to_string(Family f);
// Throws std::invalid_argument for unknown names.
Family parse_family(std::string_view name);

// Instance texts in the DSL; the build_* functions parse them.
std::string bbl_text(int index);
std::string sn_text(int index);
std::string corridor_text(int n_agents, int n_rooms, int depth, int n_goals);
std::string grapevine_text(int n_agents, int depth, int n_goals);

// Throw std::invalid_argument for out-of-range parameters.
Problem build_bbl(int index);
Problem build_sn(int index);
Problem gen_corridor(int n_agents, int n_rooms, int depth, int n_goals);
Problem gen_grapevine(int n_agents, int depth, int n_goals);

struct Instance {
  std::string label;
  std::string text;
  Problem problem;
};

// The fixed instance list of a family: BBL01-12, SN01-14, and the generated
// Corridor/Grapevine parameter grid.
std::vector<Instance> family_instances(Family f);

struct StatsRow {
  std::string label;
  std::size_t agents = 0;
  int depth = 0;
  std::size_t goals = 0;
  SearchResult result;
};

StatsRow run_instance(const Instance& instance, const SearchConfig& cfg);
std::vector<StatsRow> run_suite(std::span<const Instance> instances, const SearchConfig& cfg);
std::vector<StatsRow> run_suite(Family f, const SearchConfig& cfg);

// Header: instance,|a|,d,|g|,|p|,gen,exp,distinct,calls,seconds
std::string to_csv(std::span<const StatsRow> rows);

// Writes <family>.csv and one .epl per instance into `outdir`.
void write_suite(Family f, std::span<const StatsRow> rows, std::span<const Instance> instances,
                 const std::filesystem::path& outdir);

}  // namespace epiplan
