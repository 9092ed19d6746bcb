#include "epiplan/bench.hpp"
#include "epiplan/dsl.hpp"
#include "epiplan/epistemic.hpp"
#include "epiplan/search.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace epiplan;

enum Exit : int { kOk = 0, kNegative = 1, kUsage = 2, kLimit = 3 };

void report(const ParseError& e) {
  for (const Diagnostic& d : e.diagnostics()) std::cerr << d.format() << "\n";
}

// Stats lines are commented so plan output stays a valid plan file.
void print_stats(const SearchResult& r, const std::string& format) {
  const SearchStats& s = r.stats;
  std::string text;
  if (format == "csv") {
    std::ostringstream out;
    out << "outcome,plan_length,generated,expanded,distinct_states,external_calls,elapsed\n"
        << to_string(r.outcome) << ',' << (s.plan_length ? std::to_string(*s.plan_length) : "") << ','
        << s.generated << ',' << s.expanded << ',' << s.distinct_states << ',' << s.external_calls << ','
        << s.elapsed;
    text = out.str();
  } else {
    nlohmann::json j = {{"outcome", to_string(r.outcome)},
                        {"plan_length", s.plan_length ? nlohmann::json(*s.plan_length) : nlohmann::json(nullptr)},
                        {"generated", s.generated},
                        {"expanded", s.expanded},
                        {"distinct_states", s.distinct_states},
                        {"external_calls", s.external_calls},
                        {"elapsed", s.elapsed}};
    text = j.dump();
  }
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) std::cout << "# " << line << "\n";
}

int cmd_plan(const std::string& file, const std::string& search, int width, std::optional<std::uint64_t> max_nodes,
             std::optional<double> max_seconds, const std::string& stats) {
  Problem problem = load_problem(file);
  Task task(std::move(problem));
  SearchConfig cfg;
  cfg.algorithm = search == "novelty" ? Algorithm::Novelty : Algorithm::Bfs;
  cfg.novelty_width = width;
  cfg.max_nodes = max_nodes;
  cfg.max_seconds = max_seconds;
  const SearchResult r = solve(task, cfg);
  if (r.outcome == Outcome::Solved)
    std::cout << task.format_plan(r.plan);
  else
    std::cout << to_string(r.outcome) << "\n";
  print_stats(r, stats);
  switch (r.outcome) {
    case Outcome::Solved:
      return kOk;
    case Outcome::ResourceLimit:
      return kLimit;
    default:
      return kNegative;
  }
}

int cmd_eval(const std::string& file, const std::string& query) {
  const Problem problem = load_problem(file);
  const Formula f = parse_formula(query, problem);
  Task task(problem);
  const bool truth = eval(task.ctx(), f, task.initial());
  std::cout << (truth ? "true" : "false") << "\n";
  return truth ? kOk : kNegative;
}

int cmd_check(const std::string& file, const std::string& planfile) {
  Task task(load_problem(file));
  std::ifstream in(planfile, std::ios::binary);
  if (!in) {
    std::cerr << planfile << ": cannot open plan file\n";
    return kUsage;
  }
  std::ostringstream text;
  text << in.rdbuf();
  Plan plan;
  try {
    plan = task.parse_plan(text.str());
  } catch (const std::invalid_argument& e) {
    std::cerr << planfile << ": " << e.what() << "\n";
    return kUsage;
  }
  const Verdict v = task.validate(plan);
  std::cout << v.describe() << "\n";
  return v.valid() ? kOk : kNegative;
}

int cmd_bench(const std::string& family, const std::string& outdir, std::optional<double> max_seconds) {
  const Family f = parse_family(family);
  const auto instances = family_instances(f);
  SearchConfig cfg;
  cfg.max_seconds = max_seconds;
  const auto rows = run_suite(instances, cfg);
  write_suite(f, rows, instances, outdir);
  std::cout << to_csv(rows);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Epistemic planner over perspective-based knowledge"};
  app.require_subcommand(1);

  std::string file, query, planfile, family, outdir, search = "bfs", stats = "json";
  int width = 1;
  std::optional<std::uint64_t> max_nodes;
  std::optional<double> max_seconds;

  auto* plan = app.add_subcommand("plan", "Search for a plan");
  plan->add_option("file", file, "Problem file")->required();
  plan->add_option("--search", search, "Search algorithm")->check(CLI::IsMember({"bfs", "novelty"}));
  plan->add_option("--width", width, "Novelty width")->check(CLI::IsMember({1, 2}));
  plan->add_option("--max-nodes", max_nodes, "Generated-node limit")->check(CLI::PositiveNumber);
  plan->add_option("--max-seconds", max_seconds, "Time limit")->check(CLI::PositiveNumber);
  plan->add_option("--stats", stats, "Stats format")->check(CLI::IsMember({"json", "csv"}));

  auto* evalc = app.add_subcommand("eval", "Evaluate a formula at the initial state");
  evalc->add_option("file", file, "Problem file")->required();
  evalc->add_option("--query", query, "Formula")->required();

  auto* check = app.add_subcommand("check", "Validate a plan");
  check->add_option("file", file, "Problem file")->required();
  check->add_option("planfile", planfile, "Plan file, one action per line")->required();

  auto* bench = app.add_subcommand("bench", "Run a benchmark family and write CSV");
  bench->add_option("family", family, "corridor, grapevine, bbl or sn")
      ->required()
      ->check(CLI::IsMember({"corridor", "grapevine", "bbl", "sn"}));
  bench->add_option("outdir", outdir, "Output directory")->required();
  bench->add_option("--max-seconds", max_seconds, "Time limit per instance")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*plan) return cmd_plan(file, search, width, max_nodes, max_seconds, stats);
    if (*evalc) return cmd_eval(file, query);
    if (*check) return cmd_check(file, planfile);
    if (*bench) return cmd_bench(family, outdir, max_seconds);
  } catch (const ParseError& e) {
    report(e);
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
