#include "epiplan/bench.hpp"

#include "epiplan/dsl.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace epiplan {

std::string to_string(Family f) {
  switch (f) {
    case Family::Corridor:
      return "corridor";
    case Family::Grapevine:
      return "grapevine";
    case Family::Bbl:
      return "bbl";
    case Family::Sn:
      return "sn";
  }
  return {};
}

Family parse_family(std::string_view name) {
  for (Family f : {Family::Corridor, Family::Grapevine, Family::Bbl, Family::Sn})
    if (to_string(f) == name) return f;
  throw std::invalid_argument("unknown family '" + std::string(name) + "'");
}

namespace {

std::string two_digits(int i) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02d", i);
  return buf;
}

std::string agent_name(int i) { return std::string(1, static_cast<char>('a' + i)); }

// K[c1] K[c2] ... (base)
std::string chain(const std::vector<int>& agents, const std::string& base) {
  std::string out;
  for (int a : agents) out += "K[" + agent_name(a) + "] ";
  return out + "(" + base + ")";
}

}  // namespace

// Two cameras in a 41x41 grid: a1 moves and turns, a2 is fixed. The three
// objects carry their values as constants anchored at their positions.
std::string bbl_text(int index) {
  static const std::array<const char*, 12> goals = {
      "K[a1] (vo2 = 2)",
      "K[a1] (vo1 = 1)",
      "K[a2] (vo3 = 3)",
      "K[a1] K[a2] (vo1 = 1)",
      "DK[a1,a2] ((vo1 = 1) and (vo2 = 2) and (vo3 = 3))",
      "EK[a1,a2] (vo2 = 2)",
      "EK[a1,a2] ((vo1 = 1) and (vo2 = 2))",
      "CK[a1,a2] (vo2 = 2)",
      "CK[a1,a2] ((vo1 = 1) and (vo2 = 2))",
      "K[a1] DK[a1,a2] ((vo1 = 1) and (vo2 = 2) and (vo3 = 3))",
      "K[a1] (vo1 = 1) and not K[a2] K[a1] (vo1 = 1)",
      "S[a1] vo1 and not K[a1] S[a2] S[a1] vo1",
  };
  if (index < 1 || index > 12) throw std::invalid_argument("BBL index must be in 1..12");
  std::ostringstream out;
  out << "problem \"bbl" << two_digits(index) << "\"\n"
      << "agents a1 a2\n"
      << "perspective euclidean2d { aperture: 90 }\n\n"
      << "var a1_x : -20..20 @pos(a1_x, a1_y) = 5\n"
      << "var a1_y : -20..20 @pos(a1_x, a1_y) = 5\n"
      << "var a1_dir : -179..180 @pos(a1_x, a1_y) = 45\n"
      << "const a2_x : -20..20 @pos(a2_x, a2_y) = 15\n"
      << "const a2_y : -20..20 @pos(a2_x, a2_y) = 15\n"
      << "const a2_dir : -179..180 @pos(a2_x, a2_y) = -135\n"
      << "const vo1 : 0..9 @pos(1, 1) = 1\n"
      << "const vo2 : 0..9 @pos(10, 10) = 2\n"
      << "const vo3 : 0..9 @pos(19, 19) = 3\n\n"
      << "operator move(dx: -2..2, dy: -2..2) {\n"
      << "  pre: 0 = 0\n"
      << "  eff:\n"
      << "    a1_x := a1_x + dx\n"
      << "    a1_y := a1_y + dy\n"
      << "}\n\n"
      << "operator turn(d: -45..45) {\n"
      << "  pre: 0 = 0\n"
      << "  eff:\n"
      << "    a1_dir := a1_dir + d\n"
      << "}\n\n"
      << "goal: " << goals[index - 1] << "\n";
  return out.str();
}

// Five agents on a friendship graph; each of the three posts can be put on one page.
std::string sn_text(int index) {
  if (index < 1 || index > 14) throw std::invalid_argument("SN index must be in 1..14");
  const std::string all = "(post_p1 != none) and (post_p2 != none) and (post_p3 != none)";
  auto k_all = [&](const char* agent) { return std::string("K[") + agent + "] (" + all + ")"; };
  auto not_k_all = [&](const char* agent) { return "not " + k_all(agent); };
  std::string goal;
  switch (index) {
    case 1: goal = "K[a] (post_p1 != none)"; break;
    case 2: goal = "K[a] K[b] (post_p1 != none)"; break;
    case 3: goal = "EK[a,b] (post_p1 != none)"; break;
    case 4: goal = "EK[a,b] (" + all + ")"; break;
    case 5: goal = "DK[a,b] (" + all + ")"; break;
    case 6: goal = "CK[a,b] (post_p1 != none)"; break;
    case 7: goal = "CK[a,e] (post_p1 != none)"; break;
    case 8: goal = k_all("a"); break;
    case 9: goal = k_all("a") + " and " + not_k_all("b"); break;
    case 10: goal = k_all("a") + " and " + not_k_all("b") + " and " + not_k_all("c"); break;
    case 11:
    case 12:
      goal = k_all("a") + " and " + not_k_all("b") + " and " + not_k_all("c") + " and " + not_k_all("d") +
             " and " + not_k_all("e");
      break;
    default:
      goal = not_k_all("a") + " and EK[b,c,d,e] (" + all + ")";
      break;
  }
  std::vector<std::string> edges = {"ab", "ac", "ad", "be", "cd", "de"};
  if (index == 12) edges.push_back("bc");
  if (index == 14) edges.push_back("ce");

  std::ostringstream out;
  out << "problem \"sn" << two_digits(index) << "\"\n"
      << "agents a b c d e\n"
      << "perspective social { }\n\n";
  const std::string people = "abcde";
  for (std::size_t i = 0; i < people.size(); ++i)
    for (std::size_t j = i + 1; j < people.size(); ++j) {
      const std::string pair{people[i], people[j]};
      const bool linked = std::find(edges.begin(), edges.end(), pair) != edges.end();
      out << "const friended__" << people[i] << "__" << people[j] << " : bool = " << (linked ? "true" : "false")
          << "\n";
    }
  for (char p : people) out << "const profile__" << p << " : {a, b, c, d, e} @page = " << p << "\n";
  for (int m = 1; m <= 3; ++m) out << "var post_p" << m << " : {none, a, b, c, d, e} @page = none\n";
  out << "\noperator post(page: {a, b, c, d, e}, msg: {p1, p2, p3}) {\n"
      << "  pre: 0 = 0\n"
      << "  eff:\n";
  for (int m = 1; m <= 3; ++m) out << "    when msg = p" << m << " then post_p" << m << " := page\n";
  out << "}\n\n"
      << "goal: " << goal << "\n";
  return out.str();
}

// Agent a walks a corridor of rooms, senses the secret q in room 2, and shouts
// it. Other agents stay put: odd-numbered ones in room R-1 (goal listeners),
// even-numbered ones in room 2 (must not learn q).
std::string corridor_text(int n_agents, int n_rooms, int depth, int n_goals) {
  if (n_agents < 2 || n_agents > 26) throw std::invalid_argument("corridor needs 2..26 agents");
  if (n_rooms < 4) throw std::invalid_argument("corridor needs at least 4 rooms");
  if (depth < 1) throw std::invalid_argument("depth must be at least 1");
  if (n_goals < 1) throw std::invalid_argument("corridor needs at least one goal");
  std::vector<int> listeners, negatives;
  for (int j = 1; j < n_agents; ++j) (j % 2 ? listeners : negatives).push_back(j);

  std::ostringstream out;
  out << "problem \"corridor-a" << n_agents << "-r" << n_rooms << "-d" << depth << "-g" << n_goals << "\"\n"
      << "agents";
  for (int j = 0; j < n_agents; ++j) out << ' ' << agent_name(j);
  out << "\nperspective latched-rooms { radius: 1 }\n\n"
      << "var at__a : 1.." << n_rooms << " @room(at__a) = 1\n";
  for (int j = 1; j < n_agents; ++j)
    out << "const at__" << agent_name(j) << " : 1.." << n_rooms << " @room(at__" << agent_name(j)
        << ") = " << (j % 2 ? n_rooms - 1 : 2) << "\n";
  out << "const q : 0..1 = 1\n"
      << "const q_room : 1.." << n_rooms << " = 2\n";
  for (int j = 0; j < n_agents; ++j) out << "var sees__" << agent_name(j) << "__q : bool = false\n";
  out << "\noperator left() {\n  pre: 0 = 0\n  eff:\n    at__a := at__a - 1\n}\n"
      << "\noperator right() {\n  pre: 0 = 0\n  eff:\n    at__a := at__a + 1\n}\n"
      << "\noperator sense() {\n  pre: at__a = q_room\n  eff:\n    sees__a__q := true\n}\n"
      << "\noperator shout() {\n  pre: sees__a__q = true\n  eff:\n";
  for (int j = 1; j < n_agents; ++j)
    out << "    when S[" << agent_name(j) << "] at__a then sees__" << agent_name(j) << "__q := true\n";
  out << "}\n\n";
  for (int k = 0; k < n_goals; ++k) {
    const bool positive = k % 2 == 0 || negatives.empty();
    const auto& pool = positive ? listeners : negatives;
    const int other = pool[static_cast<std::size_t>(k / 2) % pool.size()];
    std::vector<int> agents;
    for (int i = 0; i < depth; ++i) agents.push_back(i % 2 ? 0 : other);
    out << "goal: " << (positive ? "" : "not ") << chain(agents, "q = 1") << "\n";
  }
  return out.str();
}

// All agents move between two rooms and share secrets with everyone present.
std::string grapevine_text(int n_agents, int depth, int n_goals) {
  if (n_agents < 2 || n_agents > 26) throw std::invalid_argument("grapevine needs 2..26 agents");
  if (depth < 1) throw std::invalid_argument("depth must be at least 1");
  if (n_goals < 1) throw std::invalid_argument("grapevine needs at least one goal");
  std::ostringstream out;
  out << "problem \"grapevine-a" << n_agents << "-d" << depth << "-g" << n_goals << "\"\n"
      << "agents";
  for (int j = 0; j < n_agents; ++j) out << ' ' << agent_name(j);
  out << "\nperspective latched-rooms { radius: 0 }\n\n";
  for (int j = 0; j < n_agents; ++j) out << "var at__" << agent_name(j) << " : 1..2 @room(at__" << agent_name(j) << ") = 1\n";
  for (int j = 0; j < n_agents; ++j) out << "const sec_" << agent_name(j) << " : 0..1 = 1\n";
  for (int x = 0; x < n_agents; ++x)
    for (int y = 0; y < n_agents; ++y)
      out << "var sees__" << agent_name(x) << "__sec_" << agent_name(y) << " : bool = " << (x == y ? "true" : "false")
          << "\n";
  for (int x = 0; x < n_agents; ++x) {
    const std::string ax = agent_name(x);
    out << "\noperator left_" << ax << "() {\n  pre: 0 = 0\n  eff:\n    at__" << ax << " := at__" << ax << " - 1\n}\n";
    out << "\noperator right_" << ax << "() {\n  pre: 0 = 0\n  eff:\n    at__" << ax << " := at__" << ax << " + 1\n}\n";
  }
  for (int x = 0; x < n_agents; ++x)
    for (int y = 0; y < n_agents; ++y) {
      const std::string ax = agent_name(x), ay = agent_name(y);
      out << "\noperator share_" << ax << "_" << ay << "() {\n  pre: sees__" << ax << "__sec_" << ay
          << " = true\n  eff:\n";
      for (int z = 0; z < n_agents; ++z)
        if (z != x)
          out << "    when S[" << agent_name(z) << "] at__" << ax << " then sees__" << agent_name(z) << "__sec_" << ay
              << " := true\n";
      out << "}\n";
    }
  out << "\n";
  // Goal pairs cycle over the secrets of agents 0..n-2: a positive chain for a
  // listener, a negative one for the last agent. With two agents the negative
  // goal is about b's secret instead.
  const int insiders = n_agents - 1;
  const int outsider = n_agents - 1;
  for (int k = 0; k < n_goals; ++k) {
    const int pair = k / 2;
    int secret = pair % insiders;
    int other = 0;
    if (k % 2 == 0)
      other = insiders == 1 ? outsider : (secret + 1 + (pair / insiders) % (insiders - 1)) % insiders;
    else if (insiders == 1)
      secret = 1;
    else
      other = outsider;
    std::vector<int> agents;
    for (int step = 0; step < depth; ++step) agents.push_back(step % 2 ? secret : other);
    out << "goal: " << (k % 2 ? "not " : "") << chain(agents, "sec_" + agent_name(secret) + " = 1") << "\n";
  }
  return out.str();
}

Problem build_bbl(int index) { return parse_problem(bbl_text(index), "bbl" + two_digits(index) + ".epl"); }
Problem build_sn(int index) { return parse_problem(sn_text(index), "sn" + two_digits(index) + ".epl"); }
Problem gen_corridor(int n_agents, int n_rooms, int depth, int n_goals) {
  return parse_problem(corridor_text(n_agents, n_rooms, depth, n_goals), "corridor.epl");
}
Problem gen_grapevine(int n_agents, int depth, int n_goals) {
  return parse_problem(grapevine_text(n_agents, depth, n_goals), "grapevine.epl");
}

namespace {

struct GridPoint {
  int agents, depth, goals;
};

// Parameter grid of the Corridor and Grapevine rows with depth at most 3.
constexpr std::array<GridPoint, 6> kCorridorGrid = {{{3, 1, 2}, {7, 1, 2}, {3, 3, 2}, {6, 3, 2}, {7, 3, 2}, {8, 3, 2}}};
constexpr std::array<GridPoint, 14> kGrapevineGrid = {{{4, 1, 2},
                                                       {4, 2, 2},
                                                       {4, 1, 4},
                                                       {4, 2, 4},
                                                       {4, 1, 8},
                                                       {4, 2, 8},
                                                       {4, 3, 8},
                                                       {8, 1, 2},
                                                       {8, 2, 2},
                                                       {8, 1, 4},
                                                       {8, 2, 4},
                                                       {8, 1, 8},
                                                       {8, 2, 8},
                                                       {8, 3, 8}}};
constexpr int kCorridorRooms = 4;

std::string grid_label(const char* family, const GridPoint& g) {
  return std::string(family) + "-a" + std::to_string(g.agents) + "-d" + std::to_string(g.depth) + "-g" +
         std::to_string(g.goals);
}

Instance make_instance(std::string label, std::string text) {
  Problem p = parse_problem(text, label + ".epl");
  return Instance{std::move(label), std::move(text), std::move(p)};
}

}  // namespace

std::vector<Instance> family_instances(Family f) {
  std::vector<Instance> out;
  switch (f) {
    case Family::Bbl:
      for (int i = 1; i <= 12; ++i) out.push_back(make_instance("BBL" + two_digits(i), bbl_text(i)));
      break;
    case Family::Sn:
      for (int i = 1; i <= 14; ++i) out.push_back(make_instance("SN" + two_digits(i), sn_text(i)));
      break;
    case Family::Corridor:
      for (const auto& g : kCorridorGrid)
        out.push_back(make_instance(grid_label("corridor", g), corridor_text(g.agents, kCorridorRooms, g.depth, g.goals)));
      break;
    case Family::Grapevine:
      for (const auto& g : kGrapevineGrid)
        out.push_back(make_instance(grid_label("grapevine", g), grapevine_text(g.agents, g.depth, g.goals)));
      break;
  }
  return out;
}

StatsRow run_instance(const Instance& instance, const SearchConfig& cfg) {
  Task task(instance.problem);
  StatsRow row;
  row.label = instance.label;
  row.agents = instance.problem.vocab.num_agents();
  row.depth = modal_depth(instance.problem.goal);
  row.goals = conjuncts(instance.problem.goal).size();
  row.result = solve(task, cfg);
  return row;
}

std::vector<StatsRow> run_suite(std::span<const Instance> instances, const SearchConfig& cfg) {
  std::vector<StatsRow> rows;
  for (const Instance& i : instances) rows.push_back(run_instance(i, cfg));
  return rows;
}

std::vector<StatsRow> run_suite(Family f, const SearchConfig& cfg) {
  const auto instances = family_instances(f);
  return run_suite(instances, cfg);
}

std::string to_csv(std::span<const StatsRow> rows) {
  std::ostringstream out;
  out << "instance,|a|,d,|g|,|p|,gen,exp,distinct,calls,seconds\n";
  for (const StatsRow& r : rows) {
    const SearchStats& s = r.result.stats;
    out << r.label << ',' << r.agents << ',' << r.depth << ',' << r.goals << ',';
    if (s.plan_length)
      out << *s.plan_length;
    else
      out << to_string(r.result.outcome);
    char seconds[32];
    std::snprintf(seconds, sizeof seconds, "%.3f", s.elapsed);
    out << ',' << s.generated << ',' << s.expanded << ',' << s.distinct_states << ',' << s.external_calls << ','
        << seconds << '\n';
  }
  return out.str();
}

void write_suite(Family f, std::span<const StatsRow> rows, std::span<const Instance> instances,
                 const std::filesystem::path& outdir) {
  std::filesystem::create_directories(outdir);
  auto write = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + path.string());
    file << text;
  };
  write(outdir / (to_string(f) + ".csv"), to_csv(rows));
  for (const Instance& i : instances) write(outdir / (i.label + ".epl"), i.text);
}

}  // namespace epiplan
