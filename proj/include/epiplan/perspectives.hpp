#pragma once

#include "epiplan/core.hpp"

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace epiplan {

struct PerspectiveSpec {
  std::string kind = "full";
  std::map<std::string, Value> params;

  friend bool operator==(const PerspectiveSpec&, const PerspectiveSpec&) = default;
};

// A visibility rule f_i. Implementations must be contracting (apply(i, l) is a
// subset of l) and idempotent.
class Perspective {
 public:
  virtual ~Perspective() = default;

  virtual LocalState apply(AgentId agent, const LocalState& l) const = 0;

  // Variables whose values decide whether `agent` sees `v`. An observer who
  // sees all of them can tell whether the agent sees v.
  virtual const VarSet& support(AgentId agent, VarId v) const = 0;

  std::size_t num_agents() const { return num_agents_; }

 protected:
  explicit Perspective(std::size_t num_agents) : num_agents_(num_agents) {}
  void check_agent(AgentId agent) const;

 private:
  std::size_t num_agents_;
};

class PerspectiveError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using PerspectiveFactory =
    std::function<std::unique_ptr<Perspective>(const PerspectiveSpec&, const Vocabulary&)>;

class PerspectiveRegistry {
 public:
  void add(std::string kind, PerspectiveFactory factory);
  bool contains(const std::string& kind) const { return factories_.count(kind) != 0; }
  std::vector<std::string> kinds() const;

  // Throws PerspectiveError for unknown kinds or invalid parameters.
  std::unique_ptr<Perspective> make(const PerspectiveSpec& spec, const Vocabulary& vocab) const;

  // full, euclidean2d, latched-rooms, social.
  static const PerspectiveRegistry& builtins();

 private:
  std::map<std::string, PerspectiveFactory> factories_;
};

std::unique_ptr<Perspective> make_perspective(const PerspectiveSpec& spec, const Vocabulary& vocab);

LocalState apply_perspective(const PerspectiveSpec& spec, const Vocabulary& vocab, AgentId agent,
                             const LocalState& l);

// Naming conventions the built-ins read from the vocabulary.
namespace naming {
std::string pose_x(std::string_view agent);
std::string pose_y(std::string_view agent);
std::string pose_dir(std::string_view agent);
std::string location(std::string_view agent);
std::string latch(std::string_view agent, std::string_view var);
std::string friendship(std::string_view a, std::string_view b);
std::string profile(std::string_view agent);
}  // namespace naming

}  // namespace epiplan
