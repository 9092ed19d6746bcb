#include "epiplan/search.hpp"

#include <algorithm>
#include <chrono>
#include <unordered_set>

namespace epiplan {

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::Solved:
      return "SOLVED";
    case Outcome::Unsolvable:
      return "UNSOLVABLE";
    case Outcome::PrunedExhausted:
      return "PRUNED_EXHAUSTED";
    case Outcome::ResourceLimit:
      return "RESOURCE_LIMIT";
  }
  return {};
}

namespace {

using Clock = std::chrono::steady_clock;

// Closed list: fluent assignments stored as domain indices in one flat pool.
class StatePool {
 public:
  explicit StatePool(std::size_t width) : width_(width), index_(1024, Hash{this}, Equal{this}) {}

  std::size_t width() const { return width_; }
  std::size_t size() const { return width_ ? pool_.size() / width_ : count_; }
  const std::uint32_t* at(std::uint32_t id) const { return pool_.data() + std::size_t{id} * width_; }

  // Appends the candidate; returns its id, or nullopt if already present.
  std::optional<std::uint32_t> insert(const std::vector<std::uint32_t>& fluents) {
    const auto id = static_cast<std::uint32_t>(size());
    pool_.insert(pool_.end(), fluents.begin(), fluents.end());
    if (width_ == 0) ++count_;
    if (!index_.insert(id).second) {
      pool_.resize(pool_.size() - width_);
      if (width_ == 0) --count_;
      return std::nullopt;
    }
    return id;
  }

 private:
  struct Hash {
    const StatePool* self;
    std::size_t operator()(std::uint32_t id) const {
      std::uint64_t h = 0xcbf29ce484222325ULL;
      const std::uint32_t* p = self->at(id);
      for (std::size_t i = 0; i < self->width_; ++i) h = (h ^ p[i]) * 0x100000001b3ULL;
      return static_cast<std::size_t>(h ^ (h >> 29));
    }
  };
  struct Equal {
    const StatePool* self;
    bool operator()(std::uint32_t a, std::uint32_t b) const {
      return std::equal(self->at(a), self->at(a) + self->width_, self->at(b));
    }
  };

  std::size_t width_;
  std::size_t count_ = 0;
  std::vector<std::uint32_t> pool_;
  std::unordered_set<std::uint32_t, Hash, Equal> index_;
};

// Atoms are (fluent, value index) pairs numbered consecutively.
class NoveltyTable {
 public:
  NoveltyTable(const Task& task, int width) : width_(width) {
    for (VarId v : task.fluents()) {
      offsets_.push_back(atoms_);
      atoms_ += task.vocab().var(v).domain.size();
    }
    seen_.assign(atoms_, false);
    if (width_ == 2) {
      if (atoms_ > 40000) throw std::invalid_argument("too many atoms for width-2 novelty");
      pairs_.assign(atoms_ * atoms_, false);
    }
  }

  // Registers the state's atoms and returns its novelty (width + 1 when nothing is new).
  int novelty(const std::vector<std::uint32_t>& fluents) {
    atoms_of_.clear();
    for (std::size_t i = 0; i < fluents.size(); ++i) atoms_of_.push_back(offsets_[i] + fluents[i]);
    int result = width_ + 1;
    for (std::size_t a : atoms_of_)
      if (!seen_[a]) {
        seen_[a] = true;
        result = 1;
      }
    if (width_ == 2) {
      for (std::size_t i = 0; i < atoms_of_.size(); ++i)
        for (std::size_t j = i + 1; j < atoms_of_.size(); ++j) {
          const std::size_t key = atoms_of_[i] * atoms_ + atoms_of_[j];
          if (!pairs_[key]) {
            pairs_[key] = true;
            result = std::min(result, 2);
          }
        }
    }
    return result;
  }

 private:
  int width_;
  std::size_t atoms_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<bool> seen_;
  std::vector<bool> pairs_;
  std::vector<std::size_t> atoms_of_;
};

class Search {
 public:
  Search(const Task& task, const SearchConfig& cfg)
      : task_(task), cfg_(cfg), pool_(task.fluents().size()), start_(Clock::now()) {
    if (cfg.algorithm == Algorithm::Novelty) novelty_.emplace(task, cfg.novelty_width);
    for (const Action& a : task.actions()) needs_local_ = needs_local_ || a.needs_local;
  }

  SearchResult run() {
    const std::uint64_t calls_before = task_.ctx().calls();
    SearchResult result;
    result.outcome = explore(result.plan);
    result.stats = stats_;
    result.stats.external_calls = task_.ctx().calls() - calls_before;
    result.stats.elapsed = std::chrono::duration<double>(Clock::now() - start_).count();
    if (result.outcome == Outcome::Solved) {
      result.stats.plan_length = result.plan.steps.size();
      if (!task_.validate(result.plan).valid()) throw std::logic_error("search produced an invalid plan");
    }
    return result;
  }

 private:
  Outcome explore(Plan& plan) {
    encode(task_.initial(), scratch_);
    const std::uint32_t root = *pool_.insert(scratch_);
    parent_.push_back(root);
    via_.push_back(0);
    stats_.generated = stats_.distinct_states = 1;
    const bool root_alive = task_.maintained(task_.initial());
    dead_.push_back(!root_alive);
    if (root_alive && task_.goal(task_.initial())) return Outcome::Solved;
    if (novelty_) novelty_->novelty(scratch_);

    State current = task_.initial();
    State next;
    for (std::uint32_t head = 0; head < pool_.size(); ++head) {
      if (dead_[head]) continue;
      if (over_time()) return Outcome::ResourceLimit;
      decode(head, current);
      ++stats_.expanded;
      std::optional<LocalState> local;
      if (needs_local_) local = current.local();
      const auto& actions = task_.actions();
      for (std::size_t a = 0; a < actions.size(); ++a) {
        if (!task_.successor(actions[a], current, local ? &*local : nullptr, next)) continue;
        ++stats_.generated;
        if (cfg_.max_nodes && stats_.generated > *cfg_.max_nodes) return Outcome::ResourceLimit;
        encode(next, scratch_);
        auto id = pool_.insert(scratch_);
        if (!id) continue;
        ++stats_.distinct_states;
        parent_.push_back(head);
        via_.push_back(static_cast<std::uint32_t>(a));
        const bool alive = task_.maintained(next);
        dead_.push_back(!alive);
        if (!alive) continue;
        if (task_.goal(next)) {
          plan = trace(*id);
          return Outcome::Solved;
        }
        if (novelty_ && novelty_->novelty(scratch_) > cfg_.novelty_width) {
          dead_.back() = true;
        }
      }
    }
    return novelty_ ? Outcome::PrunedExhausted : Outcome::Unsolvable;
  }

  bool over_time() {
    if (!cfg_.max_seconds || (++ticks_ & 255) != 0) return false;
    return std::chrono::duration<double>(Clock::now() - start_).count() > *cfg_.max_seconds;
  }

  void encode(const State& s, std::vector<std::uint32_t>& out) const {
    out.clear();
    for (VarId v : task_.fluents()) {
      const Domain& d = task_.vocab().var(v).domain;
      out.push_back(static_cast<std::uint32_t>(*d.index_of(s[v])));
    }
  }

  void decode(std::uint32_t id, State& s) const {
    const std::uint32_t* p = pool_.at(id);
    const auto& fluents = task_.fluents();
    for (std::size_t i = 0; i < fluents.size(); ++i) s.set(fluents[i], task_.vocab().var(fluents[i]).domain.at(p[i]));
  }

  Plan trace(std::uint32_t id) const {
    Plan plan;
    for (; id != 0; id = parent_[id]) plan.steps.push_back(via_[id]);
    std::reverse(plan.steps.begin(), plan.steps.end());
    return plan;
  }

  const Task& task_;
  const SearchConfig& cfg_;
  StatePool pool_;
  std::optional<NoveltyTable> novelty_;
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> via_;
  std::vector<char> dead_;
  std::vector<std::uint32_t> scratch_;
  SearchStats stats_;
  Clock::time_point start_;
  std::uint64_t ticks_ = 0;
  bool needs_local_ = false;
};

}  // namespace

SearchResult solve(const Task& task, const SearchConfig& cfg) {
  if (cfg.algorithm == Algorithm::Novelty && cfg.novelty_width != 1 && cfg.novelty_width != 2)
    throw std::invalid_argument("novelty width must be 1 or 2");
  if (cfg.max_nodes && *cfg.max_nodes == 0) throw std::invalid_argument("max_nodes must be positive");
  if (cfg.max_seconds && *cfg.max_seconds <= 0) throw std::invalid_argument("max_seconds must be positive");
  return Search(task, cfg).run();
}

}  // namespace epiplan
