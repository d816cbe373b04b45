#pragma once

#include <iosfwd>
#include <map>
#include <utility>

#include "grail/env.hpp"

namespace grail {

struct TrackerParams {
  double alpha_fast = 0.2;
  double alpha_slow = 0.05;
  bool clamp_negative = true;
  bool operator==(const TrackerParams&) const = default;
};

// Per-(state key, goal) competence statistics: a fast and a slow exponential
// moving average of the binary achievement signal. Their difference is the
// competence derivative used as intrinsic reward; the slow average is the
// stable competence estimate. Entries are created lazily at zero.
class CompetenceTracker {
 public:
  CompetenceTracker() = default;
  explicit CompetenceTracker(TrackerParams params) : params_(params) {}

  void record(StateKey key, GoalId goal, bool achieved);

  // fast - slow, clamped at zero when clamp_negative is set. Read-only.
  double intrinsic_reward(StateKey key, GoalId goal) const;

  // The slow EMA. Read-only.
  double competence(StateKey key, GoalId goal) const;

  double fast_average(StateKey key, GoalId goal) const;

  const TrackerParams& params() const { return params_; }
  std::size_t size() const { return table_.size(); }

  // header: key,goal,c_fast,c_slow
  void dump_csv(std::ostream& out) const;

  bool operator==(const CompetenceTracker&) const = default;

 private:
  struct Entry {
    double c_fast = 0.0;
    double c_slow = 0.0;
    bool operator==(const Entry&) const = default;
  };

  TrackerParams params_;
  std::map<std::pair<StateKey, GoalId>, Entry> table_;
};

}  // namespace grail
