#include "grail/motivation.hpp"

#include <algorithm>
#include <ostream>

#include "grail/format.hpp"

namespace grail {

void CompetenceTracker::record(StateKey key, GoalId goal, bool achieved) {
  Entry& e = table_[{key, goal}];
  const double outcome = achieved ? 1.0 : 0.0;
  e.c_fast += params_.alpha_fast * (outcome - e.c_fast);
  e.c_slow += params_.alpha_slow * (outcome - e.c_slow);
}

double CompetenceTracker::intrinsic_reward(StateKey key, GoalId goal) const {
  const auto it = table_.find({key, goal});
  if (it == table_.end()) return 0.0;
  const double raw = it->second.c_fast - it->second.c_slow;
  return params_.clamp_negative ? std::max(0.0, raw) : raw;
}

double CompetenceTracker::competence(StateKey key, GoalId goal) const {
  const auto it = table_.find({key, goal});
  return it == table_.end() ? 0.0 : it->second.c_slow;
}

double CompetenceTracker::fast_average(StateKey key, GoalId goal) const {
  const auto it = table_.find({key, goal});
  return it == table_.end() ? 0.0 : it->second.c_fast;
}

void CompetenceTracker::dump_csv(std::ostream& out) const {
  out << "key,goal,c_fast,c_slow\n";
  for (const auto& [slot, entry] : table_) {
    out << slot.first << ',' << slot.second << ',' << format_double(entry.c_fast)
        << ',' << format_double(entry.c_slow) << '\n';
  }
}

}  // namespace grail
