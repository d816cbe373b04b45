#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "grail/env.hpp"

namespace grail {

enum class SelectorKind { Grail, CGrail, MGrail };

std::string selector_kind_name(SelectorKind kind);

struct SelectorParams {
  double alpha_v = 0.3;        // bandit EMA rate (grail, c-grail)
  double alpha_q = 0.3;        // q-learning rate (m-grail)
  double gamma = 0.9;          // discount (m-grail)
  double tau = 0.08;           // softmax temperature
  double epsilon_floor = 0.05; // uniform mixing probability
  bool operator==(const SelectorParams&) const = default;
};

// Goal-value store for the three selector kinds. GRAIL is state-blind: every
// key aliases one flat table, so its values are identical across keys by
// construction. The contextual variants key entries by state. Missing
// entries read as zero.
class SelectorValues {
 public:
  SelectorValues() = default;
  SelectorValues(SelectorKind kind, int n_goals) : kind_(kind), n_goals_(n_goals) {}

  SelectorKind kind() const { return kind_; }
  int n_goals() const { return n_goals_; }

  double value(StateKey key, GoalId goal) const;
  double max_value(StateKey key) const;
  void set_value(StateKey key, GoalId goal, double v);

  // header: kind,key,goal,value
  void dump_csv(std::ostream& out) const;

  bool operator==(const SelectorValues&) const = default;

 private:
  StateKey slot(StateKey key) const { return kind_ == SelectorKind::Grail ? 0 : key; }

  SelectorKind kind_ = SelectorKind::Grail;
  int n_goals_ = 0;
  std::map<std::pair<StateKey, GoalId>, double> table_;
};

// (1 - epsilon_floor) * softmax(values(key, .) / tau) + epsilon_floor / n.
std::vector<double> selection_probabilities(const SelectorValues& values, StateKey key,
                                            const SelectorParams& params);

// Samples a goal from selection_probabilities with one uniform draw.
GoalId select(const SelectorValues& values, StateKey key, const SelectorParams& params,
              RandomStream& rng);

// V <- V + alpha_v * (reward - V) at the goal's slot. Grail or CGrail only.
void update_bandit(SelectorValues& values, StateKey key, GoalId goal, double reward,
                   const SelectorParams& params);

// One Q-learning backup; next_key == nullopt means the transition was
// terminal and the target is the reward alone. MGrail only.
void update_q(SelectorValues& values, StateKey key, GoalId goal, double reward,
              std::optional<StateKey> next_key, const SelectorParams& params);

// Argmax goal at the key; ties break toward the lowest index.
GoalId greedy_goal(const SelectorValues& values, StateKey key);

}  // namespace grail
