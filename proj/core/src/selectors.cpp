#include "grail/selectors.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "grail/format.hpp"

namespace grail {

std::string selector_kind_name(SelectorKind kind) {
  switch (kind) {
    case SelectorKind::Grail: return "grail";
    case SelectorKind::CGrail: return "c-grail";
    case SelectorKind::MGrail: return "m-grail";
  }
  return "?";
}

double SelectorValues::value(StateKey key, GoalId goal) const {
  const auto it = table_.find({slot(key), goal});
  return it == table_.end() ? 0.0 : it->second;
}

double SelectorValues::max_value(StateKey key) const {
  double best = value(key, 0);
  for (GoalId g = 1; g < n_goals_; ++g) best = std::max(best, value(key, g));
  return best;
}

void SelectorValues::set_value(StateKey key, GoalId goal, double v) {
  table_[{slot(key), goal}] = v;
}

void SelectorValues::dump_csv(std::ostream& out) const {
  out << "kind,key,goal,value\n";
  const std::string name = selector_kind_name(kind_);
  for (const auto& [k, v] : table_) {
    out << name << ',' << k.first << ',' << k.second << ',' << format_double(v) << '\n';
  }
}

std::vector<double> selection_probabilities(const SelectorValues& values, StateKey key,
                                            const SelectorParams& params) {
  const int n = values.n_goals();
  std::vector<double> probs(n);
  const double vmax = values.max_value(key);
  double total = 0.0;
  for (GoalId g = 0; g < n; ++g) {
    probs[g] = std::exp((values.value(key, g) - vmax) / params.tau);
    total += probs[g];
  }
  const double uniform = params.epsilon_floor / n;
  for (GoalId g = 0; g < n; ++g) {
    probs[g] = (1.0 - params.epsilon_floor) * probs[g] / total + uniform;
  }
  return probs;
}

GoalId select(const SelectorValues& values, StateKey key, const SelectorParams& params,
              RandomStream& rng) {
  const std::vector<double> probs = selection_probabilities(values, key, params);
  const double u = rng.uniform01();
  double cumulative = 0.0;
  for (GoalId g = 0; g + 1 < static_cast<GoalId>(probs.size()); ++g) {
    cumulative += probs[g];
    if (u < cumulative) return g;
  }
  return static_cast<GoalId>(probs.size()) - 1;
}

void update_bandit(SelectorValues& values, StateKey key, GoalId goal, double reward,
                   const SelectorParams& params) {
  if (values.kind() == SelectorKind::MGrail)
    throw std::logic_error("update_bandit called on an m-grail selector");
  const double v = values.value(key, goal);
  values.set_value(key, goal, v + params.alpha_v * (reward - v));
}

void update_q(SelectorValues& values, StateKey key, GoalId goal, double reward,
              std::optional<StateKey> next_key, const SelectorParams& params) {
  if (values.kind() != SelectorKind::MGrail)
    throw std::logic_error("update_q called on a bandit selector");
  double target = reward;
  if (next_key) target += params.gamma * values.max_value(*next_key);
  const double q = values.value(key, goal);
  values.set_value(key, goal, q + params.alpha_q * (target - q));
}

GoalId greedy_goal(const SelectorValues& values, StateKey key) {
  GoalId best = 0;
  double best_value = values.value(key, 0);
  for (GoalId g = 1; g < values.n_goals(); ++g) {
    const double v = values.value(key, g);
    if (v > best_value) {
      best = g;
      best_value = v;
    }
  }
  return best;
}

}  // namespace grail
