#include "grail/env.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>

namespace grail {

namespace {

// Walks sphere dependencies; returns false on a cycle.
bool visit_dependencies(GoalId g, const WorldConfig& config,
                        std::vector<int>& mark) {
  if (mark[g] == 1) return false;  // on stack: cycle
  if (mark[g] == 2) return true;
  mark[g] = 1;
  const PreconditionRule& rule = config.preconditions[g];
  if (rule.kind == PreconditionRule::Kind::SpheresActive) {
    for (GoalId dep : rule.spheres) {
      if (!visit_dependencies(dep, config, mark)) return false;
    }
  }
  mark[g] = 2;
  return true;
}

}  // namespace

void WorldConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("world: " + msg); };

  if (n_goals < 1) fail("n_goals must be >= 1");
  if (n_context_bits < 0) fail("n_context_bits must be >= 0");
  if (n_goals + n_context_bits > 62)
    fail("n_goals + n_context_bits must be <= 62");
  if (context_on_probability < 0.0 || context_on_probability > 1.0)
    fail("context_on_probability must be in [0, 1]");
  if (static_cast<int>(preconditions.size()) != n_goals)
    fail("preconditions must have one entry per goal");
  if (static_cast<int>(sphere_positions.size()) != n_goals)
    fail("sphere_positions must have one entry per goal");
  if (!(reach_radius > 0.0)) fail("reach_radius must be > 0");
  if (trials_per_epoch < 1) fail("trials_per_epoch must be >= 1");
  if (reset_mode == ResetMode::PerTrial && trials_per_epoch != 1)
    fail("per_trial reset requires trials_per_epoch = 1");

  for (GoalId g = 0; g < n_goals; ++g) {
    const PreconditionRule& rule = preconditions[g];
    std::ostringstream where;
    where << "preconditions[" << g << "]: ";
    if (rule.kind == PreconditionRule::Kind::ContextBit) {
      if (rule.bit < 0 || rule.bit >= n_context_bits)
        fail(where.str() + "context bit out of range");
    } else if (rule.kind == PreconditionRule::Kind::SpheresActive) {
      if (rule.spheres.empty())
        fail(where.str() + "spheres_active requires at least one sphere");
      for (GoalId dep : rule.spheres) {
        if (dep < 0 || dep >= n_goals)
          fail(where.str() + "sphere index out of range");
        if (dep == g) fail(where.str() + "goal cannot require itself");
      }
    }
  }

  std::vector<int> mark(n_goals, 0);
  for (GoalId g = 0; g < n_goals; ++g) {
    if (!visit_dependencies(g, *this, mark))
      fail("precondition graph has a cycle involving goal " + goal_name(g));
  }
}

EnvState reset(const WorldConfig& config, RandomStream& rng) {
  EnvState state;
  for (int i = 0; i < config.n_context_bits; ++i) {
    if (rng.bernoulli(config.context_on_probability))
      state.context |= std::uint64_t{1} << i;
  }
  return state;
}

bool preconditions_met(const EnvState& state, GoalId goal, const WorldConfig& config) {
  const PreconditionRule& rule = config.preconditions[goal];
  switch (rule.kind) {
    case PreconditionRule::Kind::Always:
      return true;
    case PreconditionRule::Kind::ContextBit:
      return state.context_bit(rule.bit) == rule.required;
    case PreconditionRule::Kind::SpheresActive:
      return std::all_of(rule.spheres.begin(), rule.spheres.end(),
                         [&](GoalId dep) { return state.is_active(dep); });
  }
  return false;
}

Outcome apply_outcome(const EnvState& state, GoalId goal, bool reached,
                      const WorldConfig& config) {
  Outcome out{state, false};
  if (reached && preconditions_met(state, goal, config)) {
    out.achieved = true;
    out.state.active |= std::uint64_t{1} << goal;
  }
  return out;
}

StateKey state_key(const EnvState& state, ObservationMode mode, const WorldConfig& config) {
  switch (mode) {
    case ObservationMode::ContextOnly:
      return state.context;
    case ObservationMode::SpheresOnly:
      return state.active;
    case ObservationMode::Full:
      return state.context | (state.active << config.n_context_bits);
  }
  return 0;
}

EnvState satisfying_state(GoalId goal, const WorldConfig& config) {
  EnvState state;
  std::uint64_t context_constrained = 0;  // bits with a demanded value
  std::vector<int> mark(config.n_goals, 0);

  // Transitive closure over sphere requirements. Every ancestor's own rule is
  // folded in, so the result is the minimal state reachable in principle.
  auto close = [&](auto&& self, GoalId g) -> void {
    if (mark[g] == 1)
      throw ConfigError("satisfying_state: precondition cycle reached from goal " +
                        goal_name(goal));
    if (mark[g] == 2) return;
    mark[g] = 1;
    const PreconditionRule& rule = config.preconditions[g];
    if (rule.kind == PreconditionRule::Kind::ContextBit) {
      const std::uint64_t bit = std::uint64_t{1} << rule.bit;
      if ((context_constrained & bit) && ((state.context & bit) != 0) != rule.required) {
        throw ConfigError("satisfying_state: contradictory context requirements for goal " +
                          goal_name(goal));
      }
      context_constrained |= bit;
      if (rule.required) state.context |= bit;
    } else if (rule.kind == PreconditionRule::Kind::SpheresActive) {
      for (GoalId dep : rule.spheres) {
        if (dep == goal)
          throw ConfigError("satisfying_state: goal " + goal_name(goal) +
                            " transitively requires itself");
        state.active |= std::uint64_t{1} << dep;
        self(self, dep);
      }
    }
    mark[g] = 2;
  };
  close(close, goal);

  return state;
}

std::vector<Vec2> unit_circle_positions(int n_goals) {
  std::vector<Vec2> positions(n_goals);
  for (int i = 0; i < n_goals; ++i) {
    const double angle = 2.0 * std::numbers::pi * i / n_goals;
    positions[i] = {std::cos(angle), std::sin(angle)};
  }
  return positions;
}

std::string goal_name(GoalId g) {
  if (g >= 0 && g < 26) return std::string(1, static_cast<char>('a' + g));
  return "g" + std::to_string(g);
}

}  // namespace grail
