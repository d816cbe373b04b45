#include "grail/skills.hpp"

#include <algorithm>
#include <stdexcept>

namespace grail {

AbstractSkills AbstractSkills::make(int n_goals, AbstractSkillParams params) {
  AbstractSkills s;
  s.params = params;
  s.p.assign(n_goals, params.p0);
  return s;
}

ActorCriticSkills ActorCriticSkills::make(const WorldConfig& world, ActorCriticParams params) {
  ActorCriticSkills s;
  s.params = params;
  s.experts.resize(world.n_goals);
  for (GoalId g = 0; g < world.n_goals; ++g) {
    const Vec2 target = world.sphere_positions[g];
    const double norm = std::hypot(target.x, target.y);
    double scale = 0.0;
    if (norm > params.init_offset) scale = 1.0 - params.init_offset / norm;
    s.experts[g].mu = {target.x * scale, target.y * scale};
  }
  return s;
}

SkillBackendKind kind_of(const Skills& skills) {
  return std::holds_alternative<AbstractSkills>(skills) ? SkillBackendKind::Abstract
                                                        : SkillBackendKind::ActorCritic;
}

AttemptResult attempt(const Skills& skills, GoalId goal, AttemptMode mode,
                      const WorldConfig& world, RandomStream& rng) {
  if (const auto* abs = std::get_if<AbstractSkills>(&skills)) {
    return {rng.bernoulli(abs->p[goal]), std::nullopt};
  }
  const auto& ac = std::get<ActorCriticSkills>(skills);
  const auto& expert = ac.experts[goal];
  Vec2 action = expert.mu;
  if (mode == AttemptMode::Explore) {
    const auto [z0, z1] = rng.normal_pair();
    action.x += ac.params.sigma * z0;
    action.y += ac.params.sigma * z1;
  }
  const bool reached =
      distance(action, world.sphere_positions[goal]) <= world.reach_radius;
  return {reached, action};
}

void train(Skills& skills, GoalId goal, const std::optional<Vec2>& action, bool achieved) {
  if (auto* abs = std::get_if<AbstractSkills>(&skills)) {
    if (achieved) {
      double& p = abs->p[goal];
      p += abs->params.eta * (abs->params.p_max - p);
    }
    return;
  }
  if (!action)
    throw std::invalid_argument("train: actor-critic update requires the attempted action");
  auto& ac = std::get<ActorCriticSkills>(skills);
  auto& expert = ac.experts[goal];
  const double reward = achieved ? 1.0 : 0.0;
  const double delta = reward - expert.v;
  expert.v = std::clamp(expert.v + ac.params.alpha_critic * delta, 0.0, 1.0);
  expert.mu.x += ac.params.alpha_actor * delta * (action->x - expert.mu.x);
  expert.mu.y += ac.params.alpha_actor * delta * (action->y - expert.mu.y);
}

double competence_probe(const Skills& skills, GoalId goal, const WorldConfig& world,
                        RandomStream& rng, int n_eval) {
  if (n_eval < 1) throw std::invalid_argument("competence_probe: n_eval must be >= 1");
  int reached = 0;
  for (int i = 0; i < n_eval; ++i) {
    if (attempt(skills, goal, AttemptMode::Exploit, world, rng).reached) ++reached;
  }
  return static_cast<double>(reached) / n_eval;
}

}  // namespace grail
