#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "grail/env.hpp"

namespace grail {

enum class SkillBackendKind { Abstract, ActorCritic };
enum class AttemptMode { Explore, Exploit };

struct AbstractSkillParams {
  double p0 = 0.05;
  double p_max = 0.95;
  double eta = 0.03;  // ~95 achieved attempts from p0 to 0.9
  bool operator==(const AbstractSkillParams&) const = default;
};

// Analytic learning-curve surrogate: each goal is a success probability that
// moves toward p_max on every achieved attempt and stays put otherwise.
struct AbstractSkills {
  AbstractSkillParams params;
  std::vector<double> p;  // per goal

  static AbstractSkills make(int n_goals, AbstractSkillParams params = {});
  bool operator==(const AbstractSkills&) const = default;
};

struct ActorCriticParams {
  double sigma = 0.15;         // exploration std-dev
  double alpha_actor = 0.4;
  double alpha_critic = 0.1;
  double init_offset = 0.3;    // initial distance of mu from the sphere
  bool operator==(const ActorCriticParams&) const = default;
};

// One-step linear-Gaussian actor-critic reacher, one expert per goal. The
// actor mean starts init_offset inside the sphere's radial direction; with
// the default sigma an expert at the full sphere distance would essentially
// never sample a hit, so the offset is what makes learning well-posed.
struct ActorCriticSkills {
  struct Expert {
    Vec2 mu;
    double v = 0.0;  // critic baseline
    bool operator==(const Expert&) const = default;
  };

  ActorCriticParams params;
  std::vector<Expert> experts;

  static ActorCriticSkills make(const WorldConfig& world, ActorCriticParams params = {});
  bool operator==(const ActorCriticSkills&) const = default;
};

using Skills = std::variant<AbstractSkills, ActorCriticSkills>;

struct AttemptResult {
  bool reached = false;
  std::optional<Vec2> action;  // ActorCritic only
};

SkillBackendKind kind_of(const Skills& skills);

// Abstract: reached ~ Bernoulli(p_g) in either mode (the learned probability
// is the policy), one rng draw. ActorCritic: Explore samples the action from
// Normal(mu_g, sigma^2 I) (two draws); Exploit plays mu_g with no draw;
// reached = within reach_radius of the sphere.
AttemptResult attempt(const Skills& skills, GoalId goal, AttemptMode mode,
                      const WorldConfig& world, RandomStream& rng);

// One learning step for the attempted goal. Abstract moves p toward p_max on
// achievement. ActorCritic does a one-step TD update (throws
// std::invalid_argument when action is missing).
void train(Skills& skills, GoalId goal, const std::optional<Vec2>& action, bool achieved);

// Fraction of n_eval exploit attempts that reach the sphere; no learning
// side effects. Precondition satisfaction is assumed: this measures reaching
// competence only.
double competence_probe(const Skills& skills, GoalId goal, const WorldConfig& world,
                        RandomStream& rng, int n_eval);

}  // namespace grail
