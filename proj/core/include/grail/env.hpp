#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "grail/rng.hpp"

namespace grail {

// Goals are indexed 0..n_goals-1; in logs and tables index 0 is goal "a",
// 1 is "b", and so on.
using GoalId = int;

// Canonical tabular index for a (context, active) observation. Context bits
// occupy the low positions, activation bits sit above them.
using StateKey = std::uint64_t;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Vec2&) const = default;
};

inline double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

// Invalid configuration, unparsable config document, or an unsatisfiable
// precondition query.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Per-goal achievability condition.
struct PreconditionRule {
  enum class Kind { Always, ContextBit, SpheresActive };

  Kind kind = Kind::Always;
  int bit = 0;            // ContextBit: which context bit
  bool required = true;   // ContextBit: required value
  std::vector<GoalId> spheres;  // SpheresActive: spheres that must be on

  static PreconditionRule always() { return {}; }
  static PreconditionRule context_bit(int bit, bool required) {
    PreconditionRule r;
    r.kind = Kind::ContextBit;
    r.bit = bit;
    r.required = required;
    return r;
  }
  static PreconditionRule spheres_active(std::vector<GoalId> spheres) {
    PreconditionRule r;
    r.kind = Kind::SpheresActive;
    r.spheres = std::move(spheres);
    return r;
  }

  bool operator==(const PreconditionRule&) const = default;
};

enum class ResetMode { PerTrial, PerEpoch };

struct WorldConfig {
  int n_goals = 0;
  int n_context_bits = 0;
  double context_on_probability = 0.5;
  std::vector<PreconditionRule> preconditions;  // one per goal
  std::vector<Vec2> sphere_positions;           // one per goal
  double reach_radius = 0.12;
  ResetMode reset_mode = ResetMode::PerTrial;
  int trials_per_epoch = 1;

  // Throws ConfigError on any violated invariant, including cyclic or
  // contradictory precondition graphs.
  void validate() const;

  bool operator==(const WorldConfig&) const = default;
};

// Immutable environment snapshot. Activation bits are only ever set through
// apply_outcome and only cleared by reset.
struct EnvState {
  std::uint64_t context = 0;
  std::uint64_t active = 0;

  bool context_bit(int i) const { return (context >> i) & 1u; }
  bool is_active(GoalId g) const { return (active >> g) & 1u; }

  bool operator==(const EnvState&) const = default;
};

enum class ObservationMode { ContextOnly, SpheresOnly, Full };

// All activation bits cleared; each context bit sampled independently as
// Bernoulli(context_on_probability), bit 0 first.
EnvState reset(const WorldConfig& config, RandomStream& rng);

bool preconditions_met(const EnvState& state, GoalId goal, const WorldConfig& config);

struct Outcome {
  EnvState state;
  bool achieved = false;
};

// achieved = reached AND preconditions_met at the pre-state. On achievement
// the goal's activation bit is set in the returned state; nothing else moves.
Outcome apply_outcome(const EnvState& state, GoalId goal, bool reached,
                      const WorldConfig& config);

StateKey state_key(const EnvState& state, ObservationMode mode, const WorldConfig& config);

// Minimal state in which the goal's precondition holds: required context bits
// set as demanded (others 0) and, for sphere dependencies, the transitive
// ancestor closure active. Throws ConfigError when no satisfying state exists.
EnvState satisfying_state(GoalId goal, const WorldConfig& config);

// Default sphere layout: n points evenly spaced on the unit circle.
std::vector<Vec2> unit_circle_positions(int n_goals);

std::string goal_name(GoalId g);

}  // namespace grail
