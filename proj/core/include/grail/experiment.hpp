#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "grail/env.hpp"
#include "grail/motivation.hpp"
#include "grail/selectors.hpp"
#include "grail/skills.hpp"

namespace grail {

// A goal counts as learned at the first evaluation whose measured success
// rate reaches this threshold.
inline constexpr double kCriterionThreshold = 0.9;

struct ExperimentConfig {
  WorldConfig world;
  SelectorKind selector_kind = SelectorKind::CGrail;
  SelectorParams selector;
  SkillBackendKind backend_kind = SkillBackendKind::Abstract;
  AbstractSkillParams abstract_skills;
  ActorCriticParams actor_critic;
  TrackerParams tracker;
  ObservationMode observation_mode = ObservationMode::Full;
  long total_trials = 0;
  int eval_interval = 50;
  int eval_attempts = 33;
  std::uint64_t seed = 1;

  void validate() const;  // throws ConfigError

  Skills make_skills() const;

  bool operator==(const ExperimentConfig&) const = default;
};

struct TrialRecord {
  long trial = 0;
  long epoch = 0;
  StateKey key_before = 0;
  GoalId goal = 0;
  bool reached = false;
  bool achieved = false;
  double reward = 0.0;
  StateKey key_after = 0;
  bool operator==(const TrialRecord&) const = default;
};

struct EvalRecord {
  long trial = 0;
  std::vector<double> success;  // per goal
  bool operator==(const EvalRecord&) const = default;
};

struct RunResult {
  std::vector<TrialRecord> trials;
  std::vector<EvalRecord> evals;
  SelectorValues selector;
  CompetenceTracker tracker;
  Skills skills;
  std::vector<std::optional<long>> trials_to_criterion;  // per goal
};

// The agent-environment loop, one instance per run. All trial-pipeline
// randomness comes from one master stream seeded with the run seed, with a
// fixed draw order per trial:
//
//   1. context sampling on epoch start (one draw per context bit)
//   2. goal selection (one draw)
//   3. attempt noise (Abstract: one draw; ActorCritic explore: two draws)
//
// Evaluations draw from per-evaluation substreams derived from the run seed,
// so they never perturb the trial stream.
class TrialLoop {
 public:
  explicit TrialLoop(const ExperimentConfig& config);

  // Executes one trial: observe, select, attempt, apply the outcome, record
  // competence, pay the intrinsic reward to the selector, train the skill
  // (skipped when the precondition was unmet), then close the epoch if this
  // was its last trial.
  TrialRecord run_trial();

  // Per-goal exploit success rates; learning state is untouched.
  EvalRecord evaluate();

  const ExperimentConfig& config() const { return config_; }
  const EnvState& state() const { return state_; }
  const SelectorValues& selector() const { return selector_; }
  const CompetenceTracker& tracker() const { return tracker_; }
  const Skills& skills() const { return skills_; }
  long trials_done() const { return trial_; }
  long epoch() const { return epoch_; }

  RunResult take_result(std::vector<TrialRecord> trials, std::vector<EvalRecord> evals) &&;

 private:
  StateKey observed_key() const;
  StateKey selector_key(StateKey observed) const;

  ExperimentConfig config_;
  RandomStream rng_;
  EnvState state_;
  bool needs_reset_ = true;
  long trial_ = 0;
  long epoch_ = 0;
  int trial_in_epoch_ = 0;
  std::uint64_t evals_done_ = 0;
  SelectorValues selector_;
  CompetenceTracker tracker_;
  Skills skills_;
};

// Runs total_trials trials with evaluations every eval_interval trials
// (plus one final evaluation); deterministic given the config.
RunResult run_experiment(const ExperimentConfig& config);

std::vector<std::optional<long>> compute_criteria(const std::vector<EvalRecord>& evals,
                                                  int n_goals,
                                                  double threshold = kCriterionThreshold);

struct AggregatePoint {
  long trial = 0;
  std::vector<double> median, q25, q75;  // per goal
  bool operator==(const AggregatePoint&) const = default;
};

struct Aggregate {
  std::vector<std::uint64_t> seeds;
  std::vector<AggregatePoint> points;
  std::vector<std::vector<std::optional<long>>> criteria;  // [seed][goal]
  bool operator==(const Aggregate&) const = default;
};

// Independent runs over the seed list, optionally on several threads. The
// aggregation is a deterministic reduction in seed-list order, so the result
// does not depend on jobs or completion order. on_run, when given, is called
// once per finished run, possibly from worker threads.
Aggregate replicate(
    ExperimentConfig base, std::span<const std::uint64_t> seeds, int jobs = 1,
    const std::function<void(std::size_t, const RunResult&)>& on_run = {});

// Linear-interpolation quantile of the values (the "type 7" convention).
double quantile(std::vector<double> values, double q);

// Median where unreached entries count as +infinity; nullopt when the median
// itself is unreached.
std::optional<double> median_or_unreached(std::vector<std::optional<double>> values);

}  // namespace grail
