#include "grail/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

namespace grail {

namespace {
constexpr std::uint64_t kEvalStreamTag = 0x4556414Cull;  // "EVAL"

void check(bool ok, const char* msg) {
  if (!ok) throw ConfigError(msg);
}
}  // namespace

void ExperimentConfig::validate() const {
  world.validate();
  // every goal must admit a satisfying state
  for (GoalId g = 0; g < world.n_goals; ++g) satisfying_state(g, world);

  check(total_trials >= 1, "total_trials must be >= 1");
  check(eval_interval >= 1, "eval_interval must be >= 1");
  check(eval_attempts >= 1, "eval_attempts must be >= 1");

  check(selector.alpha_v > 0.0 && selector.alpha_v <= 1.0, "selector.alpha_v must be in (0, 1]");
  check(selector.alpha_q > 0.0 && selector.alpha_q <= 1.0, "selector.alpha_q must be in (0, 1]");
  check(selector.gamma >= 0.0 && selector.gamma < 1.0, "selector.gamma must be in [0, 1)");
  check(selector.tau > 0.0, "selector.tau must be > 0");
  check(selector.epsilon_floor >= 0.0 && selector.epsilon_floor < 1.0,
        "selector.epsilon_floor must be in [0, 1)");

  check(tracker.alpha_fast > 0.0 && tracker.alpha_fast < 1.0,
        "tracker.alpha_fast must be in (0, 1)");
  check(tracker.alpha_slow > 0.0 && tracker.alpha_slow < 1.0,
        "tracker.alpha_slow must be in (0, 1)");
  check(tracker.alpha_fast > tracker.alpha_slow,
        "tracker.alpha_fast must exceed tracker.alpha_slow");

  if (backend_kind == SkillBackendKind::Abstract) {
    const auto& a = abstract_skills;
    check(a.p0 >= 0.0 && a.p0 <= a.p_max && a.p_max < 1.0,
          "abstract skills require 0 <= p0 <= p_max < 1");
    check(a.eta > 0.0 && a.eta < 1.0, "abstract skills require eta in (0, 1)");
  } else {
    const auto& a = actor_critic;
    check(a.sigma > 0.0, "actor-critic sigma must be > 0");
    check(a.alpha_actor > 0.0 && a.alpha_actor <= 1.0,
          "actor-critic alpha_actor must be in (0, 1]");
    check(a.alpha_critic > 0.0 && a.alpha_critic <= 1.0,
          "actor-critic alpha_critic must be in (0, 1]");
    check(a.init_offset >= 0.0, "actor-critic init_offset must be >= 0");
  }
}

Skills ExperimentConfig::make_skills() const {
  if (backend_kind == SkillBackendKind::Abstract)
    return AbstractSkills::make(world.n_goals, abstract_skills);
  return ActorCriticSkills::make(world, actor_critic);
}

TrialLoop::TrialLoop(const ExperimentConfig& config)
    : config_(config),
      rng_(config.seed),
      selector_(config.selector_kind, config.world.n_goals),
      tracker_(config.tracker),
      skills_(config.make_skills()) {}

StateKey TrialLoop::observed_key() const {
  return state_key(state_, config_.observation_mode, config_.world);
}

StateKey TrialLoop::selector_key(StateKey observed) const {
  // GRAIL's goal selector is state-blind; it and its competence statistics
  // live under one global key.
  return config_.selector_kind == SelectorKind::Grail ? 0 : observed;
}

TrialRecord TrialLoop::run_trial() {
  if (needs_reset_) {
    state_ = reset(config_.world, rng_);
    needs_reset_ = false;
  }

  TrialRecord record;
  record.trial = trial_;
  record.epoch = epoch_;
  record.key_before = observed_key();

  const StateKey key = selector_key(record.key_before);
  const GoalId goal = select(selector_, key, config_.selector, rng_);
  const bool gated = preconditions_met(state_, goal, config_.world);
  const AttemptResult tried =
      attempt(skills_, goal, AttemptMode::Explore, config_.world, rng_);
  const Outcome outcome = apply_outcome(state_, goal, tried.reached, config_.world);
  state_ = outcome.state;

  tracker_.record(key, goal, outcome.achieved);
  const double reward = tracker_.intrinsic_reward(key, goal);

  const bool epoch_ends = trial_in_epoch_ + 1 >= config_.world.trials_per_epoch;
  if (config_.selector_kind == SelectorKind::MGrail) {
    // Epoch boundaries terminate the selection episode: the post-reset state
    // is independent of this action, so there is nothing to bootstrap from.
    std::optional<StateKey> next_key;
    if (!epoch_ends) next_key = selector_key(observed_key());
    update_q(selector_, key, goal, reward, next_key, config_.selector);
  } else {
    update_bandit(selector_, key, goal, reward, config_.selector);
  }

  // A trial whose precondition was unmet cannot produce the achievement
  // signal the experts learn from, so the skill is left untouched.
  if (gated) train(skills_, goal, tried.action, outcome.achieved);

  record.goal = goal;
  record.reached = tried.reached;
  record.achieved = outcome.achieved;
  record.reward = reward;
  record.key_after = observed_key();

  ++trial_;
  if (epoch_ends) {
    ++epoch_;
    trial_in_epoch_ = 0;
    needs_reset_ = true;
  } else {
    ++trial_in_epoch_;
  }
  return record;
}

EvalRecord TrialLoop::evaluate() {
  RandomStream eval_rng =
      RandomStream::substream(config_.seed, kEvalStreamTag, evals_done_++);
  EvalRecord record;
  record.trial = trial_;
  record.success.resize(config_.world.n_goals);
  for (GoalId g = 0; g < config_.world.n_goals; ++g) {
    record.success[g] =
        competence_probe(skills_, g, config_.world, eval_rng, config_.eval_attempts);
  }
  return record;
}

RunResult TrialLoop::take_result(std::vector<TrialRecord> trials,
                                 std::vector<EvalRecord> evals) && {
  RunResult result;
  result.trials_to_criterion = compute_criteria(evals, config_.world.n_goals);
  result.trials = std::move(trials);
  result.evals = std::move(evals);
  result.selector = std::move(selector_);
  result.tracker = std::move(tracker_);
  result.skills = std::move(skills_);
  return result;
}

RunResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  TrialLoop loop(config);

  std::vector<TrialRecord> trials;
  trials.reserve(config.total_trials);
  std::vector<EvalRecord> evals;

  for (long t = 0; t < config.total_trials; ++t) {
    if (t % config.eval_interval == 0) evals.push_back(loop.evaluate());
    trials.push_back(loop.run_trial());
  }
  evals.push_back(loop.evaluate());

  return std::move(loop).take_result(std::move(trials), std::move(evals));
}

std::vector<std::optional<long>> compute_criteria(const std::vector<EvalRecord>& evals,
                                                  int n_goals, double threshold) {
  std::vector<std::optional<long>> criteria(n_goals);
  for (const EvalRecord& eval : evals) {
    for (GoalId g = 0; g < n_goals; ++g) {
      if (!criteria[g] && eval.success[g] >= threshold) criteria[g] = eval.trial;
    }
  }
  return criteria;
}

Aggregate replicate(ExperimentConfig base, std::span<const std::uint64_t> seeds,
                    int jobs, const std::function<void(std::size_t, const RunResult&)>& on_run) {
  if (seeds.empty()) throw ConfigError("replicate requires at least one seed");
  if (jobs < 1) jobs = 1;
  jobs = std::min<int>(jobs, static_cast<int>(seeds.size()));

  std::vector<RunResult> results(seeds.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= seeds.size()) return;
      try {
        ExperimentConfig config = base;
        config.seed = seeds[i];
        results[i] = run_experiment(config);
        if (on_run) on_run(i, results[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  Aggregate aggregate;
  aggregate.seeds.assign(seeds.begin(), seeds.end());
  const std::size_t n_points = results.front().evals.size();
  const int n_goals = base.world.n_goals;

  aggregate.points.resize(n_points);
  std::vector<double> sample(seeds.size());
  for (std::size_t e = 0; e < n_points; ++e) {
    AggregatePoint& point = aggregate.points[e];
    point.trial = results.front().evals[e].trial;
    point.median.resize(n_goals);
    point.q25.resize(n_goals);
    point.q75.resize(n_goals);
    for (GoalId g = 0; g < n_goals; ++g) {
      for (std::size_t s = 0; s < seeds.size(); ++s)
        sample[s] = results[s].evals[e].success[g];
      point.q25[g] = quantile(sample, 0.25);
      point.median[g] = quantile(sample, 0.5);
      point.q75[g] = quantile(sample, 0.75);
    }
  }

  aggregate.criteria.reserve(seeds.size());
  for (const RunResult& r : results) aggregate.criteria.push_back(r.trials_to_criterion);
  return aggregate;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  q = std::clamp(q, 0.0, 1.0);
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(h));
  return values[lo] + (h - lo) * (values[hi] - values[lo]);
}

std::optional<double> median_or_unreached(std::vector<std::optional<double>> values) {
  if (values.empty()) return std::nullopt;
  std::vector<double> raw;
  raw.reserve(values.size());
  const double inf = std::numeric_limits<double>::infinity();
  for (const auto& v : values) raw.push_back(v ? *v : inf);
  std::sort(raw.begin(), raw.end());
  const double h = (static_cast<double>(raw.size()) - 1.0) * 0.5;
  const double lo = raw[static_cast<std::size_t>(std::floor(h))];
  const double hi = raw[static_cast<std::size_t>(std::ceil(h))];
  if (std::isinf(lo) || std::isinf(hi)) return std::nullopt;
  return lo + (h - std::floor(h)) * (hi - lo);
}

}  // namespace grail
