#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "grail/experiment.hpp"

namespace grail {

// Raised by the CSV readers when a header or row does not match the
// documented schema. The message names the offending line.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// trial,epoch,key_before,goal,reached,achieved,reward,key_after
void write_trials_csv(std::ostream& out, std::span<const TrialRecord> trials);
std::vector<TrialRecord> read_trials_csv(std::istream& in);

// trial,goal_0,...,goal_{n-1}
void write_evals_csv(std::ostream& out, int n_goals,
                     std::span<const EvalRecord> evals);
std::vector<EvalRecord> read_evals_csv(std::istream& in);

// kind,key,goal,value (selector dump)
void write_values_csv(std::ostream& out, const SelectorValues& values);

// goal,trials_to_criterion with -1 for a criterion that was never met
void write_summary_csv(std::ostream& out,
                       std::span<const std::optional<long>> criteria);
std::vector<std::optional<long>> read_summary_csv(std::istream& in);

// trial,goal_0_median,goal_0_q25,goal_0_q75,...
void write_aggregate_csv(std::ostream& out,
                         std::span<const AggregatePoint> points);
std::vector<AggregatePoint> read_aggregate_csv(std::istream& in);

// Creates parent directories as needed; throws std::runtime_error on I/O
// failure.
void write_text_file(const std::filesystem::path& path,
                     const std::string& contents);

}  // namespace grail
