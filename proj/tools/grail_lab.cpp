#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "grail/config_io.hpp"
#include "grail/experiment.hpp"
#include "grail/format.hpp"
#include "grail/io.hpp"

namespace fs = std::filesystem;

namespace {

struct SourceOpts {
  std::string preset;
  std::string config_path;
  std::string selector;
  std::string backend;
  std::string out;
  std::uint64_t seed = 0;
  long eval_interval = 0;
  CLI::Option* preset_opt = nullptr;
  CLI::Option* config_opt = nullptr;
  CLI::Option* selector_opt = nullptr;
  CLI::Option* backend_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* eval_opt = nullptr;
};

void add_source_options(CLI::App* cmd, SourceOpts& o, bool with_seed) {
  o.preset_opt = cmd->add_option("--preset", o.preset,
                                 "Compiled-in preset (see `presets`)");
  o.config_opt = cmd->add_option("--config", o.config_path, "JSON config file");
  o.selector_opt = cmd->add_option("--selector", o.selector,
                                   "Override: grail, c-grail, or m-grail");
  o.backend_opt = cmd->add_option("--backend", o.backend,
                                  "Override: abstract or actor-critic");
  o.eval_opt = cmd->add_option("--eval-interval", o.eval_interval,
                               "Override: trials between evaluations");
  if (with_seed) o.seed_opt = cmd->add_option("--seed", o.seed, "Override: run seed");
  cmd->add_option("--out", o.out,
                  "Output directory (default: $GRAIL_LAB_OUT, else ./out)");
}

grail::ExperimentConfig resolve_config(const SourceOpts& o) {
  if ((o.preset_opt->count() > 0) == (o.config_opt->count() > 0))
    throw grail::ConfigError("exactly one of --preset or --config is required");
  grail::ExperimentConfig config;
  if (o.preset_opt->count() > 0) {
    config = grail::make_preset(o.preset);
  } else {
    std::ifstream in(o.config_path, std::ios::binary);
    if (!in)
      throw std::runtime_error("cannot read config file " + o.config_path);
    std::ostringstream text;
    text << in.rdbuf();
    config = grail::config_from_json_text(text.str());
  }
  if (o.backend_opt->count() > 0) {
    auto kind = grail::parse_backend_kind(o.backend);
    // Keep the probe count in step with the backend unless it was tuned away
    // from the default.
    if (kind != config.backend_kind &&
        config.eval_attempts == grail::default_eval_attempts(config.backend_kind))
      config.eval_attempts = grail::default_eval_attempts(kind);
    config.backend_kind = kind;
  }
  if (o.selector_opt->count() > 0)
    config.selector_kind = grail::parse_selector_kind(o.selector);
  if (o.seed_opt != nullptr && o.seed_opt->count() > 0) config.seed = o.seed;
  if (o.eval_opt->count() > 0)
    config.eval_interval = static_cast<int>(o.eval_interval);
  config.validate();
  return config;
}

fs::path resolve_out(const SourceOpts& o) {
  if (!o.out.empty()) return o.out;
  if (const char* env = std::getenv("GRAIL_LAB_OUT"); env != nullptr && *env != '\0')
    return env;
  return "out";
}

void write_run_outputs(const fs::path& dir, const grail::ExperimentConfig& config,
                       const grail::RunResult& result) {
  std::ostringstream trials;
  grail::write_trials_csv(trials, result.trials);
  grail::write_text_file(dir / "trials.csv", trials.str());

  std::ostringstream evals;
  grail::write_evals_csv(evals, config.world.n_goals, result.evals);
  grail::write_text_file(dir / "evals.csv", evals.str());

  std::ostringstream values;
  grail::write_values_csv(values, result.selector);
  grail::write_text_file(dir / "values.csv", values.str());

  std::ostringstream summary;
  grail::write_summary_csv(summary, result.trials_to_criterion);
  grail::write_text_file(dir / "summary.csv", summary.str());

  grail::write_text_file(dir / "config.resolved.json",
                         grail::config_to_json_text(config));
}

void print_criteria_table(std::ostream& out,
                          std::span<const std::optional<long>> criteria) {
  out << "goal  trials_to_criterion\n";
  for (std::size_t g = 0; g < criteria.size(); ++g) {
    out << std::left << std::setw(6) << grail::goal_name(static_cast<int>(g))
        << std::right << std::setw(19);
    if (criteria[g])
      out << *criteria[g];
    else
      out << "unreached";
    out << '\n';
  }
}

std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
  auto parse_one = [&](const std::string& field) {
    std::uint64_t value = 0;
    auto [ptr, ec] =
        std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
      throw grail::ConfigError("--seeds: malformed value \"" + field + "\"");
    return value;
  };
  std::vector<std::uint64_t> seeds;
  if (spec.find(',') == std::string::npos) {
    std::uint64_t n = parse_one(spec);
    if (n < 1) throw grail::ConfigError("--seeds: need at least one seed");
    for (std::uint64_t s = 1; s <= n; ++s) seeds.push_back(s);
    return seeds;
  }
  std::string::size_type start = 0;
  for (;;) {
    auto comma = spec.find(',', start);
    seeds.push_back(parse_one(spec.substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return seeds;
}

int cmd_run(const SourceOpts& o) {
  auto config = resolve_config(o);
  auto out_dir = resolve_out(o);
  auto result = grail::run_experiment(config);
  write_run_outputs(out_dir, config, result);
  print_criteria_table(std::cout, result.trials_to_criterion);
  std::cout << "outputs: " << out_dir.string() << '\n';
  return 0;
}

int cmd_replicate(const SourceOpts& o, const std::string& seeds_spec, int jobs) {
  auto config = resolve_config(o);
  auto seeds = parse_seeds(seeds_spec);
  auto out_dir = resolve_out(o);
  if (jobs <= 0)
    jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  fs::create_directories(out_dir);
  auto on_run = [&](std::size_t i, const grail::RunResult& result) {
    auto run_config = config;
    run_config.seed = seeds[i];
    write_run_outputs(out_dir / ("seed_" + std::to_string(seeds[i])),
                      run_config, result);
  };
  auto aggregate = grail::replicate(config, seeds, jobs, on_run);

  std::ostringstream agg;
  grail::write_aggregate_csv(agg, aggregate.points);
  grail::write_text_file(out_dir / "aggregate.csv", agg.str());
  grail::write_text_file(out_dir / "config.resolved.json",
                         grail::config_to_json_text(config));

  std::vector<std::optional<long>> medians;
  for (int g = 0; g < config.world.n_goals; ++g) {
    std::vector<std::optional<double>> per_seed;
    for (const auto& run : aggregate.criteria)
      per_seed.push_back(run[g] ? std::optional<double>(*run[g]) : std::nullopt);
    auto m = grail::median_or_unreached(std::move(per_seed));
    medians.push_back(m ? std::optional<long>(std::lround(*m)) : std::nullopt);
  }
  std::cout << "median over " << seeds.size() << " seeds\n";
  print_criteria_table(std::cout, medians);
  std::cout << "outputs: " << out_dir.string() << '\n';
  return 0;
}

int cmd_presets() {
  for (const auto& name : grail::preset_names())
    std::cout << name << "  " << grail::describe_preset(name) << '\n';
  return 0;
}

template <typename Reader>
auto read_csv_file(const fs::path& path, Reader reader) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return reader(in);
}

int cmd_summarize(const std::string& dir, const std::string& format) {
  fs::path d = dir;
  struct Row {
    std::string goal;
    std::optional<long> criterion;
    double final_success = 0.0;
  };
  std::vector<Row> rows;
  if (fs::exists(d / "summary.csv")) {
    auto criteria = read_csv_file(d / "summary.csv", grail::read_summary_csv);
    auto evals = read_csv_file(d / "evals.csv", grail::read_evals_csv);
    if (evals.empty()) throw grail::SchemaError("evals.csv has no rows");
    if (evals.back().success.size() != criteria.size())
      throw grail::SchemaError("summary.csv and evals.csv disagree on goal count");
    for (std::size_t g = 0; g < criteria.size(); ++g)
      rows.push_back({grail::goal_name(static_cast<int>(g)), criteria[g],
                      evals.back().success[g]});
  } else if (fs::exists(d / "aggregate.csv")) {
    auto points = read_csv_file(d / "aggregate.csv", grail::read_aggregate_csv);
    if (points.empty()) throw grail::SchemaError("aggregate.csv has no rows");
    for (std::size_t g = 0; g < points[0].median.size(); ++g) {
      Row row{grail::goal_name(static_cast<int>(g)), std::nullopt,
              points.back().median[g]};
      for (const auto& p : points)
        if (p.median[g] >= grail::kCriterionThreshold) {
          row.criterion = p.trial;
          break;
        }
      rows.push_back(std::move(row));
    }
  } else {
    throw grail::SchemaError("no summary.csv or aggregate.csv in " + d.string());
  }
  if (format == "csv") {
    std::cout << "goal,trials_to_criterion,final_success\n";
    for (const auto& row : rows)
      std::cout << row.goal << ',' << (row.criterion ? *row.criterion : -1)
                << ',' << grail::format_double(row.final_success) << '\n';
  } else {
    std::cout << "goal  trials_to_criterion  final_success\n";
    for (const auto& row : rows) {
      std::cout << std::left << std::setw(6) << row.goal << std::right
                << std::setw(19);
      if (row.criterion)
        std::cout << *row.criterion;
      else
        std::cout << "unreached";
      std::cout << std::setw(15) << grail::format_double(row.final_success)
                << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Goal-selection laboratory: GRAIL, C-GRAIL, and M-GRAIL on "
               "configurable sphere-worlds"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run one experiment and write its CSVs");
  SourceOpts run_opts;
  add_source_options(run, run_opts, true);

  auto* replicate =
      app.add_subcommand("replicate", "Run one configuration over many seeds");
  SourceOpts rep_opts;
  add_source_options(replicate, rep_opts, false);
  std::string seeds_spec;
  int jobs = 0;
  replicate->add_option("--seeds", seeds_spec,
                        "Seed count N (runs seeds 1..N) or comma-separated list")
      ->required();
  replicate->add_option("--jobs", jobs, "Parallel workers (default: all cores)");

  auto* presets = app.add_subcommand("presets", "List compiled-in presets");

  auto* summarize =
      app.add_subcommand("summarize", "Summarize a run or replicate directory");
  std::string summarize_dir;
  std::string format = "text";
  summarize->add_option("dir", summarize_dir, "Run or replicate output directory")
      ->required();
  summarize->add_option("--format", format, "text or csv")
      ->check(CLI::IsMember({"text", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run->parsed()) return cmd_run(run_opts);
    if (replicate->parsed()) return cmd_replicate(rep_opts, seeds_spec, jobs);
    if (presets->parsed()) return cmd_presets();
    if (summarize->parsed()) return cmd_summarize(summarize_dir, format);
  } catch (const grail::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const grail::SchemaError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
