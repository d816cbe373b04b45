#include "grail/io.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "grail/format.hpp"

namespace grail {
namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  for (;;) {
    auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

[[noreturn]] void fail(const std::string& what, long line_no) {
  throw SchemaError(what + " at line " + std::to_string(line_no));
}

template <typename T>
T parse_number(const std::string& field, long line_no) {
  T value{};
  auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size())
    fail("malformed number \"" + field + "\"", line_no);
  return value;
}

bool parse_bool(const std::string& field, long line_no) {
  if (field == "0") return false;
  if (field == "1") return true;
  fail("expected 0 or 1, got \"" + field + "\"", line_no);
}

// Reads a non-empty line, tolerating a trailing \r and a final unterminated
// line. Returns false on clean end of input.
bool next_line(std::istream& in, std::string& line, long& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) return true;
  }
  return false;
}

void expect_header(std::istream& in, const std::string& expected,
                   long& line_no) {
  std::string line;
  if (!next_line(in, line, line_no)) fail("missing header", line_no + 1);
  if (line != expected)
    fail("expected header \"" + expected + "\", got \"" + line + "\"",
         line_no);
}

// Parses a header of the shape prefix,<stem>_0...,<stem>_{n-1}... where each
// goal contributes `per_goal` columns with the given suffixes. Returns n.
int parse_goal_header(const std::string& line,
                      std::span<const std::string> suffixes, long line_no) {
  auto fields = split_fields(line);
  if (fields.empty() || fields[0] != "trial")
    fail("expected header starting with \"trial\", got \"" + line + "\"",
         line_no);
  auto per_goal = static_cast<long>(suffixes.size());
  if ((static_cast<long>(fields.size()) - 1) % per_goal != 0 ||
      fields.size() < 2)
    fail("malformed header \"" + line + "\"", line_no);
  int n_goals = static_cast<int>((fields.size() - 1) / per_goal);
  for (int g = 0; g < n_goals; ++g)
    for (long s = 0; s < per_goal; ++s) {
      std::string want = "goal_" + std::to_string(g) + suffixes[s];
      const std::string& got = fields[1 + g * per_goal + s];
      if (got != want)
        fail("expected column \"" + want + "\", got \"" + got + "\"", line_no);
    }
  return n_goals;
}

}  // namespace

void write_trials_csv(std::ostream& out, std::span<const TrialRecord> trials) {
  out << "trial,epoch,key_before,goal,reached,achieved,reward,key_after\n";
  for (const auto& t : trials)
    out << t.trial << ',' << t.epoch << ',' << t.key_before << ',' << t.goal
        << ',' << int(t.reached) << ',' << int(t.achieved) << ','
        << format_double(t.reward) << ',' << t.key_after << '\n';
}

std::vector<TrialRecord> read_trials_csv(std::istream& in) {
  long line_no = 0;
  expect_header(in, "trial,epoch,key_before,goal,reached,achieved,reward,key_after",
                line_no);
  std::vector<TrialRecord> trials;
  std::string line;
  while (next_line(in, line, line_no)) {
    auto fields = split_fields(line);
    if (fields.size() != 8) fail("expected 8 fields", line_no);
    TrialRecord t;
    t.trial = parse_number<long>(fields[0], line_no);
    t.epoch = parse_number<long>(fields[1], line_no);
    t.key_before = parse_number<StateKey>(fields[2], line_no);
    t.goal = parse_number<int>(fields[3], line_no);
    t.reached = parse_bool(fields[4], line_no);
    t.achieved = parse_bool(fields[5], line_no);
    t.reward = parse_number<double>(fields[6], line_no);
    t.key_after = parse_number<StateKey>(fields[7], line_no);
    trials.push_back(t);
  }
  return trials;
}

void write_evals_csv(std::ostream& out, int n_goals,
                     std::span<const EvalRecord> evals) {
  out << "trial";
  for (int g = 0; g < n_goals; ++g) out << ",goal_" << g;
  out << '\n';
  for (const auto& e : evals) {
    out << e.trial;
    for (double s : e.success) out << ',' << format_double(s);
    out << '\n';
  }
}

std::vector<EvalRecord> read_evals_csv(std::istream& in) {
  long line_no = 0;
  std::string line;
  if (!next_line(in, line, line_no)) fail("missing header", 1);
  const std::string suffixes[] = {""};
  int n_goals = parse_goal_header(line, suffixes, line_no);
  std::vector<EvalRecord> evals;
  while (next_line(in, line, line_no)) {
    auto fields = split_fields(line);
    if (static_cast<int>(fields.size()) != 1 + n_goals)
      fail("expected " + std::to_string(1 + n_goals) + " fields", line_no);
    EvalRecord e;
    e.trial = parse_number<long>(fields[0], line_no);
    for (int g = 0; g < n_goals; ++g)
      e.success.push_back(parse_number<double>(fields[1 + g], line_no));
    evals.push_back(std::move(e));
  }
  return evals;
}

void write_values_csv(std::ostream& out, const SelectorValues& values) {
  values.dump_csv(out);
}

void write_summary_csv(std::ostream& out,
                       std::span<const std::optional<long>> criteria) {
  out << "goal,trials_to_criterion\n";
  for (std::size_t g = 0; g < criteria.size(); ++g)
    out << goal_name(static_cast<int>(g)) << ','
        << (criteria[g] ? *criteria[g] : -1) << '\n';
}

std::vector<std::optional<long>> read_summary_csv(std::istream& in) {
  long line_no = 0;
  expect_header(in, "goal,trials_to_criterion", line_no);
  std::vector<std::optional<long>> criteria;
  std::string line;
  while (next_line(in, line, line_no)) {
    auto fields = split_fields(line);
    if (fields.size() != 2) fail("expected 2 fields", line_no);
    auto want = goal_name(static_cast<int>(criteria.size()));
    if (fields[0] != want)
      fail("expected goal \"" + want + "\", got \"" + fields[0] + "\"",
           line_no);
    long value = parse_number<long>(fields[1], line_no);
    if (value < -1) fail("negative trial count", line_no);
    criteria.push_back(value < 0 ? std::nullopt : std::optional<long>(value));
  }
  return criteria;
}

void write_aggregate_csv(std::ostream& out,
                         std::span<const AggregatePoint> points) {
  out << "trial";
  int n_goals = points.empty() ? 0 : static_cast<int>(points[0].median.size());
  for (int g = 0; g < n_goals; ++g)
    out << ",goal_" << g << "_median,goal_" << g << "_q25,goal_" << g
        << "_q75";
  out << '\n';
  for (const auto& p : points) {
    out << p.trial;
    for (int g = 0; g < n_goals; ++g)
      out << ',' << format_double(p.median[g]) << ','
          << format_double(p.q25[g]) << ',' << format_double(p.q75[g]);
    out << '\n';
  }
}

std::vector<AggregatePoint> read_aggregate_csv(std::istream& in) {
  long line_no = 0;
  std::string line;
  if (!next_line(in, line, line_no)) fail("missing header", 1);
  const std::string suffixes[] = {"_median", "_q25", "_q75"};
  int n_goals = parse_goal_header(line, suffixes, line_no);
  std::vector<AggregatePoint> points;
  while (next_line(in, line, line_no)) {
    auto fields = split_fields(line);
    if (static_cast<int>(fields.size()) != 1 + 3 * n_goals)
      fail("expected " + std::to_string(1 + 3 * n_goals) + " fields", line_no);
    AggregatePoint p;
    p.trial = parse_number<long>(fields[0], line_no);
    for (int g = 0; g < n_goals; ++g) {
      p.median.push_back(parse_number<double>(fields[1 + 3 * g], line_no));
      p.q25.push_back(parse_number<double>(fields[2 + 3 * g], line_no));
      p.q75.push_back(parse_number<double>(fields[3 + 3 * g], line_no));
    }
    points.push_back(std::move(p));
  }
  return points;
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& contents) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << contents;
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace grail
