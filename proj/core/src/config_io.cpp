#include "grail/config_io.hpp"

#include <initializer_list>
#include <type_traits>
#include <utility>

#include <nlohmann/json.hpp>

namespace grail {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw ConfigError("config: " + where + ": " + what);
}

[[noreturn]] void bad_enum(const std::string& kind, const std::string& got,
                           std::initializer_list<const char*> valid) {
  std::string msg = "unknown " + kind + " \"" + got + "\"; valid: ";
  bool first = true;
  for (const char* v : valid) {
    if (!first) msg += ", ";
    msg += v;
    first = false;
  }
  throw ConfigError(msg);
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) bad(where, "expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed)
      if (it.key() == key) {
        known = true;
        break;
      }
    if (!known) bad(where, "unknown key \"" + it.key() + "\"");
  }
}

void read_field(const json& obj, const char* key, const std::string& where,
                double& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_number()) bad(where + "." + key, "expected a number");
  out = it->get<double>();
}

void read_field(const json& obj, const char* key, const std::string& where,
                bool& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_boolean()) bad(where + "." + key, "expected a boolean");
  out = it->get<bool>();
}

template <typename Int>
void read_int_field(const json& obj, const char* key, const std::string& where,
                    Int& out) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  if (!it->is_number_integer()) bad(where + "." + key, "expected an integer");
  if constexpr (std::is_unsigned_v<Int>) {
    if (!it->is_number_unsigned()) bad(where + "." + key, "expected a non-negative integer");
    out = static_cast<Int>(it->get<std::uint64_t>());
  } else {
    out = static_cast<Int>(it->get<std::int64_t>());
  }
}

void read_field(const json& obj, const char* key, const std::string& where,
                int& out) {
  read_int_field(obj, key, where, out);
}

void read_field(const json& obj, const char* key, const std::string& where,
                long& out) {
  read_int_field(obj, key, where, out);
}

void read_field(const json& obj, const char* key, const std::string& where,
                std::uint64_t& out) {
  read_int_field(obj, key, where, out);
}

std::string get_string(const json& obj, const char* key,
                       const std::string& where) {
  const auto& value = obj.at(key);
  if (!value.is_string()) bad(where + "." + key, "expected a string");
  return value.get<std::string>();
}

PreconditionRule parse_rule(const json& j, const std::string& where) {
  if (!j.is_object()) bad(where, "expected an object");
  if (!j.contains("type")) bad(where, "missing \"type\"");
  std::string type = get_string(j, "type", where);
  if (type == "always") {
    check_keys(j, where, {"type"});
    return PreconditionRule::always();
  }
  if (type == "context_bit") {
    check_keys(j, where, {"type", "bit", "required"});
    int bit = 0;
    bool required = true;
    read_field(j, "bit", where, bit);
    read_field(j, "required", where, required);
    return PreconditionRule::context_bit(bit, required);
  }
  if (type == "spheres_active") {
    check_keys(j, where, {"type", "spheres"});
    auto it = j.find("spheres");
    if (it == j.end() || !it->is_array()) bad(where, "expected a \"spheres\" array");
    std::vector<GoalId> spheres;
    for (const auto& s : *it) {
      if (!s.is_number_integer()) bad(where + ".spheres", "expected integers");
      spheres.push_back(s.get<int>());
    }
    return PreconditionRule::spheres_active(std::move(spheres));
  }
  bad_enum("precondition type", type, {"always", "context_bit", "spheres_active"});
}

ordered_json rule_to_json(const PreconditionRule& rule) {
  switch (rule.kind) {
    case PreconditionRule::Kind::Always:
      return {{"type", "always"}};
    case PreconditionRule::Kind::ContextBit:
      return {{"type", "context_bit"}, {"bit", rule.bit}, {"required", rule.required}};
    case PreconditionRule::Kind::SpheresActive:
      return {{"type", "spheres_active"}, {"spheres", rule.spheres}};
  }
  throw std::logic_error("unreachable precondition kind");
}

void parse_world(const json& j, WorldConfig& world) {
  check_keys(j, "world",
             {"n_goals", "n_context_bits", "context_on_probability",
              "preconditions", "sphere_positions", "reach_radius",
              "reset_mode", "trials_per_epoch"});
  read_field(j, "n_goals", "world", world.n_goals);
  read_field(j, "n_context_bits", "world", world.n_context_bits);
  read_field(j, "context_on_probability", "world", world.context_on_probability);
  read_field(j, "reach_radius", "world", world.reach_radius);
  read_field(j, "trials_per_epoch", "world", world.trials_per_epoch);
  if (j.contains("reset_mode"))
    world.reset_mode = parse_reset_mode(get_string(j, "reset_mode", "world"));
  if (auto it = j.find("preconditions"); it != j.end()) {
    if (!it->is_array()) bad("world.preconditions", "expected an array");
    world.preconditions.clear();
    for (std::size_t i = 0; i < it->size(); ++i)
      world.preconditions.push_back(parse_rule(
          (*it)[i], "world.preconditions[" + std::to_string(i) + "]"));
  }
  if (auto it = j.find("sphere_positions"); it != j.end()) {
    if (!it->is_array()) bad("world.sphere_positions", "expected an array");
    world.sphere_positions.clear();
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto& p = (*it)[i];
      std::string where = "world.sphere_positions[" + std::to_string(i) + "]";
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
        bad(where, "expected [x, y]");
      world.sphere_positions.push_back({p[0].get<double>(), p[1].get<double>()});
    }
  }
  if (world.sphere_positions.empty() && world.n_goals > 0)
    world.sphere_positions = unit_circle_positions(world.n_goals);
  if (world.preconditions.empty() && world.n_goals > 0)
    world.preconditions.assign(world.n_goals, PreconditionRule::always());
}

}  // namespace

std::string backend_kind_name(SkillBackendKind kind) {
  return kind == SkillBackendKind::Abstract ? "abstract" : "actor-critic";
}

std::string observation_mode_name(ObservationMode mode) {
  switch (mode) {
    case ObservationMode::ContextOnly: return "context_only";
    case ObservationMode::SpheresOnly: return "spheres_only";
    case ObservationMode::Full: return "full";
  }
  throw std::logic_error("unreachable observation mode");
}

std::string reset_mode_name(ResetMode mode) {
  return mode == ResetMode::PerTrial ? "per_trial" : "per_epoch";
}

SelectorKind parse_selector_kind(const std::string& name) {
  if (name == "grail") return SelectorKind::Grail;
  if (name == "c-grail") return SelectorKind::CGrail;
  if (name == "m-grail") return SelectorKind::MGrail;
  bad_enum("selector", name, {"grail", "c-grail", "m-grail"});
}

SkillBackendKind parse_backend_kind(const std::string& name) {
  if (name == "abstract") return SkillBackendKind::Abstract;
  if (name == "actor-critic") return SkillBackendKind::ActorCritic;
  bad_enum("backend", name, {"abstract", "actor-critic"});
}

ObservationMode parse_observation_mode(const std::string& name) {
  if (name == "context_only") return ObservationMode::ContextOnly;
  if (name == "spheres_only") return ObservationMode::SpheresOnly;
  if (name == "full") return ObservationMode::Full;
  bad_enum("observation mode", name, {"context_only", "spheres_only", "full"});
}

ResetMode parse_reset_mode(const std::string& name) {
  if (name == "per_trial") return ResetMode::PerTrial;
  if (name == "per_epoch") return ResetMode::PerEpoch;
  bad_enum("reset mode", name, {"per_trial", "per_epoch"});
}

int default_eval_attempts(SkillBackendKind kind) {
  return kind == SkillBackendKind::Abstract ? 33 : 1;
}

ExperimentConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  check_keys(j, "config",
             {"world", "selector", "selector_params", "backend",
              "abstract_skills", "actor_critic", "tracker",
              "observation_mode", "total_trials", "eval_interval",
              "eval_attempts", "seed"});
  ExperimentConfig config;
  if (j.contains("world")) parse_world(j.at("world"), config.world);
  if (j.contains("selector"))
    config.selector_kind = parse_selector_kind(get_string(j, "selector", "config"));
  if (j.contains("selector_params")) {
    const auto& s = j.at("selector_params");
    check_keys(s, "selector_params",
               {"alpha_v", "alpha_q", "gamma", "tau", "epsilon_floor"});
    read_field(s, "alpha_v", "selector_params", config.selector.alpha_v);
    read_field(s, "alpha_q", "selector_params", config.selector.alpha_q);
    read_field(s, "gamma", "selector_params", config.selector.gamma);
    read_field(s, "tau", "selector_params", config.selector.tau);
    read_field(s, "epsilon_floor", "selector_params", config.selector.epsilon_floor);
  }
  if (j.contains("backend"))
    config.backend_kind = parse_backend_kind(get_string(j, "backend", "config"));
  if (j.contains("abstract_skills")) {
    const auto& s = j.at("abstract_skills");
    check_keys(s, "abstract_skills", {"p0", "p_max", "eta"});
    read_field(s, "p0", "abstract_skills", config.abstract_skills.p0);
    read_field(s, "p_max", "abstract_skills", config.abstract_skills.p_max);
    read_field(s, "eta", "abstract_skills", config.abstract_skills.eta);
  }
  if (j.contains("actor_critic")) {
    const auto& s = j.at("actor_critic");
    check_keys(s, "actor_critic",
               {"sigma", "alpha_actor", "alpha_critic", "init_offset"});
    read_field(s, "sigma", "actor_critic", config.actor_critic.sigma);
    read_field(s, "alpha_actor", "actor_critic", config.actor_critic.alpha_actor);
    read_field(s, "alpha_critic", "actor_critic", config.actor_critic.alpha_critic);
    read_field(s, "init_offset", "actor_critic", config.actor_critic.init_offset);
  }
  if (j.contains("tracker")) {
    const auto& s = j.at("tracker");
    check_keys(s, "tracker", {"alpha_fast", "alpha_slow", "clamp_negative"});
    read_field(s, "alpha_fast", "tracker", config.tracker.alpha_fast);
    read_field(s, "alpha_slow", "tracker", config.tracker.alpha_slow);
    read_field(s, "clamp_negative", "tracker", config.tracker.clamp_negative);
  }
  if (j.contains("observation_mode"))
    config.observation_mode =
        parse_observation_mode(get_string(j, "observation_mode", "config"));
  read_field(j, "total_trials", "config", config.total_trials);
  read_field(j, "eval_interval", "config", config.eval_interval);
  read_field(j, "seed", "config", config.seed);
  if (j.contains("eval_attempts"))
    read_field(j, "eval_attempts", "config", config.eval_attempts);
  else
    config.eval_attempts = default_eval_attempts(config.backend_kind);
  return config;
}

std::string config_to_json_text(const ExperimentConfig& config) {
  ordered_json world{
      {"n_goals", config.world.n_goals},
      {"n_context_bits", config.world.n_context_bits},
      {"context_on_probability", config.world.context_on_probability},
      {"preconditions", ordered_json::array()},
      {"sphere_positions", ordered_json::array()},
      {"reach_radius", config.world.reach_radius},
      {"reset_mode", reset_mode_name(config.world.reset_mode)},
      {"trials_per_epoch", config.world.trials_per_epoch},
  };
  for (const auto& rule : config.world.preconditions)
    world["preconditions"].push_back(rule_to_json(rule));
  for (const auto& pos : config.world.sphere_positions)
    world["sphere_positions"].push_back({pos.x, pos.y});
  ordered_json j{
      {"world", std::move(world)},
      {"selector", selector_kind_name(config.selector_kind)},
      {"selector_params",
       {{"alpha_v", config.selector.alpha_v},
        {"alpha_q", config.selector.alpha_q},
        {"gamma", config.selector.gamma},
        {"tau", config.selector.tau},
        {"epsilon_floor", config.selector.epsilon_floor}}},
      {"backend", backend_kind_name(config.backend_kind)},
      {"abstract_skills",
       {{"p0", config.abstract_skills.p0},
        {"p_max", config.abstract_skills.p_max},
        {"eta", config.abstract_skills.eta}}},
      {"actor_critic",
       {{"sigma", config.actor_critic.sigma},
        {"alpha_actor", config.actor_critic.alpha_actor},
        {"alpha_critic", config.actor_critic.alpha_critic},
        {"init_offset", config.actor_critic.init_offset}}},
      {"tracker",
       {{"alpha_fast", config.tracker.alpha_fast},
        {"alpha_slow", config.tracker.alpha_slow},
        {"clamp_negative", config.tracker.clamp_negative}}},
      {"observation_mode", observation_mode_name(config.observation_mode)},
      {"total_trials", config.total_trials},
      {"eval_interval", config.eval_interval},
      {"eval_attempts", config.eval_attempts},
      {"seed", config.seed},
  };
  return j.dump(2) + "\n";
}

std::vector<std::string> preset_names() { return {"exp1", "exp2"}; }

ExperimentConfig make_preset(const std::string& name) {
  ExperimentConfig config;
  config.world.n_goals = 6;
  config.world.sphere_positions = unit_circle_positions(6);
  config.backend_kind = SkillBackendKind::Abstract;
  config.eval_interval = 50;
  config.eval_attempts = default_eval_attempts(config.backend_kind);
  config.seed = 1;
  if (name == "exp1") {
    config.world.n_context_bits = 1;
    config.world.context_on_probability = 0.5;
    for (GoalId g = 0; g < 6; ++g)
      config.world.preconditions.push_back(
          PreconditionRule::context_bit(0, g % 2 == 0));
    config.world.reset_mode = ResetMode::PerTrial;
    config.world.trials_per_epoch = 1;
    config.selector_kind = SelectorKind::CGrail;
    config.observation_mode = ObservationMode::ContextOnly;
    config.total_trials = 4000;
    return config;
  }
  if (name == "exp2") {
    config.world.n_context_bits = 0;
    config.world.preconditions = {
        PreconditionRule::spheres_active({2, 5}),  // a needs c and f on
        PreconditionRule::always(),                // b
        PreconditionRule::always(),                // c
        PreconditionRule::always(),                // d
        PreconditionRule::always(),                // e
        PreconditionRule::spheres_active({2}),     // f needs c on
    };
    config.world.reset_mode = ResetMode::PerEpoch;
    config.world.trials_per_epoch = 4;
    config.selector_kind = SelectorKind::MGrail;
    config.observation_mode = ObservationMode::SpheresOnly;
    config.total_trials = 6000;
    return config;
  }
  bad_enum("preset", name, {"exp1", "exp2"});
}

std::string describe_preset(const std::string& name) {
  if (name == "exp1")
    return "6 goals, one context bit gating odd/even goals, per-trial reset, "
           "4000 trials, default selector c-grail";
  if (name == "exp2")
    return "6 goals, activation chain c -> f -> a, per-epoch reset "
           "(4 trials/epoch), 6000 trials, default selector m-grail";
  bad_enum("preset", name, {"exp1", "exp2"});
}

}  // namespace grail
