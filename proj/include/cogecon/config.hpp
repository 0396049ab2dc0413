#pragma once

// Flat `key = value` configuration covering every tunable of the environment,
// the generating agent, the tester and the analyzer.

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cogecon/agent.hpp"
#include "cogecon/error.hpp"
#include "cogecon/harness.hpp"
#include "cogecon/puck.hpp"

namespace cogecon {

struct Config {
  EnvParams env;
  Bounds bounds;
  AgentConfig agent;
  StopRule stop;
  TestConfig test;
  double resolution = 0.01;  // viability grid cell size
  std::uint64_t seed = 1;

  // Pushes the shared fields (seed, bounds) into the sub-configs.
  void sync() {
    agent.seed = seed;
    test.seed = seed;
    test.bounds = bounds;
  }

  void validate() const {
    env.validate();
    agent.validate();
    test.validate();
    if (!(resolution > 0)) throw InvalidConfig("resolution must be positive");
    if (!(bounds.x_lo <= bounds.x_hi && bounds.v_lo <= bounds.v_hi)) throw InvalidConfig("bounds inverted");
    if (!(agent.scale.x > 0 && agent.scale.v > 0)) throw InvalidConfig("scale must be positive");
  }
};

namespace detail {

using Field = std::variant<double*, std::uint64_t*, int*, bool*>;

struct Key {
  const char* name;
  Field field;
};

inline std::vector<Key> keys_of(Config& c) {
  return {
      {"seed", &c.seed},
      {"beta", &c.env.beta},
      {"g", &c.env.g},
      {"mass", &c.env.mass},
      {"dt", &c.env.dt},
      {"force", &c.env.force_mag},
      {"x_limit", &c.env.x_limit},
      {"fail_reward", &c.env.fail_reward},
      {"x_lo", &c.bounds.x_lo},
      {"x_hi", &c.bounds.x_hi},
      {"v_lo", &c.bounds.v_lo},
      {"v_hi", &c.bounds.v_hi},
      {"scale_x", &c.agent.scale.x},
      {"scale_v", &c.agent.scale.v},
      {"agent_gamma", &c.agent.learning.gamma},
      {"agent_alpha", &c.agent.learning.alpha_fixed},
      {"agent_min_updates", &c.agent.learning.min_updates},
      {"agent_enough_samples", &c.agent.learning.enough_samples},
      {"epsilon", &c.agent.criteria.epsilon},
      {"agent_delta", &c.agent.criteria.delta},
      {"max_steps", &c.agent.criteria.max_steps},
      {"fe_period", &c.agent.fe_period},
      {"merge_period", &c.agent.merge_period},
      {"repush_probability", &c.agent.repush_probability},
      {"stack_start_probability", &c.agent.stack_start_probability},
      {"consolidate_neighbors", &c.agent.consolidate_neighbors},
      {"freeze_representation", &c.agent.freeze_representation},
      {"max_total_steps", &c.stop.max_total_steps},
      {"max_trials", &c.stop.max_trials},
      {"success_steps", &c.stop.success_steps},
      {"gamma", &c.test.learning.gamma},
      {"alpha", &c.test.learning.alpha_fixed},
      {"min_updates", &c.test.learning.min_updates},
      {"enough_samples", &c.test.learning.enough_samples},
      {"delta", &c.test.delta},
      {"batch_size", &c.test.batch_size},
      {"trial_cap", &c.test.trial_cap},
      {"train_trial_cap", &c.test.train_trial_cap},
      {"measure_every_steps", &c.test.measure_every_steps},
      {"measure_every_trials", &c.test.measure_every_trials},
      {"runs", &c.test.runs},
      {"max_train_steps", &c.test.max_train_steps},
      {"threads", &c.test.threads},
      {"resolution", &c.resolution},
  };
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
bool parse_number(const std::string& text, T& out) {
  if constexpr (std::is_same_v<T, double>) {
    char* end = nullptr;
    out = std::strtod(text.c_str(), &end);
    return !text.empty() && end == text.c_str() + text.size() && std::isfinite(out);
  } else {
    const char* b = text.data();
    const char* e = b + text.size();
    auto [p, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && p == e;
  }
}

}  // namespace detail

// Sets one key; throws InvalidConfig for unknown keys or malformed values.
inline void set_key(Config& c, const std::string& key, const std::string& value) {
  for (auto& k : detail::keys_of(c)) {
    if (key != k.name) continue;
    const bool ok = std::visit(
        [&](auto* p) {
          using T = std::remove_pointer_t<decltype(p)>;
          if constexpr (std::is_same_v<T, bool>) {
            if (value == "true" || value == "1") return *p = true, true;
            if (value == "false" || value == "0") return *p = false, true;
            return false;
          } else {
            return detail::parse_number(value, *p);
          }
        },
        k.field);
    if (!ok) throw InvalidConfig("bad value for " + key + ": '" + value + "'");
    return;
  }
  throw InvalidConfig("unknown key '" + key + "'");
}

inline Config parse_config(std::istream& is) {
  Config c;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, "expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq)), value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError(lineno, "missing key");
    try {
      set_key(c, key, value);
    } catch (const InvalidConfig& e) {
      throw ParseError(lineno, e.what());
    }
  }
  c.sync();
  return c;
}

inline Config load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open config " + path);
  try {
    return parse_config(is);
  } catch (const ParseError& e) {
    throw ParseError(path, e.line(), e.detail());
  }
}

// Every key with its current value, in a form parse_config reads back.
inline void print_config(std::ostream& os, Config c) {
  for (auto& k : detail::keys_of(c)) {
    os << k.name << " = ";
    std::visit(
        [&](auto* p) {
          using T = std::remove_pointer_t<decltype(p)>;
          if constexpr (std::is_same_v<T, bool>) {
            os << (*p ? "true" : "false");
          } else {
            char buf[64];
            auto [end, ec] = std::to_chars(buf, buf + sizeof buf, *p);
            os << std::string_view(buf, static_cast<std::size_t>(end - buf));
          }
        },
        k.field);
    os << '\n';
  }
}

}  // namespace cogecon
