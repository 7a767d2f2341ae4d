// Copyright 2026 The nlcg Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nlcg/run_config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string_view>

#include "json.hpp"
#include "nlcg/errors.hpp"
#include "nlcg/run_log.hpp"

namespace nlcg {

namespace {

using json = nlohmann::json;

[[noreturn]] void bad(std::string_view key, std::string_view why) {
  throw ConfigError("config key '" + std::string(key) + "': " + std::string(why));
}

double as_double(std::string_view key, const json& v) {
  if (!v.is_number()) bad(key, "expected a number");
  return v.get<double>();
}

std::uint64_t as_uint(std::string_view key, const json& v) {
  if (!v.is_number_integer()) bad(key, "expected an integer");
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  const auto i = v.get<std::int64_t>();
  if (i < 0) bad(key, "expected a non-negative integer");
  return static_cast<std::uint64_t>(i);
}

std::int64_t as_int(std::string_view key, const json& v) {
  if (!v.is_number_integer()) bad(key, "expected an integer");
  return v.get<std::int64_t>();
}

bool as_bool(std::string_view key, const json& v) {
  if (!v.is_boolean()) bad(key, "expected true or false");
  return v.get<bool>();
}

std::string as_string(std::string_view key, const json& v) {
  if (!v.is_string()) bad(key, "expected a string");
  return v.get<std::string>();
}

template <typename Enum, std::size_t N>
Enum as_enum(std::string_view key, const json& v,
             const std::array<std::pair<const char*, Enum>, N>& names) {
  const std::string s = as_string(key, v);
  for (const auto& [name, value] : names) {
    if (s == name) return value;
  }
  std::string allowed;
  for (const auto& [name, value] : names) {
    if (!allowed.empty()) allowed += ", ";
    allowed += name;
  }
  bad(key, "expected one of " + allowed);
}

template <typename Enum, std::size_t N>
const char* enum_name(Enum value,
                      const std::array<std::pair<const char*, Enum>, N>& names) {
  for (const auto& [name, v] : names) {
    if (v == value) return name;
  }
  return "";
}

constexpr std::array<std::pair<const char*, ScheduleMode>, 3> kScheduleNames{{
    {"default", ScheduleMode::default_rule},
    {"custom", ScheduleMode::custom},
    {"constant", ScheduleMode::constant},
}};

constexpr std::array<std::pair<const char*, LineSearchMode>, 3> kLineSearchNames{{
    {"auto", LineSearchMode::automatic},
    {"on", LineSearchMode::on},
    {"off", LineSearchMode::off},
}};

constexpr std::array<std::pair<const char*, Precision>, 2> kPrecisionNames{{
    {"float64", Precision::float64},
    {"float32", Precision::float32},
}};

struct Field {
  const char* key;
  std::function<void(RunConfig&, const json&)> read;
  std::function<json(const RunConfig&)> write;
};

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

json double_json(double v) {
  // JSON has no infinity; null stands for it.
  return std::isinf(v) ? json(nullptr) : json(v);
}

#define NLCG_DOUBLE(name, member)                                        \
  Field {                                                                \
    name, [](RunConfig& c, const json& v) { c.member = as_double(name, v); }, \
        [](const RunConfig& c) { return json(c.member); }                \
  }
#define NLCG_SIZE(name, member)                                           \
  Field {                                                                 \
    name,                                                                 \
        [](RunConfig& c, const json& v) {                                 \
          c.member = static_cast<decltype(c.member)>(as_uint(name, v));   \
        },                                                                \
        [](const RunConfig& c) { return json(c.member); }                 \
  }
#define NLCG_BOOL(name, member)                                           \
  Field {                                                                 \
    name, [](RunConfig& c, const json& v) { c.member = as_bool(name, v); }, \
        [](const RunConfig& c) { return json(c.member); }                 \
  }
#define NLCG_STRING(name, member)                                         \
  Field {                                                                 \
    name,                                                                 \
        [](RunConfig& c, const json& v) { c.member = as_string(name, v); }, \
        [](const RunConfig& c) { return json(c.member); }                 \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      NLCG_STRING("problem", problem.kind),
      NLCG_SIZE("dim", problem.dim),
      NLCG_DOUBLE("condition_number", problem.condition_number),
      NLCG_STRING("spectrum", problem.spectrum),
      NLCG_SIZE("quadratic_samples", problem.quadratic_samples),
      NLCG_DOUBLE("quadratic_noise", problem.quadratic_noise),
      NLCG_STRING("dataset", problem.dataset),
      NLCG_STRING("dataset_path", problem.dataset_path),
      NLCG_STRING("label_column", problem.label_column),
      NLCG_SIZE("samples", problem.samples),
      NLCG_SIZE("features", problem.features),
      Field{"classes",
            [](RunConfig& c, const json& v) {
              c.problem.classes = static_cast<int>(as_uint("classes", v));
            },
            [](const RunConfig& c) { return json(c.problem.classes); }},
      NLCG_DOUBLE("separation", problem.separation),
      NLCG_SIZE("test_samples", problem.test_samples),
      NLCG_SIZE("data_seed", problem.data_seed),
      Field{"hidden",
            [](RunConfig& c, const json& v) {
              if (!v.is_array()) bad("hidden", "expected an array of widths");
              c.problem.hidden.clear();
              for (const auto& w : v) {
                c.problem.hidden.push_back(
                    static_cast<std::size_t>(as_uint("hidden", w)));
              }
            },
            [](const RunConfig& c) { return json(c.problem.hidden); }},

      Field{"optimizer",
            [](RunConfig& c, const json& v) {
              c.optimizer = parse_optimizer_kind(as_string("optimizer", v));
            },
            [](const RunConfig& c) { return json(std::string(to_string(c.optimizer))); }},
      NLCG_DOUBLE("momentum", first_order.momentum),
      NLCG_DOUBLE("rms_decay", first_order.rms_decay),
      NLCG_DOUBLE("rms_epsilon", first_order.rms_epsilon),

      NLCG_SIZE("micro_batch_size", micro_batch_size),
      NLCG_SIZE("virtual_factor", virtual_factor),
      Field{"batch_size",
            [](RunConfig& c, const json& v) {
              if (v.is_null()) {
                c.batch_size.reset();
              } else {
                c.batch_size = static_cast<std::size_t>(as_uint("batch_size", v));
              }
            },
            [](const RunConfig& c) { return optional_json(c.batch_size); }},
      NLCG_SIZE("micro_batch_limit", micro_batch_limit),
      NLCG_DOUBLE("drop_fraction", drop_fraction),
      Field{"shuffle_seed",
            [](RunConfig& c, const json& v) {
              if (v.is_null()) {
                c.shuffle_seed.reset();
              } else {
                c.shuffle_seed = as_uint("shuffle_seed", v);
              }
            },
            [](const RunConfig& c) { return optional_json(c.shuffle_seed); }},
      NLCG_BOOL("allow_wraparound", allow_wraparound),

      Field{"schedule",
            [](RunConfig& c, const json& v) {
              c.schedule = as_enum("schedule", v, kScheduleNames);
            },
            [](const RunConfig& c) { return json(enum_name(c.schedule, kScheduleNames)); }},
      NLCG_DOUBLE("base_lr", base_lr),
      Field{"reference_batch",
            [](RunConfig& c, const json& v) {
              c.reference_batch = as_int("reference_batch", v);
            },
            [](const RunConfig& c) { return json(c.reference_batch); }},
      NLCG_DOUBLE("initial_lr", initial_lr),
      NLCG_DOUBLE("final_lr", final_lr),
      NLCG_DOUBLE("warmup_epochs", warmup_epochs),
      NLCG_DOUBLE("decay_interval_epochs", decay_interval_epochs),
      NLCG_DOUBLE("constant_lr", constant_lr),
      NLCG_DOUBLE("regime_scale", regime_scale),

      Field{"line_search",
            [](RunConfig& c, const json& v) {
              c.line_search = as_enum("line_search", v, kLineSearchNames);
            },
            [](const RunConfig& c) {
              return json(enum_name(c.line_search, kLineSearchNames));
            }},
      NLCG_DOUBLE("line_search_min_batch", line_search_min_batch),
      NLCG_DOUBLE("ls_increase_threshold", line_search_params.increase_threshold),
      NLCG_DOUBLE("ls_flat_threshold", line_search_params.flat_threshold),
      NLCG_DOUBLE("ls_decrease_factor", line_search_params.decrease_factor),
      NLCG_DOUBLE("ls_increase_factor", line_search_params.increase_factor),

      NLCG_BOOL("preconditioner", preconditioner),
      NLCG_DOUBLE("curvature_floor", curvature_floor),
      NLCG_DOUBLE("skip_tolerance", skip_tolerance),
      NLCG_BOOL("force_zero_beta", force_zero_beta),

      NLCG_DOUBLE("epochs", epochs),
      NLCG_SIZE("seed", seed),
      NLCG_STRING("output_dir", output_dir),
      NLCG_STRING("run_name", run_name),
      Field{"eval_every",
            [](RunConfig& c, const json& v) {
              c.eval_every = static_cast<std::int64_t>(as_uint("eval_every", v));
            },
            [](const RunConfig& c) { return json(c.eval_every); }},
      Field{"precision",
            [](RunConfig& c, const json& v) {
              c.precision = as_enum("precision", v, kPrecisionNames);
            },
            [](const RunConfig& c) { return json(enum_name(c.precision, kPrecisionNames)); }},
      NLCG_SIZE("threads", threads),
      Field{"divergence_loss",
            [](RunConfig& c, const json& v) {
              c.divergence_loss = v.is_null()
                                      ? std::numeric_limits<double>::infinity()
                                      : as_double("divergence_loss", v);
            },
            [](const RunConfig& c) { return double_json(c.divergence_loss); }},
      Field{"target_gap",
            [](RunConfig& c, const json& v) {
              if (v.is_null()) {
                c.target_gap.reset();
              } else {
                c.target_gap = as_double("target_gap", v);
              }
            },
            [](const RunConfig& c) { return optional_json(c.target_gap); }},
  };
  return table;
}

#undef NLCG_DOUBLE
#undef NLCG_SIZE
#undef NLCG_BOOL
#undef NLCG_STRING

}  // namespace

std::size_t RunConfig::resolved_micro_batch() const {
  if (!batch_size) return micro_batch_size;
  if (micro_batch_limit == 0) return *batch_size;
  return std::min(*batch_size, micro_batch_limit);
}

std::size_t RunConfig::resolved_virtual_factor() const {
  if (!batch_size) return virtual_factor;
  const std::size_t micro = resolved_micro_batch();
  if (micro == 0 || *batch_size % micro != 0) {
    throw ConfigError("batch_size " + std::to_string(*batch_size) +
                      " is not a multiple of the micro-batch limit " +
                      std::to_string(micro));
  }
  return *batch_size / micro;
}

std::string RunConfig::resolved_run_name() const {
  if (!run_name.empty()) return run_name;
  std::ostringstream name;
  name << to_string(optimizer) << "_b" << effective_batch() << "_e"
       << format_double(epochs) << "_s" << seed;
  return name.str();
}

void RunConfig::validate() const {
  const auto& p = problem.kind;
  if (p != "quadratic" && p != "diagonal_quadratic" &&
      p != "logistic_regression" && p != "mlp") {
    throw ConfigError("config key 'problem': unknown kind '" + p + "'");
  }
  if (!problem.spectrum.empty() && problem.spectrum != "linear" &&
      problem.spectrum != "geometric") {
    throw ConfigError("config key 'spectrum': expected linear or geometric");
  }
  if (problem.dataset != "synthetic" && problem.dataset != "csv") {
    throw ConfigError("config key 'dataset': expected synthetic or csv");
  }
  if (problem.dataset == "csv" && problem.dataset_path.empty() &&
      (p == "logistic_regression" || p == "mlp")) {
    throw ConfigError("config key 'dataset_path': required for csv datasets");
  }
  if (effective_batch() < 1) throw ConfigError("effective batch must be >= 1");
  if (!(epochs > 0.0)) throw ConfigError("config key 'epochs': must be positive");
  if (!(drop_fraction >= 0.0 && drop_fraction < 1.0)) {
    throw ConfigError("config key 'drop_fraction': must lie in [0, 1)");
  }
  if (!(regime_scale > 0.0)) {
    throw ConfigError("config key 'regime_scale': must be positive");
  }
  if (schedule == ScheduleMode::constant && !(constant_lr > 0.0)) {
    throw ConfigError("config key 'constant_lr': must be positive");
  }
  if (threads < 1) throw ConfigError("config key 'threads': must be >= 1");
  if (target_gap && !(*target_gap >= 0.0)) {
    throw ConfigError("config key 'target_gap': must be >= 0");
  }
  first_order.validate();
  line_search_params.validate();
  PreconditionerConfig{curvature_floor, skip_tolerance, false}.validate();
}

RunConfig parse_run_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  RunConfig config;
  for (const auto& [key, value] : doc.items()) {
    const Field* field = nullptr;
    for (const auto& f : fields()) {
      if (key == f.key) field = &f;
    }
    if (field == nullptr) throw ConfigError("unknown config key '" + key + "'");
    if (value.is_object()) bad(key, "nested objects are not allowed");
    field->read(config, value);
  }
  config.validate();
  return config;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  const std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  return parse_run_config(text);
}

std::string to_json(const RunConfig& config) {
  json doc = json::object();
  for (const auto& f : fields()) doc[f.key] = f.write(config);
  return doc.dump(2);
}

ScheduleConfig resolve_schedule(const RunConfig& config,
                                std::int64_t steps_per_epoch) {
  const auto batch = static_cast<std::int64_t>(config.effective_batch());
  ScheduleConfig s;
  switch (config.schedule) {
    case ScheduleMode::constant:
      s = constant_schedule(config.constant_lr, batch, config.epochs,
                            steps_per_epoch);
      break;
    case ScheduleMode::default_rule: {
      BatchRegimes regimes;
      regimes.scale = config.regime_scale;
      s = default_schedule_for(batch, config.epochs, steps_per_epoch, regimes);
      s.base_lr = config.base_lr;
      s.reference_batch = config.reference_batch;
      s.decay_interval_epochs = config.decay_interval_epochs;
      s.initial_lr = std::min(config.initial_lr, s.peak_lr());
      s.final_lr = std::min(s.final_lr, s.peak_lr());
      break;
    }
    case ScheduleMode::custom:
      s.base_lr = config.base_lr;
      s.reference_batch = config.reference_batch;
      s.batch_size = batch;
      s.initial_lr = config.initial_lr;
      s.final_lr = config.final_lr;
      s.warmup_epochs = config.warmup_epochs;
      s.total_epochs = config.epochs;
      s.decay_interval_epochs = config.decay_interval_epochs;
      s.steps_per_epoch = steps_per_epoch;
      break;
  }
  s.validate();
  return s;
}

LineSearchConfig resolve_line_search(const RunConfig& config) {
  LineSearchConfig ls = config.line_search_params;
  switch (config.line_search) {
    case LineSearchMode::on:
      ls.enabled = true;
      break;
    case LineSearchMode::off:
      ls.enabled = false;
      break;
    case LineSearchMode::automatic:
      // Too noisy to monitor below the cutoff.
      ls.enabled = static_cast<double>(config.effective_batch()) >=
                   config.line_search_min_batch * config.regime_scale;
      break;
  }
  return ls;
}

OptimizerConfig resolve_optimizer(const RunConfig& config) {
  OptimizerConfig opt;
  opt.kind = config.optimizer;
  opt.first_order = config.first_order;
  opt.nlcg.line_search = resolve_line_search(config);
  opt.nlcg.preconditioner.curvature_floor = config.curvature_floor;
  opt.nlcg.preconditioner.skip_tolerance = config.skip_tolerance;
  opt.nlcg.preconditioner.identity_mode = !config.preconditioner;
  opt.nlcg.force_zero_beta = config.force_zero_beta;
  opt.nlcg.float32_weights = config.precision == Precision::float32;
  return opt;
}

}  // namespace nlcg
