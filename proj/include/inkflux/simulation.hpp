#pragma once

// End-to-end simulation: a synthetic world whose suggestion tasks are served
// by configured providers (simulated, stub or HTTP) under a virtual clock.

#include <array>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "inkflux/error.hpp"
#include "inkflux/orchestrator.hpp"
#include "inkflux/remote.hpp"
#include "inkflux/synthgen.hpp"

namespace inkflux::simulation {

using oplog::TaskType;

struct SimulationConfig {
  synthgen::SynthConfig world;
  orchestrator::ProviderRegistry providers = orchestrator::default_simulated_registry();
  orchestrator::CostModel cost_model;
};

struct CostSummary {
  std::array<std::size_t, 4> tasks{};
  std::array<double, 4> cost{};
  double total() const {
    double t = 0;
    for (double c : cost) t += c;
    return t;
  }
};

struct SimulationResult {
  synthgen::SynthResult world;
  CostSummary cost;
};

namespace detail {

using nlohmann::json;

inline std::shared_ptr<const orchestrator::SuggestionProvider> provider_from_json(
    TaskType type, const json& j) {
  const std::string kind = j.value("kind", std::string("simulated"));
  if (kind == "simulated" || kind == "stub") {
    orchestrator::LognormalLatency lat =
        type == TaskType::crowd ? orchestrator::default_crowd_latency()
                                : orchestrator::LognormalLatency::from_median(8.0, 0.2);
    if (j.contains("median_s")) {
      const double m = j["median_s"].get<double>();
      if (!(m > 0)) throw Error(ErrorKind::InvalidConfig, "median_s must be positive");
      lat.mu = std::log(m);
    }
    if (j.contains("sigma")) lat.sigma = j["sigma"].get<double>();
    if (lat.sigma < 0) throw Error(ErrorKind::InvalidConfig, "sigma must be >= 0");
    if (kind == "stub") return std::make_shared<orchestrator::StoryPlotStubProvider>(lat);
    return std::make_shared<orchestrator::SimulatedProvider>(lat);
  }
  if (kind == "http") {
    if (type == TaskType::crowd) {
      throw Error(ErrorKind::InvalidConfig, "crowd tasks cannot use an http provider");
    }
    remote::CompletionOptions co;
    co.model = j.value("model", co.model);
    co.max_tokens = j.value("max_tokens", co.max_tokens);
    co.temperature = j.value("temperature", co.temperature);
    remote::HttpOptions ho;
    ho.api_key = remote::api_key_from_env();
    if (j.contains("timeout_ms")) ho.timeout = std::chrono::milliseconds(j["timeout_ms"].get<long>());
    ho.max_retries = j.value("max_retries", ho.max_retries);
    return std::make_shared<remote::HttpCompletionProvider>(
        j.at("endpoint").get<std::string>(), co, ho);
  }
  throw Error(ErrorKind::InvalidConfig, "unknown provider kind '" + kind + "'");
}

}  // namespace detail

/// {"world": {...}, "providers": {"<task_type>": {...}}, "cost_model": {...},
///  "clock": {"mode": "virtual"}}
inline SimulationConfig config_from_json(const nlohmann::json& j) {
  try {
    SimulationConfig c;
    c.world = synthgen::config_from_json(j.value("world", nlohmann::json::object()));
    if (j.contains("providers")) {
      for (const auto& [name, pj] : j["providers"].items()) {
        auto tt = oplog::parse_task_type(name);
        if (!tt) throw Error(ErrorKind::InvalidConfig, "unknown task type '" + name + "'");
        c.providers.add(*tt, detail::provider_from_json(*tt, pj));
      }
    }
    if (j.contains("cost_model")) {
      const auto& cm = j["cost_model"];
      c.cost_model.crowd_base = cm.value("crowd_base", c.cost_model.crowd_base);
      c.cost_model.crowd_fee_multiplier =
          cm.value("crowd_fee_multiplier", c.cost_model.crowd_fee_multiplier);
      c.cost_model.completion_budget =
          cm.value("completion_budget", c.cost_model.completion_budget);
      c.cost_model.rate_per_token = cm.value("rate_per_token", c.cost_model.rate_per_token);
    }
    if (j.contains("clock")) {
      const std::string mode = j["clock"].value("mode", std::string("virtual"));
      if (mode != "virtual") {
        throw Error(ErrorKind::InvalidConfig, "simulation supports only the virtual clock");
      }
      if (j["clock"].contains("start_ms")) {
        c.world.start_ms = j["clock"]["start_ms"].get<oplog::Timestamp>();
      }
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, e.what());
  }
}

inline SimulationResult simulate(const SimulationConfig& config) {
  SimulationResult r{synthgen::generate_world(config.world, &config.providers), {}};
  for (const auto& t : r.world.truth.tasks) {
    const auto i = static_cast<std::size_t>(t.task_type);
    ++r.cost.tasks[i];
    r.cost.cost[i] += orchestrator::estimate_cost(t.task, config.cost_model);
  }
  return r;
}

}  // namespace inkflux::simulation
