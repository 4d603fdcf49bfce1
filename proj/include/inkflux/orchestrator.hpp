#pragma once

// Headless suggestion-task engine: task creation, cost estimates, the plot
// prompt, pluggable providers and dispatch into an event log.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "inkflux/error.hpp"
#include "inkflux/oplog.hpp"
#include "inkflux/stats.hpp"
#include "inkflux/textmetrics.hpp"
#include "inkflux/utf8.hpp"
#include "inkflux/wordgen.hpp"

namespace inkflux::orchestrator {

using oplog::Horizon;
using oplog::TaskType;
using oplog::Timestamp;

inline constexpr std::uint32_t kDefaultCrowdIdeas = 3;
inline constexpr const char* kDefaultModelId = "text-davanci-003";

// ---------------------------------------------------------------------------
// Clocks

class Clock {
 public:
  virtual ~Clock() = default;
  virtual Timestamp now_ms() const = 0;
};

/// Simulation time; only moves when told to, never backwards.
class VirtualClock final : public Clock {
 public:
  explicit VirtualClock(Timestamp start_ms = 0) : now_(start_ms) {}
  Timestamp now_ms() const override { return now_; }
  void advance(Timestamp delta_ms) {
    if (delta_ms < 0) throw Error(ErrorKind::InvalidParams, "clock cannot go back");
    now_ += delta_ms;
  }
  void advance_to(Timestamp t) { now_ = std::max(now_, t); }

 private:
  Timestamp now_;
};

class WallClock final : public Clock {
 public:
  Timestamp now_ms() const override {
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    const Timestamp t =
        std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
    // system_clock may step backwards; report a monotone value.
    last_ = std::max(last_, t);
    return last_;
  }

 private:
  mutable Timestamp last_ = 0;
};

// ---------------------------------------------------------------------------
// Tasks

struct TaskParams {
  std::optional<std::string> instruction;
  std::optional<std::uint32_t> num_ideas;
  std::optional<Horizon> horizon;
};

struct SuggestionTask {
  std::string task_id;
  std::string doc_id;
  TaskType task_type = TaskType::crowd;
  std::string snippet;
  std::uint64_t snippet_start = 0;
  std::uint64_t snippet_len = 0;  // code points
  std::optional<std::string> instruction;
  std::uint32_t num_ideas = 1;
  std::optional<Horizon> horizon;
  Timestamp created_ts_ms = 0;
};

/// Checks type-specific parameters and fills defaults (three ideas for crowd
/// tasks, one otherwise).
inline TaskParams normalize_params(TaskType type, const TaskParams& in) {
  TaskParams p = in;
  if (p.horizon && type != TaskType::story_plot) {
    throw Error(ErrorKind::InvalidParams,
                std::string("horizon is only valid for story_plot, not ") +
                    oplog::to_string(type));
  }
  if (p.num_ideas && *p.num_ideas == 0) {
    throw Error(ErrorKind::InvalidParams, "num_ideas must be >= 1");
  }
  if (!p.num_ideas) {
    p.num_ideas = type == TaskType::crowd ? kDefaultCrowdIdeas : 1;
  }
  if (type == TaskType::story_plot && !p.horizon) p.horizon = Horizon::near;
  return p;
}

// ---------------------------------------------------------------------------
// Cost

struct CostModel {
  double crowd_base = 1.0;          // dollars per idea
  double crowd_fee_multiplier = 1.2;
  double completion_budget = 100;   // tokens
  double rate_per_token = 0.02 / 1000.0;
};

/// ceil(code points / 4).
inline std::uint64_t estimate_tokens(std::string_view text) {
  return (utf8::length(text) + 3) / 4;
}

inline double estimate_cost(const SuggestionTask& task, const CostModel& model) {
  if (task.task_type == TaskType::crowd) {
    const double words =
        static_cast<double>(textmetrics::word_count(task.snippet));
    return static_cast<double>(task.num_ideas) *
           (words / 1000.0 + model.crowd_base) * model.crowd_fee_multiplier;
  }
  const std::string prompt = task.snippet + task.instruction.value_or("");
  return (static_cast<double>(estimate_tokens(prompt)) + model.completion_budget) *
         model.rate_per_token;
}

// ---------------------------------------------------------------------------
// Prompt

inline std::string render_plot_prompt(std::string_view snippet,
                                      std::string_view instruction) {
  if (snippet.empty()) throw Error(ErrorKind::EmptySnippet, "empty snippet");
  std::string out = "Given the previous story: ";
  out += snippet;
  out += ".\nFollow the instruction: ";
  out += instruction;
  out += " to describe the follow-up story arc using 50 words.";
  return out;
}

// ---------------------------------------------------------------------------
// Providers

struct GeneratedIdea {
  double latency_s = 0;
  std::string text;
};

class SuggestionProvider {
 public:
  virtual ~SuggestionProvider() = default;
  /// One idea per requested idea (task.num_ideas). Deterministic given the
  /// task and the rng state.
  virtual std::vector<GeneratedIdea> generate(const SuggestionTask& task,
                                              stats::SeededRng& rng) const = 0;
};

struct LognormalLatency {
  double mu = 0;
  double sigma = 0;

  static LognormalLatency from_median(double median_s, double sigma) {
    return {std::log(median_s), sigma};
  }
};

/// Fitted to the reported crowd quartiles (1,753 / 3,449 / 8,160 s): the
/// median fixes mu, the interquartile ratio fixes sigma.
inline LognormalLatency default_crowd_latency() {
  return {std::log(3449.0), std::log(8160.0 / 1753.0) / (2.0 * 0.6745)};
}

inline double simulate_crowd_latency(stats::SeededRng& rng,
                                     const LognormalLatency& params) {
  return rng.lognormal(params.mu, params.sigma);
}

/// Lognormal latency, text from a vocabulary of distinct-word sentences.
class SimulatedProvider : public SuggestionProvider {
 public:
  SimulatedProvider(LognormalLatency latency,
                    std::vector<std::string> vocabulary =
                        wordgen::default_suggestion_vocabulary())
      : latency_(latency), vocabulary_(std::move(vocabulary)) {}

  std::vector<GeneratedIdea> generate(const SuggestionTask& task,
                                      stats::SeededRng& rng) const override {
    std::vector<GeneratedIdea> out;
    for (std::uint32_t i = 0; i < task.num_ideas; ++i) {
      const double latency = simulate_crowd_latency(rng, latency_);
      out.push_back({latency, compose(task, rng)});
    }
    return out;
  }

 protected:
  virtual std::string compose(const SuggestionTask&, stats::SeededRng& rng) const {
    return wordgen::distinct_word_text(vocabulary_, 3, 6, 12, rng);
  }

  LognormalLatency latency_;
  std::vector<std::string> vocabulary_;
};

/// Stand-in for the plot generator models: templated plot sentences tagged
/// with the requested horizon.
class StoryPlotStubProvider final : public SimulatedProvider {
 public:
  using SimulatedProvider::SimulatedProvider;

 protected:
  std::string compose(const SuggestionTask& task,
                      stats::SeededRng& rng) const override {
    const Horizon h = task.horizon.value_or(Horizon::near);
    std::string out = h == Horizon::near ? "Near future plot: " : "Far future plot: ";
    out += wordgen::distinct_word_text(vocabulary_, 2, 6, 10, rng);
    return out;
  }
};

class ProviderRegistry {
 public:
  void add(TaskType type, std::shared_ptr<const SuggestionProvider> provider) {
    providers_[type] = std::move(provider);
  }
  const SuggestionProvider* find(TaskType type) const {
    auto it = providers_.find(type);
    return it == providers_.end() ? nullptr : it->second.get();
  }

 private:
  std::map<TaskType, std::shared_ptr<const SuggestionProvider>> providers_;
};

/// Simulated providers for all four task types. Model latencies are centred
/// on the reported medians (8 s plot, 9 s continuation).
inline ProviderRegistry default_simulated_registry() {
  ProviderRegistry reg;
  reg.add(TaskType::crowd,
          std::make_shared<SimulatedProvider>(default_crowd_latency()));
  reg.add(TaskType::story_plot, std::make_shared<StoryPlotStubProvider>(
                                    LognormalLatency::from_median(8.0, 0.25)));
  reg.add(TaskType::gpt3_plot, std::make_shared<SimulatedProvider>(
                                   LognormalLatency::from_median(8.0, 0.15)));
  reg.add(TaskType::gpt3_continuation,
          std::make_shared<SimulatedProvider>(
              LognormalLatency::from_median(9.0, 0.1)));
  return reg;
}

// ---------------------------------------------------------------------------
// Orchestrator

struct Suggestion {
  std::string suggestion_id;
  std::string task_id;
  std::uint32_t tab_index = 0;
  Timestamp delivered_ts_ms = 0;
  Timestamp latency_ms = 0;
  std::string text;
};

struct DispatchFailure {
  std::string task_id;
  Timestamp ts_ms = 0;
  std::string message;
};

/// Owns task/suggestion id allocation and tab numbering; appends lifecycle
/// events to a single log builder.
class Orchestrator {
 public:
  Orchestrator(const Clock& clock, oplog::EventLogBuilder& log)
      : clock_(&clock), log_(&log) {}

  /// `snippet` must be the code points [snippet_start, snippet_start + len)
  /// of the document at creation time.
  SuggestionTask create_task(const std::string& doc_id, std::string snippet,
                             std::uint64_t snippet_start, TaskType type,
                             const TaskParams& params = {}) {
    if (snippet.empty()) throw Error(ErrorKind::EmptySnippet, "empty snippet");
    const TaskParams p = normalize_params(type, params);
    SuggestionTask task;
    task.task_id = "t" + std::to_string(++task_counter_);
    task.doc_id = doc_id;
    task.task_type = type;
    task.snippet_len = utf8::length(snippet);
    task.snippet = std::move(snippet);
    task.snippet_start = snippet_start;
    task.instruction = p.instruction;
    task.num_ideas = *p.num_ideas;
    task.horizon = p.horizon;
    task.created_ts_ms = clock_->now_ms();

    oplog::TaskCreated ev;
    ev.task_id = task.task_id;
    ev.task_type = type;
    ev.snippet_start = task.snippet_start;
    ev.snippet_len = task.snippet_len;
    ev.instruction = task.instruction;
    ev.num_ideas = task.num_ideas;
    ev.horizon = task.horizon;
    log_->append(task.created_ts_ms, doc_id, std::move(ev));
    tabs_[task.task_id] = 0;
    return task;
  }

  /// Runs the provider for the task type and appends one delivery per idea at
  /// dispatch time + latency. Tabs are numbered in arrival order and continue
  /// across re-dispatches of the same task.
  std::vector<Suggestion> dispatch_task(const SuggestionTask& task,
                                        const ProviderRegistry& registry,
                                        stats::SeededRng& rng) {
    const SuggestionProvider* provider = registry.find(task.task_type);
    if (!provider) {
      throw Error(ErrorKind::NoProvider, std::string("no provider for ") +
                                             oplog::to_string(task.task_type));
    }
    const Timestamp base = std::max(task.created_ts_ms, clock_->now_ms());
    std::vector<GeneratedIdea> ideas;
    try {
      ideas = provider->generate(task, rng);
      for (const auto& idea : ideas) {
        if (!(idea.latency_s >= 0.0)) {
          throw Error(ErrorKind::ProviderFailure, "negative latency");
        }
      }
    } catch (const std::exception& e) {
      failures_.push_back({task.task_id, base, e.what()});
      if (const auto* err = dynamic_cast<const Error*>(&e);
          err && err->kind() == ErrorKind::ProviderFailure) {
        throw;
      }
      throw Error(ErrorKind::ProviderFailure, e.what());
    }
    std::vector<std::size_t> order(ideas.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return to_ms(ideas[a].latency_s) < to_ms(ideas[b].latency_s);
    });
    std::uint32_t& next_tab = tabs_[task.task_id];
    std::vector<Suggestion> out;
    for (std::size_t i : order) {
      Suggestion s;
      s.task_id = task.task_id;
      s.tab_index = next_tab++;
      s.suggestion_id = task.task_id + "-s" + std::to_string(s.tab_index);
      s.latency_ms = to_ms(ideas[i].latency_s);
      s.delivered_ts_ms = base + s.latency_ms;
      s.text = std::move(ideas[i].text);
      log_->append(s.delivered_ts_ms, task.doc_id,
                   oplog::SuggestionDelivered{s.task_id, s.suggestion_id,
                                              s.tab_index, s.text});
      out.push_back(std::move(s));
    }
    return out;
  }

  void record_read(const std::string& doc_id, const std::string& suggestion_id,
                   Timestamp ts_ms) {
    log_->append(ts_ms, doc_id, oplog::SuggestionRead{suggestion_id});
  }

  const std::vector<DispatchFailure>& failures() const noexcept { return failures_; }

  static Timestamp to_ms(double seconds) {
    return static_cast<Timestamp>(std::llround(seconds * 1000.0));
  }

 private:
  const Clock* clock_;
  oplog::EventLogBuilder* log_;
  std::uint64_t task_counter_ = 0;
  std::map<std::string, std::uint32_t> tabs_;
  std::vector<DispatchFailure> failures_;
};

}  // namespace inkflux::orchestrator
