#pragma once

// Usage and latency statistics, writing-progress samples and suggestion
// influence samples, each with a Monte-Carlo baseline drawn from working
// sessions.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "inkflux/error.hpp"
#include "inkflux/oplog.hpp"
#include "inkflux/sessionizer.hpp"
#include "inkflux/stats.hpp"
#include "inkflux/textmetrics.hpp"

namespace inkflux::analyses {

using oplog::EventLog;
using oplog::TaskType;
using oplog::Timestamp;
using sessionizer::WorkingSession;
using textmetrics::Providers;
using textmetrics::Sentence;
using textmetrics::SimilarityMetricId;

inline constexpr std::size_t kTaskTypeCount = 4;

inline std::size_t type_index(TaskType t) { return static_cast<std::size_t>(t); }

// ---------------------------------------------------------------------------
// Read events

struct ReadEventRecord {
  std::string suggestion_id;
  std::string task_id;
  TaskType task_type = TaskType::crowd;
  std::string doc_id;
  Timestamp read_ts_ms = 0;
  Timestamp delivered_ts_ms = 0;
  Timestamp created_ts_ms = 0;
  std::string suggestion_text;
  bool operator==(const ReadEventRecord&) const = default;
};

/// One record per suggestion's first read, in log order. Unread suggestions
/// produce nothing.
inline std::vector<ReadEventRecord> extract_read_events(const EventLog& log) {
  std::vector<ReadEventRecord> out;
  std::set<std::string> seen;
  const auto& events = log.events();
  for (const auto& e : events) {
    const auto* read = std::get_if<oplog::SuggestionRead>(&e.payload);
    if (!read || !seen.insert(read->suggestion_id).second) continue;
    const auto& delivered_ev = events[*log.find_suggestion(read->suggestion_id)];
    const auto& delivered =
        std::get<oplog::SuggestionDelivered>(delivered_ev.payload);
    const auto& task_ev = events[*log.find_task(delivered.task_id)];
    const auto& task = std::get<oplog::TaskCreated>(task_ev.payload);
    out.push_back({read->suggestion_id, delivered.task_id, task.task_type,
                   e.doc_id, e.ts_ms, delivered_ev.ts_ms, task_ev.ts_ms,
                   delivered.text});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Latency

struct Quartiles {
  double q25 = 0, q50 = 0, q75 = 0;
};

struct TypeLatency {
  TaskType task_type = TaskType::crowd;
  std::vector<double> system_s;   // one per task with a delivery
  std::vector<double> reading_s;  // one per task whose suggestions were read
  std::optional<Quartiles> system;
  std::optional<Quartiles> reading;
  std::size_t delivered_tasks = 0;
  std::size_t unread_tasks = 0;
  std::optional<double> not_read_rate;  // absent when nothing was delivered
  std::size_t delivered_suggestions = 0;
  std::size_t unread_suggestions = 0;
  std::optional<double> suggestion_not_read_rate;
};

struct LatencyReport {
  std::array<TypeLatency, kTaskTypeCount> per_type;

  const TypeLatency& operator[](TaskType t) const { return per_type[type_index(t)]; }
};

inline Quartiles quartiles_of(std::span<const double> xs) {
  const double qs[] = {0.25, 0.5, 0.75};
  const auto v = stats::quantiles(xs, qs);
  return {v[0], v[1], v[2]};
}

/// Per task: system latency = first delivery - creation; reading latency =
/// first read of any of its suggestions - first delivery. A delivered task
/// none of whose suggestions was ever opened counts as not read. The
/// per-suggestion not-read rate is reported alongside.
inline LatencyReport latency_report(const EventLog& log) {
  struct TaskTimes {
    TaskType type;
    Timestamp created;
    std::optional<Timestamp> first_delivery;
    std::optional<Timestamp> first_read;
  };
  std::map<std::string, TaskTimes> tasks;
  std::unordered_map<std::string, std::string> task_of_suggestion;
  std::set<std::string> read_suggestions;
  for (const auto& e : log.events()) {
    if (const auto* t = std::get_if<oplog::TaskCreated>(&e.payload)) {
      tasks.emplace(t->task_id, TaskTimes{t->task_type, e.ts_ms, {}, {}});
    }
  }
  for (const auto& e : log.events()) {
    if (const auto* d = std::get_if<oplog::SuggestionDelivered>(&e.payload)) {
      auto& tt = tasks.at(d->task_id);
      if (!tt.first_delivery) tt.first_delivery = e.ts_ms;
      task_of_suggestion.emplace(d->suggestion_id, d->task_id);
    } else if (const auto* r = std::get_if<oplog::SuggestionRead>(&e.payload)) {
      auto& tt = tasks.at(task_of_suggestion.at(r->suggestion_id));
      if (!tt.first_read) tt.first_read = e.ts_ms;
      read_suggestions.insert(r->suggestion_id);
    }
  }
  LatencyReport report;
  for (TaskType t : oplog::kAllTaskTypes) report.per_type[type_index(t)].task_type = t;
  for (const auto& [id, tt] : tasks) {
    if (!tt.first_delivery) continue;
    auto& row = report.per_type[type_index(tt.type)];
    ++row.delivered_tasks;
    row.system_s.push_back(static_cast<double>(*tt.first_delivery - tt.created) / 1000.0);
    if (tt.first_read) {
      row.reading_s.push_back(
          static_cast<double>(*tt.first_read - *tt.first_delivery) / 1000.0);
    } else {
      ++row.unread_tasks;
    }
  }
  for (const auto& [sid, tid] : task_of_suggestion) {
    auto& row = report.per_type[type_index(tasks.at(tid).type)];
    ++row.delivered_suggestions;
    if (!read_suggestions.count(sid)) ++row.unread_suggestions;
  }
  for (auto& row : report.per_type) {
    if (row.delivered_suggestions > 0) {
      row.suggestion_not_read_rate = static_cast<double>(row.unread_suggestions) /
                                     static_cast<double>(row.delivered_suggestions);
    }
    if (!row.system_s.empty()) row.system = quartiles_of(row.system_s);
    if (!row.reading_s.empty()) row.reading = quartiles_of(row.reading_s);
    if (row.delivered_tasks > 0) {
      row.not_read_rate = static_cast<double>(row.unread_tasks) /
                          static_cast<double>(row.delivered_tasks);
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Usage trend

struct UsagePhase {
  std::size_t requests = 0;
  std::array<std::size_t, kTaskTypeCount> counts{};

  double proportion(TaskType t) const {
    return requests == 0 ? 0.0
                         : static_cast<double>(counts[type_index(t)]) /
                               static_cast<double>(requests);
  }
};

struct UsageTrend {
  std::size_t k = 4;
  std::vector<UsagePhase> phases;

  std::size_t total_requests() const {
    std::size_t n = 0;
    for (const auto& p : phases) n += p.requests;
    return n;
  }
};

/// Splits an ordered request sequence into k contiguous phases whose sizes
/// differ by at most one, the larger phases first.
inline UsageTrend usage_trend_of(std::span<const TaskType> ordered,
                                 std::size_t k = 4) {
  if (k == 0) throw Error(ErrorKind::InvalidParams, "usage trend needs k >= 1");
  UsageTrend trend;
  trend.k = k;
  trend.phases.resize(k);
  const std::size_t n = ordered.size();
  const std::size_t base = n / k, extra = n % k;
  std::size_t pos = 0;
  for (std::size_t p = 0; p < k; ++p) {
    const std::size_t len = base + (p < extra ? 1 : 0);
    for (std::size_t i = 0; i < len; ++i, ++pos) {
      ++trend.phases[p].counts[type_index(ordered[pos])];
      ++trend.phases[p].requests;
    }
  }
  return trend;
}

/// task_created types per document, in log order.
inline std::map<std::string, std::vector<TaskType>> requests_by_document(
    const EventLog& log) {
  std::map<std::string, std::vector<TaskType>> out;
  for (const auto& e : log.events()) {
    if (const auto* t = std::get_if<oplog::TaskCreated>(&e.payload)) {
      out[e.doc_id].push_back(t->task_type);
    }
  }
  return out;
}

inline std::map<std::string, UsageTrend> usage_trend_per_document(
    const EventLog& log, std::size_t k = 4) {
  std::map<std::string, UsageTrend> out;
  for (const auto& [doc, seq] : requests_by_document(log)) {
    out.emplace(doc, usage_trend_of(seq, k));
  }
  return out;
}

/// Phases are cut per document (participant) and their counts summed.
inline UsageTrend usage_trend(const EventLog& log, std::size_t k = 4) {
  if (k == 0) throw Error(ErrorKind::InvalidParams, "usage trend needs k >= 1");
  UsageTrend pooled;
  pooled.k = k;
  pooled.phases.resize(k);
  for (const auto& [doc, trend] : usage_trend_per_document(log, k)) {
    for (std::size_t p = 0; p < k; ++p) {
      pooled.phases[p].requests += trend.phases[p].requests;
      for (std::size_t t = 0; t < kTaskTypeCount; ++t) {
        pooled.phases[p].counts[t] += trend.phases[p].counts[t];
      }
    }
  }
  return pooled;
}

// ---------------------------------------------------------------------------
// Window replay helper

namespace detail {

/// Calls fn(id, before, after) for every (t, id) in `starts`, with the
/// document text at t and at t + window. Sorting the starts lets two
/// forward-only replays serve every query.
template <typename Fn>
void visit_windows(const EventLog& log, const std::string& doc_id,
                   std::vector<std::pair<Timestamp, std::size_t>> starts,
                   double window_s, Fn&& fn) {
  std::sort(starts.begin(), starts.end());
  oplog::DocumentReplayer at_start(log, doc_id);
  oplog::DocumentReplayer at_end(log, doc_id);
  const auto window_ms = static_cast<Timestamp>(std::llround(window_s * 1000.0));
  for (const auto& [t, id] : starts) {
    const std::u32string& before = at_start.advance_to(t);
    const std::u32string& after = at_end.advance_to(t + window_ms);
    fn(id, before, after);
  }
}

inline void check_window(double window_s) {
  if (!(window_s > 0.0)) {
    throw Error(ErrorKind::InvalidParams, "window must be positive");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Progress

struct ProgressSample {
  ReadEventRecord record;
  double window_s = 300;
  std::size_t words_before = 0;
  std::size_t words_after = 0;
  long long word_delta = 0;
};

inline std::vector<ProgressSample> progress_samples(
    const EventLog& log, std::span<const ReadEventRecord> records,
    double window_s) {
  detail::check_window(window_s);
  std::vector<ProgressSample> out(records.size());
  std::map<std::string, std::vector<std::pair<Timestamp, std::size_t>>> by_doc;
  for (std::size_t i = 0; i < records.size(); ++i) {
    by_doc[records[i].doc_id].emplace_back(records[i].read_ts_ms, i);
  }
  for (auto& [doc, starts] : by_doc) {
    detail::visit_windows(
        log, doc, std::move(starts), window_s,
        [&](std::size_t i, const std::u32string& before,
            const std::u32string& after) {
          auto& s = out[i];
          s.record = records[i];
          s.window_s = window_s;
          s.words_before = textmetrics::word_count(before);
          s.words_after = textmetrics::word_count(after);
          s.word_delta = static_cast<long long>(s.words_after) -
                         static_cast<long long>(s.words_before);
        });
  }
  return out;
}

inline std::vector<ProgressSample> progress_samples(const EventLog& log,
                                                    double window_s) {
  const auto records = extract_read_events(log);
  return progress_samples(log, records, window_s);
}

// ---------------------------------------------------------------------------
// Baseline draws

struct BaselineConfig {
  std::size_t n_runs = 1000;
  double window_s = 300;
  std::uint64_t rng_seed = 0;
};

struct BaselineDraw {
  std::size_t session_index = 0;
  Timestamp start_ms = 0;
};

/// Run r uses SeededRng(seed).split(r): first draw picks a session with
/// probability proportional to its duration, second draw a uniform start
/// inside it. Runs are independent of each other and of evaluation order.
inline std::vector<BaselineDraw> draw_baseline_starts(
    std::span<const WorkingSession> sessions, const BaselineConfig& config) {
  if (config.n_runs == 0) {
    throw Error(ErrorKind::InvalidParams, "baseline needs n_runs >= 1");
  }
  std::vector<double> weights;
  weights.reserve(sessions.size());
  double total = 0.0;
  for (const auto& s : sessions) {
    weights.push_back(static_cast<double>(s.end_ms - s.start_ms));
    total += weights.back();
  }
  if (!(total > 0.0)) {
    throw Error(ErrorKind::NoSessions,
                "baseline needs a working session with positive duration");
  }
  const stats::SeededRng root(config.rng_seed);
  std::vector<BaselineDraw> draws;
  draws.reserve(config.n_runs);
  for (std::size_t r = 0; r < config.n_runs; ++r) {
    stats::SeededRng rng = root.split(r);
    const std::size_t idx = stats::weighted_index(weights, rng);
    const auto& s = sessions[idx];
    const auto span_ms = static_cast<double>(s.end_ms - s.start_ms);
    const auto offset = static_cast<Timestamp>(rng.next_uniform() * span_ms);
    draws.push_back({idx, s.start_ms + offset});
  }
  return draws;
}

/// Word-count change over `config.window_s` from each baseline start.
inline std::vector<long long> baseline_progress(
    const EventLog& log, const BaselineConfig& config,
    std::span<const WorkingSession> sessions) {
  detail::check_window(config.window_s);
  const auto draws = draw_baseline_starts(sessions, config);
  std::vector<long long> out(draws.size());
  std::map<std::string, std::vector<std::pair<Timestamp, std::size_t>>> by_doc;
  for (std::size_t r = 0; r < draws.size(); ++r) {
    by_doc[sessions[draws[r].session_index].doc_id].emplace_back(
        draws[r].start_ms, r);
  }
  for (auto& [doc, starts] : by_doc) {
    detail::visit_windows(log, doc, std::move(starts), config.window_s,
                          [&](std::size_t r, const std::u32string& before,
                              const std::u32string& after) {
                            out[r] = static_cast<long long>(
                                         textmetrics::word_count(after)) -
                                     static_cast<long long>(
                                         textmetrics::word_count(before));
                          });
  }
  return out;
}

// ---------------------------------------------------------------------------
// Influence

/// Sentences of `after` whose text matches no sentence of `before`: both
/// newly written sentences and sentences edited in place.
inline std::vector<Sentence> newly_edited(std::u32string_view before,
                                          std::u32string_view after) {
  std::set<std::string> old;
  for (auto& s : textmetrics::split_sentences(before)) old.insert(std::move(s.text));
  std::vector<Sentence> out;
  for (auto& s : textmetrics::split_sentences(after)) {
    if (!old.count(s.text)) out.push_back(std::move(s));
  }
  return out;
}

inline std::vector<Sentence> newly_edited(std::string_view before,
                                          std::string_view after) {
  const auto b = utf8::decode(before);
  const auto a = utf8::decode(after);
  return newly_edited(std::u32string_view(b), std::u32string_view(a));
}

struct InfluenceSample {
  ReadEventRecord record;
  SimilarityMetricId metric = SimilarityMetricId::edit;
  std::optional<double> score;  // absent: no suggestion or no new sentence
};

struct InfluenceResult {
  std::vector<InfluenceSample> samples;  // excluded ones carry no score
  std::size_t excluded = 0;

  std::vector<double> scores() const {
    std::vector<double> out;
    for (const auto& s : samples) {
      if (s.score) out.push_back(*s.score);
    }
    return out;
  }
};

/// Raised when a provider fails part-way through influence scoring; carries
/// the samples completed so far.
class InfluenceAborted : public Error {
 public:
  InfluenceAborted(const Error& cause, InfluenceResult partial)
      : Error(ErrorKind::ProviderFailure, cause.what()),
        partial_(std::move(partial)) {}
  const InfluenceResult& partial() const noexcept { return partial_; }

 private:
  InfluenceResult partial_;
};

namespace detail {

inline std::vector<std::string> texts_of(const std::vector<Sentence>& ss) {
  std::vector<std::string> out;
  out.reserve(ss.size());
  for (const auto& s : ss) out.push_back(s.text);
  return out;
}

}  // namespace detail

inline InfluenceResult influence_samples(
    const EventLog& log, std::span<const ReadEventRecord> records,
    double window_s, SimilarityMetricId metric, const Providers& providers = {}) {
  detail::check_window(window_s);
  std::vector<std::optional<std::vector<std::string>>> fresh(records.size());
  std::map<std::string, std::vector<std::pair<Timestamp, std::size_t>>> by_doc;
  for (std::size_t i = 0; i < records.size(); ++i) {
    by_doc[records[i].doc_id].emplace_back(records[i].read_ts_ms, i);
  }
  for (auto& [doc, starts] : by_doc) {
    detail::visit_windows(log, doc, std::move(starts), window_s,
                          [&](std::size_t i, const std::u32string& before,
                              const std::u32string& after) {
                            fresh[i] = detail::texts_of(newly_edited(
                                std::u32string_view(before),
                                std::u32string_view(after)));
                          });
  }
  InfluenceResult result;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto suggestion = textmetrics::sentence_texts(records[i].suggestion_text);
    std::optional<double> score;
    try {
      score = textmetrics::max_pairwise_influence(metric, suggestion, *fresh[i],
                                                  providers);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ProviderFailure) throw;
      throw InfluenceAborted(e, result);
    }
    if (!score) ++result.excluded;
    result.samples.push_back({records[i], metric, score});
  }
  return result;
}

inline InfluenceResult influence_samples(const EventLog& log, double window_s,
                                         SimilarityMetricId metric,
                                         const Providers& providers = {}) {
  const auto records = extract_read_events(log);
  return influence_samples(log, records, window_s, metric, providers);
}

struct BaselineScores {
  std::vector<double> scores;
  std::size_t excluded = 0;
};

/// Random working-draft windows scored against one suggestion drawn
/// uniformly from the same document's delivered suggestions. Sessions of
/// documents without suggestions are not eligible. The suggestion draw for
/// run r comes from SeededRng(seed).split(r).split(1).
inline BaselineScores baseline_influence(const EventLog& log,
                                         const BaselineConfig& config,
                                         std::span<const WorkingSession> sessions,
                                         SimilarityMetricId metric,
                                         const Providers& providers = {}) {
  detail::check_window(config.window_s);
  if (sessions.empty()) throw Error(ErrorKind::NoSessions, "no working sessions");

  std::map<std::string, std::vector<std::string>> doc_suggestions;
  for (const auto& e : log.events()) {
    if (const auto* d = std::get_if<oplog::SuggestionDelivered>(&e.payload)) {
      doc_suggestions[e.doc_id].push_back(d->text);
    }
  }
  std::vector<WorkingSession> eligible;
  for (const auto& s : sessions) {
    if (doc_suggestions.count(s.doc_id)) eligible.push_back(s);
  }
  if (eligible.empty()) {
    throw Error(ErrorKind::NoSuggestions,
                "no session belongs to a document with delivered suggestions");
  }
  const auto draws = draw_baseline_starts(eligible, config);
  const stats::SeededRng root(config.rng_seed);

  std::vector<std::optional<std::vector<std::string>>> fresh(draws.size());
  std::map<std::string, std::vector<std::pair<Timestamp, std::size_t>>> by_doc;
  for (std::size_t r = 0; r < draws.size(); ++r) {
    by_doc[eligible[draws[r].session_index].doc_id].emplace_back(
        draws[r].start_ms, r);
  }
  for (auto& [doc, starts] : by_doc) {
    detail::visit_windows(log, doc, std::move(starts), config.window_s,
                          [&](std::size_t r, const std::u32string& before,
                              const std::u32string& after) {
                            fresh[r] = detail::texts_of(newly_edited(
                                std::u32string_view(before),
                                std::u32string_view(after)));
                          });
  }

  BaselineScores out;
  for (std::size_t r = 0; r < draws.size(); ++r) {
    const auto& pool = doc_suggestions.at(eligible[draws[r].session_index].doc_id);
    stats::SeededRng pick = root.split(r).split(1);
    const auto& text = pool[pick.uniform_index(pool.size())];
    const auto suggestion = textmetrics::sentence_texts(text);
    const auto score =
        textmetrics::max_pairwise_influence(metric, suggestion, *fresh[r], providers);
    if (score) {
      out.scores.push_back(*score);
    } else {
      ++out.excluded;
    }
  }
  return out;
}

}  // namespace inkflux::analyses
