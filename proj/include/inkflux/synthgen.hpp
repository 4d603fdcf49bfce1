#pragma once

// Synthetic writing logs with planted ground truth: sessions, typing,
// suggestion tasks routed through the orchestrator, reads and adoptions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "inkflux/error.hpp"
#include "inkflux/oplog.hpp"
#include "inkflux/orchestrator.hpp"
#include "inkflux/stats.hpp"
#include "inkflux/wordgen.hpp"

namespace inkflux::synthgen {

using oplog::TaskType;
using oplog::Timestamp;

/// offset + Exp(exp_mean) + Uniform(0, uniform_width), each term optional.
struct GapParams {
  double offset_s = 0;
  double exp_mean_s = 0;
  double uniform_width_s = 0;

  bool bounded() const { return exp_mean_s == 0; }
  double max_s() const { return offset_s + uniform_width_s; }
  double draw(stats::SeededRng& rng) const {
    double g = offset_s;
    if (exp_mean_s > 0) g += rng.exponential(exp_mean_s);
    if (uniform_width_s > 0) g += rng.uniform(0, uniform_width_s);
    return g;
  }
};

/// Lognormal with the given median; sigma = 0 is a fixed value.
struct LatencyParams {
  double median_s = 8;
  double sigma = 0;
  double draw(stats::SeededRng& rng) const {
    return rng.lognormal(std::log(median_s), sigma);
  }
};

enum class Adoption { none, verbatim, paraphrase };

inline const char* to_string(Adoption a) {
  switch (a) {
    case Adoption::none: return "none";
    case Adoption::verbatim: return "verbatim";
    case Adoption::paraphrase: return "paraphrase";
  }
  return "?";
}

struct PlanEntry {
  TaskType task_type = TaskType::gpt3_continuation;
  orchestrator::TaskParams params;
  LatencyParams delivery{8, 0.2};
  LatencyParams read_delay{20, 0.5};
  double read_probability = 1.0;
  Adoption adoption = Adoption::none;
  double paraphrase_strength = 1.0;  // share of suggestion tokens kept
  double paste_delay_s = 20;
  std::optional<std::size_t> session;  // random when absent
  std::optional<double> at_fraction;   // position inside the session
};

struct SynthConfig {
  std::uint64_t seed = 1;
  std::size_t n_docs = 1;
  std::size_t n_sessions = 5;
  std::size_t words_per_session = 300;
  std::size_t sentence_min_words = 6;
  std::size_t sentence_max_words = 14;
  double typing_words_per_min = 30;
  bool typing_jitter = true;  // clamp(Exp(1), 0.2, 3) times the mean interval
  double typo_rate = 0.0;     // mistyped word that is immediately deleted
  GapParams within_gap{5, 0, 25};      // pause after each sentence
  GapParams between_gap{1800, 600, 0};  // pause between sessions
  std::vector<PlanEntry> plan;          // applied to every document
  Timestamp start_ms = 1'700'000'000'000;
  std::vector<std::string> typing_vocabulary;      // default when empty
  std::vector<std::string> suggestion_vocabulary;  // default when empty
};

struct PlantedSession {
  std::string doc_id;
  Timestamp start_ms = 0;
  Timestamp end_ms = 0;
  std::size_t event_count = 0;
  bool operator==(const PlantedSession&) const = default;
};

struct PlantedAdoption {
  std::string doc_id;
  std::string task_id;
  std::string suggestion_id;
  Timestamp read_ts_ms = 0;
  Timestamp paste_ts_ms = 0;
  Adoption kind = Adoption::verbatim;
  std::string source_sentence;
  std::string pasted_sentence;
  std::optional<double> expected_lexical_cosine;  // distinct-token sentences
};

struct PlantedTask {
  std::string task_id;
  std::string doc_id;
  TaskType task_type = TaskType::crowd;
  Timestamp created_ts_ms = 0;
  std::vector<Timestamp> latencies_ms;  // one per delivered suggestion
  orchestrator::SuggestionTask task;
};

struct ExpectedProgress {
  std::string suggestion_id;
  Timestamp read_ts_ms = 0;
  double window_s = 300;
  long long word_delta = 0;
};

struct GroundTruth {
  std::vector<PlantedSession> sessions;
  std::vector<PlantedAdoption> adoptions;
  std::vector<PlantedTask> tasks;
  std::vector<ExpectedProgress> progress;  // first reads, windows 300 and 180
  std::size_t read_events = 0;             // first reads
  std::size_t failed_dispatches = 0;
};

struct SynthResult {
  oplog::EventLog log;
  GroundTruth truth;
};

// ---------------------------------------------------------------------------

inline double typing_interval_max_s(const SynthConfig& c) {
  const double mean = 60.0 / c.typing_words_per_min;
  return c.typing_jitter ? 3.0 * mean : mean;
}

inline void validate(const SynthConfig& c) {
  auto bad = [](const std::string& why) {
    throw Error(ErrorKind::InvalidConfig, why);
  };
  if (c.n_docs == 0) bad("n_docs must be >= 1");
  if (c.n_sessions == 0) bad("n_sessions must be >= 1");
  if (c.words_per_session == 0) bad("words_per_session must be >= 1");
  if (c.sentence_min_words == 0 || c.sentence_min_words > c.sentence_max_words) {
    bad("sentence word range must satisfy 1 <= min <= max");
  }
  if (!(c.typing_words_per_min > 0)) bad("typing rate must be positive");
  if (!(c.typo_rate >= 0 && c.typo_rate < 1)) bad("typo_rate must be in [0,1)");
  if (!c.within_gap.bounded()) bad("within-session gaps must be bounded");
  for (const GapParams* g : {&c.within_gap, &c.between_gap}) {
    if (g->offset_s < 0 || g->exp_mean_s < 0 || g->uniform_width_s < 0) {
      bad("gap parameters must be non-negative");
    }
  }
  double within_max = c.within_gap.max_s() + typing_interval_max_s(c);
  for (const auto& e : c.plan) within_max = std::max(within_max, e.paste_delay_s);
  if (!(c.between_gap.offset_s > within_max)) {
    bad("between-session gaps must exceed every within-session gap (" +
        std::to_string(within_max) + " s)");
  }
  for (const auto& e : c.plan) {
    orchestrator::normalize_params(e.task_type, e.params);
    if (!(e.read_probability >= 0 && e.read_probability <= 1)) {
      bad("read_probability must be in [0,1]");
    }
    if (!(e.paraphrase_strength > 0 && e.paraphrase_strength <= 1)) {
      bad("paraphrase strength must be in (0,1]");
    }
    if (!(e.delivery.median_s > 0) || !(e.read_delay.median_s > 0) ||
        e.delivery.sigma < 0 || e.read_delay.sigma < 0) {
      bad("latency medians must be positive and sigmas non-negative");
    }
    if (e.paste_delay_s < 0) bad("paste delay must be non-negative");
    if (e.session && *e.session >= c.n_sessions) bad("plan session out of range");
    if (e.at_fraction && !(*e.at_fraction >= 0 && *e.at_fraction < 1)) {
      bad("at_fraction must be in [0,1)");
    }
  }
  const auto& tv = c.typing_vocabulary;
  const auto& sv = c.suggestion_vocabulary;
  std::set<std::string> typing(tv.begin(), tv.end());
  for (const auto& w : sv) {
    if (typing.count(w)) bad("typing and suggestion vocabularies overlap: " + w);
  }
  if (!tv.empty() && tv.size() < c.sentence_max_words + 1) {
    bad("typing vocabulary too small");
  }
  if (!sv.empty() && sv.size() < 40) bad("suggestion vocabulary needs >= 40 words");
}

namespace detail {

/// Planned-latency provider used by generate_log.
class PlanProvider final : public orchestrator::SuggestionProvider {
 public:
  PlanProvider(LatencyParams latency, const std::vector<std::string>& vocab)
      : latency_(latency), vocab_(&vocab) {}
  std::vector<orchestrator::GeneratedIdea> generate(
      const orchestrator::SuggestionTask& task, stats::SeededRng& rng) const override {
    std::vector<orchestrator::GeneratedIdea> out;
    for (std::uint32_t i = 0; i < task.num_ideas; ++i) {
      const double lat = latency_.draw(rng);
      out.push_back({lat, wordgen::distinct_word_text(*vocab_, 3, 6, 12, rng)});
    }
    return out;
  }

 private:
  LatencyParams latency_;
  const std::vector<std::string>* vocab_;
};

struct Sentence {
  std::vector<std::string> words;
};

struct PendingRead {
  Timestamp due = 0;
  std::size_t order = 0;
  std::string suggestion_id;
  std::string task_id;
  std::string text;
  std::size_t plan_index = 0;
};

struct TextEvent {
  Timestamp ts;
  long long word_delta;
};

/// Splits the text into its "Word word word." sentences (generator format).
inline std::vector<std::string> generator_sentences(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (std::size_t i = 0; i < text.size(); ++i) {
    cur.push_back(text[i]);
    if (text[i] == '.' && (i + 1 == text.size() || text[i + 1] == ' ')) {
      const auto b = cur.find_first_not_of(' ');
      out.push_back(cur.substr(b));
      cur.clear();
    }
  }
  return out;
}

inline std::vector<std::string> lower_words(const std::string& sentence) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : sentence) {
    if ((ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z')) {
      cur.push_back(ch >= 'A' && ch <= 'Z' ? static_cast<char>(ch + 32) : ch);
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

}  // namespace detail

/// Generates the world. With `registry` null each plan entry's own latency
/// model produces the suggestions; otherwise the registry's providers do.
inline SynthResult generate_world(const SynthConfig& config,
                                  const orchestrator::ProviderRegistry* registry = nullptr) {
  validate(config);
  const auto& typing_vocab = config.typing_vocabulary.empty()
                                 ? wordgen::default_typing_vocabulary()
                                 : config.typing_vocabulary;
  const auto& sugg_vocab = config.suggestion_vocabulary.empty()
                               ? wordgen::default_suggestion_vocabulary()
                               : config.suggestion_vocabulary;
  {
    std::set<std::string> t(typing_vocab.begin(), typing_vocab.end());
    for (const auto& w : sugg_vocab) {
      if (t.count(w)) {
        throw Error(ErrorKind::InvalidConfig, "vocabularies overlap: " + w);
      }
    }
  }

  oplog::EventLogBuilder builder;
  orchestrator::VirtualClock clock(config.start_ms);
  orchestrator::Orchestrator orch(clock, builder);
  GroundTruth truth;
  const stats::SeededRng root(config.seed);
  const double mean_interval_s = 60.0 / config.typing_words_per_min;

  std::vector<orchestrator::ProviderRegistry> plan_registries;
  for (const auto& e : config.plan) {
    orchestrator::ProviderRegistry r;
    r.add(e.task_type, std::make_shared<detail::PlanProvider>(e.delivery, sugg_vocab));
    plan_registries.push_back(std::move(r));
  }

  for (std::size_t d = 0; d < config.n_docs; ++d) {
    const std::string doc = "doc-" + std::to_string(d + 1);
    const stats::SeededRng doc_rng = root.split(d);
    stats::SeededRng structure = doc_rng.split(0);
    stats::SeededRng timing = doc_rng.split(1);
    stats::SeededRng provider_rng = doc_rng.split(2);
    stats::SeededRng read_rng = doc_rng.split(3);
    stats::SeededRng paste_rng = doc_rng.split(4);
    stats::SeededRng typo_rng = doc_rng.split(5);

    // Phase 1: sentence structure and task placement.
    std::vector<std::vector<detail::Sentence>> sessions(config.n_sessions);
    for (auto& sess : sessions) {
      std::size_t words = 0;
      while (words < config.words_per_session) {
        const std::size_t n =
            config.sentence_min_words +
            structure.uniform_index(config.sentence_max_words - config.sentence_min_words + 1);
        detail::Sentence s;
        for (std::size_t i = 0; i < n; ++i) {
          s.words.push_back(typing_vocab[structure.uniform_index(typing_vocab.size())]);
        }
        words += n;
        sess.push_back(std::move(s));
      }
    }
    std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> tasks_at;
    for (std::size_t i = 0; i < config.plan.size(); ++i) {
      const auto& e = config.plan[i];
      const std::size_t s = e.session ? *e.session : structure.uniform_index(config.n_sessions);
      const std::size_t nsent = sessions[s].size();
      std::size_t b = e.at_fraction
                          ? static_cast<std::size_t>(std::floor(*e.at_fraction * nsent))
                          : structure.uniform_index(nsent);
      b = std::min(b, nsent - 1);
      tasks_at[{s, b}].push_back(i);
    }

    // Phase 2: timing.
    std::u32string text;
    std::vector<detail::TextEvent> text_events;
    std::vector<detail::PendingRead> pending;
    std::size_t read_order = 0;
    std::set<std::string> adopted_tasks;
    std::vector<std::pair<std::string, Timestamp>> first_reads;
    Timestamp t = config.start_ms;
    std::size_t sentence_start = 0;

    auto emit_insert = [&](Timestamp ts, const std::string& s, long long words) {
      oplog::Delta delta;
      if (!text.empty()) delta.retain(text.size());
      delta.insert(s);
      builder.append(ts, doc, oplog::TextChange{delta});
      text += utf8::decode(s);
      text_events.push_back({ts, words});
    };
    auto interval_ms = [&]() {
      double f = 1.0;
      if (config.typing_jitter) f = std::clamp(timing.exponential(1.0), 0.2, 3.0);
      return orchestrator::Orchestrator::to_ms(mean_interval_s * f);
    };

    for (std::size_t s = 0; s < sessions.size(); ++s) {
      PlantedSession planted{doc, 0, 0, 0};
      bool first_event = true;
      for (std::size_t j = 0; j < sessions[s].size(); ++j) {
        const auto& words = sessions[s][j].words;
        for (std::size_t k = 0; k < words.size(); ++k) {
          if (!first_event) t += interval_ms();
          if (first_event) planted.start_ms = t;
          first_event = false;
          if (config.typo_rate > 0 && typo_rng.next_uniform() < config.typo_rate) {
            const std::string wrong =
                (text.empty() ? "" : " ") + typing_vocab[typo_rng.uniform_index(typing_vocab.size())];
            emit_insert(t, wrong, 1);
            ++planted.event_count;
            t += interval_ms();
            const std::size_t len = utf8::length(wrong);
            oplog::Delta del;
            del.retain(text.size() - len).erase(len);
            builder.append(t, doc, oplog::TextChange{del});
            text.erase(text.size() - len);
            text_events.push_back({t, -1});
            ++planted.event_count;
            t += interval_ms();
          }
          std::string piece = text.empty() ? "" : " ";
          if (k == 0) sentence_start = text.size() + piece.size();
          piece += k == 0 ? wordgen::capitalize(words[k]) : words[k];
          if (k + 1 == words.size()) piece += ".";
          emit_insert(t, piece, 1);
          ++planted.event_count;
        }

        // Sentence boundary: due reads (and pastes), then planned tasks.
        Timestamp ts = t;
        std::sort(pending.begin(), pending.end(), [](const auto& a, const auto& b) {
          return std::tie(a.due, a.order) < std::tie(b.due, b.order);
        });
        while (!pending.empty() && pending.front().due <= ts) {
          detail::PendingRead r = std::move(pending.front());
          pending.erase(pending.begin());
          ts += 1;
          orch.record_read(doc, r.suggestion_id, ts);
          ++planted.event_count;
          first_reads.emplace_back(r.suggestion_id, ts);
          const auto& entry = config.plan[r.plan_index];
          if (entry.adoption == Adoption::none || adopted_tasks.count(r.task_id)) continue;
          adopted_tasks.insert(r.task_id);
          const auto sentences = detail::generator_sentences(r.text);
          if (sentences.empty()) continue;
          PlantedAdoption a;
          a.doc_id = doc;
          a.task_id = r.task_id;
          a.suggestion_id = r.suggestion_id;
          a.read_ts_ms = ts;
          a.kind = entry.adoption;
          a.source_sentence = sentences[paste_rng.uniform_index(sentences.size())];
          auto toks = detail::lower_words(a.source_sentence);
          const std::set<std::string> distinct(toks.begin(), toks.end());
          if (entry.adoption == Adoption::verbatim) {
            a.pasted_sentence = a.source_sentence;
            if (distinct.size() == toks.size()) a.expected_lexical_cosine = 1.0;
          } else {
            const std::size_t n = toks.size();
            const auto k = static_cast<std::size_t>(
                std::llround((1.0 - entry.paraphrase_strength) * static_cast<double>(n)));
            std::vector<std::size_t> pos(n);
            for (std::size_t i = 0; i < n; ++i) pos[i] = i;
            for (std::size_t i = 0; i < k; ++i) {
              std::swap(pos[i], pos[i + paste_rng.uniform_index(n - i)]);
            }
            std::set<std::string> used(toks.begin(), toks.end());
            const auto repl = wordgen::draw_distinct(typing_vocab, k, used, paste_rng);
            for (std::size_t i = 0; i < k; ++i) toks[pos[i]] = repl[i];
            a.pasted_sentence = wordgen::as_sentence(toks);
            if (distinct.size() == n) {
              a.expected_lexical_cosine =
                  static_cast<double>(n - k) / static_cast<double>(n);
            }
          }
          ts += orchestrator::Orchestrator::to_ms(entry.paste_delay_s);
          a.paste_ts_ms = ts;
          sentence_start = text.size() + (text.empty() ? 0 : 1);
          emit_insert(ts, (text.empty() ? "" : " ") + a.pasted_sentence,
                      static_cast<long long>(toks.size()));
          ++planted.event_count;
          truth.adoptions.push_back(std::move(a));
        }
        planted.end_ms = ts;  // task creation is not session activity
        if (auto it = tasks_at.find({s, j}); it != tasks_at.end()) {
          for (std::size_t pi : it->second) {
            const auto& entry = config.plan[pi];
            ts += 1;
            clock.advance_to(ts);
            const std::u32string snippet = text.substr(sentence_start);
            auto task = orch.create_task(doc, utf8::encode(snippet), sentence_start,
                                         entry.task_type, entry.params);
            PlantedTask pt{task.task_id, doc, task.task_type, task.created_ts_ms, {}, task};
            std::vector<orchestrator::Suggestion> delivered;
            try {
              delivered = orch.dispatch_task(
                  task, registry ? *registry : plan_registries[pi], provider_rng);
            } catch (const Error& e) {
              if (e.kind() != ErrorKind::ProviderFailure) throw;
              ++truth.failed_dispatches;
            }
            for (const auto& sg : delivered) {
              pt.latencies_ms.push_back(sg.latency_ms);
              if (read_rng.next_uniform() < entry.read_probability) {
                const auto delay = orchestrator::Orchestrator::to_ms(entry.read_delay.draw(read_rng));
                pending.push_back({sg.delivered_ts_ms + delay, read_order++, sg.suggestion_id,
                                   sg.task_id, sg.text, pi});
              }
            }
            truth.tasks.push_back(std::move(pt));
          }
        }
        t = ts;
        if (j + 1 < sessions[s].size()) {
          t += orchestrator::Orchestrator::to_ms(config.within_gap.draw(timing));
        }
      }
      truth.sessions.push_back(planted);
      t += orchestrator::Orchestrator::to_ms(config.between_gap.draw(timing));
    }

    // Expected progress from per-event word increments.
    for (const auto& [sid, rts] : first_reads) {
      for (double w : {300.0, 180.0}) {
        const Timestamp end = rts + orchestrator::Orchestrator::to_ms(w);
        long long delta = 0;
        for (const auto& te : text_events) {
          if (te.ts > rts && te.ts <= end) delta += te.word_delta;
        }
        truth.progress.push_back({sid, rts, w, delta});
      }
    }
    truth.read_events += first_reads.size();
  }

  return {builder.build(), std::move(truth)};
}

inline SynthResult generate_log(const SynthConfig& config) { return generate_world(config); }

// ---------------------------------------------------------------------------
// JSON

namespace detail {

using nlohmann::json;

inline GapParams gap_from_json(const json& j) {
  GapParams g;
  g.offset_s = j.value("offset", 0.0);
  g.exp_mean_s = j.value("exp_mean", 0.0);
  g.uniform_width_s = j.value("uniform_width", 0.0);
  return g;
}

inline LatencyParams latency_from_json(const json& j, LatencyParams def) {
  def.median_s = j.value("median", def.median_s);
  def.sigma = j.value("sigma", def.sigma);
  return def;
}

inline PlanEntry plan_entry_from_json(const json& j) {
  PlanEntry e;
  const auto type = j.at("task_type").get<std::string>();
  auto tt = oplog::parse_task_type(type);
  if (!tt) throw Error(ErrorKind::InvalidConfig, "unknown task_type '" + type + "'");
  e.task_type = *tt;
  if (j.contains("instruction")) e.params.instruction = j["instruction"].get<std::string>();
  if (j.contains("num_ideas")) e.params.num_ideas = j["num_ideas"].get<std::uint32_t>();
  if (j.contains("horizon")) {
    auto h = oplog::parse_horizon(j["horizon"].get<std::string>());
    if (!h) throw Error(ErrorKind::InvalidConfig, "horizon must be near|far");
    e.params.horizon = h;
  }
  if (j.contains("delivery_latency_s")) e.delivery = latency_from_json(j["delivery_latency_s"], e.delivery);
  if (j.contains("read_delay_s")) e.read_delay = latency_from_json(j["read_delay_s"], e.read_delay);
  e.read_probability = j.value("read_probability", e.read_probability);
  if (j.contains("adoption")) {
    const json& a = j["adoption"];
    if (a.is_string() && a == "none") {
      e.adoption = Adoption::none;
    } else if (a.is_string() && a == "verbatim") {
      e.adoption = Adoption::verbatim;
    } else if (a.is_object() && a.contains("paraphrase")) {
      e.adoption = Adoption::paraphrase;
      e.paraphrase_strength = a["paraphrase"].get<double>();
    } else {
      throw Error(ErrorKind::InvalidConfig,
                  "adoption must be \"none\", \"verbatim\" or {\"paraphrase\": c}");
    }
  }
  e.paste_delay_s = j.value("paste_delay_s", e.paste_delay_s);
  if (j.contains("session")) e.session = j["session"].get<std::size_t>();
  if (j.contains("at_fraction")) e.at_fraction = j["at_fraction"].get<double>();
  return e;
}

}  // namespace detail

inline SynthConfig config_from_json(const nlohmann::json& j) {
  try {
    SynthConfig c;
    c.seed = j.value("seed", c.seed);
    c.n_docs = j.value("n_docs", c.n_docs);
    c.n_sessions = j.value("n_sessions", c.n_sessions);
    c.words_per_session = j.value("words_per_session", c.words_per_session);
    if (j.contains("sentence_words")) {
      c.sentence_min_words = j["sentence_words"].at(0).get<std::size_t>();
      c.sentence_max_words = j["sentence_words"].at(1).get<std::size_t>();
    }
    c.typing_words_per_min = j.value("typing_words_per_min", c.typing_words_per_min);
    c.typing_jitter = j.value("typing_jitter", c.typing_jitter);
    c.typo_rate = j.value("typo_rate", c.typo_rate);
    if (j.contains("within_gap_s")) c.within_gap = detail::gap_from_json(j["within_gap_s"]);
    if (j.contains("between_gap_s")) c.between_gap = detail::gap_from_json(j["between_gap_s"]);
    c.start_ms = j.value("start_ms", c.start_ms);
    if (j.contains("plan")) {
      for (const auto& pe : j["plan"]) {
        const std::size_t count = pe.value("count", std::size_t{1});
        const PlanEntry e = detail::plan_entry_from_json(pe);
        for (std::size_t i = 0; i < count; ++i) c.plan.push_back(e);
      }
    }
    if (j.contains("typing_vocabulary")) {
      c.typing_vocabulary = j["typing_vocabulary"].get<std::vector<std::string>>();
    }
    if (j.contains("suggestion_vocabulary")) {
      c.suggestion_vocabulary = j["suggestion_vocabulary"].get<std::vector<std::string>>();
    }
    validate(c);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, e.what());
  }
}

inline nlohmann::ordered_json truth_to_json(const GroundTruth& t) {
  nlohmann::ordered_json j;
  j["read_events"] = t.read_events;
  j["failed_dispatches"] = t.failed_dispatches;
  auto& sessions = j["sessions"] = nlohmann::ordered_json::array();
  for (const auto& s : t.sessions) {
    sessions.push_back({{"doc", s.doc_id}, {"start_ms", s.start_ms},
                        {"end_ms", s.end_ms}, {"event_count", s.event_count}});
  }
  auto& adoptions = j["adoptions"] = nlohmann::ordered_json::array();
  for (const auto& a : t.adoptions) {
    nlohmann::ordered_json o = {{"doc", a.doc_id},
                                {"task_id", a.task_id},
                                {"suggestion_id", a.suggestion_id},
                                {"read_ts_ms", a.read_ts_ms},
                                {"paste_ts_ms", a.paste_ts_ms},
                                {"kind", to_string(a.kind)},
                                {"source_sentence", a.source_sentence},
                                {"pasted_sentence", a.pasted_sentence}};
    if (a.expected_lexical_cosine) o["expected_lexical_cosine"] = *a.expected_lexical_cosine;
    adoptions.push_back(std::move(o));
  }
  auto& tasks = j["tasks"] = nlohmann::ordered_json::array();
  for (const auto& pt : t.tasks) {
    tasks.push_back({{"task_id", pt.task_id}, {"doc", pt.doc_id},
                     {"task_type", oplog::to_string(pt.task_type)},
                     {"created_ts_ms", pt.created_ts_ms},
                     {"latencies_ms", pt.latencies_ms}});
  }
  auto& progress = j["progress"] = nlohmann::ordered_json::array();
  for (const auto& p : t.progress) {
    progress.push_back({{"suggestion_id", p.suggestion_id}, {"read_ts_ms", p.read_ts_ms},
                        {"window_s", p.window_s}, {"word_delta", p.word_delta}});
  }
  return j;
}

}  // namespace inkflux::synthgen
