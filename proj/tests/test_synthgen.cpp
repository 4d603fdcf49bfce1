#include <gtest/gtest.h>

#include "inkflux/analyses.hpp"
#include "inkflux/synthgen.hpp"

using namespace inkflux;
using namespace inkflux::synthgen;
using oplog::TaskType;

namespace {

PlanEntry entry(TaskType t, Adoption a = Adoption::none) {
  PlanEntry e;
  e.task_type = t;
  e.adoption = a;
  e.delivery = {8, 0.3};
  e.read_delay = {15, 0.4};
  return e;
}

SynthConfig mixed_config(std::uint64_t seed) {
  SynthConfig c;
  c.seed = seed;
  c.n_docs = 2;
  c.n_sessions = 4;
  c.words_per_session = 150;
  c.plan = {entry(TaskType::gpt3_continuation, Adoption::verbatim),
            entry(TaskType::gpt3_plot),
            entry(TaskType::story_plot, Adoption::paraphrase),
            entry(TaskType::crowd)};
  c.plan[2].paraphrase_strength = 0.5;
  c.plan[3].delivery = {600, 0.5};
  return c;
}

const analyses::ProgressSample* find_sample(const std::vector<analyses::ProgressSample>& ps,
                                            const std::string& sid) {
  for (const auto& p : ps) {
    if (p.record.suggestion_id == sid) return &p;
  }
  return nullptr;
}

}  // namespace

TEST(Synth, DeterministicPerSeed) {
  const auto a = oplog::serialize_event_log(generate_log(mixed_config(3)).log);
  const auto b = oplog::serialize_event_log(generate_log(mixed_config(3)).log);
  const auto c = oplog::serialize_event_log(generate_log(mixed_config(4)).log);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  EXPECT_EQ(truth_to_json(generate_log(mixed_config(3)).truth).dump(),
            truth_to_json(generate_log(mixed_config(3)).truth).dump());
}

TEST(Synth, LogRoundTripsThroughParser) {
  const auto w = generate_log(mixed_config(5));
  const auto text = oplog::serialize_event_log(w.log);
  EXPECT_EQ(oplog::serialize_event_log(oplog::parse_event_log(text)), text);
}

TEST(Synth, PlantedSessionsRecoveredAt240) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto cfg = mixed_config(seed);
    cfg.typo_rate = seed % 2 ? 0.05 : 0.0;
    const auto w = generate_log(cfg);
    const auto found = sessionizer::log_sessions(w.log, 240);
    ASSERT_EQ(found.size(), w.truth.sessions.size()) << "seed " << seed;
    for (std::size_t i = 0; i < found.size(); ++i) {
      EXPECT_EQ(found[i].doc_id, w.truth.sessions[i].doc_id);
      EXPECT_EQ(found[i].start_ms, w.truth.sessions[i].start_ms);
      EXPECT_EQ(found[i].end_ms, w.truth.sessions[i].end_ms);
      EXPECT_EQ(found[i].event_count, w.truth.sessions[i].event_count);
    }
  }
}

TEST(Synth, TwelvePlantedReadsRecovered) {
  SynthConfig c;
  c.seed = 8;
  c.n_sessions = 6;
  for (int i = 0; i < 12; ++i) c.plan.push_back(entry(TaskType::gpt3_continuation));
  const auto w = generate_log(c);
  const auto reads = analyses::extract_read_events(w.log);
  EXPECT_EQ(reads.size(), 12u);
  EXPECT_EQ(w.truth.read_events, 12u);
  std::set<std::string> truth_ids;
  for (const auto& p : w.truth.progress) truth_ids.insert(p.suggestion_id);
  for (const auto& r : reads) EXPECT_TRUE(truth_ids.count(r.suggestion_id));
}

TEST(Synth, UnreadSuggestionsAreNotRead) {
  SynthConfig c;
  c.seed = 2;
  for (int i = 0; i < 5; ++i) {
    auto e = entry(TaskType::gpt3_plot);
    e.read_probability = 0;
    c.plan.push_back(e);
  }
  const auto w = generate_log(c);
  EXPECT_TRUE(analyses::extract_read_events(w.log).empty());
  const auto rep = analyses::latency_report(w.log);
  EXPECT_EQ(*rep.per_type[analyses::type_index(TaskType::gpt3_plot)].not_read_rate, 1.0);
}

TEST(Synth, ProgressMatchesPlantedIncrements) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto cfg = mixed_config(seed);
    cfg.typo_rate = 0.1;
    const auto w = generate_log(cfg);
    for (double window : {300.0, 180.0}) {
      const auto ps = analyses::progress_samples(w.log, window);
      for (const auto& e : w.truth.progress) {
        if (e.window_s != window) continue;
        const auto* p = find_sample(ps, e.suggestion_id);
        ASSERT_NE(p, nullptr);
        EXPECT_EQ(p->word_delta, e.word_delta) << e.suggestion_id << " @" << window;
      }
    }
  }
}

TEST(Synth, TypingRateGivesFiveMinutesOfWords) {
  for (double r : {10.0, 20.0, 40.0}) {
    SynthConfig c;
    c.seed = 11;
    c.typing_words_per_min = r;
    c.typing_jitter = false;
    c.within_gap = {0, 0, 0};
    c.words_per_session = 400;
    c.n_sessions = 1;
    auto e = entry(TaskType::gpt3_continuation);
    e.at_fraction = 0.2;
    e.delivery = {1, 0};
    e.read_delay = {1, 0};
    c.plan = {e};
    const auto w = generate_log(c);
    const auto ps = analyses::progress_samples(w.log, 300);
    ASSERT_EQ(ps.size(), 1u);
    EXPECT_NEAR(static_cast<double>(ps[0].word_delta), 5 * r, 2.0) << r;
  }
}

TEST(Synth, LatencyClosure) {
  const auto w = generate_log(mixed_config(6));
  const auto rep = analyses::latency_report(w.log);
  std::map<TaskType, std::vector<double>> expected;
  for (const auto& t : w.truth.tasks) {
    ASSERT_FALSE(t.latencies_ms.empty());
    const auto m = *std::min_element(t.latencies_ms.begin(), t.latencies_ms.end());
    expected[t.task_type].push_back(static_cast<double>(m) / 1000.0);
  }
  for (auto& [type, xs] : expected) {
    auto got = rep.per_type[analyses::type_index(type)].system_s;
    std::sort(got.begin(), got.end());
    std::sort(xs.begin(), xs.end());
    EXPECT_EQ(got, xs);
  }
}

TEST(Synth, VerbatimAdoptionScoresOne) {
  auto cfg = mixed_config(9);
  const auto w = generate_log(cfg);
  const auto inf = analyses::influence_samples(w.log, 300, textmetrics::SimilarityMetricId::edit);
  std::size_t checked = 0;
  for (const auto& a : w.truth.adoptions) {
    if (a.kind != Adoption::verbatim) continue;
    for (const auto& s : inf.samples) {
      if (s.record.suggestion_id == a.suggestion_id) {
        ASSERT_TRUE(s.score);
        EXPECT_EQ(*s.score, 1.0);
        ++checked;
      }
    }
  }
  std::size_t planted = 0;
  for (const auto& a : w.truth.adoptions) planted += a.kind == Adoption::verbatim;
  EXPECT_GE(planted, 1u);
  EXPECT_EQ(checked, planted);
}

TEST(Synth, ParaphraseCosineIsPlanted) {
  std::size_t checked = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SynthConfig c;
    c.seed = seed;
    auto e = entry(TaskType::gpt3_plot, Adoption::paraphrase);
    e.paraphrase_strength = 0.3 + 0.06 * static_cast<double>(seed);
    c.plan = {e};
    const auto w = generate_log(c);
    ASSERT_EQ(w.truth.adoptions.size(), 1u);
    const auto& a = w.truth.adoptions[0];
    ASSERT_TRUE(a.expected_lexical_cosine);
    EXPECT_DOUBLE_EQ(textmetrics::lexical_cosine(a.source_sentence, a.pasted_sentence),
                     *a.expected_lexical_cosine);
    const auto inf =
        analyses::influence_samples(w.log, 300, textmetrics::SimilarityMetricId::semantic);
    for (const auto& s : inf.samples) {
      if (s.record.suggestion_id != a.suggestion_id) continue;
      ASSERT_TRUE(s.score);
      EXPECT_DOUBLE_EQ(*s.score, *a.expected_lexical_cosine);
      ++checked;
    }
  }
  EXPECT_EQ(checked, 10u);
}

TEST(Synth, NoAdoptionMeansZeroLexicalInfluence) {
  auto cfg = mixed_config(12);
  for (auto& e : cfg.plan) e.adoption = Adoption::none;
  const auto w = generate_log(cfg);
  EXPECT_TRUE(w.truth.adoptions.empty());
  const auto inf =
      analyses::influence_samples(w.log, 300, textmetrics::SimilarityMetricId::semantic);
  EXPECT_FALSE(inf.scores().empty());
  for (double s : inf.scores()) EXPECT_EQ(s, 0.0);
}

TEST(Synth, RegistryProvidersAreUsed) {
  auto cfg = mixed_config(1);
  const auto reg = orchestrator::default_simulated_registry();
  const auto w = generate_world(cfg, &reg);
  bool saw_plot_prefix = false;
  for (const auto& e : w.log.events()) {
    if (const auto* d = std::get_if<oplog::SuggestionDelivered>(&e.payload)) {
      if (d->text.rfind("Near future plot: ", 0) == 0) saw_plot_prefix = true;
    }
  }
  EXPECT_TRUE(saw_plot_prefix);
  orchestrator::ProviderRegistry empty;
  try {
    generate_world(cfg, &empty);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoProvider);
  }
}

TEST(Synth, ValidationRejectsUnrecoverableWorlds) {
  auto expect_invalid = [](const SynthConfig& c) {
    try {
      generate_log(c);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidConfig);
    }
  };
  SynthConfig c;
  c.within_gap = {0, 20, 0};
  expect_invalid(c);
  c = {};
  c.between_gap = {20, 600, 0};
  expect_invalid(c);
  c = {};
  c.typing_vocabulary = {"alpha", "beta"};
  c.suggestion_vocabulary = {"beta", "gamma"};
  expect_invalid(c);
  c = {};
  c.typing_words_per_min = 0;
  expect_invalid(c);
  c = {};
  c.plan = {entry(TaskType::gpt3_plot)};
  c.plan[0].params.horizon = oplog::Horizon::far;
  EXPECT_THROW(generate_log(c), Error);
}

TEST(Synth, ConfigFromJson) {
  const auto j = nlohmann::json::parse(R"({
    "seed": 4, "n_docs": 2, "sentence_words": [3, 5],
    "within_gap_s": {"offset": 1, "uniform_width": 4},
    "between_gap_s": {"offset": 900, "exp_mean": 100},
    "plan": [
      {"task_type": "gpt3_continuation", "adoption": "verbatim", "count": 3},
      {"task_type": "story_plot", "horizon": "far", "adoption": {"paraphrase": 0.5},
       "delivery_latency_s": {"median": 5, "sigma": 0}, "session": 1, "at_fraction": 0.5}
    ]
  })");
  const auto c = config_from_json(j);
  EXPECT_EQ(c.seed, 4u);
  EXPECT_EQ(c.n_docs, 2u);
  EXPECT_EQ(c.sentence_max_words, 5u);
  EXPECT_EQ(c.within_gap.uniform_width_s, 4.0);
  EXPECT_EQ(c.between_gap.exp_mean_s, 100.0);
  ASSERT_EQ(c.plan.size(), 4u);
  EXPECT_EQ(c.plan[2].adoption, Adoption::verbatim);
  EXPECT_EQ(c.plan[3].adoption, Adoption::paraphrase);
  EXPECT_EQ(c.plan[3].paraphrase_strength, 0.5);
  EXPECT_EQ(*c.plan[3].params.horizon, oplog::Horizon::far);
  EXPECT_EQ(c.plan[3].delivery.median_s, 5.0);
  EXPECT_EQ(*c.plan[3].session, 1u);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(
                   R"({"plan":[{"task_type":"crowd","adoption":"sometimes"}]})")),
               Error);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"plan":[{"task_type":"oracle"}]})")),
               Error);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"n_docs": "two"})")), Error);
}
