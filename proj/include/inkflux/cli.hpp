#pragma once

// Command-line front end. Exit codes: 0 ok, 1 usage, 2 data, 3 provider.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "inkflux/analyses.hpp"
#include "inkflux/error.hpp"
#include "inkflux/oplog.hpp"
#include "inkflux/remote.hpp"
#include "inkflux/report.hpp"
#include "inkflux/sessionizer.hpp"
#include "inkflux/simulation.hpp"
#include "inkflux/stats.hpp"
#include "inkflux/synthgen.hpp"
#include "inkflux/textmetrics.hpp"

namespace inkflux::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitProvider = 3;

inline constexpr const char* kEmbedEndpointEnv = "INKFLUX_EMBED_ENDPOINT";
inline constexpr const char* kParaphraseEndpointEnv = "INKFLUX_PARAPHRASE_ENDPOINT";

/// Bad command-line values found after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Files that cannot be read or written.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

namespace fs = std::filesystem;

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& path, const std::string& bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << bytes;
  if (!out) throw IoError("write failed: " + path.string());
}

inline oplog::EventLog load_log(const std::string& path) {
  return oplog::parse_event_log(read_file(path));
}

inline nlohmann::json load_json(const std::string& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::InvalidConfig, path + ": " + e.what());
  }
}

/// "lo:hi:step" -> three numbers.
inline std::vector<double> parse_colon_list(const std::string& s, std::size_t n,
                                            const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ':')) {
    char* end = nullptr;
    const double v = std::strtod(part.c_str(), &end);
    if (part.empty() || *end != '\0') throw UsageError(what + ": bad number '" + part + "'");
    out.push_back(v);
  }
  if (out.size() != n) throw UsageError(what + " must have " + std::to_string(n) + " fields");
  return out;
}

/// "<stem>.truth.json" next to the log.
inline fs::path truth_path(const fs::path& log_path) {
  fs::path p = log_path;
  p.replace_extension(".truth.json");
  return p;
}

inline std::string window_tag(double w) { return report::fixed(w, 0) + "s"; }

struct SessionChoice {
  double threshold_s = 0;
  std::vector<sessionizer::WorkingSession> sessions;
};

/// Explicit threshold, or the knee of the default per-document sweep.
inline SessionChoice choose_sessions(const oplog::EventLog& log,
                                     std::optional<double> threshold) {
  SessionChoice c;
  if (threshold) {
    c.threshold_s = *threshold;
  } else {
    const auto streams = sessionizer::activity_streams(log, false);
    const auto grid = sessionizer::default_thresholds();
    c.threshold_s = sessionizer::knee_threshold(sessionizer::threshold_sweep(streams, grid));
  }
  c.sessions = sessionizer::log_sessions(log, c.threshold_s);
  return c;
}

struct CommonOptions {
  std::string log_path;
  std::string out_dir;
  std::size_t runs = 1000;
  std::uint64_t seed = 0;
  std::optional<double> threshold;
  std::string clip;
};

inline stats::KdeOptions kde_options(const std::string& clip) {
  stats::KdeOptions o;
  if (!clip.empty()) {
    const auto v = parse_colon_list(clip, 2, "--clip");
    if (!(v[0] < v[1])) throw UsageError("--clip needs lo < hi");
    o.clip = std::make_pair(v[0], v[1]);
  }
  return o;
}

// ---------------------------------------------------------------------------
// Subcommands

inline int cmd_validate(const std::string& path, std::ostream& out) {
  const auto log = load_log(path);
  std::size_t tasks = 0, deliveries = 0, reads = 0, changes = 0;
  for (const auto& e : log.events()) {
    if (e.is_text_change()) ++changes;
    else if (std::holds_alternative<oplog::TaskCreated>(e.payload)) ++tasks;
    else if (std::holds_alternative<oplog::SuggestionDelivered>(e.payload)) ++deliveries;
    else ++reads;
  }
  out << "ok: " << log.events().size() << " events, " << log.documents().size()
      << " documents, " << changes << " text changes, " << tasks << " tasks, "
      << deliveries << " deliveries, " << reads << " reads\n";
  return kExitOk;
}

inline int cmd_reconstruct(const std::string& path, const std::string& doc,
                           oplog::Timestamp at, std::ostream& out) {
  const auto log = load_log(path);
  out << oplog::reconstruct_at(log, doc, at).text << "\n";
  return kExitOk;
}

inline int cmd_sessions(const std::string& path, const std::string& sweep_spec,
                        bool pooled, std::optional<double> threshold,
                        const std::string& out_dir, std::ostream& out) {
  const auto log = load_log(path);
  std::vector<double> grid = sessionizer::default_thresholds();
  if (!sweep_spec.empty()) {
    const auto v = parse_colon_list(sweep_spec, 3, "--sweep");
    try {
      grid = sessionizer::threshold_grid(v[0], v[1], v[2]);
    } catch (const Error& e) {
      throw UsageError(std::string("--sweep: ") + e.what());
    }
  }
  const auto streams = sessionizer::activity_streams(log, pooled);
  const auto sweep = sessionizer::threshold_sweep(streams, grid);
  const double knee = sessionizer::knee_threshold(sweep);
  const double used = threshold.value_or(knee);
  std::size_t count = 0;
  for (const auto& s : streams) count += sessionizer::segment_sessions(s, used).size();

  if (!out_dir.empty()) {
    std::string csv = "threshold_s,session_count\n";
    for (const auto& p : sweep.points) {
      csv += report::general(p.threshold_s) + "," + std::to_string(p.session_count) + "\n";
    }
    write_file(fs::path(out_dir) / "sweep.csv", csv);
    std::string ss = "doc_id,start_ms,end_ms,duration_s,event_count\n";
    for (const auto& s : sessionizer::log_sessions(log, used)) {
      ss += report::csv_field(s.doc_id) + "," + std::to_string(s.start_ms) + "," +
            std::to_string(s.end_ms) + "," + report::fixed(s.duration_s(), 3) + "," +
            std::to_string(s.event_count) + "\n";
    }
    write_file(fs::path(out_dir) / "sessions.csv", ss);
  }
  out << "knee_threshold_s=" << report::general(knee)
      << " threshold_s=" << report::general(used) << " sessions=" << count
      << " mode=" << (pooled ? "pooled" : "per-doc") << "\n";
  return kExitOk;
}

inline int cmd_rq1(const std::string& path, const std::string& out_dir, std::size_t k,
                   const std::string& unit, std::ostream& out) {
  report::NotReadUnit u;
  if (unit == "task") u = report::NotReadUnit::task;
  else if (unit == "suggestion") u = report::NotReadUnit::suggestion;
  else throw UsageError("--not-read-unit must be task or suggestion");
  const auto log = load_log(path);
  const auto lat = analyses::latency_report(log);
  const auto pooled = analyses::usage_trend(log, k);
  const auto per_doc = analyses::usage_trend_per_document(log, k);
  const fs::path dir(out_dir);
  write_file(dir / "latency.csv", report::latency_csv(lat, u));
  write_file(dir / "usage.csv", report::usage_csv(pooled));
  write_file(dir / "usage_by_doc.csv", report::usage_by_document_csv(per_doc));
  out << "rq1: " << pooled.total_requests() << " requests -> " << out_dir << "\n";
  return kExitOk;
}

inline int cmd_rq2(const CommonOptions& o, std::vector<double> windows, std::ostream& out) {
  if (windows.empty()) windows = {300, 180};
  const auto kopts = kde_options(o.clip);
  const auto log = load_log(o.log_path);
  const auto records = analyses::extract_read_events(log);
  const auto sc = choose_sessions(log, o.threshold);
  const fs::path dir(o.out_dir);
  std::string csv = report::progress_header();
  for (double w : windows) {
    const auto samples = analyses::progress_samples(log, records, w);
    const auto base = analyses::baseline_progress(log, {o.runs, w, o.seed}, sc.sessions);
    csv += report::progress_rows(samples);
    csv += report::baseline_progress_rows(base, w);

    std::map<oplog::TaskType, std::vector<double>> by_type;
    for (const auto& s : samples) {
      by_type[s.record.task_type].push_back(static_cast<double>(s.word_delta));
    }
    const std::vector<double> bd(base.begin(), base.end());
    const auto curves = report::type_curves(by_type, bd, kopts);
    const std::string tag = window_tag(w);
    write_file(dir / ("kde_progress_" + tag + ".csv"), report::kde_csv(curves));
    if (!curves.empty()) {
      report::SvgStyle style{"Writing progress within " + tag + " of reading a suggestion",
                             "word count change", "density"};
      write_file(dir / ("progress_" + tag + ".svg"), report::emit_kde_svg(curves, style));
    }
  }
  write_file(dir / "progress.csv", csv);
  out << "rq2: " << records.size() << " read events, " << sc.sessions.size()
      << " sessions at " << report::general(sc.threshold_s) << " s -> " << o.out_dir << "\n";
  return kExitOk;
}

inline int cmd_rq3(const CommonOptions& o, const std::string& metric_name, double window,
                   std::string embed_endpoint, std::string paraphrase_endpoint,
                   std::ostream& out) {
  const auto metric = textmetrics::parse_metric(metric_name);
  if (!metric) throw UsageError("--metric must be edit, semantic or paraphrase");
  const auto kopts = kde_options(o.clip);
  if (embed_endpoint.empty()) {
    if (const char* v = std::getenv(kEmbedEndpointEnv)) embed_endpoint = v;
  }
  if (paraphrase_endpoint.empty()) {
    if (const char* v = std::getenv(kParaphraseEndpointEnv)) paraphrase_endpoint = v;
  }
  remote::HttpOptions http;
  http.api_key = remote::api_key_from_env();
  std::unique_ptr<remote::HttpEmbeddingProvider> embedder;
  std::unique_ptr<remote::HttpParaphraseProvider> paraphraser;
  textmetrics::Providers providers;
  if (!embed_endpoint.empty()) {
    embedder = std::make_unique<remote::HttpEmbeddingProvider>(embed_endpoint, http);
    providers.embedder = embedder.get();
  }
  if (!paraphrase_endpoint.empty()) {
    paraphraser = std::make_unique<remote::HttpParaphraseProvider>(paraphrase_endpoint, http);
    providers.paraphraser = paraphraser.get();
  }

  const auto log = load_log(o.log_path);
  const auto records = analyses::extract_read_events(log);
  const auto sc = choose_sessions(log, o.threshold);
  analyses::InfluenceResult result;
  try {
    result = analyses::influence_samples(log, records, window, *metric, providers);
  } catch (const analyses::InfluenceAborted& e) {
    const fs::path dir(o.out_dir);
    write_file(dir / "influence.partial.csv",
               report::influence_header() + report::influence_rows(e.partial()));
    throw;
  }
  const auto base = analyses::baseline_influence(log, {o.runs, window, o.seed}, sc.sessions,
                                                 *metric, providers);
  const fs::path dir(o.out_dir);
  write_file(dir / "influence.csv", report::influence_header() +
                                        report::influence_rows(result) +
                                        report::baseline_influence_rows(base, *metric));

  std::map<oplog::TaskType, std::vector<double>> by_type;
  for (const auto& s : result.samples) {
    if (s.score) by_type[s.record.task_type].push_back(*s.score);
  }
  const auto curves = report::type_curves(by_type, base.scores, kopts);
  const std::string m = textmetrics::to_string(*metric);
  write_file(dir / ("kde_influence_" + m + ".csv"), report::kde_csv(curves));
  if (!curves.empty()) {
    report::SvgStyle style{"Suggestion influence (" + m + ")", "similarity", "density"};
    write_file(dir / ("influence_" + m + ".svg"), report::emit_kde_svg(curves, style));
  }
  const auto scores = result.scores();
  out << "rq3: metric=" << m << " samples=" << scores.size()
      << " excluded=" << result.excluded << " baseline=" << base.scores.size();
  if (!scores.empty() && !base.scores.empty()) {
    out << " ks=" << report::fixed(stats::ks_statistic(scores, base.scores), 6);
  }
  out << " -> " << o.out_dir << "\n";
  return kExitOk;
}

inline void write_world(const synthgen::SynthResult& r, const std::string& out_path) {
  write_file(out_path, oplog::serialize_event_log(r.log));
  write_file(truth_path(out_path), synthgen::truth_to_json(r.truth).dump(2) + "\n");
}

inline int cmd_synth(const std::string& config_path, const std::string& out_path,
                     std::optional<std::uint64_t> seed, std::ostream& out) {
  auto config = synthgen::config_from_json(load_json(config_path));
  if (seed) config.seed = *seed;
  const auto r = synthgen::generate_log(config);
  write_world(r, out_path);
  out << "synth: " << r.log.events().size() << " events, " << r.truth.sessions.size()
      << " sessions, " << r.truth.read_events << " read events -> " << out_path << "\n";
  return kExitOk;
}

inline int cmd_simulate(const std::string& config_path, const std::string& out_path,
                        std::optional<std::uint64_t> seed, std::ostream& out) {
  auto config = simulation::config_from_json(load_json(config_path));
  if (seed) config.world.seed = *seed;
  const auto r = simulation::simulate(config);
  write_world(r.world, out_path);
  out << "simulate: " << r.world.log.events().size() << " events";
  for (auto t : oplog::kAllTaskTypes) {
    const auto i = static_cast<std::size_t>(t);
    out << ", " << oplog::to_string(t) << "=" << r.cost.tasks[i];
  }
  out << ", cost=" << report::fixed(r.cost.total(), 4) << " -> " << out_path << "\n";
  return kExitOk;
}

/// Keeps a diagnostic to a single line.
inline std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace detail

inline int run_command(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"inkflux: writing-log analytics and suggestion simulation", "inkflux"};
  app.require_subcommand(1);

  std::string log_path, out_path, doc, sweep, metric = "edit", unit = "task";
  std::string embed_ep, paraphrase_ep, config_path;
  oplog::Timestamp at = 0;
  bool per_doc = false, pooled = false;
  std::size_t k = 4;
  std::vector<double> windows;
  double window3 = 300;
  std::optional<std::uint64_t> seed;
  detail::CommonOptions common;

  auto* validate = app.add_subcommand("validate", "Parse and check an event log");
  validate->add_option("log", log_path, "JSONL event log")->required();

  auto* reconstruct = app.add_subcommand("reconstruct", "Print a document at a time");
  reconstruct->add_option("log", log_path)->required();
  reconstruct->add_option("--doc", doc, "document id")->required();
  reconstruct->add_option("--at", at, "timestamp in ms (inclusive)")->required();

  auto* sessions = app.add_subcommand("sessions", "Threshold sweep and knee");
  sessions->add_option("log", log_path)->required();
  sessions->add_option("--sweep", sweep, "lo:hi:step in seconds");
  auto* f_per = sessions->add_flag("--per-doc", per_doc, "segment each document (default)");
  auto* f_pool = sessions->add_flag("--pooled", pooled, "merge all documents");
  f_per->excludes(f_pool);
  sessions->add_option("--threshold", common.threshold, "session threshold in seconds");
  sessions->add_option("--out", out_path, "directory for sweep.csv and sessions.csv");

  auto* rq1 = app.add_subcommand("rq1", "Usage trend and latency");
  rq1->add_option("log", log_path)->required();
  rq1->add_option("--out", out_path)->required();
  rq1->add_option("--phases", k, "number of phases")->check(CLI::PositiveNumber);
  rq1->add_option("--not-read-unit", unit, "task|suggestion");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("log", log_path)->required();
    sub->add_option("--out", out_path)->required();
    sub->add_option("--runs", common.runs, "baseline runs")->check(CLI::PositiveNumber);
    sub->add_option("--seed", common.seed, "baseline seed");
    sub->add_option("--threshold", common.threshold, "session threshold (knee when absent)");
    sub->add_option("--clip", common.clip, "lo:hi sample clip for KDE");
  };
  auto* rq2 = app.add_subcommand("rq2", "Writing progress vs baseline");
  add_common(rq2);
  rq2->add_option("--window", windows, "window in seconds (repeatable)");

  auto* rq3 = app.add_subcommand("rq3", "Suggestion influence vs baseline");
  add_common(rq3);
  rq3->add_option("--metric", metric, "edit|semantic|paraphrase");
  rq3->add_option("--window", window3, "window in seconds");
  rq3->add_option("--embed-endpoint", embed_ep, "embedding service URL");
  rq3->add_option("--paraphrase-endpoint", paraphrase_ep, "paraphrase service URL");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic log");
  synth->add_option("config", config_path)->required();
  synth->add_option("--out", out_path)->required();
  synth->add_option("--seed", seed);

  auto* simulate = app.add_subcommand("simulate", "Simulate a study through the orchestrator");
  simulate->add_option("config", config_path)->required();
  simulate->add_option("--out", out_path)->required();
  simulate->add_option("--seed", seed);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(std::move(rev));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "inkflux: usage: " << detail::one_line(e.what()) << "\n";
    return kExitUsage;
  }

  try {
    common.log_path = log_path;
    common.out_dir = out_path;
    if (*validate) return detail::cmd_validate(log_path, out);
    if (*reconstruct) return detail::cmd_reconstruct(log_path, doc, at, out);
    if (*sessions) {
      return detail::cmd_sessions(log_path, sweep, pooled, common.threshold, out_path, out);
    }
    if (*rq1) return detail::cmd_rq1(log_path, out_path, k, unit, out);
    if (*rq2) return detail::cmd_rq2(common, windows, out);
    if (*rq3) return detail::cmd_rq3(common, metric, window3, embed_ep, paraphrase_ep, out);
    if (*synth) return detail::cmd_synth(config_path, out_path, seed, out);
    if (*simulate) return detail::cmd_simulate(config_path, out_path, seed, out);
  } catch (const UsageError& e) {
    err << "inkflux: usage: " << detail::one_line(e.what()) << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "inkflux: " << detail::one_line(e.what());
    if (e.line()) err << " (line " << *e.line() << ")";
    err << "\n";
    return is_provider_error(e) ? kExitProvider : kExitData;
  } catch (const std::exception& e) {
    err << "inkflux: " << detail::one_line(e.what()) << "\n";
    return kExitData;
  }
  return kExitUsage;
}

inline int run_command(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_command(std::move(args), std::cout, std::cerr);
}

}  // namespace inkflux::cli
