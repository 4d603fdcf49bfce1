#pragma once

// CSV tables and SVG density charts. All numbers go through fixed printf
// formats so identical inputs give identical bytes.

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "inkflux/analyses.hpp"
#include "inkflux/error.hpp"
#include "inkflux/stats.hpp"
#include "inkflux/textmetrics.hpp"

namespace inkflux::report {

using oplog::TaskType;

inline std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  std::string s(buf);
  if (s == "-0" || s.find_first_not_of("-0.") == std::string::npos) {
    if (s[0] == '-') s.erase(0, 1);
  }
  return s;
}

inline std::string general(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

/// Quotes a field when it holds a comma, quote or line break.
inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline constexpr const char* kBaselineLabel = "baseline";

// ---------------------------------------------------------------------------
// CSV tables

enum class NotReadUnit { task, suggestion };

inline std::string latency_csv(const analyses::LatencyReport& r,
                               NotReadUnit unit = NotReadUnit::task) {
  std::string out =
      "task_type,samples_system,q25_system_s,q50_system_s,q75_system_s,"
      "samples_reading,q25_reading_s,q50_reading_s,q75_reading_s,not_read_rate\n";
  auto quart = [](const std::optional<analyses::Quartiles>& q) {
    if (!q) return std::string(",,");
    return fixed(q->q25, 3) + "," + fixed(q->q50, 3) + "," + fixed(q->q75, 3);
  };
  for (const auto& row : r.per_type) {
    const auto& rate = unit == NotReadUnit::task ? row.not_read_rate
                                                 : row.suggestion_not_read_rate;
    out += oplog::to_string(row.task_type);
    out += "," + std::to_string(row.system_s.size()) + "," + quart(row.system);
    out += "," + std::to_string(row.reading_s.size()) + "," + quart(row.reading);
    out += "," + (rate ? fixed(*rate, 6) : std::string()) + "\n";
  }
  return out;
}

inline std::string usage_rows(const analyses::UsageTrend& t, const std::string& prefix) {
  std::string out;
  for (std::size_t p = 0; p < t.phases.size(); ++p) {
    for (TaskType type : oplog::kAllTaskTypes) {
      out += prefix + std::to_string(p + 1) + "," + oplog::to_string(type) + "," +
             fixed(t.phases[p].proportion(type), 6) + "\n";
    }
  }
  return out;
}

inline std::string usage_csv(const analyses::UsageTrend& t) {
  return "phase,task_type,proportion\n" + usage_rows(t, "");
}

inline std::string usage_by_document_csv(
    const std::map<std::string, analyses::UsageTrend>& per_doc) {
  std::string out = "doc_id,phase,task_type,proportion\n";
  for (const auto& [doc, t] : per_doc) out += usage_rows(t, csv_field(doc) + ",");
  return out;
}

inline std::string progress_header() { return "read_event_id,task_type,window_s,word_delta\n"; }

inline std::string progress_rows(std::span<const analyses::ProgressSample> samples) {
  std::string out;
  for (const auto& s : samples) {
    out += csv_field(s.record.suggestion_id) + "," + oplog::to_string(s.record.task_type) +
           "," + fixed(s.window_s, 0) + "," + std::to_string(s.word_delta) + "\n";
  }
  return out;
}

inline std::string baseline_progress_rows(std::span<const long long> deltas,
                                          double window_s) {
  std::string out;
  for (std::size_t r = 0; r < deltas.size(); ++r) {
    out += "baseline-" + std::to_string(r + 1) + "," + kBaselineLabel + "," +
           fixed(window_s, 0) + "," + std::to_string(deltas[r]) + "\n";
  }
  return out;
}

inline std::string influence_header() { return "read_event_id,task_type,metric,score\n"; }

/// Excluded samples keep their row with an empty score.
inline std::string influence_rows(const analyses::InfluenceResult& r) {
  std::string out;
  for (const auto& s : r.samples) {
    out += csv_field(s.record.suggestion_id) + "," + oplog::to_string(s.record.task_type) +
           "," + textmetrics::to_string(s.metric) + "," +
           (s.score ? fixed(*s.score, 6) : std::string()) + "\n";
  }
  return out;
}

inline std::string baseline_influence_rows(const analyses::BaselineScores& b,
                                           textmetrics::SimilarityMetricId metric) {
  std::string out;
  for (std::size_t r = 0; r < b.scores.size(); ++r) {
    out += "baseline-" + std::to_string(r + 1) + "," + kBaselineLabel + "," +
           textmetrics::to_string(metric) + "," + fixed(b.scores[r], 6) + "\n";
  }
  return out;
}

struct LabeledCurve {
  std::string label;
  stats::KdeCurve curve;
};

inline std::string kde_csv(std::span<const LabeledCurve> curves) {
  std::string out = "label,grid,density\n";
  for (const auto& c : curves) {
    const std::string label = csv_field(c.label);
    for (std::size_t i = 0; i < c.curve.grid.size(); ++i) {
      out += label + "," + general(c.curve.grid[i]) + "," + general(c.curve.density[i]) + "\n";
    }
  }
  return out;
}

/// One curve per task type with at least two samples, then the baseline.
inline std::vector<LabeledCurve> type_curves(
    const std::map<TaskType, std::vector<double>>& by_type,
    std::span<const double> baseline, const stats::KdeOptions& opts) {
  std::vector<LabeledCurve> out;
  for (TaskType t : oplog::kAllTaskTypes) {
    auto it = by_type.find(t);
    if (it == by_type.end() || it->second.size() < 2) continue;
    out.push_back({oplog::to_string(t), stats::gaussian_kde(it->second, opts)});
  }
  if (baseline.size() >= 2) {
    out.push_back({kBaselineLabel, stats::gaussian_kde(baseline, opts)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// SVG

struct SvgStyle {
  std::string title;
  std::string x_label = "value";
  std::string y_label = "density";
};

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

inline constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                           "#7f7f7f", "#9467bd", "#8c564b", "#e377c2"};

/// 800x400 chart, one polyline per curve, legend in input order.
inline std::string emit_kde_svg(std::span<const LabeledCurve> curves,
                                const SvgStyle& style = {}) {
  if (curves.empty()) throw Error(ErrorKind::NoCurves, "no curves to plot");
  constexpr double W = 800, H = 400;
  constexpr double left = 70, right = 640, top = 40, bottom = 340;

  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -xmin, ymax = 0;
  for (const auto& c : curves) {
    for (double g : c.curve.grid) {
      xmin = std::min(xmin, g);
      xmax = std::max(xmax, g);
    }
    for (double d : c.curve.density) ymax = std::max(ymax, d);
  }
  if (!(xmin < xmax)) {
    if (xmin == std::numeric_limits<double>::infinity()) xmin = 0, xmax = 0;
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (!(ymax > 0)) ymax = 1;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (right - left); };
  auto py = [&](double y) { return bottom - y / ymax * (bottom - top); };
  auto n2 = [](double v) { return fixed(v, 2); };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 400\" width=\"" +
       n2(W) + "\" height=\"" + n2(H) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"400\" fill=\"white\"/>\n";
  if (!style.title.empty()) {
    s += "<text x=\"" + n2((left + right) / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" +
         xml_escape(style.title) + "</text>\n";
  }
  s += "<g stroke=\"black\" stroke-width=\"1\">\n";
  s += "<line x1=\"" + n2(left) + "\" y1=\"" + n2(bottom) + "\" x2=\"" + n2(right) + "\" y2=\"" +
       n2(bottom) + "\"/>\n";
  s += "<line x1=\"" + n2(left) + "\" y1=\"" + n2(top) + "\" x2=\"" + n2(left) + "\" y2=\"" +
       n2(bottom) + "\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 4.0;
    const double fy = ymax * i / 4.0;
    s += "<line x1=\"" + n2(px(fx)) + "\" y1=\"" + n2(bottom) + "\" x2=\"" + n2(px(fx)) +
         "\" y2=\"" + n2(bottom + 5) + "\"/>\n";
    s += "<line x1=\"" + n2(left - 5) + "\" y1=\"" + n2(py(fy)) + "\" x2=\"" + n2(left) +
         "\" y2=\"" + n2(py(fy)) + "\"/>\n";
  }
  s += "</g>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 4.0;
    const double fy = ymax * i / 4.0;
    s += "<text x=\"" + n2(px(fx)) + "\" y=\"" + n2(bottom + 18) +
         "\" text-anchor=\"middle\">" + general(fx) + "</text>\n";
    s += "<text x=\"" + n2(left - 8) + "\" y=\"" + n2(py(fy) + 4) +
         "\" text-anchor=\"end\">" + general(fy) + "</text>\n";
  }
  s += "<text x=\"" + n2((left + right) / 2) + "\" y=\"" + n2(bottom + 40) +
       "\" text-anchor=\"middle\">" + xml_escape(style.x_label) + "</text>\n";
  s += "<text x=\"16\" y=\"" + n2((top + bottom) / 2) +
       "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " + n2((top + bottom) / 2) +
       ")\">" + xml_escape(style.y_label) + "</text>\n";

  for (std::size_t c = 0; c < curves.size(); ++c) {
    const char* color = kPalette[c % std::size(kPalette)];
    const auto& cv = curves[c].curve;
    s += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
         "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < cv.grid.size(); ++i) {
      if (i) s.push_back(' ');
      s += n2(px(cv.grid[i])) + "," + n2(py(cv.density[i]));
    }
    s += "\"/>\n";
  }
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const char* color = kPalette[c % std::size(kPalette)];
    const double y = top + 10 + 20.0 * static_cast<double>(c);
    s += "<line x1=\"660\" y1=\"" + n2(y) + "\" x2=\"685\" y2=\"" + n2(y) + "\" stroke=\"" +
         color + "\" stroke-width=\"2\"/>\n";
    s += "<text x=\"692\" y=\"" + n2(y + 4) + "\">" + xml_escape(curves[c].label) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace inkflux::report
