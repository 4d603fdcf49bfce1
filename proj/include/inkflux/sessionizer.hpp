#pragma once

// Working-session segmentation by inactivity threshold, threshold sweeps and
// knee selection.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "inkflux/error.hpp"
#include "inkflux/oplog.hpp"

namespace inkflux::sessionizer {

using oplog::Timestamp;

struct WorkingSession {
  std::string doc_id;
  Timestamp start_ms = 0;
  Timestamp end_ms = 0;
  std::size_t event_count = 0;

  double duration_s() const {
    return static_cast<double>(end_ms - start_ms) / 1000.0;
  }
  bool operator==(const WorkingSession&) const = default;
};

/// Splits sorted timestamps wherever the gap to the previous event is
/// >= threshold_s. Empty input yields no sessions.
inline std::vector<WorkingSession> segment_sessions(
    std::span<const Timestamp> timestamps_ms, double threshold_s,
    const std::string& doc_id = {}) {
  if (!(threshold_s > 0.0)) {
    throw Error(ErrorKind::InvalidParams, "threshold must be positive");
  }
  std::vector<WorkingSession> out;
  if (timestamps_ms.empty()) return out;
  const double threshold_ms = threshold_s * 1000.0;
  WorkingSession cur{doc_id, timestamps_ms[0], timestamps_ms[0], 1};
  for (std::size_t i = 1; i < timestamps_ms.size(); ++i) {
    const Timestamp t = timestamps_ms[i];
    if (t < timestamps_ms[i - 1]) {
      throw Error(ErrorKind::InvalidParams, "timestamps must be sorted");
    }
    if (static_cast<double>(t - cur.end_ms) >= threshold_ms) {
      out.push_back(cur);
      cur = {doc_id, t, t, 1};
    } else {
      cur.end_ms = t;
      ++cur.event_count;
    }
  }
  out.push_back(cur);
  return out;
}

struct SweepPoint {
  double threshold_s = 0.0;
  std::size_t session_count = 0;
  bool operator==(const SweepPoint&) const = default;
};

struct ThresholdSweep {
  std::vector<SweepPoint> points;
};

/// 60 s to 1200 s in 60 s steps.
inline std::vector<double> default_thresholds() {
  std::vector<double> out;
  for (int s = 60; s <= 1200; s += 60) out.push_back(s);
  return out;
}

inline std::vector<double> threshold_grid(double lo, double hi, double step) {
  if (!(lo > 0.0) || !(step > 0.0) || hi < lo) {
    throw Error(ErrorKind::InvalidParams, "bad sweep range");
  }
  std::vector<double> out;
  for (std::size_t i = 0;; ++i) {
    const double t = lo + step * static_cast<double>(i);
    if (t > hi + 1e-9 * step) break;
    out.push_back(t);
  }
  return out;
}

namespace detail {

inline void check_thresholds(std::span<const double> thresholds_s) {
  for (std::size_t i = 0; i < thresholds_s.size(); ++i) {
    if (!(thresholds_s[i] > 0.0) ||
        (i > 0 && !(thresholds_s[i] > thresholds_s[i - 1]))) {
      throw Error(ErrorKind::InvalidParams,
                  "thresholds must be positive and strictly increasing");
    }
  }
}

}  // namespace detail

/// Session counts summed over independent timestamp streams (one per
/// document in per-document mode, a single merged stream when pooled).
inline ThresholdSweep threshold_sweep(
    std::span<const std::vector<Timestamp>> streams,
    std::span<const double> thresholds_s) {
  detail::check_thresholds(thresholds_s);
  ThresholdSweep sweep;
  for (double th : thresholds_s) {
    std::size_t count = 0;
    for (const auto& ts : streams) count += segment_sessions(ts, th).size();
    sweep.points.push_back({th, count});
  }
  return sweep;
}

inline ThresholdSweep threshold_sweep(std::span<const Timestamp> timestamps_ms,
                                      std::span<const double> thresholds_s) {
  const std::vector<Timestamp> one(timestamps_ms.begin(), timestamps_ms.end());
  return threshold_sweep(std::span<const std::vector<Timestamp>>(&one, 1),
                         thresholds_s);
}

/// Knee of the threshold -> session-count curve: both axes min-max
/// normalized to [0, 1], the point farthest from the chord joining the first
/// and last points wins, ties going to the smaller threshold.
inline double knee_threshold(const ThresholdSweep& sweep) {
  const auto& pts = sweep.points;
  if (pts.size() < 3) {
    throw Error(ErrorKind::TooFewPoints,
                "knee needs at least 3 sweep points, got " +
                    std::to_string(pts.size()));
  }
  double xmin = pts.front().threshold_s, xmax = pts.front().threshold_s;
  double ymin = static_cast<double>(pts.front().session_count), ymax = ymin;
  for (const auto& p : pts) {
    xmin = std::min(xmin, p.threshold_s);
    xmax = std::max(xmax, p.threshold_s);
    ymin = std::min(ymin, static_cast<double>(p.session_count));
    ymax = std::max(ymax, static_cast<double>(p.session_count));
  }
  auto nx = [&](double x) {
    return xmax > xmin ? (x - xmin) / (xmax - xmin) : 0.0;
  };
  auto ny = [&](std::size_t y) {
    return ymax > ymin ? (static_cast<double>(y) - ymin) / (ymax - ymin) : 0.0;
  };
  const double x0 = nx(pts.front().threshold_s), y0 = ny(pts.front().session_count);
  const double x1 = nx(pts.back().threshold_s), y1 = ny(pts.back().session_count);
  const double dx = x1 - x0, dy = y1 - y0;
  const double len = std::hypot(dx, dy);

  constexpr double kTieEps = 1e-12;
  double best_d = -1.0;
  double best_t = pts.front().threshold_s;
  for (const auto& p : pts) {
    const double px = nx(p.threshold_s), py = ny(p.session_count);
    const double d =
        len > 0.0 ? std::abs(dy * (px - x0) - dx * (py - y0)) / len : 0.0;
    if (d > best_d + kTieEps) {
      best_d = d;
      best_t = p.threshold_s;
    }
  }
  return best_t;
}

// ---------------------------------------------------------------------------
// Log adapters

/// Activity timestamps: text changes and suggestion reads.
inline std::vector<Timestamp> activity_timestamps(const oplog::EventLog& log,
                                                  const std::string& doc_id) {
  std::vector<Timestamp> out;
  const auto& events = log.events();
  for (std::size_t i : log.document(doc_id).events) {
    const auto& e = events[i];
    if (e.is_text_change() ||
        std::holds_alternative<oplog::SuggestionRead>(e.payload)) {
      out.push_back(e.ts_ms);
    }
  }
  return out;
}

inline std::vector<std::vector<Timestamp>> activity_streams(
    const oplog::EventLog& log, bool pooled) {
  std::vector<std::vector<Timestamp>> streams;
  for (const auto& [doc, _] : log.documents()) {
    streams.push_back(activity_timestamps(log, doc));
  }
  if (!pooled) return streams;
  std::vector<Timestamp> merged;
  for (const auto& s : streams) merged.insert(merged.end(), s.begin(), s.end());
  std::sort(merged.begin(), merged.end());
  return {std::move(merged)};
}

/// Per-document sessions of every document, in document order.
inline std::vector<WorkingSession> log_sessions(const oplog::EventLog& log,
                                                double threshold_s) {
  std::vector<WorkingSession> out;
  for (const auto& [doc, _] : log.documents()) {
    auto s = segment_sessions(activity_timestamps(log, doc), threshold_s, doc);
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

}  // namespace inkflux::sessionizer
