#pragma once

// Independent reference implementations. These deliberately avoid the
// library's own code paths: naive string splicing, full DP tables, sorting
// then interpolating, direct Gaussian sums and exhaustive enumeration.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <tuple>
#include <vector>

#include "inkflux/oplog.hpp"
#include "inkflux/stats.hpp"

namespace oracle {

using inkflux::oplog::Delta;

/// Applies a delta by rebuilding the string at every component.
inline std::u32string splice(std::u32string text, const Delta& delta) {
  std::size_t cursor = 0;
  for (const auto& c : delta.ops) {
    if (const auto* r = std::get_if<inkflux::oplog::Retain>(&c)) {
      cursor += r->count;
    } else if (const auto* ins = std::get_if<inkflux::oplog::Insert>(&c)) {
      const std::u32string s = inkflux::utf8::decode(ins->text);
      text = text.substr(0, cursor) + s + text.substr(cursor);
      cursor += s.size();
    } else {
      const auto& d = std::get<inkflux::oplog::Delete>(c);
      text = text.substr(0, cursor) + text.substr(cursor + d.count);
    }
  }
  return text;
}

struct RawChange {
  std::int64_t ts;
  std::uint64_t seq;
  Delta delta;
};

/// Document at t: sort by (ts, seq), keep ts <= t, splice in order.
inline std::u32string reconstruct(std::vector<RawChange> changes, std::int64_t t) {
  std::sort(changes.begin(), changes.end(), [](const RawChange& a, const RawChange& b) {
    return std::tie(a.ts, a.seq) < std::tie(b.ts, b.seq);
  });
  std::u32string text;
  for (const auto& c : changes) {
    if (c.ts > t) break;
    text = splice(text, c.delta);
  }
  return text;
}

/// Full (n+1)x(m+1) Levenshtein table.
inline std::size_t levenshtein(const std::u32string& a, const std::u32string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0u : 1u)});
    }
  }
  return d[a.size()][b.size()];
}

inline double quantile(std::vector<double> xs, double q) {
  std::sort(xs.begin(), xs.end());
  const double h = static_cast<double>(xs.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

inline double kde(const std::vector<double>& xs, double h, double x) {
  double s = 0;
  for (double xi : xs) {
    const double z = (x - xi) / h;
    s += std::exp(-z * z / 2) / std::sqrt(2 * std::numbers::pi);
  }
  return s / (static_cast<double>(xs.size()) * h);
}

/// sup |F_a - F_b| evaluated at every sample point by counting.
inline double ks(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pts = a;
  pts.insert(pts.end(), b.begin(), b.end());
  double d = 0;
  for (double x : pts) {
    const double fa = static_cast<double>(std::count_if(a.begin(), a.end(), [&](double v) { return v <= x; })) /
                      static_cast<double>(a.size());
    const double fb = static_cast<double>(std::count_if(b.begin(), b.end(), [&](double v) { return v <= x; })) /
                      static_cast<double>(b.size());
    d = std::max(d, std::abs(fa - fb));
  }
  return d;
}

/// Index of the point farthest from the normalized first-last chord;
/// first index wins ties within 1e-12.
inline std::size_t knee_index(const std::vector<std::pair<double, double>>& pts) {
  double x0 = pts.front().first, x1 = pts.back().first;
  double ylo = pts.front().second, yhi = pts.front().second;
  for (const auto& p : pts) {
    ylo = std::min(ylo, p.second);
    yhi = std::max(yhi, p.second);
  }
  auto nx = [&](double x) { return x1 == x0 ? 0.0 : (x - x0) / (x1 - x0); };
  auto ny = [&](double y) { return yhi == ylo ? 0.0 : (y - ylo) / (yhi - ylo); };
  const double ax = nx(pts.front().first), ay = ny(pts.front().second);
  const double bx = nx(pts.back().first), by = ny(pts.back().second);
  const double len = std::hypot(bx - ax, by - ay);
  std::size_t best = 0;
  double best_d = -1;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double px = nx(pts[i].first), py = ny(pts[i].second);
    const double dist =
        len == 0 ? 0 : std::abs((bx - ax) * (ay - py) - (ax - px) * (by - ay)) / len;
    if (dist > best_d + 1e-12) {
      best_d = dist;
      best = i;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Random logs for reconstruction checks

inline std::u32string random_text(inkflux::stats::SeededRng& rng, std::size_t max_len) {
  static const std::u32string alphabet = U"abcxyz ABC.,!é漢😀\n";
  const std::size_t n = rng.uniform_index(max_len + 1);
  std::u32string s;
  for (std::size_t i = 0; i < n; ++i) s.push_back(alphabet[rng.uniform_index(alphabet.size())]);
  return s;
}

/// A delta valid against a document of length `len`.
inline Delta random_delta(inkflux::stats::SeededRng& rng, std::size_t len) {
  Delta d;
  std::size_t pos = 0;
  const std::size_t parts = 1 + rng.uniform_index(4);
  for (std::size_t p = 0; p < parts; ++p) {
    switch (rng.uniform_index(4)) {
      case 0: {
        const std::size_t n = rng.uniform_index(len - pos + 1);
        d.retain(n);
        pos += n;
        break;
      }
      case 1:
      case 2:
        d.insert(inkflux::utf8::encode(random_text(rng, 12)));
        break;
      default: {
        const std::size_t n = rng.uniform_index(std::min<std::size_t>(len - pos, 8) + 1);
        d.erase(n);
        len -= n;
        break;
      }
    }
  }
  return d;
}

}  // namespace oracle
