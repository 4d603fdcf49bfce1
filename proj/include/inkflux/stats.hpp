#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "inkflux/error.hpp"

namespace inkflux::stats {

// ---------------------------------------------------------------------------
// Seeded random numbers
//
// Counter-based: draw k of a stream with seed s is mix64(s + k * 0x9E3779B97F4A7C15)
// where mix64 is the SplitMix64 finalizer. Uniform doubles take the top 53
// bits. Everything is integer arithmetic up to the final scaling, so streams
// are bit-identical on every platform.

class SeededRng {
 public:
  using result_type = std::uint64_t;

  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kSplitSalt = 0xD1B54A32D192ED03ULL;

  explicit SeededRng(std::uint64_t seed = 0) : seed_(seed) {}

  static constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t position() const noexcept { return counter_; }

  std::uint64_t next_u64() { return mix64(seed_ + (++counter_) * kGamma); }

  /// Uniform in [0, 1).
  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Independent child stream; depends only on (seed, index), never on how
  /// far this stream has been consumed.
  SeededRng split(std::uint64_t index) const {
    return SeededRng(mix64(seed_ ^ mix64(index + kSplitSalt)));
  }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n) {
    const unsigned __int128 wide =
        static_cast<unsigned __int128>(next_u64()) * n;
    return static_cast<std::uint64_t>(wide >> 64);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_uniform(); }

  double exponential(double mean) {
    return -mean * std::log1p(-next_uniform());
  }

  /// Standard normal via Box-Muller (one draw per call, two uniforms).
  double normal() {
    const double u1 = 1.0 - next_uniform();  // (0, 1]
    const double u2 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  double lognormal(double mu, double sigma) {
    if (sigma == 0.0) return std::exp(mu);
    return std::exp(mu + sigma * normal());
  }

  // UniformRandomBitGenerator
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() { return next_u64(); }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

/// Index drawn with probability proportional to `weights` (non-negative,
/// positive sum).
inline std::size_t weighted_index(std::span<const double> weights,
                                  SeededRng& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  const double target = rng.next_uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (target < acc) return i;
  }
  // Rounding can leave target == total; take the last positive weight.
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0) return i;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Quantiles

/// Linear-interpolation quantiles: h = (n-1)q, x[floor h] + frac * gap.
inline std::vector<double> quantiles(std::span<const double> samples,
                                     std::span<const double> qs) {
  if (samples.empty()) {
    throw Error(ErrorKind::EmptySamples, "quantiles of an empty sample");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  out.reserve(qs.size());
  const auto n = sorted.size();
  for (double q : qs) {
    if (!(q >= 0.0 && q <= 1.0)) {
      throw Error(ErrorKind::InvalidParams,
                  "quantile level outside [0,1]: " + std::to_string(q));
    }
    const double h = static_cast<double>(n - 1) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= n) {
      out.push_back(sorted[n - 1]);
      continue;
    }
    out.push_back(sorted[lo] + (h - static_cast<double>(lo)) *
                                   (sorted[lo + 1] - sorted[lo]));
  }
  return out;
}

inline double quantile(std::span<const double> samples, double q) {
  const double qs[] = {q};
  return quantiles(samples, qs).front();
}

inline double mean(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

/// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
inline double stddev(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

// ---------------------------------------------------------------------------
// Gaussian KDE

struct KdeCurve {
  std::vector<double> grid;
  std::vector<double> density;
  double bandwidth = 0.0;
  std::optional<std::pair<double, double>> clip;
};

struct KdeOptions {
  std::optional<double> bandwidth;  // Silverman when absent
  std::size_t grid_points = 512;    // minimum; refined so spacing <= h/2
  std::optional<std::pair<double, double>> clip;
  double grid_extend = 4.0;  // grid spans sample range +- this many bandwidths
  std::size_t max_grid_points = 1u << 16;
};

inline constexpr double kDegenerateBandwidth = 1e-6;

/// Silverman's rule: 0.9 * min(sd, IQR/1.349) * n^-1/5, falling back to
/// 1.06 * sd * n^-1/5 when IQR = 0 and to 1e-6 when sd = 0.
inline double silverman_bandwidth(std::span<const double> samples) {
  const double n = static_cast<double>(samples.size());
  const double sd = stddev(samples);
  if (sd == 0.0) return kDegenerateBandwidth;
  const double qs[] = {0.25, 0.75};
  const auto q = quantiles(samples, qs);
  const double iqr = q[1] - q[0];
  const double scale = std::pow(n, -0.2);
  if (iqr == 0.0) return 1.06 * sd * scale;
  return 0.9 * std::min(sd, iqr / 1.349) * scale;
}

inline double gaussian_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

/// (1 / (n h)) * sum phi((x - x_i) / h), evaluated directly.
inline double kde_density_at(std::span<const double> samples, double bandwidth,
                             double x) {
  double s = 0.0;
  for (double xi : samples) s += gaussian_pdf((x - xi) / bandwidth);
  return s / (static_cast<double>(samples.size()) * bandwidth);
}

inline std::vector<double> clip_samples(std::span<const double> samples,
                                        std::pair<double, double> bounds) {
  std::vector<double> out(samples.begin(), samples.end());
  for (double& x : out) x = std::clamp(x, bounds.first, bounds.second);
  return out;
}

/// Each call normalizes its own curve to unit area (no shared normalization
/// across curves).
inline KdeCurve gaussian_kde(std::span<const double> samples,
                             const KdeOptions& opts = {}) {
  std::vector<double> xs(samples.begin(), samples.end());
  if (opts.clip) xs = clip_samples(xs, *opts.clip);
  if (xs.size() < 2) {
    throw Error(ErrorKind::TooFewSamples,
                "KDE needs at least 2 samples, got " +
                    std::to_string(xs.size()));
  }
  if (opts.grid_points < 16) {
    throw Error(ErrorKind::InvalidParams, "KDE grid_points must be >= 16");
  }
  const double h = opts.bandwidth ? *opts.bandwidth : silverman_bandwidth(xs);
  if (!(h > 0.0)) {
    throw Error(ErrorKind::InvalidParams, "KDE bandwidth must be positive");
  }
  std::sort(xs.begin(), xs.end());

  const double lo = xs.front() - opts.grid_extend * h;
  const double hi = xs.back() + opts.grid_extend * h;
  const double span = hi - lo;
  std::size_t points = opts.grid_points;
  const double needed = std::ceil(span / (0.5 * h)) + 1.0;
  if (needed > static_cast<double>(points)) {
    points = static_cast<std::size_t>(
        std::min(needed, static_cast<double>(opts.max_grid_points)));
    points = std::max(points, opts.grid_points);
  }

  KdeCurve curve;
  curve.bandwidth = h;
  curve.clip = opts.clip;
  curve.grid.resize(points);
  curve.density.resize(points);
  const double step = span / static_cast<double>(points - 1);
  const double norm = 1.0 / (static_cast<double>(xs.size()) * h);
  // Terms beyond 12 bandwidths are below 1e-31 relative and skipped.
  const double cutoff = 12.0 * h;
  for (std::size_t i = 0; i < points; ++i) {
    const double g = (i + 1 == points) ? hi : lo + step * static_cast<double>(i);
    curve.grid[i] = g;
    auto first = std::lower_bound(xs.begin(), xs.end(), g - cutoff);
    auto last = std::upper_bound(first, xs.end(), g + cutoff);
    double s = 0.0;
    for (auto it = first; it != last; ++it) s += gaussian_pdf((g - *it) / h);
    curve.density[i] = s * norm;
  }
  return curve;
}

inline double trapezoid(std::span<const double> x, std::span<const double> y) {
  double area = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    area += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
  }
  return area;
}

// ---------------------------------------------------------------------------
// Two-sample Kolmogorov-Smirnov

/// sup |ECDF_a - ECDF_b| over the merged sample points.
inline double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw Error(ErrorKind::EmptySamples, "KS statistic needs two non-empty samples");
  }
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n -
                             static_cast<double>(j) / m));
  }
  return d;
}

/// Asymptotic two-sample critical value c(alpha) * sqrt((n + m) / (n m)).
inline double ks_critical_value(double alpha, std::size_t n, std::size_t m) {
  const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  return c * std::sqrt((nn + mm) / (nn * mm));
}

}  // namespace inkflux::stats
