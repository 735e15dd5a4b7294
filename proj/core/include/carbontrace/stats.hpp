#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace carbontrace {

/// Streaming moments plus a fixed-bin histogram for one tracked component.
/// merge() is associative and commutative up to floating tolerance, so
/// worker-local accumulators folded in a fixed order reproduce the
/// single-threaded result bit for bit.
class StatsAccumulator {
 public:
  StatsAccumulator() = default;
  StatsAccumulator(int bin_count, double lo, double hi);

  void add(double x);
  void merge(const StatsAccumulator& other);

  std::int64_t count() const { return count_; }
  double mean() const { return mean_; }
  /// Unbiased sample variance; 0 below two samples.
  double variance() const { return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0; }
  double min() const { return count_ ? min_ : 0.0; }
  double max() const { return count_ ? max_ : 0.0; }

  /// Histogram-interpolated quantile, q in [0, 1]. Values outside the bin
  /// range are clamped into the edge bins when added.
  double quantile(double q) const;

  int bin_count() const { return static_cast<int>(bins_.size()); }
  double bin_lo(int b) const { return lo_ + b * width_; }
  double bin_hi(int b) const { return lo_ + (b + 1) * width_; }
  std::int64_t bin_samples(int b) const { return bins_[b]; }

 private:
  std::int64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double min_ = std::numeric_limits<double>::infinity();
  double max_ = -std::numeric_limits<double>::infinity();
  double lo_ = 0.0;
  double width_ = 1.0;
  std::vector<std::int64_t> bins_;
};

struct DistributionSeries {
  std::vector<double> bin_lo, bin_hi;
  std::vector<double> pdf;  // density: bin count / (N * width)
  std::vector<double> cdf;  // running bin probability, ends at 1
};

/// Empirical PDF/CDF from the accumulator's histogram.
DistributionSeries empirical_distribution(const StatsAccumulator& acc);

}  // namespace carbontrace
