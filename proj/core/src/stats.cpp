#include "carbontrace/stats.hpp"

#include <algorithm>
#include <cmath>

namespace carbontrace {

StatsAccumulator::StatsAccumulator(int bin_count, double lo, double hi)
    : lo_(lo), width_((hi - lo) / std::max(1, bin_count)), bins_(std::max(1, bin_count), 0) {
  if (!(width_ > 0.0)) width_ = 1.0;
}

void StatsAccumulator::add(double x) {
  ++count_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (x - mean_);
  min_ = std::min(min_, x);
  max_ = std::max(max_, x);
  if (!bins_.empty()) {
    int b = static_cast<int>((x - lo_) / width_);
    b = std::clamp(b, 0, static_cast<int>(bins_.size()) - 1);
    ++bins_[b];
  }
}

void StatsAccumulator::merge(const StatsAccumulator& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double delta = other.mean_ - mean_;
  const double n = na + nb;
  mean_ += delta * nb / n;
  m2_ += other.m2_ + delta * delta * na * nb / n;
  count_ += other.count_;
  min_ = std::min(min_, other.min_);
  max_ = std::max(max_, other.max_);
  for (std::size_t b = 0; b < bins_.size() && b < other.bins_.size(); ++b)
    bins_[b] += other.bins_[b];
}

double StatsAccumulator::quantile(double q) const {
  if (count_ == 0) return 0.0;
  q = std::clamp(q, 0.0, 1.0);
  const double target = q * static_cast<double>(count_);
  double running = 0.0;
  for (std::size_t b = 0; b < bins_.size(); ++b) {
    const double next = running + static_cast<double>(bins_[b]);
    if (next >= target && bins_[b] > 0) {
      const double frac = (target - running) / static_cast<double>(bins_[b]);
      return bin_lo(static_cast<int>(b)) + frac * width_;
    }
    running = next;
  }
  return max_;
}

DistributionSeries empirical_distribution(const StatsAccumulator& acc) {
  DistributionSeries s;
  const int nb = acc.bin_count();
  s.bin_lo.resize(nb);
  s.bin_hi.resize(nb);
  s.pdf.resize(nb);
  s.cdf.resize(nb);
  const double n = static_cast<double>(std::max<std::int64_t>(1, acc.count()));
  const double width = nb > 0 ? acc.bin_hi(0) - acc.bin_lo(0) : 1.0;
  double running = 0.0;
  for (int b = 0; b < nb; ++b) {
    s.bin_lo[b] = acc.bin_lo(b);
    s.bin_hi[b] = acc.bin_hi(b);
    const double p = static_cast<double>(acc.bin_samples(b)) / n;
    s.pdf[b] = p / width;
    running += p;
    s.cdf[b] = running;
  }
  if (nb > 0 && acc.count() > 0) s.cdf[nb - 1] = 1.0;
  return s;
}

}  // namespace carbontrace
