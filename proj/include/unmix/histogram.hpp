#pragma once

#include <cstdint>
#include <vector>

namespace unmix {

struct Histogram {
  std::vector<double> edges;         // bins + 1, equal width
  std::vector<std::int64_t> counts;  // bins

  int bins() const { return static_cast<int>(counts.size()); }
  std::int64_t total() const;

  // Fraction of samples falling strictly below `x`.
  double mass_below(double x) const;
};

// Equal-width bins over [lo, hi]; values are clamped into the range.
Histogram make_histogram(const std::vector<double>& values, double lo, double hi, int bins);

// Bins over the empirical range. A degenerate range (all values equal)
// is widened to +/- 0.5 around the value.
Histogram make_histogram(const std::vector<double>& values, int bins);

}  // namespace unmix
