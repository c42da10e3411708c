#include "unmix/histogram.hpp"

#include <algorithm>
#include <stdexcept>

namespace unmix {

std::int64_t Histogram::total() const {
  std::int64_t n = 0;
  for (std::int64_t c : counts) n += c;
  return n;
}

double Histogram::mass_below(double x) const {
  const std::int64_t n = total();
  if (n == 0) return 0.0;
  std::int64_t acc = 0;
  for (int i = 0; i < bins(); ++i) {
    if (edges[i + 1] <= x) acc += counts[i];
  }
  return static_cast<double>(acc) / static_cast<double>(n);
}

Histogram make_histogram(const std::vector<double>& values, double lo, double hi, int bins) {
  if (bins < 1) throw std::invalid_argument("histogram needs at least 1 bin");
  if (!(hi > lo)) throw std::invalid_argument("histogram range is empty");
  Histogram h;
  h.edges.resize(static_cast<std::size_t>(bins) + 1);
  const double width = (hi - lo) / bins;
  for (int i = 0; i <= bins; ++i) h.edges[i] = lo + width * i;
  h.edges.back() = hi;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  for (double v : values) {
    int idx = static_cast<int>((v - lo) / width);
    idx = std::clamp(idx, 0, bins - 1);
    ++h.counts[idx];
  }
  return h;
}

Histogram make_histogram(const std::vector<double>& values, int bins) {
  if (values.empty()) throw std::invalid_argument("cannot bin an empty sample");
  auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  double lo = *lo_it, hi = *hi_it;
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  return make_histogram(values, lo, hi, bins);
}

}  // namespace unmix
