#include "floq/trace.hpp"

#include <algorithm>
#include <cmath>

#include "floq/errors.hpp"

namespace floq {

void validate_structure(const SpectrumTrace& t) {
  if (t.freq.size() != t.values.size())
    throw config_error("trace grid and values must have equal length");
  if (t.freq.size() < 2) throw config_error("trace needs at least 2 points");
  for (std::size_t i = 0; i + 1 < t.freq.size(); ++i)
    if (!(t.freq[i] < t.freq[i + 1]))
      throw config_error("trace grid must be strictly increasing");
  for (double v : t.values)
    if (!std::isfinite(v)) throw config_error("trace values must be finite");
}

void validate(const SpectrumTrace& t) {
  validate_structure(t);
  if (t.normalization == Normalization::ShotNoiseNormalized) {
    for (double v : t.values)
      if (v < 1.0 - 1e-9)
        throw config_error("shot-noise-normalized trace dips below the floor of 1");
  }
}

double integrate_band(const SpectrumTrace& t, double lo, double hi, double baseline) {
  if (lo >= hi) return 0.0;
  auto value_at = [&](double w) {
    auto it = std::lower_bound(t.freq.begin(), t.freq.end(), w);
    if (it == t.freq.begin()) return t.values.front();
    if (it == t.freq.end()) return t.values.back();
    std::size_t j = static_cast<std::size_t>(it - t.freq.begin());
    double f = (w - t.freq[j - 1]) / (t.freq[j] - t.freq[j - 1]);
    return t.values[j - 1] + f * (t.values[j] - t.values[j - 1]);
  };
  double acc = 0.0;
  double prev_w = lo, prev_v = value_at(lo) - baseline;
  for (std::size_t i = 0; i < t.freq.size(); ++i) {
    double w = t.freq[i];
    if (w <= lo) continue;
    if (w >= hi) break;
    double v = t.values[i] - baseline;
    acc += 0.5 * (prev_v + v) * (w - prev_w);
    prev_w = w;
    prev_v = v;
  }
  double end_v = value_at(hi) - baseline;
  acc += 0.5 * (prev_v + end_v) * (hi - prev_w);
  return acc;
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 2) throw config_error("linspace needs at least 2 points");
  std::vector<double> g(static_cast<std::size_t>(n));
  double step = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = lo + step * i;
  g.back() = hi;
  return g;
}

}  // namespace floq
