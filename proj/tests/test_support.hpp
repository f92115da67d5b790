#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "levyou/presets.hpp"

namespace levyou::testing {

inline Preset benth(double b_frac = 0.8) {
  PresetOverrides ov;
  ov.b_frac = b_frac;
  return make_preset("benth2012", ov);
}

inline Preset benth_with_b(double b) {
  PresetOverrides ov;
  ov.b = b;
  return make_preset("benth2012", ov);
}

/// n points strictly inside (lo, hi).
inline std::vector<double> open_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo + (hi - lo) * (i + 1.0) / (n + 1.0);
  return g;
}

struct SampleStats {
  double mean = 0.0;
  double mean_se = 0.0;
  double var = 0.0;
  double var_se = 0.0;
};

inline SampleStats sample_stats(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  SampleStats st;
  for (double v : x) st.mean += v;
  st.mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = (v - st.mean) * (v - st.mean);
    m2 += d;
    m4 += d * d;
  }
  m2 /= n;
  m4 /= n;
  st.var = m2 * n / (n - 1.0);
  st.mean_se = std::sqrt(st.var / n);
  st.var_se = std::sqrt(std::max(m4 - m2 * m2, 0.0) / n);
  return st;
}

}  // namespace levyou::testing
