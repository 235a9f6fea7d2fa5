#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "hqlab/errors.hpp"

namespace hqlab {

/// An ordered list of real eigenvalues. The stored order is never mutated;
/// sorted access goes through sorted_descending().
struct Spectrum {
  std::vector<double> values;

  Spectrum() = default;
  Spectrum(std::initializer_list<double> v) : values(v) {}
  explicit Spectrum(std::vector<double> v) : values(std::move(v)) {}

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }

  bool all_finite() const {
    return std::all_of(values.begin(), values.end(),
                       [](double x) { return std::isfinite(x); });
  }

  /// Stable non-increasing copy; ties keep their stored order.
  std::vector<double> sorted_descending() const {
    std::vector<double> s = values;
    std::stable_sort(s.begin(), s.end(), std::greater<double>());
    return s;
  }

  double sum() const {
    return std::accumulate(values.begin(), values.end(), 0.0);
  }
};

inline void require_valid(const Spectrum& v, const char* where) {
  if (v.size() == 0) {
    throw InvalidInput(std::string(where) + ": empty spectrum");
  }
  if (!v.all_finite()) {
    throw InvalidInput(std::string(where) + ": non-finite entry");
  }
}

/// Cone membership query: checks sigma_1..sigma_level positivity.
struct ConeQuery {
  int level = 1;
};

}  // namespace hqlab
