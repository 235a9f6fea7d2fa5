#include "hqlab/symmetric_functions.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <string>

namespace hqlab {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  if (k > n - k) k = n - k;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return std::round(r);
}

namespace {

void require_finite(std::span<const double> v, const char* where) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw InvalidInput(std::string(where) + ": non-finite entry");
    }
  }
}

// In-place ascending update: e[j] += x * e[j-1], j descending.
inline void dp_push(double* e, int max_m, double x) {
  for (int j = max_m; j >= 1; --j) e[j] += x * e[j - 1];
}

}  // namespace

void elementary_symmetric_table(std::span<const double> v, int max_m,
                                double* out) {
  const int d = static_cast<int>(v.size());
  out[0] = 1.0;
  for (int j = 1; j <= max_m; ++j) out[j] = 0.0;
  for (int i = 0; i < d; ++i) {
    dp_push(out, std::min(max_m, i + 1), v[i]);
  }
}

double elementary_symmetric(int m, std::span<const double> v) {
  require_finite(v, "elementary_symmetric");
  const int d = static_cast<int>(v.size());
  if (m == 0) return 1.0;
  if (m < 0 || m > d) return 0.0;
  std::vector<double> e(static_cast<std::size_t>(m) + 1);
  elementary_symmetric_table(v, m, e.data());
  return e[static_cast<std::size_t>(m)];
}

double elementary_symmetric(int m, const Spectrum& v) {
  require_valid(v, "elementary_symmetric");
  return elementary_symmetric(m, std::span<const double>(v.values));
}

namespace {

double sigma_with_removed(int m, const Spectrum& v, int skip_a, int skip_b) {
  const int d = static_cast<int>(v.size());
  std::vector<double> rest;
  rest.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    if (i == skip_a || i == skip_b) continue;
    rest.push_back(v.values[static_cast<std::size_t>(i)]);
  }
  return elementary_symmetric(m, std::span<const double>(rest));
}

void check_index_1based(int i, int d, const char* where) {
  if (i < 1 || i > d) {
    throw InvalidInput(std::string(where) + ": index " + std::to_string(i) +
                       " out of range [1, " + std::to_string(d) + "]");
  }
}

}  // namespace

double partial_sigma(int m, const Spectrum& v, int i) {
  require_valid(v, "partial_sigma");
  check_index_1based(i, static_cast<int>(v.size()), "partial_sigma");
  return sigma_with_removed(m, v, i - 1, -1);
}

double partial_sigma(int m, const Spectrum& v, int i, int j) {
  require_valid(v, "partial_sigma");
  const int d = static_cast<int>(v.size());
  check_index_1based(i, d, "partial_sigma");
  check_index_1based(j, d, "partial_sigma");
  if (i == j) {
    throw InvalidInput("partial_sigma: duplicate excluded index " +
                       std::to_string(i));
  }
  return sigma_with_removed(m, v, i - 1, j - 1);
}

ConeDiagnostics cone_diagnostics(int level, std::span<const double> v) {
  require_finite(v, "cone_diagnostics");
  const int d = static_cast<int>(v.size());
  if (level < 1 || level > d) {
    throw InvalidInput("cone_diagnostics: level " + std::to_string(level) +
                       " out of range [1, " + std::to_string(d) + "]");
  }
  std::vector<double> e(static_cast<std::size_t>(level) + 1);
  elementary_symmetric_table(v, level, e.data());
  ConeDiagnostics diag;
  diag.inside = true;
  diag.min_sigma = std::numeric_limits<double>::infinity();
  for (int j = 1; j <= level; ++j) {
    const double s = e[static_cast<std::size_t>(j)];
    if (s < diag.min_sigma) {
      diag.min_sigma = s;
      diag.argmin_level = j;
    }
    if (s <= 0.0 && diag.inside) {
      diag.inside = false;
      diag.first_failing_level = j;
    }
  }
  return diag;
}

ConeDiagnostics cone_diagnostics(int level, const Spectrum& v) {
  require_valid(v, "cone_diagnostics");
  return cone_diagnostics(level, std::span<const double>(v.values));
}

bool in_garding_cone(ConeQuery q, const Spectrum& v) {
  return cone_diagnostics(q.level, v).inside;
}

double quotient_root(int k, int l, const Spectrum& v) {
  require_valid(v, "quotient_root");
  const int d = static_cast<int>(v.size());
  if (!(0 <= l && l < k && k <= d)) {
    throw InvalidInput("quotient_root: need 0 <= l < k <= " +
                       std::to_string(d) + ", got k=" + std::to_string(k) +
                       " l=" + std::to_string(l));
  }
  const ConeDiagnostics diag = cone_diagnostics(k, v);
  if (!diag.inside) {
    throw ConeViolation(
        "quotient_root: spectrum outside Garding cone, sigma_" +
            std::to_string(diag.first_failing_level) + " <= 0",
        diag.first_failing_level, diag.min_sigma);
  }
  std::vector<double> e(static_cast<std::size_t>(k) + 1);
  elementary_symmetric_table(std::span<const double>(v.values), k, e.data());
  const double ratio =
      e[static_cast<std::size_t>(k)] / e[static_cast<std::size_t>(l)];
  return std::pow(ratio, 1.0 / static_cast<double>(k - l));
}

void RemovalTables::build(std::span<const double> v, int max_m) {
  d_ = static_cast<int>(v.size());
  max_m_ = max_m;
  const std::size_t row = static_cast<std::size_t>(max_m_) + 1;
  prefix_.assign(static_cast<std::size_t>(d_ + 1) * row, 0.0);
  suffix_.assign(static_cast<std::size_t>(d_ + 1) * row, 0.0);
  prefix_[0] = 1.0;
  for (int i = 0; i < d_; ++i) {
    const double* prev = &prefix_[static_cast<std::size_t>(i) * row];
    double* cur = &prefix_[static_cast<std::size_t>(i + 1) * row];
    std::memcpy(cur, prev, row * sizeof(double));
    dp_push(cur, std::min(max_m_, i + 1), v[static_cast<std::size_t>(i)]);
  }
  suffix_[static_cast<std::size_t>(d_) * row] = 1.0;
  for (int i = d_ - 1; i >= 0; --i) {
    const double* prev = &suffix_[static_cast<std::size_t>(i + 1) * row];
    double* cur = &suffix_[static_cast<std::size_t>(i) * row];
    std::memcpy(cur, prev, row * sizeof(double));
    dp_push(cur, std::min(max_m_, d_ - i), v[static_cast<std::size_t>(i)]);
  }
}

double RemovalTables::removed_sigma(int position, int m) const {
  if (m == 0) return 1.0;
  if (m < 0 || m > d_ - 1) return 0.0;
  const std::size_t row = static_cast<std::size_t>(max_m_) + 1;
  const double* p = &prefix_[static_cast<std::size_t>(position) * row];
  const double* s = &suffix_[static_cast<std::size_t>(position + 1) * row];
  double acc = 0.0;
  for (int a = 0; a <= m; ++a) {
    acc += p[a] * s[m - a];
  }
  return acc;
}

void QuotientGradientKernel::configure(int k, int l) {
  if (!(0 <= l && l < k)) {
    throw InvalidInput("QuotientGradientKernel: need 0 <= l < k");
  }
  k_ = k;
  l_ = l;
}

void QuotientGradientKernel::eval(std::span<const double> v) {
  const int d = static_cast<int>(v.size());
  if (k_ > d) {
    throw InvalidInput("QuotientGradientKernel: k exceeds vector length");
  }
  tables_.build(v, k_);
  sigma_table_.resize(static_cast<std::size_t>(k_) + 1);
  double* e = sigma_table_.data();
  elementary_symmetric_table(v, k_, e);
  sig_k_ = e[static_cast<std::size_t>(k_)];
  sig_l_ = e[static_cast<std::size_t>(l_)];
  value_ = sig_k_ / sig_l_;
  gradient_.resize(static_cast<std::size_t>(d));
  gradient_sum_ = 0.0;
  const double inv_l2 = 1.0 / (sig_l_ * sig_l_);
  for (int i = 0; i < d; ++i) {
    const double dk = tables_.removed_sigma(i, k_ - 1);
    const double dl = l_ >= 1 ? tables_.removed_sigma(i, l_ - 1) : 0.0;
    const double g = (dk * sig_l_ - sig_k_ * dl) * inv_l2;
    gradient_[static_cast<std::size_t>(i)] = g;
    gradient_sum_ += g;
  }
}

QuotientDerivatives quotient_derivatives(int k, int l,
                                         std::span<const double> v) {
  QuotientGradientKernel kernel;
  kernel.configure(k, l);
  kernel.eval(v);
  QuotientDerivatives out;
  out.value = kernel.value();
  out.sigma_k = kernel.sigma_k();
  out.sigma_l = kernel.sigma_l();
  out.gradient.assign(kernel.gradient().begin(), kernel.gradient().end());
  return out;
}

}  // namespace hqlab
