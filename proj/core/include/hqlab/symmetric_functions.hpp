#pragma once

#include <span>
#include <vector>

#include "hqlab/spectrum.hpp"

namespace hqlab {

/// Exact binomial coefficient C(n, k) as a double (n small, desk scale).
double binomial(int n, int k);

/// sigma_m(v): 1 for m == 0, 0 for m < 0 or m > len(v). Evaluated with the
/// one-pass prefix recurrence, O(d*m); never by subset enumeration.
double elementary_symmetric(int m, const Spectrum& v);
double elementary_symmetric(int m, std::span<const double> v);

/// Fills out[0..max_m] with sigma_0..sigma_max_m of v in a single pass.
void elementary_symmetric_table(std::span<const double> v, int max_m,
                                double* out);

/// sigma_m of v with one or two entries removed. Indices are 1-based,
/// matching the eigenvalue-list convention used across the library.
double partial_sigma(int m, const Spectrum& v, int i);
double partial_sigma(int m, const Spectrum& v, int i, int j);

/// Strict test sigma_j(v) > 0 for all 1 <= j <= q.level. No tolerance.
bool in_garding_cone(ConeQuery q, const Spectrum& v);

/// Signed distance-to-boundary report for diagnostics: the minimum of
/// sigma_1..sigma_level and the first level that fails (0 if none).
struct ConeDiagnostics {
  bool inside = false;
  int first_failing_level = 0;
  double min_sigma = 0.0;
  int argmin_level = 0;
};
ConeDiagnostics cone_diagnostics(int level, const Spectrum& v);
ConeDiagnostics cone_diagnostics(int level, std::span<const double> v);

/// [sigma_k(v)/sigma_l(v)]^(1/(k-l)) on the Garding cone interior.
/// Throws ConeViolation (with the first failing level) off the cone.
double quotient_root(int k, int l, const Spectrum& v);

/// Prefix/suffix sigma tables over a fixed vector; gives sigma_m of the
/// vector with any single position removed in O(m), with no divisions.
class RemovalTables {
 public:
  void build(std::span<const double> v, int max_m);

  /// sigma_m(v | position). `position` is 0-based here; this is the
  /// low-level kernel, the Spectrum-facing API stays 1-based.
  double removed_sigma(int position, int m) const;

  int size() const { return d_; }
  int max_level() const { return max_m_; }

 private:
  int d_ = 0;
  int max_m_ = 0;
  std::vector<double> prefix_;  // (d+1) x (max_m+1), sigma_a of v[0..i)
  std::vector<double> suffix_;  // (d+1) x (max_m+1), sigma_b of v[i..d)
};

/// Value and full gradient of sigma_k/sigma_l at v. Reused by the operator
/// module (chained through the eigenvalue sums) and the verification lab.
/// Requires sigma_l(v) != 0; admissibility is the caller's concern.
class QuotientGradientKernel {
 public:
  void configure(int k, int l);

  /// Evaluates at v; buffers are reused across calls.
  void eval(std::span<const double> v);

  double sigma_k() const { return sig_k_; }
  double sigma_l() const { return sig_l_; }
  double value() const { return value_; }

  /// d(sigma_k/sigma_l)/dv_i, 0-based.
  std::span<const double> gradient() const {
    return {gradient_.data(), gradient_.size()};
  }
  double gradient_sum() const { return gradient_sum_; }

 private:
  int k_ = 1;
  int l_ = 0;
  double sig_k_ = 0.0, sig_l_ = 1.0, value_ = 0.0, gradient_sum_ = 0.0;
  RemovalTables tables_;
  std::vector<double> sigma_table_;
  std::vector<double> gradient_;
};

/// Convenience wrapper returning an owned gradient vector.
struct QuotientDerivatives {
  double value = 0.0;
  double sigma_k = 0.0;
  double sigma_l = 1.0;
  std::vector<double> gradient;
};
QuotientDerivatives quotient_derivatives(int k, int l,
                                         std::span<const double> v);

}  // namespace hqlab
