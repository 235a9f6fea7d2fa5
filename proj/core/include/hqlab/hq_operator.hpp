#pragma once

#include <Eigen/Core>
#include <memory>
#include <span>
#include <vector>

#include "hqlab/exterior_index.hpp"
#include "hqlab/linalg.hpp"
#include "hqlab/spectrum.hpp"
#include "hqlab/symmetric_functions.hpp"

namespace hqlab {

/// Problem sizes for the quotient operator built from p-fold eigenvalue
/// sums: dimension n, derivation order p, numerator level k, denominator
/// level l, with 1 <= p <= n-1 and 0 <= l < k <= N = C(n, p).
struct OperatorConfig {
  int n = 2;
  int p = 1;
  int k = 1;
  int l = 0;

  int N() const { return static_cast<int>(binomial(n, p)); }
  void validate() const;
  bool operator==(const OperatorConfig&) const = default;
};

/// A fully evaluated point: matrix, eigen-data, the p-fold sums, and the
/// operator values. Immutable once returned.
struct EvaluationPoint {
  Eigen::MatrixXd A;
  Spectrum eigenvalues;         // non-increasing
  Eigen::MatrixXd eigenvectors; // columns match eigenvalues, A = Q D Q^T
  Spectrum lambda_sums;         // table order over the sorted eigenvalues
  double F_value = 0.0;
  double Ftilde_value = 0.0;
  bool admissible = false;
};

/// Value/derivative bundle at a raw eigenvalue list (no matrix involved).
/// Gradient entries follow the input coordinate order.
struct SpectrumEval {
  bool admissible = false;
  ConeDiagnostics cone;
  double F = 0.0;
  double Ftilde = 0.0;
  std::vector<double> dF_dlambda;
  std::vector<double> dFt_dlambda;
  std::vector<double> dF_dLambda;
  std::vector<double> dFt_dLambda;
};

/// The Hessian-quotient-type operator F(A) = sigma_k(Lambda)/sigma_l(Lambda)
/// and its normalized (k-l)-th root. Owns the multi-index table for (p, n);
/// all evaluation methods are const and thread-safe.
class HqOperator {
 public:
  explicit HqOperator(OperatorConfig cfg);

  const OperatorConfig& config() const { return cfg_; }
  const IndexTable& table() const { return *table_; }

  /// Cone test with diagnostics; never throws on inadmissible input.
  ConeDiagnostics admissibility(const Eigen::MatrixXd& A) const;
  bool admissible(const Eigen::MatrixXd& A) const;

  /// Cone test directly on an eigenvalue list.
  ConeDiagnostics spectrum_admissibility(const Spectrum& lam) const;

  /// Full evaluation; throws ConeViolation off the cone.
  EvaluationPoint evaluate(const Eigen::MatrixXd& A) const;

  struct Gradient {
    Eigen::MatrixXd F;       // dF/dA, symmetric n x n
    Eigen::MatrixXd Ftilde;  // dFtilde/dA
    double F_value = 0.0;
    double Ftilde_value = 0.0;
  };

  /// Analytic ambient-frame gradient via the spectral path: diagonalize,
  /// differentiate through the p-fold sums, rotate back.
  Gradient gradient(const Eigen::MatrixXd& A) const;

  /// Same quantity assembled through the derivation-matrix coefficient
  /// tensor; O(N^2) slower, kept as an independent route for cross-checks.
  Gradient gradient_via_derivation_chain(const Eigen::MatrixXd& A) const;

  /// Values and first derivatives at an eigenvalue list, with or without
  /// gradients. The inadmissible case is reported, not thrown.
  SpectrumEval eval_spectrum(const Spectrum& lam, bool want_gradient) const;

  /// As eval_spectrum with gradients, but throws ConeViolation off the cone.
  SpectrumEval spectral_first_derivatives(const Spectrum& lam) const;

  /// Second-derivative quadratic form of Ftilde at A in direction B,
  /// evaluated in A's eigenbasis: the eigenvalue Hessian contracts the
  /// diagonal of B, divided differences of the first derivatives weight the
  /// off-diagonal entries. Near-coincident eigenvalue pairs use the
  /// symmetric +-h split average of the divided difference.
  double hessian_form(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) const;

 private:
  OperatorConfig cfg_;
  std::shared_ptr<const IndexTable> table_;

  SpectralDecomposition decompose_checked(const Eigen::MatrixXd& A) const;
  void lambda_sums_of(std::span<const double> lam, std::vector<double>& out) const;
};

}  // namespace hqlab
