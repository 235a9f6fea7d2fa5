#include "hqlab/hq_operator.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace hqlab {

namespace {

constexpr double kTieRelTol = 1e-8;
constexpr double kSplitStep = 1e-6;

void require_symmetric_square(const Eigen::MatrixXd& A, int n,
                              const char* where) {
  if (A.rows() != n || A.cols() != n) {
    throw InvalidInput(std::string(where) + ": expected " + std::to_string(n) +
                       "x" + std::to_string(n) + " matrix");
  }
  const double scale = 1.0 + A.cwiseAbs().maxCoeff();
  const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    throw InvalidInput(std::string(where) + ": matrix not symmetric");
  }
}

[[noreturn]] void throw_cone(const ConeDiagnostics& diag, const char* where) {
  throw ConeViolation(std::string(where) + ": point not admissible, sigma_" +
                          std::to_string(diag.first_failing_level) +
                          " = " + std::to_string(diag.min_sigma) + " <= 0",
                      diag.first_failing_level, diag.min_sigma);
}

/// Averages gradient entries over clusters of numerically equal eigenvalues
/// so the result does not depend on the arbitrary basis within an eigenspace.
void average_over_ties(std::span<const double> lam, std::vector<double>& g) {
  const std::size_t n = lam.size();
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && std::abs(lam[end - 1] - lam[end]) <=
                          1e-12 * (1.0 + std::abs(lam[end - 1]))) {
      ++end;
    }
    if (end - start > 1) {
      double mean = 0.0;
      for (std::size_t i = start; i < end; ++i) mean += g[i];
      mean /= static_cast<double>(end - start);
      for (std::size_t i = start; i < end; ++i) g[i] = mean;
    }
    start = end;
  }
}

}  // namespace

void OperatorConfig::validate() const {
  if (n < 2) {
    throw InvalidInput("OperatorConfig: need n >= 2");
  }
  if (p < 1 || p > n - 1) {
    throw InvalidInput("OperatorConfig: need 1 <= p <= n-1, got p=" +
                       std::to_string(p) + " n=" + std::to_string(n));
  }
  const int cap = N();
  if (!(0 <= l && l < k && k <= cap)) {
    throw InvalidInput("OperatorConfig: need 0 <= l < k <= C(n,p)=" +
                       std::to_string(cap) + ", got k=" + std::to_string(k) +
                       " l=" + std::to_string(l));
  }
}

HqOperator::HqOperator(OperatorConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  table_ = std::make_shared<const IndexTable>(cfg_.p, cfg_.n);
}

void HqOperator::lambda_sums_of(std::span<const double> lam,
                                std::vector<double>& out) const {
  const IndexTable& tab = *table_;
  out.resize(static_cast<std::size_t>(tab.size()));
  for (int r = 0; r < tab.size(); ++r) {
    double s = 0.0;
    for (int e : tab.at(r).entries) s += lam[static_cast<std::size_t>(e - 1)];
    out[static_cast<std::size_t>(r)] = s;
  }
}

SpectralDecomposition HqOperator::decompose_checked(
    const Eigen::MatrixXd& A) const {
  require_symmetric_square(A, cfg_.n, "HqOperator");
  return jacobi_eigen(A);
}

ConeDiagnostics HqOperator::spectrum_admissibility(const Spectrum& lam) const {
  require_valid(lam, "spectrum_admissibility");
  if (static_cast<int>(lam.size()) != cfg_.n) {
    throw InvalidInput("spectrum_admissibility: wrong eigenvalue count");
  }
  std::vector<double> sums;
  lambda_sums_of(std::span<const double>(lam.values), sums);
  return cone_diagnostics(cfg_.k, std::span<const double>(sums));
}

ConeDiagnostics HqOperator::admissibility(const Eigen::MatrixXd& A) const {
  const SpectralDecomposition dec = decompose_checked(A);
  std::vector<double> lam(dec.values.data(), dec.values.data() + cfg_.n);
  std::vector<double> sums;
  lambda_sums_of(lam, sums);
  return cone_diagnostics(cfg_.k, std::span<const double>(sums));
}

bool HqOperator::admissible(const Eigen::MatrixXd& A) const {
  return admissibility(A).inside;
}

SpectrumEval HqOperator::eval_spectrum(const Spectrum& lam,
                                       bool want_gradient) const {
  require_valid(lam, "eval_spectrum");
  if (static_cast<int>(lam.size()) != cfg_.n) {
    throw InvalidInput("eval_spectrum: wrong eigenvalue count");
  }
  SpectrumEval out;
  std::vector<double> sums;
  lambda_sums_of(std::span<const double>(lam.values), sums);
  out.cone = cone_diagnostics(cfg_.k, std::span<const double>(sums));
  out.admissible = out.cone.inside;
  if (!out.admissible) {
    out.F = std::numeric_limits<double>::quiet_NaN();
    out.Ftilde = out.F;
    return out;
  }
  const double root = 1.0 / static_cast<double>(cfg_.k - cfg_.l);
  if (!want_gradient) {
    std::vector<double> e(static_cast<std::size_t>(cfg_.k) + 1);
    elementary_symmetric_table(std::span<const double>(sums), cfg_.k, e.data());
    out.F = e[static_cast<std::size_t>(cfg_.k)] /
            e[static_cast<std::size_t>(cfg_.l)];
    out.Ftilde = std::pow(out.F, root);
    return out;
  }
  QuotientGradientKernel kernel;
  kernel.configure(cfg_.k, cfg_.l);
  kernel.eval(std::span<const double>(sums));
  out.F = kernel.value();
  out.Ftilde = std::pow(out.F, root);
  out.dF_dLambda.assign(kernel.gradient().begin(), kernel.gradient().end());
  out.dF_dlambda.assign(static_cast<std::size_t>(cfg_.n), 0.0);
  for (int i = 1; i <= cfg_.n; ++i) {
    double s = 0.0;
    for (int r : table_->positions_containing(i)) {
      s += out.dF_dLambda[static_cast<std::size_t>(r)];
    }
    out.dF_dlambda[static_cast<std::size_t>(i - 1)] = s;
  }
  const double scale = root * std::pow(out.F, root - 1.0);
  out.dFt_dLambda.resize(out.dF_dLambda.size());
  for (std::size_t r = 0; r < out.dF_dLambda.size(); ++r) {
    out.dFt_dLambda[r] = scale * out.dF_dLambda[r];
  }
  out.dFt_dlambda.resize(out.dF_dlambda.size());
  for (std::size_t i = 0; i < out.dF_dlambda.size(); ++i) {
    out.dFt_dlambda[i] = scale * out.dF_dlambda[i];
  }
  return out;
}

SpectrumEval HqOperator::spectral_first_derivatives(const Spectrum& lam) const {
  SpectrumEval out = eval_spectrum(lam, true);
  if (!out.admissible) {
    throw_cone(out.cone, "spectral_first_derivatives");
  }
  return out;
}

EvaluationPoint HqOperator::evaluate(const Eigen::MatrixXd& A) const {
  const SpectralDecomposition dec = decompose_checked(A);
  EvaluationPoint pt;
  pt.A = A;
  pt.eigenvalues.values.assign(dec.values.data(), dec.values.data() + cfg_.n);
  pt.eigenvectors = dec.vectors;
  std::vector<double> sums;
  lambda_sums_of(std::span<const double>(pt.eigenvalues.values), sums);
  pt.lambda_sums = Spectrum(sums);
  const ConeDiagnostics diag =
      cone_diagnostics(cfg_.k, std::span<const double>(sums));
  if (!diag.inside) {
    throw_cone(diag, "evaluate");
  }
  pt.admissible = true;
  std::vector<double> e(static_cast<std::size_t>(cfg_.k) + 1);
  elementary_symmetric_table(std::span<const double>(sums), cfg_.k, e.data());
  pt.F_value = e[static_cast<std::size_t>(cfg_.k)] /
               e[static_cast<std::size_t>(cfg_.l)];
  pt.Ftilde_value = std::pow(pt.F_value, 1.0 / (cfg_.k - cfg_.l));
  return pt;
}

HqOperator::Gradient HqOperator::gradient(const Eigen::MatrixXd& A) const {
  const SpectralDecomposition dec = decompose_checked(A);
  Spectrum lam;
  lam.values.assign(dec.values.data(), dec.values.data() + cfg_.n);
  SpectrumEval ev = eval_spectrum(lam, true);
  if (!ev.admissible) {
    throw_cone(ev.cone, "gradient");
  }
  average_over_ties(std::span<const double>(lam.values), ev.dF_dlambda);
  average_over_ties(std::span<const double>(lam.values), ev.dFt_dlambda);

  Eigen::VectorXd dF = Eigen::Map<const Eigen::VectorXd>(
      ev.dF_dlambda.data(), cfg_.n);
  Eigen::VectorXd dFt = Eigen::Map<const Eigen::VectorXd>(
      ev.dFt_dlambda.data(), cfg_.n);

  Gradient g;
  g.F = dec.vectors * dF.asDiagonal() * dec.vectors.transpose();
  g.Ftilde = dec.vectors * dFt.asDiagonal() * dec.vectors.transpose();
  g.F = 0.5 * (g.F + g.F.transpose()).eval();
  g.Ftilde = 0.5 * (g.Ftilde + g.Ftilde.transpose()).eval();
  g.F_value = ev.F;
  g.Ftilde_value = ev.Ftilde;
  return g;
}

HqOperator::Gradient HqOperator::gradient_via_derivation_chain(
    const Eigen::MatrixXd& A) const {
  require_symmetric_square(A, cfg_.n, "gradient_via_derivation_chain");
  const DerivationMatrix W = derivation_matrix(A, *table_);
  const SpectralDecomposition dec = jacobi_eigen(W.entries);
  const int N = table_->size();

  std::vector<double> mu(dec.values.data(), dec.values.data() + N);
  const ConeDiagnostics diag =
      cone_diagnostics(cfg_.k, std::span<const double>(mu));
  if (!diag.inside) {
    throw_cone(diag, "gradient_via_derivation_chain");
  }
  QuotientGradientKernel kernel;
  kernel.configure(cfg_.k, cfg_.l);
  kernel.eval(std::span<const double>(mu));
  std::vector<double> dmu(kernel.gradient().begin(), kernel.gradient().end());
  average_over_ties(std::span<const double>(mu), dmu);

  const Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(dmu.data(), N);
  const Eigen::MatrixXd M =
      dec.vectors * d.asDiagonal() * dec.vectors.transpose();

  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(cfg_.n, cfg_.n);
  for (const DerivationJacobianEntry& e : derivation_jacobian(*table_)) {
    acc(e.i - 1, e.j - 1) += e.coeff * M(e.row, e.col);
  }
  Gradient g;
  g.F = 0.5 * (acc + acc.transpose());
  g.F_value = kernel.value();
  g.Ftilde_value = std::pow(g.F_value, 1.0 / (cfg_.k - cfg_.l));
  const double scale = (1.0 / (cfg_.k - cfg_.l)) *
                       std::pow(g.F_value, 1.0 / (cfg_.k - cfg_.l) - 1.0);
  g.Ftilde = scale * g.F;
  return g;
}

namespace {

/// Gradient and Hessian in the eigenvalues of the root-normalized quotient
/// composed with the p-fold sums. Works on raw values; returns false when
/// the quotient is not strictly positive (no cone test beyond that).
class RootQuotientCalculus {
 public:
  RootQuotientCalculus(const IndexTable& table, int k, int l)
      : table_(table), k_(k), l_(l) {}

  bool gradient_at(std::span<const double> lam, std::vector<double>& grad) {
    if (!prepare(lam)) return false;
    grad.assign(lam.size(), 0.0);
    const double scale = root_ * std::pow(G_, root_ - 1.0);
    for (int i = 1; i <= table_.n(); ++i) {
      double s = 0.0;
      for (int r : table_.positions_containing(i)) {
        s += dG_[static_cast<std::size_t>(r)];
      }
      grad[static_cast<std::size_t>(i - 1)] = scale * s;
    }
    return true;
  }

  /// Fills both the gradient and the dense eigenvalue Hessian.
  bool derivatives_at(std::span<const double> lam, std::vector<double>& grad,
                      Eigen::MatrixXd& hess) {
    if (!gradient_at(lam, grad)) return false;
    const int N = table_.size();
    const int n = table_.n();
    const double c = root_;
    const double gc1 = std::pow(G_, c - 1.0);
    const double gc2 = std::pow(G_, c - 2.0);
    const double v = sig_l_;
    const double u = sig_k_;
    const double inv_v2 = 1.0 / (v * v);
    const double inv_v3 = inv_v2 / v;

    hess.setZero(n, n);
    std::vector<double> reduced;
    reduced.reserve(static_cast<std::size_t>(N));
    RemovalTables inner;
    for (int r = 0; r < N; ++r) {
      reduced.clear();
      for (int s = 0; s < N; ++s) {
        if (s != r) reduced.push_back(sums_[static_cast<std::size_t>(s)]);
      }
      inner.build(std::span<const double>(reduced), k_);
      const double u_r = du_[static_cast<std::size_t>(r)];
      const double v_r = dv_[static_cast<std::size_t>(r)];
      const double G_r = dG_[static_cast<std::size_t>(r)];
      for (int s = 0; s < N; ++s) {
        double u_rs = 0.0;
        double v_rs = 0.0;
        if (s != r) {
          const int pos = s < r ? s : s - 1;
          u_rs = inner.removed_sigma(pos, k_ - 2);
          v_rs = l_ >= 2 ? inner.removed_sigma(pos, l_ - 2) : 0.0;
        }
        const double u_s = du_[static_cast<std::size_t>(s)];
        const double v_s = dv_[static_cast<std::size_t>(s)];
        const double G_s = dG_[static_cast<std::size_t>(s)];
        const double G_rs = u_rs / v - (u_r * v_s + u_s * v_r) * inv_v2 -
                            u * v_rs * inv_v2 + 2.0 * u * v_r * v_s * inv_v3;
        const double g_rs =
            c * ((c - 1.0) * gc2 * G_r * G_s + gc1 * G_rs);
        for (int pi : table_.at(r).entries) {
          for (int qj : table_.at(s).entries) {
            hess(pi - 1, qj - 1) += g_rs;
          }
        }
      }
    }
    return true;
  }

 private:
  bool prepare(std::span<const double> lam) {
    const int N = table_.size();
    sums_.resize(static_cast<std::size_t>(N));
    for (int r = 0; r < N; ++r) {
      double s = 0.0;
      for (int e : table_.at(r).entries) {
        s += lam[static_cast<std::size_t>(e - 1)];
      }
      sums_[static_cast<std::size_t>(r)] = s;
    }
    std::vector<double> e(static_cast<std::size_t>(k_) + 1);
    elementary_symmetric_table(std::span<const double>(sums_), k_, e.data());
    sig_k_ = e[static_cast<std::size_t>(k_)];
    sig_l_ = e[static_cast<std::size_t>(l_)];
    if (!(sig_l_ > 0.0)) return false;
    G_ = sig_k_ / sig_l_;
    if (!(G_ > 0.0)) return false;
    root_ = 1.0 / static_cast<double>(k_ - l_);
    tables_.build(std::span<const double>(sums_), k_);
    du_.resize(static_cast<std::size_t>(N));
    dv_.resize(static_cast<std::size_t>(N));
    dG_.resize(static_cast<std::size_t>(N));
    const double inv_v2 = 1.0 / (sig_l_ * sig_l_);
    for (int r = 0; r < N; ++r) {
      const double ur = tables_.removed_sigma(r, k_ - 1);
      const double vr = l_ >= 1 ? tables_.removed_sigma(r, l_ - 1) : 0.0;
      du_[static_cast<std::size_t>(r)] = ur;
      dv_[static_cast<std::size_t>(r)] = vr;
      dG_[static_cast<std::size_t>(r)] = (ur * sig_l_ - sig_k_ * vr) * inv_v2;
    }
    return true;
  }

  const IndexTable& table_;
  int k_, l_;
  double sig_k_ = 0.0, sig_l_ = 1.0, G_ = 0.0, root_ = 1.0;
  std::vector<double> sums_;
  RemovalTables tables_;
  std::vector<double> du_, dv_, dG_;
};

}  // namespace

double HqOperator::hessian_form(const Eigen::MatrixXd& A,
                                const Eigen::MatrixXd& B) const {
  require_symmetric_square(B, cfg_.n, "hessian_form (direction)");
  const SpectralDecomposition dec = decompose_checked(A);
  const int n = cfg_.n;
  std::vector<double> lam(dec.values.data(), dec.values.data() + n);
  {
    std::vector<double> sums;
    lambda_sums_of(std::span<const double>(lam), sums);
    const ConeDiagnostics diag =
        cone_diagnostics(cfg_.k, std::span<const double>(sums));
    if (!diag.inside) {
      throw_cone(diag, "hessian_form");
    }
  }
  const Eigen::MatrixXd b =
      dec.vectors.transpose() * B * dec.vectors;

  RootQuotientCalculus calc(*table_, cfg_.k, cfg_.l);
  std::vector<double> grad;
  Eigen::MatrixXd hess;
  if (!calc.derivatives_at(std::span<const double>(lam), grad, hess)) {
    throw ConeViolation("hessian_form: quotient not positive", 0, 0.0);
  }

  double form = 0.0;
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) {
      form += hess(p, q) * b(p, p) * b(q, q);
    }
  }
  std::vector<double> pert(lam);
  std::vector<double> gplus, gminus;
  for (int p = 0; p < n; ++p) {
    for (int q = p + 1; q < n; ++q) {
      const double bpq = b(p, q);
      if (bpq == 0.0) continue;
      const double gap = lam[static_cast<std::size_t>(p)] -
                         lam[static_cast<std::size_t>(q)];
      const double tie_scale =
          1.0 + std::abs(lam[static_cast<std::size_t>(p)]) +
          std::abs(lam[static_cast<std::size_t>(q)]);
      double coeff;
      if (std::abs(gap) > kTieRelTol * tie_scale) {
        coeff = (grad[static_cast<std::size_t>(p)] -
                 grad[static_cast<std::size_t>(q)]) /
                gap;
      } else {
        // Coincident pair: average the divided difference over symmetric
        // +-h splits; fall back to the analytic limit if a split leaves
        // the quotient's domain.
        const double h = kSplitStep;
        bool ok = true;
        double acc = 0.0;
        for (double sgn : {1.0, -1.0}) {
          pert = lam;
          pert[static_cast<std::size_t>(p)] += sgn * h;
          pert[static_cast<std::size_t>(q)] -= sgn * h;
          if (!calc.gradient_at(std::span<const double>(pert), gplus)) {
            ok = false;
            break;
          }
          acc += (gplus[static_cast<std::size_t>(p)] -
                  gplus[static_cast<std::size_t>(q)]) /
                 (pert[static_cast<std::size_t>(p)] -
                  pert[static_cast<std::size_t>(q)]);
        }
        coeff = ok ? 0.5 * acc : hess(p, p) - hess(p, q);
      }
      form += 2.0 * coeff * bpq * bpq;
    }
  }
  return form;
}

}  // namespace hqlab
