#include "hqlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "hqlab/errors.hpp"
#include "hqlab/rng.hpp"

namespace hqlab {

namespace {

double off_diagonal_norm(const Eigen::MatrixXd& A) {
  double s = 0.0;
  for (int p = 0; p < A.rows(); ++p) {
    for (int q = p + 1; q < A.cols(); ++q) {
      s += 2.0 * A(p, q) * A(p, q);
    }
  }
  return std::sqrt(s);
}

}  // namespace

SpectralDecomposition jacobi_eigen(const Eigen::MatrixXd& A_in) {
  if (A_in.rows() != A_in.cols()) {
    throw InvalidInput("jacobi_eigen: matrix not square");
  }
  const int n = static_cast<int>(A_in.rows());
  Eigen::MatrixXd A = 0.5 * (A_in + A_in.transpose());
  Eigen::MatrixXd V = Eigen::MatrixXd::Identity(n, n);
  const double norm = A.norm();
  const double tol = 1e-12 * norm;

  if (norm > 0.0) {
    constexpr int kMaxSweeps = 64;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
      if (off_diagonal_norm(A) <= tol) break;
      for (int p = 0; p < n - 1; ++p) {
        for (int q = p + 1; q < n; ++q) {
          const double apq = A(p, q);
          if (std::abs(apq) <= 1e-300) continue;
          const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
          const double t =
              (theta >= 0.0 ? 1.0 : -1.0) /
              (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          const double c = 1.0 / std::sqrt(t * t + 1.0);
          const double s = t * c;
          for (int r = 0; r < n; ++r) {
            const double arp = A(r, p);
            const double arq = A(r, q);
            A(r, p) = c * arp - s * arq;
            A(r, q) = s * arp + c * arq;
          }
          for (int r = 0; r < n; ++r) {
            const double apr = A(p, r);
            const double aqr = A(q, r);
            A(p, r) = c * apr - s * aqr;
            A(q, r) = s * apr + c * aqr;
          }
          for (int r = 0; r < n; ++r) {
            const double vrp = V(r, p);
            const double vrq = V(r, q);
            V(r, p) = c * vrp - s * vrq;
            V(r, q) = s * vrp + c * vrq;
          }
        }
      }
    }
  }

  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return A(a, a) > A(b, b); });

  SpectralDecomposition out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (int c = 0; c < n; ++c) {
    out.values(c) = A(idx[static_cast<std::size_t>(c)],
                      idx[static_cast<std::size_t>(c)]);
    out.vectors.col(c) = V.col(idx[static_cast<std::size_t>(c)]);
  }
  return out;
}

Eigen::VectorXd jacobi_eigenvalues(const Eigen::MatrixXd& A) {
  return jacobi_eigen(A).values;
}

Eigen::MatrixXd random_orthogonal(int n, Rng& rng) {
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      M(i, j) = rng.normal();
    }
  }
  // Modified Gram-Schmidt; restart a column if it degenerates.
  for (int c = 0; c < n; ++c) {
    for (int prev = 0; prev < c; ++prev) {
      M.col(c) -= M.col(prev).dot(M.col(c)) * M.col(prev);
    }
    double nrm = M.col(c).norm();
    while (nrm < 1e-8) {
      for (int i = 0; i < n; ++i) M(i, c) = rng.normal();
      for (int prev = 0; prev < c; ++prev) {
        M.col(c) -= M.col(prev).dot(M.col(c)) * M.col(prev);
      }
      nrm = M.col(c).norm();
    }
    M.col(c) /= nrm;
  }
  return M;
}

Eigen::MatrixXd random_symmetric(int n, double scale, Rng& rng) {
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double x = rng.uniform(-scale, scale);
      A(i, j) = x;
      A(j, i) = x;
    }
  }
  return A;
}

}  // namespace hqlab
