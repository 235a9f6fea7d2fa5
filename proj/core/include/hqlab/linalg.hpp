#pragma once

#include <Eigen/Core>

namespace hqlab {

/// Eigen-decomposition A = V diag(values) V^T with eigenvalues in
/// non-increasing order and orthonormal columns in V.
struct SpectralDecomposition {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

/// Cyclic Jacobi rotations with a fixed row-major sweep order and
/// off-diagonal tolerance 1e-12 * ||A||_F. Deterministic and dependency-free
/// so results reproduce bit-for-bit across runs.
SpectralDecomposition jacobi_eigen(const Eigen::MatrixXd& A);

Eigen::VectorXd jacobi_eigenvalues(const Eigen::MatrixXd& A);

/// Random orthogonal matrix (Haar-ish via Gram-Schmidt of a seeded Gaussian
/// matrix); used by tests and samplers.
class Rng;
Eigen::MatrixXd random_orthogonal(int n, Rng& rng);

/// Random symmetric matrix with entries uniform in [-scale, scale].
Eigen::MatrixXd random_symmetric(int n, double scale, Rng& rng);

}  // namespace hqlab
