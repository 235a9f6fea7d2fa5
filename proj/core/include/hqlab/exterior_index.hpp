#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "hqlab/spectrum.hpp"

namespace hqlab {

/// Strictly increasing tuple of 1-based indices in [1, n]. The empty tuple
/// is the unique multi-index of length 0.
struct MultiIndex {
  std::vector<int> entries;

  MultiIndex() = default;
  MultiIndex(std::initializer_list<int> e) : entries(e) {}
  explicit MultiIndex(std::vector<int> e) : entries(std::move(e)) {}

  int length() const { return static_cast<int>(entries.size()); }
  bool contains(int i) const;
  bool operator==(const MultiIndex& other) const = default;
};

/// Sign of the permutation that merges the disjoint increasing tuples (I, J)
/// into increasing order; +1 when either side is empty.
int permutation_sign(const MultiIndex& I, const MultiIndex& J);

/// Enumeration of all increasing p-tuples over {1..n} in lexicographic
/// order, with the removal/insertion/complement maps and sign conventions
/// precomputed. Immutable after construction and shareable across threads.
class IndexTable {
 public:
  IndexTable(int p, int n);

  int p() const { return p_; }
  int n() const { return n_; }
  int size() const { return N_; }

  const MultiIndex& at(int position) const {
    return order_[static_cast<std::size_t>(position)];
  }
  const std::vector<MultiIndex>& order() const { return order_; }

  /// Position of I in the lexicographic order; throws if I is not valid.
  int rank(const MultiIndex& I) const;

  /// Positions of all multi-indices containing value i (1-based).
  const std::vector<int>& positions_containing(int i) const;

  MultiIndex complement(const MultiIndex& I) const;
  static MultiIndex remove(const MultiIndex& I, int i);
  static MultiIndex insert(const MultiIndex& I, int j);

  /// sign(i, I-i) for i in I: parity of i's position within I.
  static int removal_sign(const MultiIndex& I, int i);

 private:
  int p_;
  int n_;
  int N_;
  std::vector<MultiIndex> order_;
  std::unordered_map<std::uint64_t, int> rank_;
  std::vector<std::vector<int>> containing_;
};

IndexTable build_index_table(int p, int n);

/// Maps eigenvalues lam in R^n to the vector of p-fold sums in R^N,
/// following the table order.
Spectrum lambda_of(const Spectrum& lam, const IndexTable& table);

/// Matrix of the derivation induced by a symmetric A on the canonical
/// wedge basis. Symmetric N x N, linear in A.
struct DerivationMatrix {
  Eigen::MatrixXd entries;
  const IndexTable* table = nullptr;
};

DerivationMatrix derivation_matrix(const Eigen::MatrixXd& A,
                                   const IndexTable& table);

/// One nonzero of the constant tensor dW_{IJ}/da_{ij}. (row, col) index the
/// table order; (i, j) are 1-based entries of A; coeff is +-1.
struct DerivationJacobianEntry {
  int row = 0;
  int col = 0;
  int i = 0;
  int j = 0;
  double coeff = 0.0;
};

std::vector<DerivationJacobianEntry> derivation_jacobian(
    const IndexTable& table);

}  // namespace hqlab
