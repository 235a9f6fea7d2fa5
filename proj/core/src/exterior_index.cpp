#include "hqlab/exterior_index.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hqlab/symmetric_functions.hpp"

namespace hqlab {

namespace {

std::uint64_t bitmask_key(const MultiIndex& I) {
  std::uint64_t key = 0;
  for (int e : I.entries) key |= (1ULL << (e - 1));
  return key;
}

void require_valid_multi_index(const MultiIndex& I, int n, const char* where) {
  int prev = 0;
  for (int e : I.entries) {
    if (e <= prev || e > n) {
      throw InvalidInput(std::string(where) + ": malformed multi-index");
    }
    prev = e;
  }
}

constexpr int kMaxDenseSize = 256;

}  // namespace

bool MultiIndex::contains(int i) const {
  return std::binary_search(entries.begin(), entries.end(), i);
}

int permutation_sign(const MultiIndex& I, const MultiIndex& J) {
  for (int b : J.entries) {
    if (I.contains(b)) {
      throw InvalidInput("permutation_sign: tuples overlap at " +
                         std::to_string(b));
    }
  }
  // Both tuples are increasing, so the only inversions in the concatenation
  // (I, J) are pairs a in I, b in J with a > b. Count them by a merge scan.
  std::size_t bi = 0;
  long inversions = 0;
  for (int a : I.entries) {
    while (bi < J.entries.size() && J.entries[bi] < a) ++bi;
    inversions += static_cast<long>(bi);
  }
  return (inversions % 2 == 0) ? 1 : -1;
}

IndexTable::IndexTable(int p, int n) : p_(p), n_(n) {
  if (n < 1 || p < 1 || p > n) {
    throw InvalidInput("IndexTable: need 1 <= p <= n, got p=" +
                       std::to_string(p) + " n=" + std::to_string(n));
  }
  if (n > 62) {
    throw InvalidInput("IndexTable: n > 62 unsupported");
  }
  N_ = static_cast<int>(binomial(n, p));
  order_.reserve(static_cast<std::size_t>(N_));
  std::vector<int> cur(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) cur[static_cast<std::size_t>(i)] = i + 1;
  while (true) {
    order_.emplace_back(cur);
    int t = p - 1;
    while (t >= 0 && cur[static_cast<std::size_t>(t)] == n - p + t + 1) --t;
    if (t < 0) break;
    ++cur[static_cast<std::size_t>(t)];
    for (int s = t + 1; s < p; ++s) {
      cur[static_cast<std::size_t>(s)] = cur[static_cast<std::size_t>(s - 1)] + 1;
    }
  }
  rank_.reserve(order_.size() * 2);
  for (int r = 0; r < N_; ++r) {
    rank_.emplace(bitmask_key(order_[static_cast<std::size_t>(r)]), r);
  }
  containing_.resize(static_cast<std::size_t>(n) + 1);
  for (int r = 0; r < N_; ++r) {
    for (int e : order_[static_cast<std::size_t>(r)].entries) {
      containing_[static_cast<std::size_t>(e)].push_back(r);
    }
  }
}

int IndexTable::rank(const MultiIndex& I) const {
  require_valid_multi_index(I, n_, "IndexTable::rank");
  if (I.length() != p_) {
    throw InvalidInput("IndexTable::rank: length mismatch");
  }
  auto it = rank_.find(bitmask_key(I));
  if (it == rank_.end()) {
    throw InvalidInput("IndexTable::rank: unknown multi-index");
  }
  return it->second;
}

const std::vector<int>& IndexTable::positions_containing(int i) const {
  if (i < 1 || i > n_) {
    throw InvalidInput("IndexTable::positions_containing: index out of range");
  }
  return containing_[static_cast<std::size_t>(i)];
}

MultiIndex IndexTable::complement(const MultiIndex& I) const {
  require_valid_multi_index(I, n_, "IndexTable::complement");
  MultiIndex out;
  out.entries.reserve(static_cast<std::size_t>(n_ - I.length()));
  for (int e = 1; e <= n_; ++e) {
    if (!I.contains(e)) out.entries.push_back(e);
  }
  return out;
}

MultiIndex IndexTable::remove(const MultiIndex& I, int i) {
  if (!I.contains(i)) {
    throw InvalidInput("IndexTable::remove: " + std::to_string(i) +
                       " not in multi-index");
  }
  MultiIndex out;
  out.entries.reserve(I.entries.size() - 1);
  for (int e : I.entries) {
    if (e != i) out.entries.push_back(e);
  }
  return out;
}

MultiIndex IndexTable::insert(const MultiIndex& I, int j) {
  if (I.contains(j)) {
    throw InvalidInput("IndexTable::insert: " + std::to_string(j) +
                       " already in multi-index");
  }
  MultiIndex out = I;
  out.entries.insert(
      std::upper_bound(out.entries.begin(), out.entries.end(), j), j);
  return out;
}

int IndexTable::removal_sign(const MultiIndex& I, int i) {
  auto it = std::lower_bound(I.entries.begin(), I.entries.end(), i);
  if (it == I.entries.end() || *it != i) {
    throw InvalidInput("IndexTable::removal_sign: index not in multi-index");
  }
  const auto pos = static_cast<long>(it - I.entries.begin());
  return (pos % 2 == 0) ? 1 : -1;
}

IndexTable build_index_table(int p, int n) { return IndexTable(p, n); }

Spectrum lambda_of(const Spectrum& lam, const IndexTable& table) {
  require_valid(lam, "lambda_of");
  if (static_cast<int>(lam.size()) != table.n()) {
    throw InvalidInput("lambda_of: spectrum length " +
                       std::to_string(lam.size()) + " != n=" +
                       std::to_string(table.n()));
  }
  Spectrum out;
  out.values.resize(static_cast<std::size_t>(table.size()));
  for (int r = 0; r < table.size(); ++r) {
    double s = 0.0;
    for (int e : table.at(r).entries) {
      s += lam.values[static_cast<std::size_t>(e - 1)];
    }
    out.values[static_cast<std::size_t>(r)] = s;
  }
  return out;
}

namespace {

void require_symmetric(const Eigen::MatrixXd& A, const char* where) {
  if (A.rows() != A.cols()) {
    throw InvalidInput(std::string(where) + ": matrix not square");
  }
  const double scale = 1.0 + A.cwiseAbs().maxCoeff();
  const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    throw InvalidInput(std::string(where) + ": matrix not symmetric (|A-A^T| = " +
                       std::to_string(asym) + ")");
  }
}

}  // namespace

DerivationMatrix derivation_matrix(const Eigen::MatrixXd& A,
                                   const IndexTable& table) {
  require_symmetric(A, "derivation_matrix");
  if (A.rows() != table.n()) {
    throw InvalidInput("derivation_matrix: dimension mismatch");
  }
  if (table.size() > kMaxDenseSize) {
    throw InvalidInput("derivation_matrix: N = " +
                       std::to_string(table.size()) + " exceeds dense cap " +
                       std::to_string(kMaxDenseSize));
  }
  const int N = table.size();
  DerivationMatrix W;
  W.table = &table;
  W.entries = Eigen::MatrixXd::Zero(N, N);
  for (int r = 0; r < N; ++r) {
    const MultiIndex& I = table.at(r);
    double diag = 0.0;
    for (int i : I.entries) diag += A(i - 1, i - 1);
    W.entries(r, r) = diag;
    for (int i : I.entries) {
      const MultiIndex K = IndexTable::remove(I, i);
      const int si = IndexTable::removal_sign(I, i);
      for (int j = 1; j <= table.n(); ++j) {
        if (I.contains(j)) continue;
        const MultiIndex J = IndexTable::insert(K, j);
        const int sj = IndexTable::removal_sign(J, j);
        W.entries(r, table.rank(J)) += si * sj * A(i - 1, j - 1);
      }
    }
  }
  return W;
}

std::vector<DerivationJacobianEntry> derivation_jacobian(
    const IndexTable& table) {
  std::vector<DerivationJacobianEntry> out;
  const int N = table.size();
  out.reserve(static_cast<std::size_t>(N) *
              static_cast<std::size_t>(table.p()) *
              static_cast<std::size_t>(table.n() - table.p() + 1));
  for (int r = 0; r < N; ++r) {
    const MultiIndex& I = table.at(r);
    for (int i : I.entries) {
      out.push_back({r, r, i, i, 1.0});
      const MultiIndex K = IndexTable::remove(I, i);
      const int si = IndexTable::removal_sign(I, i);
      for (int j = 1; j <= table.n(); ++j) {
        if (I.contains(j)) continue;
        const MultiIndex J = IndexTable::insert(K, j);
        const int sj = IndexTable::removal_sign(J, j);
        out.push_back({r, table.rank(J), i, j,
                       static_cast<double>(si * sj)});
      }
    }
  }
  return out;
}

}  // namespace hqlab
