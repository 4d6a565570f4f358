#pragma once

#include <cstddef>
#include <vector>

namespace molcomm {

/// Dense row-major square matrix.
class SquareMatrix {
  public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}
    SquareMatrix(std::size_t n, std::vector<double> row_major);

    std::size_t size() const { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

inline constexpr std::size_t kDefaultPermanentCap = 14;

/// Permanent by Ryser's inclusion-exclusion formula, visiting column subsets in
/// Gray-code order so each step updates the row sums with one column.
/// O(2^n n). Accumulates in long double. Throws SizeError when n > cap.
double permanent(const SquareMatrix& m, std::size_t cap = kDefaultPermanentCap);

}  // namespace molcomm

namespace molcomm {

/// Permanent of a non-negative matrix by dynamic programming over row subsets:
/// partial[S] = sum_{j in S} partial[S \ {j}] * m(|S| - 1, j). O(2^n n) like
/// Ryser, but every term is non-negative so there is no cancellation. Use this
/// when the permanent can be many orders of magnitude below the product of the
/// row sums (triangular-ish likelihood matrices). Throws SizeError when n > cap
/// and ContractViolation on a negative entry.
double permanent_nonnegative(const SquareMatrix& m, std::size_t cap = kDefaultPermanentCap);

/// Sum over all n! permutations. Reference routine for small n.
double permanent_by_enumeration(const SquareMatrix& m);

}  // namespace molcomm
