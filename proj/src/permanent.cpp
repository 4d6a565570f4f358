#include "molcomm/permanent.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <string>

#include "molcomm/errors.hpp"

namespace molcomm {

SquareMatrix::SquareMatrix(std::size_t n, std::vector<double> row_major)
    : n_(n), data_(std::move(row_major)) {
    if (data_.size() != n * n) throw ContractViolation("SquareMatrix: data size is not n*n");
}

double permanent(const SquareMatrix& m, std::size_t cap) {
    const std::size_t n = m.size();
    if (n > cap || n >= 63)
        throw SizeError("permanent: order " + std::to_string(n) + " exceeds cap " +
                        std::to_string(cap));
    if (n == 0) return 1.0;

    // per(A) = (-1)^n sum_{S} (-1)^{|S|} prod_i sum_{j in S} a_ij
    std::vector<long double> row_sum(n, 0.0L);
    long double total = 0.0L;
    std::uint64_t gray = 0;
    const std::uint64_t subsets = std::uint64_t{1} << n;
    for (std::uint64_t k = 1; k < subsets; ++k) {
        const std::uint64_t next = k ^ (k >> 1);
        const std::uint64_t flipped = next ^ gray;
        const auto col = static_cast<std::size_t>(std::countr_zero(flipped));
        const bool added = (next & flipped) != 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (added)
                row_sum[i] += m(i, col);
            else
                row_sum[i] -= m(i, col);
        }
        gray = next;

        long double prod = 1.0L;
        for (std::size_t i = 0; i < n && prod != 0.0L; ++i) prod *= row_sum[i];
        if ((std::popcount(next) & 1) != 0)
            total -= prod;
        else
            total += prod;
    }
    if (n % 2 == 1) total = -total;
    return static_cast<double>(total);
}

}  // namespace molcomm

namespace molcomm {

double permanent_nonnegative(const SquareMatrix& m, std::size_t cap) {
    const std::size_t n = m.size();
    if (n > cap || n >= 32)
        throw SizeError("permanent_nonnegative: order " + std::to_string(n) + " exceeds cap " +
                        std::to_string(cap));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (m(i, j) < 0.0) throw ContractViolation("permanent_nonnegative: negative entry");

    // partial[S]: permanent of rows 0..|S|-1 restricted to the column set S
    std::vector<double> partial(std::size_t{1} << n, 0.0);
    partial[0] = 1.0;
    for (std::size_t set = 1; set < partial.size(); ++set) {
        const auto row = static_cast<std::size_t>(std::popcount(set)) - 1;
        double total = 0.0;
        for (std::size_t rest = set; rest != 0; rest &= rest - 1) {
            const auto col = static_cast<std::size_t>(std::countr_zero(rest));
            total += partial[set & ~(std::size_t{1} << col)] * m(row, col);
        }
        partial[set] = total;
    }
    return partial.back();
}

double permanent_by_enumeration(const SquareMatrix& m) {
    const std::size_t n = m.size();
    if (n > 10) throw SizeError("permanent_by_enumeration: order above 10");
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    long double total = 0.0L;
    do {
        long double prod = 1.0L;
        for (std::size_t i = 0; i < n; ++i) prod *= m(i, perm[i]);
        total += prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(total);
}

}  // namespace molcomm
