#pragma once

#include <cstdint>

#include "lpstab/matrix.hpp"

namespace lpstab {
namespace zoo {

/// 2n x n truncation of I - lambda*D where D duplicates coordinates:
/// D(a_0, a_1, ...) = (a_0/2, a_0/2, a_1/2, a_1/2, ...). Rows 0..2n-1 keep
/// all D mass for columns below n; the identity block is padded with zeros
/// on rows >= n.
IndexedMatrix dilation_matrix(int n, double lambda);

/// The normalized characteristic-function test vectors 1_{[0,m-1]} / m on
/// the row index set of the dilation matrix.
std::vector<double> dilation_phi(int rows, int m);

/// Column n (1-indexed) holds n entries equal to n^{-1/p} in its own block
/// of fresh rows; columns have disjoint supports and unit lp norm.
IndexedMatrix staircase_matrix(double p, int N);

/// I - P on an n-point integer interval, P the averaging convolution by the
/// normalized characteristic function of {-1, 1}.
IndexedMatrix random_walk_operator(int n);

/// Random entries on the slanted support {(y, x): |y - alpha*x| <= width}.
IndexedMatrix slanted_matrix(double alpha, double width, int n,
                             std::uint64_t seed);

/// Random rows supported in balls B(c_y, r) with column budgets enforcing
/// sparseness <= v. With rows_banded the row set is X itself and row y is
/// centered at y (a banded matrix).
IndexedMatrix random_thin_sparse(SpacePtr space, double r, int v,
                                 double density, std::uint64_t seed,
                                 bool rows_banded = false);

/// Dense matrix with entries sign * (1 + d(x,y))^{-beta}, random signs.
IndexedMatrix polynomial_decay_matrix(SpacePtr space, double beta,
                                      std::uint64_t seed);

/// Entries sign * exp(-d(x,y)); for decay-class tests.
IndexedMatrix exponential_decay_matrix(SpacePtr space, std::uint64_t seed);

}  // namespace zoo
}  // namespace lpstab
