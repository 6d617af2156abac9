#pragma once

#include "multiboson/common.hpp"

namespace multiboson {

enum class PermanentAlgorithm { Naive, RyserGray };

struct PermanentResult {
    Complex value;
    PermanentAlgorithm algorithm;
    int n;
    /// Set when |value| < 1e-12 * (max row-sum magnitude)^n, i.e. the
    /// inclusion-exclusion sum cancelled almost completely and the result
    /// may carry few significant digits.
    bool ill_conditioned;
};

/// Reference kernel: sums the product over every permutation directly.
/// O(n!*n); guarded at n <= 12. perm of the 0x0 matrix is 1.
PermanentResult permanent_naive(const MatrixXcd& a);

/**
 * Ryser inclusion-exclusion kernel with Gray-code subset stepping:
 *
 *   perm A = (-1)^n * sum over nonempty column subsets S of
 *            (-1)^|S| * prod_i (sum_{j in S} a_ij)
 *
 * Consecutive subsets differ in one column, so the row sums are updated
 * with a single column add/subtract per step. O(2^n*n); guarded at n <= 30.
 *
 * The 2^n subset sequence is split into fixed power-of-two blocks, each
 * seeded by computing its first subset's row sums directly. Blocks are
 * accumulated independently (compensated summation for n >= 20) and reduced
 * in block-index order, so the value is bit-identical for any worker count.
 */
PermanentResult permanent_ryser(const MatrixXcd& a);

/// Default kernel (RyserGray), returning just the value.
Complex permanent(const MatrixXcd& a);

}  // namespace multiboson
