#include "multiboson/permanent.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <thread>
#include <vector>

namespace multiboson {

namespace {

constexpr int kNaiveGuard = 12;
constexpr int kRyserGuard = 30;
constexpr int kCompensatedThreshold = 20;

struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

void require_square(const MatrixXcd& a) {
    if (a.rows() != a.cols())
        throw ValidationError("permanent: matrix must be square, got " + std::to_string(a.rows()) +
                              "x" + std::to_string(a.cols()));
}

bool looks_ill_conditioned(const MatrixXcd& a, const Complex& value) {
    const int n = static_cast<int>(a.rows());
    double max_row_sum = 0.0;
    for (int i = 0; i < n; ++i) max_row_sum = std::max(max_row_sum, std::abs(a.row(i).sum()));
    return std::abs(value) < 1e-12 * std::pow(max_row_sum, n);
}

/// Ryser partial sum over the subset indices k in [k_begin, k_end), where
/// subset(k) = k ^ (k >> 1). The first subset's row sums are built directly;
/// every following step flips column ctz(k).
Complex ryser_block(const MatrixXcd& a, std::uint64_t k_begin, std::uint64_t k_end, bool compensated) {
    const int n = static_cast<int>(a.rows());
    std::vector<Complex> row_sums(static_cast<std::size_t>(n), Complex(0.0, 0.0));

    std::uint64_t gray = k_begin ^ (k_begin >> 1);
    for (int j = 0; j < n; ++j) {
        if (gray & (std::uint64_t{1} << j)) {
            const Complex* col = a.col(j).data();
            for (int i = 0; i < n; ++i) row_sums[static_cast<std::size_t>(i)] += col[i];
        }
    }
    double sign = (std::popcount(gray) & 1) ? -1.0 : 1.0;

    KahanSum real_acc, imag_acc;
    Complex plain_acc(0.0, 0.0);
    auto accumulate = [&](const Complex& term) {
        if (compensated) {
            real_acc.add(term.real());
            imag_acc.add(term.imag());
        } else {
            plain_acc += term;
        }
    };

    Complex prod = row_sums[0];
    for (int i = 1; i < n; ++i) prod *= row_sums[static_cast<std::size_t>(i)];
    accumulate(sign * prod);

    for (std::uint64_t k = k_begin + 1; k < k_end; ++k) {
        const int j = std::countr_zero(k);
        const std::uint64_t bit = std::uint64_t{1} << j;
        gray ^= bit;
        const double dir = (gray & bit) ? 1.0 : -1.0;
        const Complex* col = a.col(j).data();
        for (int i = 0; i < n; ++i) row_sums[static_cast<std::size_t>(i)] += dir * col[i];
        sign = -sign;

        prod = row_sums[0];
        for (int i = 1; i < n; ++i) prod *= row_sums[static_cast<std::size_t>(i)];
        accumulate(sign * prod);
    }

    return compensated ? Complex(real_acc.sum, imag_acc.sum) : plain_acc;
}

}  // namespace

PermanentResult permanent_naive(const MatrixXcd& a) {
    require_square(a);
    const int n = static_cast<int>(a.rows());
    if (n > kNaiveGuard) {
        std::ostringstream msg;
        msg << "permanent_naive: n=" << n << " exceeds the n<=" << kNaiveGuard
            << " oracle guard (cost ~ n!*n = " << factorial(n) * n << " operations)";
        throw FeasibilityError(msg.str());
    }
    if (n == 0) return {Complex(1.0, 0.0), PermanentAlgorithm::Naive, 0, false};

    Permutation sigma = identity_permutation(n);
    Complex sum(0.0, 0.0);
    do {
        Complex prod = a(0, sigma[0]);
        for (int i = 1; i < n; ++i) prod *= a(i, sigma[static_cast<std::size_t>(i)]);
        sum += prod;
    } while (std::next_permutation(sigma.begin(), sigma.end()));

    return {sum, PermanentAlgorithm::Naive, n, looks_ill_conditioned(a, sum)};
}

PermanentResult permanent_ryser(const MatrixXcd& a) {
    require_square(a);
    const int n = static_cast<int>(a.rows());
    if (n > kRyserGuard) {
        std::ostringstream msg;
        msg << "permanent_ryser: n=" << n << " exceeds the n<=" << kRyserGuard
            << " guard (cost ~ 2^n*n = " << std::ldexp(static_cast<double>(n), n)
            << " operations)";
        throw FeasibilityError(msg.str());
    }
    if (n == 0) return {Complex(1.0, 0.0), PermanentAlgorithm::RyserGray, 0, false};

    const bool compensated = n >= kCompensatedThreshold;
    const std::uint64_t k_max = std::uint64_t{1} << n;

    // Fixed split independent of the worker count keeps results bit-stable.
    const int block_bits = n < 16 ? 0 : std::min(6, n - 14);
    const std::uint64_t n_blocks = std::uint64_t{1} << block_bits;
    const std::uint64_t block_len = k_max >> block_bits;

    std::vector<Complex> block_sums(static_cast<std::size_t>(n_blocks));
    auto run_block = [&](std::uint64_t b) {
        const std::uint64_t begin = std::max<std::uint64_t>(1, b * block_len);
        const std::uint64_t end = (b + 1) * block_len;
        block_sums[static_cast<std::size_t>(b)] = ryser_block(a, begin, end, compensated);
    };

    const int workers = std::min<int>(worker_count(), static_cast<int>(n_blocks));
    if (workers <= 1 || n_blocks == 1) {
        for (std::uint64_t b = 0; b < n_blocks; ++b) run_block(b);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::uint64_t b = next.fetch_add(1); b < n_blocks; b = next.fetch_add(1)) run_block(b);
            });
        for (auto& t : pool) t.join();
    }

    Complex sum(0.0, 0.0);
    for (std::uint64_t b = 0; b < n_blocks; ++b) sum += block_sums[static_cast<std::size_t>(b)];
    if (n & 1) sum = -sum;

    return {sum, PermanentAlgorithm::RyserGray, n, looks_ill_conditioned(a, sum)};
}

Complex permanent(const MatrixXcd& a) { return permanent_ryser(a).value; }

}  // namespace multiboson
