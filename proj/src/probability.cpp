#include "multiboson/probability.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "multiboson/permanent.hpp"
#include "multiboson/unitary.hpp"

namespace multiboson {

namespace {

constexpr int kGeneralPathGuard = 10;

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

void require_square(const MatrixXcd& u_sub) {
    if (u_sub.rows() != u_sub.cols()) {
        std::ostringstream msg;
        msg << "detection probability: scattering submatrix must be square, got "
            << u_sub.rows() << "x" << u_sub.cols();
        throw ValidationError(msg.str());
    }
}

double occupation_normalization(const std::vector<int>& occupations, int n) {
    int total = 0;
    double norm = 1.0;
    for (int occ : occupations) {
        if (occ < 1) {
            std::ostringstream msg;
            msg << "detection probability: detected-port occupations must be >= 1, got "
                << occ;
            throw ValidationError(msg.str());
        }
        total += occ;
        norm *= factorial(occ);
    }
    if (total != n) {
        std::ostringstream msg;
        msg << "detection probability: occupations sum to " << total << " but the "
            << "submatrix has " << n << " rows";
        throw ValidationError(msg.str());
    }
    return norm;
}

}  // namespace

const char* to_string(ComputationPath path) {
    switch (path) {
        case ComputationPath::General:
            return "general";
        case ComputationPath::Distinguishable:
            return "distinguishable";
        case ComputationPath::Identical:
            return "identical";
        case ComputationPath::MixedGroups:
            return "mixed-groups";
        case ComputationPath::FockOracle:
            return "fock-oracle";
    }
    return "unknown";
}

DetectionProbability probability_general(const MatrixXcd& u_sub, const GramMatrix& gram,
                                         const std::vector<int>& output_occupations) {
    require_square(u_sub);
    const int n = static_cast<int>(u_sub.rows());
    if (gram.dim() != n) {
        std::ostringstream msg;
        msg << "detection probability: gram dimension " << gram.dim()
            << " does not match photon count " << n;
        throw ValidationError(msg.str());
    }
    if (n > kGeneralPathGuard) {
        std::ostringstream msg;
        msg << "general path refused for N = " << n << " (guard " << kGeneralPathGuard
            << "): cost grows as N! * 2^N * N, about " << factorial(n) * std::pow(2.0, n) * n
            << " operations here";
        throw FeasibilityError(msg.str());
    }
    const double norm = occupation_normalization(output_occupations, n);

    KahanSum real_sum;
    KahanSum residual_sum;
    Permutation rho = identity_permutation(n);
    do {
        const Permutation rho_inv = inverse_permutation(rho);
        if (rho > rho_inv) {
            continue;  // counted when rho_inv was visited
        }
        const Complex f = indistinguishability_weight(gram, rho);
        if (f.real() == 0.0 && f.imag() == 0.0) {
            continue;
        }
        const Complex term = f * permanent(interference_matrix(u_sub, rho));
        if (rho == rho_inv) {
            real_sum.add(term.real());
            residual_sum.add(term.imag());
        } else {
            // term(rho_inv) = conj(term(rho)), so the pair sums to 2 Re(term).
            real_sum.add(2.0 * term.real());
        }
    } while (std::next_permutation(rho.begin(), rho.end()));

    const double raw = real_sum.sum;
    return {raw / norm, raw, std::abs(residual_sum.sum), ComputationPath::General};
}

DetectionProbability probability_distinguishable(const MatrixXcd& u_sub,
                                                 const std::vector<int>& output_occupations) {
    require_square(u_sub);
    const int n = static_cast<int>(u_sub.rows());
    const double norm = occupation_normalization(output_occupations, n);
    const Complex raw = permanent(u_sub.cwiseAbs2());
    return {raw.real() / norm, raw.real(), std::abs(raw.imag()),
            ComputationPath::Distinguishable};
}

DetectionProbability probability_identical(const MatrixXcd& u_sub,
                                           const std::vector<int>& output_occupations) {
    require_square(u_sub);
    const int n = static_cast<int>(u_sub.rows());
    const double norm = occupation_normalization(output_occupations, n);
    const double raw = std::norm(permanent(u_sub));
    return {raw / norm, raw, 0.0, ComputationPath::Identical};
}

DetectionProbability probability_mixed_groups(const MatrixXcd& u_sub,
                                              const std::vector<int>& output_occupations,
                                              const std::vector<int>& identical_columns) {
    require_square(u_sub);
    const int n = static_cast<int>(u_sub.rows());
    const double norm = occupation_normalization(output_occupations, n);

    for (std::size_t i = 0; i < identical_columns.size(); ++i) {
        const int col = identical_columns[i];
        if (col < 0 || col >= n) {
            std::ostringstream msg;
            msg << "mixed groups: identical column index " << col << " outside [0, " << n
                << ")";
            throw ValidationError(msg.str());
        }
        if (i > 0 && identical_columns[i - 1] >= col) {
            throw ValidationError(
                "mixed groups: identical column indices must be strictly increasing");
        }
    }
    const int nprime = static_cast<int>(identical_columns.size());

    std::vector<int> other_columns;
    other_columns.reserve(static_cast<std::size_t>(n - nprime));
    for (int col = 0, i = 0; col < n; ++col) {
        if (i < nprime && identical_columns[static_cast<std::size_t>(i)] == col) {
            ++i;
        } else {
            other_columns.push_back(col);
        }
    }

    // First row index of each detected port's adjacent block.
    const int ports = static_cast<int>(output_occupations.size());
    std::vector<int> first_row(output_occupations.size());
    for (int d = 0, row = 0; d < ports; ++d) {
        first_row[static_cast<std::size_t>(d)] = row;
        row += output_occupations[static_cast<std::size_t>(d)];
    }

    const auto block = [&](const std::vector<int>& rows, const std::vector<int>& cols) {
        MatrixXcd a(rows.size(), cols.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            for (std::size_t c = 0; c < cols.size(); ++c) {
                a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    u_sub(rows[r], cols[c]);
            }
        }
        return a;
    };

    // Enumerate the distinct output sub-multisets Theta by choosing how many
    // of each port's detections the identical group accounts for.
    KahanSum raw_sum;
    std::vector<int> group_share(output_occupations.size(), 0);
    const auto assign = [&](auto&& self, int d, int remaining) -> void {
        if (d == ports) {
            if (remaining != 0) {
                return;
            }
            double weight = 1.0;
            std::vector<int> group_rows;
            std::vector<int> rest_rows;
            group_rows.reserve(static_cast<std::size_t>(nprime));
            rest_rows.reserve(static_cast<std::size_t>(n - nprime));
            for (int p = 0; p < ports; ++p) {
                const int occ = output_occupations[static_cast<std::size_t>(p)];
                const int k = group_share[static_cast<std::size_t>(p)];
                weight *= binomial(occ, k);
                for (int j = 0; j < k; ++j) {
                    group_rows.push_back(first_row[static_cast<std::size_t>(p)]);
                }
                for (int j = k; j < occ; ++j) {
                    rest_rows.push_back(first_row[static_cast<std::size_t>(p)]);
                }
            }
            const double ident = std::norm(permanent(block(group_rows, identical_columns)));
            const Complex dist = permanent(block(rest_rows, other_columns).cwiseAbs2());
            raw_sum.add(weight * ident * dist.real());
            return;
        }
        const int occ = output_occupations[static_cast<std::size_t>(d)];
        for (int k = 0; k <= std::min(occ, remaining); ++k) {
            group_share[static_cast<std::size_t>(d)] = k;
            self(self, d + 1, remaining - k);
        }
        group_share[static_cast<std::size_t>(d)] = 0;
    };
    assign(assign, 0, nprime);

    const double raw = raw_sum.sum;
    return {raw / norm, raw, 0.0, ComputationPath::MixedGroups};
}

}  // namespace multiboson
