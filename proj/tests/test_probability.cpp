#include "doctest.h"

#include <cmath>

#include "multiboson/distribution.hpp"
#include "multiboson/probability.hpp"
#include "multiboson/unitary.hpp"
#include "support/test_support.hpp"

using namespace multiboson;
using multiboson_test::random_psd_gram;

namespace {

GramMatrix pair_gram(Complex g) {
    MatrixXcd m(2, 2);
    m << Complex(1, 0), g, std::conj(g), Complex(1, 0);
    return GramMatrix(std::move(m));
}

GramMatrix constant_gram(int n, double g) {
    MatrixXcd m = MatrixXcd::Constant(n, n, Complex(g, 0));
    m.diagonal().setConstant(Complex(1, 0));
    return GramMatrix(std::move(m));
}

// Photons in `group` mutually identical, everyone else fully distinguishable.
GramMatrix block_gram(int n, const std::vector<int>& group) {
    MatrixXcd m = MatrixXcd::Identity(n, n);
    for (int a : group) {
        for (int b : group) {
            m(a, b) = Complex(1, 0);
        }
    }
    return GramMatrix(std::move(m));
}

}  // namespace

TEST_CASE("two-photon coincidence interpolates between bunching and none") {
    // On the balanced beam splitter the coincidence probability is
    // (1 - |g|^2) / 2 and each bunched outcome carries (1 + |g|^2) / 4:
    // the identity permutation contributes perm |U|^2 and the swap adds
    // |g|^2 times a permanent that is -1/2 for the coincidence and +1/2
    // for the bunched outcomes.
    const InterferometerMatrix bs = balanced_beam_splitter();
    const MatrixXcd coincidence = submatrix(bs, PortConfiguration({0, 1}, {1, 1}));
    const MatrixXcd bunched = submatrix(bs, PortConfiguration({0, 1}, {2, 0}));

    for (double g : {0.0, 0.3, 0.7, 1.0}) {
        const GramMatrix gram = pair_gram(Complex(g, 0));
        const DetectionProbability pc = probability_general(coincidence, gram, {1, 1});
        CHECK(std::abs(pc.value - 0.5 * (1.0 - g * g)) < 1e-10);
        CHECK(pc.imaginary_residual < 1e-14);
        CHECK(pc.path == ComputationPath::General);

        const DetectionProbability pb = probability_general(bunched, gram, {2});
        CHECK(std::abs(pb.value - 0.25 * (1.0 + g * g)) < 1e-10);
        CHECK(std::abs(pb.raw_rate - 2.0 * pb.value) < 1e-12);
    }
}

TEST_CASE("only the overlap magnitude enters a two-photon rate") {
    const InterferometerMatrix bs = balanced_beam_splitter();
    const MatrixXcd coincidence = submatrix(bs, PortConfiguration({0, 1}, {1, 1}));
    const double expected = 0.5 * (1.0 - 0.25);
    for (Complex g : {Complex(0.5, 0), Complex(0, 0.5), Complex(-0.3, 0.4)}) {
        const DetectionProbability p =
            probability_general(coincidence, pair_gram(g), {1, 1});
        CHECK(std::abs(p.value - expected) < 1e-12);
    }
}

TEST_CASE("general path reduces to the distinguishable rate on identity grams") {
    const InterferometerMatrix u = haar_random(4, 301);
    const GramMatrix identity_gram = constant_gram(3, 0.0);
    for (const auto& outcome : enumerate_samples(4, 3)) {
        const PortConfiguration cfg({0, 1, 3}, outcome);
        const MatrixXcd sub = submatrix(u, cfg);
        std::vector<int> occ;
        for (int o : outcome) {
            if (o > 0) occ.push_back(o);
        }
        const double general = probability_general(sub, identity_gram, occ).value;
        const double fast = probability_distinguishable(sub, occ).value;
        CHECK(std::abs(general - fast) < 1e-12);
    }
}

TEST_CASE("general path reduces to the identical rate on all-ones grams") {
    const InterferometerMatrix u = haar_random(4, 302);
    const GramMatrix ones = constant_gram(3, 1.0);
    for (const auto& outcome : enumerate_samples(4, 3)) {
        const PortConfiguration cfg({0, 1, 3}, outcome);
        const MatrixXcd sub = submatrix(u, cfg);
        std::vector<int> occ;
        for (int o : outcome) {
            if (o > 0) occ.push_back(o);
        }
        const double general = probability_general(sub, ones, occ).value;
        const double fast = probability_identical(sub, occ).value;
        CHECK(std::abs(general - fast) < 1e-10);
    }
}

TEST_CASE("general path reduces to the mixed-groups rate on block grams") {
    const InterferometerMatrix u = haar_random(5, 303);
    const std::vector<int> inputs{0, 2, 3, 4};
    const std::vector<int> group{1, 3};  // photons 1 and 3 identical
    const GramMatrix gram = block_gram(4, group);
    for (const auto& outcome : enumerate_samples(5, 4)) {
        const PortConfiguration cfg(inputs, outcome);
        const MatrixXcd sub = submatrix(u, cfg);
        std::vector<int> occ;
        for (int o : outcome) {
            if (o > 0) occ.push_back(o);
        }
        const double general = probability_general(sub, gram, occ).value;
        const double mixed = probability_mixed_groups(sub, occ, group).value;
        CHECK(std::abs(general - mixed) < 1e-10);
    }
}

TEST_CASE("mixed groups covers the degenerate group sizes") {
    const InterferometerMatrix u = haar_random(4, 304);
    const PortConfiguration cfg({0, 1, 2}, {1, 2, 0, 0});
    const MatrixXcd sub = submatrix(u, cfg);
    const std::vector<int> occ{1, 2};

    const double empty_group = probability_mixed_groups(sub, occ, {}).value;
    CHECK(std::abs(empty_group - probability_distinguishable(sub, occ).value) < 1e-12);

    const double full_group = probability_mixed_groups(sub, occ, {0, 1, 2}).value;
    CHECK(std::abs(full_group - probability_identical(sub, occ).value) < 1e-12);
}

TEST_CASE("two-photon rates are affine in the squared overlap") {
    // For N = 2 the permutation sum has exactly two terms, so
    // P(g) = P(0) + |g|^2 (P(1) - P(0)) for every outcome and interferometer.
    const InterferometerMatrix u = haar_random(3, 305);
    for (const auto& outcome : enumerate_samples(3, 2)) {
        const PortConfiguration cfg({0, 2}, outcome);
        const MatrixXcd sub = submatrix(u, cfg);
        std::vector<int> occ;
        for (int o : outcome) {
            if (o > 0) occ.push_back(o);
        }
        const double p0 = probability_general(sub, pair_gram(Complex(0, 0)), occ).value;
        const double p1 = probability_general(sub, pair_gram(Complex(1, 0)), occ).value;
        const double ph = probability_general(sub, pair_gram(Complex(0.5, 0)), occ).value;
        CHECK(std::abs(ph - (p0 + 0.25 * (p1 - p0))) < 1e-12);
    }
}

TEST_CASE("random grams give small residuals and consistent normalization") {
    const InterferometerMatrix u = haar_random(4, 306);
    for (int rep = 0; rep < 5; ++rep) {
        const GramMatrix gram = random_psd_gram(3, 400 + rep);
        const PortConfiguration cfg({0, 1, 2}, {0, 2, 1, 0});
        const MatrixXcd sub = submatrix(u, cfg);
        const DetectionProbability p = probability_general(sub, gram, {2, 1});
        CHECK(p.value >= -1e-12);
        CHECK(p.imaginary_residual < 1e-12);
        CHECK(std::abs(p.raw_rate - p.value * 2.0) < 1e-12);  // norm = 2! * 1!
    }
}

TEST_CASE("probability validation and guards") {
    const InterferometerMatrix u = haar_random(3, 307);
    const PortConfiguration cfg({0, 1}, {1, 1, 0});
    const MatrixXcd sub = submatrix(u, cfg);

    // gram dimension mismatch
    CHECK_THROWS_AS(probability_general(sub, random_psd_gram(3, 1), {1, 1}),
                    ValidationError);
    // occupations must sum to the matrix size
    CHECK_THROWS_AS(probability_general(sub, random_psd_gram(2, 1), {1, 1, 1}),
                    ValidationError);
    CHECK_THROWS_AS(probability_distinguishable(sub, {2, 1}), ValidationError);
    CHECK_THROWS_AS(probability_identical(sub, {0, 2}), ValidationError);
    // non-square submatrix
    CHECK_THROWS_AS(probability_identical(MatrixXcd::Ones(2, 3), {1, 1}),
                    ValidationError);
    // mixed-groups column list must be strictly increasing and in range
    CHECK_THROWS_AS(probability_mixed_groups(sub, {1, 1}, {1, 0}), ValidationError);
    CHECK_THROWS_AS(probability_mixed_groups(sub, {1, 1}, {0, 2}), ValidationError);
    CHECK_THROWS_AS(probability_mixed_groups(sub, {1, 1}, {0, 0}), ValidationError);

    // the permutation sum is refused beyond the cost guard
    const MatrixXcd big = MatrixXcd::Identity(11, 11);
    CHECK_THROWS_AS(
        probability_general(big, random_psd_gram(11, 2), std::vector<int>(11, 1)),
        FeasibilityError);
}
