#include "doctest.h"

#include <cmath>

#include "multiboson/spectra.hpp"
#include "support/test_support.hpp"

using namespace multiboson;
using multiboson_test::random_psd_gram;
using multiboson_test::simpson_overlap;

namespace {

const Vector2cd kH(Complex(1, 0), Complex(0, 0));
const Vector2cd kV(Complex(0, 0), Complex(1, 0));

SpectralAmplitude gaussian(double w0, double bw, double t0, const Vector2cd& pol = kH) {
    return {SpectrumKind::GaussianPulse, w0, bw, t0, pol};
}

}  // namespace

TEST_CASE("spectral amplitude validation") {
    CHECK_THROWS_AS(gaussian(10.0, 0.0, 0.0), ValidationError);
    CHECK_THROWS_AS(gaussian(10.0, -1.0, 0.0), ValidationError);
    CHECK_THROWS_AS(gaussian(10.0, 1.0, 0.0, Vector2cd(Complex(1, 0), Complex(1, 0))),
                    ValidationError);
    const Vector2cd diag(Complex(1 / std::sqrt(2.0), 0), Complex(0, 1 / std::sqrt(2.0)));
    CHECK_NOTHROW(gaussian(10.0, 1.0, 0.0, diag));

    const SpectralAmplitude line(SpectrumKind::Delta, 10.0, 0.0, 0.0, kH);
    CHECK_FALSE(line.pointwise_evaluable());
    CHECK_THROWS_AS(line.value(10.0), NumericalError);
}

TEST_CASE("gaussian envelope is normalized") {
    const SpectralAmplitude a = gaussian(12.0, 0.7, 0.3);
    CHECK(std::abs(simpson_overlap(a, a) - Complex(1, 0)) < 1e-10);
    CHECK(std::abs(overlap(a, a) - Complex(1, 0)) < 1e-12);
}

TEST_CASE("closed-form overlap matches the dense grid") {
    const struct {
        SpectralAmplitude a;
        SpectralAmplitude b;
    } cases[] = {
        {gaussian(10.0, 0.5, 0.0), gaussian(10.0, 0.5, 1.2)},     // pure delay
        {gaussian(10.0, 0.5, 0.0), gaussian(11.0, 0.5, 0.0)},     // detuned
        {gaussian(10.0, 0.5, 0.0), gaussian(10.0, 1.5, 0.0)},     // bandwidth mismatch
        {gaussian(10.0, 0.4, -0.7), gaussian(10.8, 1.1, 0.9)},    // everything differs
        {gaussian(5.0, 0.3, 2.0, kV), gaussian(5.2, 0.6, -1.0, kV)},
    };
    for (const auto& c : cases) {
        const Complex closed = overlap(c.a, c.b);
        const Complex grid = simpson_overlap(c.a, c.b);
        CAPTURE(closed.real());
        CAPTURE(grid.real());
        CHECK(std::abs(closed - grid) < 1e-8);
    }
}

TEST_CASE("closed-form overlap matches adaptive quadrature") {
    const SpectralAmplitude a = gaussian(10.0, 0.4, -0.7);
    const SpectralAmplitude b = gaussian(10.8, 1.1, 0.9);
    CHECK(std::abs(overlap(a, b) - overlap_quadrature(a, b)) < 1e-9);
    const SpectralAmplitude line(SpectrumKind::Delta, 10.0, 0.0, 0.0, kH);
    CHECK_THROWS_AS(overlap_quadrature(a, line), NumericalError);
}

TEST_CASE("equal-parameter pairs lose overlap as exp(-tau^2 bw^2)") {
    const double bw = 0.5;
    for (double tau : {0.0, 0.4, 1.3, 4.0}) {
        const Complex g = overlap(gaussian(9.0, bw, 0.0), gaussian(9.0, bw, tau));
        CHECK(std::abs(std::norm(g) - std::exp(-tau * tau * bw * bw)) < 1e-12);
    }
}

TEST_CASE("overlap is conjugate symmetric") {
    const SpectralAmplitude a = gaussian(10.0, 0.4, -0.7);
    const SpectralAmplitude b = gaussian(10.8, 1.1, 0.9);
    const Complex ab = overlap(a, b);
    const Complex ba = overlap(b, a);
    CHECK(std::abs(ab - std::conj(ba)) < 1e-14);
}

TEST_CASE("orthogonal polarizations are exactly orthogonal") {
    const Complex g = overlap(gaussian(10.0, 0.5, 0.0, kH), gaussian(10.0, 0.5, 0.0, kV));
    CHECK(g == Complex(0, 0));
}

TEST_CASE("spectral lines overlap only at identical frequency") {
    const SpectralAmplitude a(SpectrumKind::Delta, 10.0, 0.0, 0.0, kH);
    const SpectralAmplitude b(SpectrumKind::Delta, 10.0, 0.0, 0.25, kH);
    const SpectralAmplitude c(SpectrumKind::Delta, 10.5, 0.0, 0.0, kH);
    // g = e^{i w tau}
    CHECK(std::abs(overlap(a, b) - std::exp(Complex(0, 10.0 * 0.25))) < 1e-15);
    CHECK(std::abs(std::abs(overlap(a, b)) - 1.0) < 1e-15);
    CHECK(overlap(a, c) == Complex(0, 0));
    // mixed line/pulse overlaps vanish in the narrow-line limit
    CHECK(overlap(a, gaussian(10.0, 0.5, 0.0)) == Complex(0, 0));
}

TEST_CASE("gram matrix invariants are enforced") {
    MatrixXcd not_hermitian(2, 2);
    not_hermitian << Complex(1, 0), Complex(0.5, 0), Complex(0.2, 0), Complex(1, 0);
    CHECK_THROWS_AS(GramMatrix(std::move(not_hermitian)), ValidationError);

    MatrixXcd bad_diag(2, 2);
    bad_diag << Complex(0.9, 0), Complex(0, 0), Complex(0, 0), Complex(1, 0);
    CHECK_THROWS_AS(GramMatrix(std::move(bad_diag)), ValidationError);

    // Hermitian with unit diagonal but |g| > 1 (also non-PSD).
    MatrixXcd too_big(2, 2);
    too_big << Complex(1, 0), Complex(1.5, 0), Complex(1.5, 0), Complex(1, 0);
    CHECK_THROWS_AS(GramMatrix(std::move(too_big)), ValidationError);

    // Hermitian, unit diagonal, |g| <= 1, but indefinite (det = -2.888).
    MatrixXcd indefinite(3, 3);
    indefinite << Complex(1, 0), Complex(0.9, 0), Complex(-0.9, 0),  //
        Complex(0.9, 0), Complex(1, 0), Complex(0.9, 0),             //
        Complex(-0.9, 0), Complex(0.9, 0), Complex(1, 0);
    CHECK_THROWS_AS(GramMatrix(std::move(indefinite)), ValidationError);

    CHECK_THROWS_AS(GramMatrix(MatrixXcd(0, 0)), ValidationError);
    CHECK_NOTHROW(random_psd_gram(5, 31));
}

TEST_CASE("gram of staggered equal pulses decays geometrically") {
    // Photons at times 0, tau, 2tau: |g(0,2)| = |g(0,1)|^4 for equal pulses,
    // and the two single-step overlaps coincide.
    const double bw = 0.5;
    const double tau = 0.8;
    const GramMatrix g = gram_matrix(
        {gaussian(10.0, bw, 0.0), gaussian(10.0, bw, tau), gaussian(10.0, bw, 2 * tau)});
    REQUIRE(g.dim() == 3);
    CHECK(std::abs(std::abs(g(0, 1)) - std::abs(g(1, 2))) < 1e-13);
    CHECK(std::abs(std::abs(g(0, 2)) - std::pow(std::abs(g(0, 1)), 4.0)) < 1e-13);
    for (int s = 0; s < 3; ++s) {
        CHECK(std::abs(g(s, s) - Complex(1, 0)) < 1e-12);
    }
}

TEST_CASE("indistinguishability weight multiplies overlaps along the permutation") {
    const GramMatrix g = random_psd_gram(3, 12);
    CHECK(std::abs(indistinguishability_weight(g, {0, 1, 2}) - Complex(1, 0)) < 1e-12);
    const Complex expected = g(0, 1) * g(1, 0) * g(2, 2);
    CHECK(std::abs(indistinguishability_weight(g, {1, 0, 2}) - expected) < 1e-14);
    CHECK_THROWS_AS(indistinguishability_weight(g, {0, 1}), ValidationError);
    CHECK_THROWS_AS(indistinguishability_weight(g, {0, 0, 1}), ValidationError);
}
