#include "multiboson/spectra.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace multiboson {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kPolarizationNormTol = 1e-12;
constexpr double kHermitianTol = 1e-10;
constexpr double kUnitDiagonalTol = 1e-10;
constexpr double kMagnitudeTol = 1e-10;
constexpr double kPsdTol = 1e-9;
constexpr double kQuadratureTol = 1e-10;
constexpr int kQuadratureMaxDepth = 40;

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) {
        std::ostringstream msg;
        msg << "spectral amplitude: " << what << " must be finite, got " << x;
        throw ValidationError(msg.str());
    }
}

}  // namespace

SpectralAmplitude::SpectralAmplitude(SpectrumKind kind, double central_frequency,
                                     double bandwidth, double emission_time,
                                     const Vector2cd& polarization)
    : kind_(kind),
      central_frequency_(central_frequency),
      bandwidth_(kind == SpectrumKind::Delta ? 0.0 : bandwidth),
      emission_time_(emission_time),
      polarization_(polarization) {
    require_finite(central_frequency, "central frequency");
    require_finite(emission_time, "emission time");
    if (!std::isfinite(polarization.squaredNorm())) {
        throw ValidationError("spectral amplitude: polarization entries must be finite");
    }
    if (std::abs(polarization.norm() - 1.0) > kPolarizationNormTol) {
        std::ostringstream msg;
        msg << "spectral amplitude: polarization must be a unit vector, |p| = "
            << polarization.norm();
        throw ValidationError(msg.str());
    }
    if (kind == SpectrumKind::GaussianPulse) {
        require_finite(bandwidth, "bandwidth");
        if (bandwidth <= 0.0) {
            std::ostringstream msg;
            msg << "spectral amplitude: bandwidth must be positive, got " << bandwidth;
            throw ValidationError(msg.str());
        }
    }
}

Vector2cd SpectralAmplitude::value(double omega) const {
    if (kind_ != SpectrumKind::GaussianPulse) {
        throw NumericalError(
            "spectral amplitude: delta spectra have no pointwise value; "
            "use the closed-form overlap");
    }
    const double d = omega - central_frequency_;
    const double envelope = std::pow(2.0 * kPi * bandwidth_ * bandwidth_, -0.25) *
                            std::exp(-d * d / (4.0 * bandwidth_ * bandwidth_));
    const Complex phase = std::exp(Complex(0.0, omega * emission_time_));
    return envelope * phase * polarization_;
}

GramMatrix::GramMatrix(MatrixXcd entries) : entries_(std::move(entries)) {
    if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
        std::ostringstream msg;
        msg << "gram matrix: expected square non-empty matrix, got " << entries_.rows()
            << "x" << entries_.cols();
        throw ValidationError(msg.str());
    }
    const double herm_defect = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
    if (herm_defect > kHermitianTol) {
        std::ostringstream msg;
        msg << "gram matrix: not Hermitian, max |G - G^H| = " << herm_defect;
        throw ValidationError(msg.str());
    }
    for (int s = 0; s < entries_.rows(); ++s) {
        if (std::abs(entries_(s, s) - Complex(1.0, 0.0)) > kUnitDiagonalTol) {
            std::ostringstream msg;
            msg << "gram matrix: diagonal entry " << s << " is " << entries_(s, s)
                << ", expected 1";
            throw ValidationError(msg.str());
        }
    }
    const double max_mag = entries_.cwiseAbs().maxCoeff();
    if (max_mag > 1.0 + kMagnitudeTol) {
        std::ostringstream msg;
        msg << "gram matrix: overlap magnitude " << max_mag << " exceeds 1";
        throw ValidationError(msg.str());
    }
    Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(entries_, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("gram matrix: eigenvalue computation failed");
    }
    const double min_eig = solver.eigenvalues().minCoeff();
    if (min_eig < -kPsdTol) {
        std::ostringstream msg;
        msg << "gram matrix: not positive semidefinite, smallest eigenvalue = " << min_eig;
        throw ValidationError(msg.str());
    }
}

namespace {

Complex overlap_gaussian_gaussian(const SpectralAmplitude& a, const SpectralAmplitude& b) {
    // conj(xi_a) xi_b is a Gaussian in omega; completing the square gives an
    // exponent whose real part is manifestly <= 0, so the exponential never
    // overflows and the on-diagonal case evaluates without cancellation:
    //   E = -alpha beta (wa - wb)^2 / A - tau^2 / (4 A) + i tau (alpha wa + beta wb) / A
    // with alpha = 1/(4 bwa^2), beta = 1/(4 bwb^2), A = alpha + beta,
    // tau = tb - ta.
    const double alpha = 1.0 / (4.0 * a.bandwidth() * a.bandwidth());
    const double beta = 1.0 / (4.0 * b.bandwidth() * b.bandwidth());
    const double big_a = alpha + beta;
    const double tau = b.emission_time() - a.emission_time();
    const double wa = a.central_frequency();
    const double wb = b.central_frequency();

    const double re_exp = -(alpha * beta * (wa - wb) * (wa - wb)) / big_a -
                          tau * tau / (4.0 * big_a);
    const double im_exp = tau * (alpha * wa + beta * wb) / big_a;

    const double prefactor = std::pow(2.0 * kPi * a.bandwidth() * a.bandwidth(), -0.25) *
                             std::pow(2.0 * kPi * b.bandwidth() * b.bandwidth(), -0.25) *
                             std::sqrt(kPi / big_a);
    const Complex pdot = a.polarization().dot(b.polarization());
    return pdot * prefactor * std::exp(Complex(re_exp, im_exp));
}

Complex overlap_delta_delta(const SpectralAmplitude& a, const SpectralAmplitude& b) {
    // Two spectral lines overlap only when they sit at exactly the same
    // frequency; the relative emission time survives as a pure phase.
    if (a.central_frequency() != b.central_frequency()) {
        return Complex(0.0, 0.0);
    }
    const double tau = b.emission_time() - a.emission_time();
    const Complex pdot = a.polarization().dot(b.polarization());
    return pdot * std::exp(Complex(0.0, a.central_frequency() * tau));
}

struct Kronrod15 {
    // Nodes and weights of the 7-point Gauss / 15-point Kronrod pair on
    // [-1, 1]; only the non-negative nodes are stored. Odd-indexed Kronrod
    // nodes coincide with the Gauss nodes.
    static constexpr double nodes[8] = {
        0.9914553711208126392069,  //
        0.9491079123427585245262,  //
        0.8648644233597690727897,  //
        0.7415311855993944398639,  //
        0.5860872354676911302941,  //
        0.4058451513773971669066,  //
        0.2077849550078984676007,  //
        0.0,
    };
    static constexpr double kronrod_weights[8] = {
        0.0229353220105292249637,  //
        0.0630920926299785532907,  //
        0.1047900103222501838399,  //
        0.1406532597155259187452,  //
        0.1690047266392679028266,  //
        0.1903505780647854099133,  //
        0.2044329400752988924142,  //
        0.2094821410847278280130,
    };
    static constexpr double gauss_weights[4] = {
        0.1294849661688696932706,  //
        0.2797053914892766679015,  //
        0.3818300505051189449504,  //
        0.4179591836734693877551,
    };
};

struct PanelEstimate {
    Complex integral;
    double error;
};

template <typename F>
PanelEstimate gauss_kronrod_panel(const F& f, double lo, double hi) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    Complex kronrod(0.0, 0.0);
    Complex gauss(0.0, 0.0);
    for (int i = 0; i < 8; ++i) {
        const double offset = half * Kronrod15::nodes[i];
        Complex sample;
        if (i == 7) {
            sample = f(center);
        } else {
            sample = f(center - offset) + f(center + offset);
        }
        kronrod += Kronrod15::kronrod_weights[i] * sample;
        if (i % 2 == 1) {
            gauss += Kronrod15::gauss_weights[i / 2] * sample;
        } else if (i == 7) {
            gauss += Kronrod15::gauss_weights[3] * sample;
        }
    }
    kronrod *= half;
    gauss *= half;
    return {kronrod, std::abs(kronrod - gauss)};
}

template <typename F>
Complex integrate_adaptive(const F& f, double lo, double hi, double tol, int depth) {
    const PanelEstimate panel = gauss_kronrod_panel(f, lo, hi);
    if (panel.error <= tol) {
        return panel.integral;
    }
    if (depth >= kQuadratureMaxDepth) {
        std::ostringstream msg;
        msg << "overlap quadrature failed to converge on [" << lo << ", " << hi
            << "], panel error " << panel.error;
        throw NumericalError(msg.str());
    }
    const double mid = 0.5 * (lo + hi);
    return integrate_adaptive(f, lo, mid, 0.5 * tol, depth + 1) +
           integrate_adaptive(f, mid, hi, 0.5 * tol, depth + 1);
}

}  // namespace

Complex overlap(const SpectralAmplitude& a, const SpectralAmplitude& b) {
    const bool a_gauss = a.kind() == SpectrumKind::GaussianPulse;
    const bool b_gauss = b.kind() == SpectrumKind::GaussianPulse;
    if (a_gauss && b_gauss) {
        return overlap_gaussian_gaussian(a, b);
    }
    if (!a_gauss && !b_gauss) {
        return overlap_delta_delta(a, b);
    }
    // A spectral line against a square-integrable envelope: the normalized
    // line carries vanishing amplitude density at any single frequency, so
    // the limit of the narrow-bandwidth overlap is zero.
    return Complex(0.0, 0.0);
}

Complex overlap_quadrature(const SpectralAmplitude& a, const SpectralAmplitude& b) {
    if (!a.pointwise_evaluable() || !b.pointwise_evaluable()) {
        throw NumericalError("overlap quadrature requires pointwise-evaluable spectra");
    }
    const double lo = std::min(a.central_frequency() - 10.0 * a.bandwidth(),
                               b.central_frequency() - 10.0 * b.bandwidth());
    const double hi = std::max(a.central_frequency() + 10.0 * a.bandwidth(),
                               b.central_frequency() + 10.0 * b.bandwidth());
    const auto integrand = [&](double omega) -> Complex {
        return a.value(omega).dot(b.value(omega));
    };
    return integrate_adaptive(integrand, lo, hi, kQuadratureTol, 0);
}

GramMatrix gram_matrix(const std::vector<SpectralAmplitude>& spectra) {
    const int n = static_cast<int>(spectra.size());
    if (n == 0) {
        throw ValidationError("gram matrix: need at least one spectral amplitude");
    }
    MatrixXcd g(n, n);
    for (int s = 0; s < n; ++s) {
        g(s, s) = overlap(spectra[s], spectra[s]);
        for (int t = s + 1; t < n; ++t) {
            g(s, t) = overlap(spectra[s], spectra[t]);
            g(t, s) = std::conj(g(s, t));
        }
    }
    return GramMatrix(std::move(g));
}

Complex indistinguishability_weight(const GramMatrix& gram, const Permutation& rho) {
    if (static_cast<int>(rho.size()) != gram.dim() || !is_permutation(rho)) {
        throw ValidationError(
            "indistinguishability weight: rho must be a permutation matching the "
            "gram dimension");
    }
    Complex f(1.0, 0.0);
    for (int s = 0; s < gram.dim(); ++s) {
        f *= gram(s, rho[static_cast<std::size_t>(s)]);
    }
    return f;
}

}  // namespace multiboson
