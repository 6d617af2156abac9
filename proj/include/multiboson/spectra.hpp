#pragma once

#include <vector>

#include "multiboson/common.hpp"

namespace multiboson {

enum class SpectrumKind { GaussianPulse, Delta };

/// Single-photon spectral amplitude: an analytic frequency envelope with a
/// unit Jones vector folded in, so the amplitude is 2-vector valued.
///
/// GaussianPulse carries the normalized envelope
///   (2 pi bw^2)^(-1/4) * exp(-(w - w0)^2 / (4 bw^2) + i w t0)
/// whose modulus squared integrates to 1. Delta is the monochromatic limit
/// of that family (a spectral line at w0 with the same linear phase); it has
/// no square-integrable pointwise form.
class SpectralAmplitude {
  public:
    SpectralAmplitude(SpectrumKind kind, double central_frequency, double bandwidth,
                      double emission_time, const Vector2cd& polarization);

    SpectrumKind kind() const { return kind_; }
    double central_frequency() const { return central_frequency_; }
    double bandwidth() const { return bandwidth_; }
    double emission_time() const { return emission_time_; }
    const Vector2cd& polarization() const { return polarization_; }

    bool pointwise_evaluable() const { return kind_ == SpectrumKind::GaussianPulse; }

    /// Vector amplitude at a frequency; throws NumericalError for Delta.
    Vector2cd value(double omega) const;

  private:
    SpectrumKind kind_;
    double central_frequency_;
    double bandwidth_;
    double emission_time_;
    Vector2cd polarization_;
};

/// N x N Hermitian positive-semidefinite matrix of pairwise overlaps with
/// unit diagonal; all invariants are checked on construction.
class GramMatrix {
  public:
    explicit GramMatrix(MatrixXcd entries);

    int dim() const { return static_cast<int>(entries_.rows()); }
    const MatrixXcd& entries() const { return entries_; }
    Complex operator()(int s, int t) const { return entries_(s, t); }

  private:
    MatrixXcd entries_;
};

/// Pairwise overlap g(a, b) = integral dw conj(xi_a(w)) . xi_b(w), conjugate
/// linear in the first argument so that g(s, s) = 1 and the Gram matrix is
/// Hermitian PSD. Dispatches to closed forms for the shipped kinds; kinds
/// without a closed form fall back to adaptive quadrature.
Complex overlap(const SpectralAmplitude& a, const SpectralAmplitude& b);

/// Same integral evaluated by adaptive Gauss-Kronrod (G7/K15) quadrature over
/// [w0 - 10 bw, w0 + 10 bw] around both envelopes, absolute tolerance 1e-10.
/// Requires both spectra to be pointwise evaluable.
Complex overlap_quadrature(const SpectralAmplitude& a, const SpectralAmplitude& b);

GramMatrix gram_matrix(const std::vector<SpectralAmplitude>& spectra);

/// f_rho = prod_s g(s, rho(s))
Complex indistinguishability_weight(const GramMatrix& gram, const Permutation& rho);

}  // namespace multiboson
