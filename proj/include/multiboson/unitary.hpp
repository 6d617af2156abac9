#pragma once

#include <cstdint>

#include "multiboson/common.hpp"

namespace multiboson {

/// M x M interferometer transfer matrix, checked for unitarity on entry.
class InterferometerMatrix {
  public:
    /// Wraps an explicit matrix; rejects it when max |(U U+ - I)_ij| >= tolerance.
    /// The looser default admits hand-entered matrices; internal generators
    /// construct at 1e-10.
    static InterferometerMatrix from_entries(MatrixXcd u, double tolerance = 1e-8);

    int dim() const { return static_cast<int>(u_.rows()); }
    const MatrixXcd& matrix() const { return u_; }

    /// max |(U U+ - I)_ij|
    double unitarity_defect() const;

  private:
    explicit InterferometerMatrix(MatrixXcd u) : u_(std::move(u)) {}
    MatrixXcd u_;
};

/// Haar-measure random unitary: QR decomposition of a complex Ginibre matrix
/// with the R diagonal's phases absorbed into Q. Deterministic for a given
/// (m, seed); the Ginibre entries come from the fixed SplitMix64 stream in
/// row-major order, two normals per entry.
InterferometerMatrix haar_random(int m, std::uint64_t seed);

/// (1/sqrt(2)) * [[1, i], [i, 1]]
InterferometerMatrix balanced_beam_splitter();

/// Input port list S plus an output occupation vector over all M ports.
class PortConfiguration {
  public:
    PortConfiguration(std::vector<int> input_ports, std::vector<int> output_sample);

    const std::vector<int>& input_ports() const { return input_ports_; }
    const std::vector<int>& output_sample() const { return output_sample_; }
    int photon_count() const { return static_cast<int>(input_ports_.size()); }
    int port_count() const { return static_cast<int>(output_sample_.size()); }

  private:
    std::vector<int> input_ports_;
    std::vector<int> output_sample_;
};

/// N x N scattering submatrix: columns are the input ports in listed order,
/// rows are the occupied output ports in ascending index order, each repeated
/// as many times as the port is occupied.
MatrixXcd submatrix(const InterferometerMatrix& u, const PortConfiguration& cfg);

using InterferenceMatrix = MatrixXcd;

/// entries[d][s] = conj(u_sub[d][s]) * u_sub[d][rho(s)]
InterferenceMatrix interference_matrix(const MatrixXcd& u_sub, const Permutation& rho);

}  // namespace multiboson
