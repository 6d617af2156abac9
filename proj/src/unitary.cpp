#include "multiboson/unitary.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "multiboson/rng.hpp"

namespace multiboson {

double InterferometerMatrix::unitarity_defect() const {
    const MatrixXcd residual = u_ * u_.adjoint() - MatrixXcd::Identity(u_.rows(), u_.cols());
    return residual.cwiseAbs().maxCoeff();
}

InterferometerMatrix InterferometerMatrix::from_entries(MatrixXcd u, double tolerance) {
    if (u.rows() < 1 || u.rows() != u.cols())
        throw ValidationError("interferometer matrix must be square with dim >= 1");
    InterferometerMatrix im(std::move(u));
    const double defect = im.unitarity_defect();
    if (!(defect < tolerance)) {
        std::ostringstream msg;
        msg << "interferometer matrix is not unitary: max |UU+ - I| = " << defect
            << " >= " << tolerance;
        throw ValidationError(msg.str());
    }
    return im;
}

InterferometerMatrix haar_random(int m, std::uint64_t seed) {
    if (m < 1) throw ValidationError("haar_random: m must be >= 1");
    SplitMix64 rng(seed);
    MatrixXcd ginibre(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) ginibre(i, j) = Complex(rng.next_gaussian(), rng.next_gaussian());

    Eigen::HouseholderQR<MatrixXcd> qr(ginibre);
    MatrixXcd q = qr.householderQ();
    const VectorXcd r_diag = qr.matrixQR().diagonal();
    for (int j = 0; j < m; ++j) {
        const double mag = std::abs(r_diag(j));
        q.col(j) *= mag > 0.0 ? r_diag(j) / mag : Complex(1.0, 0.0);
    }
    return InterferometerMatrix::from_entries(std::move(q), 1e-10);
}

InterferometerMatrix balanced_beam_splitter() {
    const double s = 1.0 / std::sqrt(2.0);
    MatrixXcd u(2, 2);
    u << Complex(s, 0.0), Complex(0.0, s), Complex(0.0, s), Complex(s, 0.0);
    return InterferometerMatrix::from_entries(std::move(u), 1e-10);
}

PortConfiguration::PortConfiguration(std::vector<int> input_ports, std::vector<int> output_sample)
    : input_ports_(std::move(input_ports)), output_sample_(std::move(output_sample)) {
    std::set<int> seen;
    for (int p : input_ports_) {
        if (p < 0) throw ValidationError("input port index must be non-negative");
        if (!seen.insert(p).second)
            throw ValidationError("input ports must be distinct, port " + std::to_string(p) + " repeats");
    }
    int total = 0;
    for (int occ : output_sample_) {
        if (occ < 0) throw ValidationError("output occupations must be non-negative");
        total += occ;
    }
    if (total != photon_count())
        throw ValidationError("output occupations sum to " + std::to_string(total) + " but " +
                              std::to_string(photon_count()) + " photons were injected");
}

MatrixXcd submatrix(const InterferometerMatrix& u, const PortConfiguration& cfg) {
    const int m = u.dim();
    if (cfg.port_count() != m)
        throw ValidationError("occupation vector has " + std::to_string(cfg.port_count()) +
                              " ports but the interferometer has " + std::to_string(m));
    for (int p : cfg.input_ports())
        if (p >= m) throw ValidationError("input port " + std::to_string(p) + " out of range for M=" + std::to_string(m));

    const int n = cfg.photon_count();
    MatrixXcd sub(n, n);
    int row = 0;
    for (int d = 0; d < m; ++d) {
        for (int rep = 0; rep < cfg.output_sample()[static_cast<std::size_t>(d)]; ++rep) {
            for (int s = 0; s < n; ++s) sub(row, s) = u.matrix()(d, cfg.input_ports()[static_cast<std::size_t>(s)]);
            ++row;
        }
    }
    return sub;
}

InterferenceMatrix interference_matrix(const MatrixXcd& u_sub, const Permutation& rho) {
    const int n = static_cast<int>(u_sub.rows());
    if (u_sub.cols() != n) throw ValidationError("interference_matrix: submatrix must be square");
    if (static_cast<int>(rho.size()) != n || !is_permutation(rho))
        throw ValidationError("interference_matrix: rho is not a permutation of {0.." + std::to_string(n - 1) + "}");

    InterferenceMatrix a(n, n);
    for (int d = 0; d < n; ++d)
        for (int s = 0; s < n; ++s) a(d, s) = std::conj(u_sub(d, s)) * u_sub(d, rho[static_cast<std::size_t>(s)]);
    return a;
}

}  // namespace multiboson
