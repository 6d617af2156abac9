#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "multiboson/common.hpp"
#include "multiboson/probability.hpp"
#include "multiboson/spectra.hpp"
#include "multiboson/unitary.hpp"

namespace multiboson {

struct DistributionEntry {
    std::vector<int> occupation;  // one count per output port
    DetectionProbability probability;
};

struct OutputDistribution {
    int port_count;
    int photon_count;
    /// One entry per outcome, in the enumerate_samples() order.
    std::vector<DistributionEntry> entries;
    /// Compensated sum of the entry values; 1 up to roundoff for a complete
    /// distribution.
    double total;
};

/// All occupation vectors of photon_count photons over port_count ports, in
/// colexicographic order (the last port's count varies slowest):
/// (2,0), (1,1), (0,2) for two photons in two ports.
std::vector<std::vector<int>> enumerate_samples(int port_count, int photon_count);

enum class GramStructure { Identity, AllOnes, Block, General };

struct GramClassification {
    GramStructure structure;
    /// Block only: the photon indices of the single mutually identical group.
    std::vector<int> group;
};

/// Detects Gram matrices that admit a cheaper rate formula. Only entries that
/// are exactly 0 or exactly 1 qualify: all off-diagonal zeros -> Identity, all
/// off-diagonal ones -> AllOnes, one clique of exact ones with exact zeros
/// everywhere else -> Block. Anything else -> General. Exactness keeps the
/// fast paths bit-for-bit faithful to the structure they assume.
GramClassification classify_gram(const GramMatrix& gram);

enum class PathSelection {
    Auto,          // dispatch on classify_gram()
    ForceGeneral,  // always evaluate the full permutation sum
};

/// Probability of every outcome for photons entering at input_ports (distinct)
/// with pairwise overlaps gram, in enumerate_samples() order.
OutputDistribution build_distribution(const InterferometerMatrix& u,
                                      const std::vector<int>& input_ports,
                                      const GramMatrix& gram,
                                      PathSelection selection = PathSelection::Auto);

/// Draws `count` outcome indices by inverse-CDF over the entry values.
/// Negative values (roundoff) are clamped to zero and the rest renormalized;
/// zero-probability outcomes are never drawn. Deterministic in (dist, seed).
std::vector<int> sample(const OutputDistribution& dist, int count, std::uint64_t seed);

/// Independent check built from first principles: expands the N-photon input
/// state over an orthonormal internal basis (from the Gram eigendecomposition),
/// propagates every photon-to-(port, internal-mode) assignment, collects Fock
/// amplitudes, and marginalizes the internal modes. Exponential in everything;
/// guarded at N <= 4, M <= 6.
OutputDistribution fock_oracle(const InterferometerMatrix& u,
                               const std::vector<int>& input_ports,
                               const GramMatrix& gram);

/// CSV with header port_0,...,port_{m-1},probability,raw_rate,
/// imaginary_residual,path; doubles printed with %.17g so parsing recovers
/// the exact bits. Identical inputs yield byte-identical text.
std::string to_csv(const OutputDistribution& dist);

/// JSON document with port_count, photon_count, total and the entry list, in
/// insertion order with round-trippable doubles.
std::string to_json_string(const OutputDistribution& dist);

OutputDistribution distribution_from_csv(const std::string& text);
OutputDistribution distribution_from_json(const std::string& text);

}  // namespace multiboson
