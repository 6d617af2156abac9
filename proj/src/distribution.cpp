#include "multiboson/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "multiboson/rng.hpp"

#include "json.hpp"

namespace multiboson {

namespace {

constexpr double kMaxOutcomes = 2.0e6;
constexpr int kOraclePhotonGuard = 4;
constexpr int kOraclePortGuard = 6;
constexpr double kOracleRankFloor = 1e-12;

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

bool exactly(Complex z, double re) { return z.real() == re && z.imag() == 0.0; }

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

ComputationPath path_from_string(const std::string& name) {
    if (name == "general") return ComputationPath::General;
    if (name == "distinguishable") return ComputationPath::Distinguishable;
    if (name == "identical") return ComputationPath::Identical;
    if (name == "mixed-groups") return ComputationPath::MixedGroups;
    if (name == "fock-oracle") return ComputationPath::FockOracle;
    throw ParseError("unknown computation path name: " + name);
}

}  // namespace

std::vector<std::vector<int>> enumerate_samples(int port_count, int photon_count) {
    if (port_count < 1) {
        throw ValidationError("enumerate_samples: need at least one port");
    }
    if (photon_count < 0) {
        throw ValidationError("enumerate_samples: photon count must be non-negative");
    }
    const double count = binomial(port_count + photon_count - 1, photon_count);
    if (count > kMaxOutcomes) {
        std::ostringstream msg;
        msg << "enumerate_samples: " << count << " outcomes exceeds the " << kMaxOutcomes
            << " guard";
        throw FeasibilityError(msg.str());
    }
    std::vector<std::vector<int>> out;
    out.reserve(static_cast<std::size_t>(count));
    // Recursive colex generation: the last port's count varies slowest.
    const auto gen = [&](auto&& self, int ports, int photons,
                         std::vector<int>& suffix) -> void {
        if (ports == 1) {
            std::vector<int> sample;
            sample.reserve(suffix.size() + 1);
            sample.push_back(photons);
            sample.insert(sample.end(), suffix.rbegin(), suffix.rend());
            out.push_back(std::move(sample));
            return;
        }
        for (int last = 0; last <= photons; ++last) {
            suffix.push_back(last);
            self(self, ports - 1, photons - last, suffix);
            suffix.pop_back();
        }
    };
    std::vector<int> suffix;
    gen(gen, port_count, photon_count, suffix);
    return out;
}

GramClassification classify_gram(const GramMatrix& gram) {
    const int n = gram.dim();
    std::vector<int> group;
    for (int s = 0; s < n; ++s) {
        for (int t = 0; t < n; ++t) {
            if (s != t && exactly(gram(s, t), 1.0)) {
                group.push_back(s);
                break;
            }
        }
    }
    // Everything outside `group` must be exactly uncoupled, and the group
    // itself must be a full clique of exact ones; otherwise the structure is
    // not one a fast path may assume.
    for (int s = 0; s < n; ++s) {
        const bool s_in = std::binary_search(group.begin(), group.end(), s);
        for (int t = s + 1; t < n; ++t) {
            const bool t_in = std::binary_search(group.begin(), group.end(), t);
            const Complex g = gram(s, t);
            if (s_in && t_in) {
                if (!exactly(g, 1.0)) {
                    return {GramStructure::General, {}};
                }
            } else if (!exactly(g, 0.0)) {
                return {GramStructure::General, {}};
            }
        }
    }
    if (group.empty()) {
        return {GramStructure::Identity, {}};
    }
    if (static_cast<int>(group.size()) == n) {
        return {GramStructure::AllOnes, {}};
    }
    return {GramStructure::Block, group};
}

OutputDistribution build_distribution(const InterferometerMatrix& u,
                                      const std::vector<int>& input_ports,
                                      const GramMatrix& gram, PathSelection selection) {
    const int n = static_cast<int>(input_ports.size());
    if (gram.dim() != n) {
        std::ostringstream msg;
        msg << "build_distribution: gram dimension " << gram.dim()
            << " does not match the " << n << " input ports";
        throw ValidationError(msg.str());
    }
    const int m = u.dim();

    GramClassification cls{GramStructure::General, {}};
    if (selection == PathSelection::Auto) {
        cls = classify_gram(gram);
    }

    OutputDistribution dist;
    dist.port_count = m;
    dist.photon_count = n;
    KahanSum total;
    for (auto& outcome : enumerate_samples(m, n)) {
        const PortConfiguration cfg(input_ports, outcome);
        const MatrixXcd u_sub = submatrix(u, cfg);
        std::vector<int> occupations;
        for (int occ : outcome) {
            if (occ > 0) {
                occupations.push_back(occ);
            }
        }
        DetectionProbability p{};
        switch (cls.structure) {
            case GramStructure::Identity:
                p = probability_distinguishable(u_sub, occupations);
                break;
            case GramStructure::AllOnes:
                p = probability_identical(u_sub, occupations);
                break;
            case GramStructure::Block:
                p = probability_mixed_groups(u_sub, occupations, cls.group);
                break;
            case GramStructure::General:
                p = probability_general(u_sub, gram, occupations);
                break;
        }
        total.add(p.value);
        dist.entries.push_back({std::move(outcome), p});
    }
    dist.total = total.sum;
    return dist;
}

std::vector<int> sample(const OutputDistribution& dist, int count, std::uint64_t seed) {
    if (count < 0) {
        throw ValidationError("sample: draw count must be non-negative");
    }
    std::vector<double> cdf;
    cdf.reserve(dist.entries.size());
    KahanSum mass;
    std::ptrdiff_t last_positive = -1;
    for (const auto& entry : dist.entries) {
        const double w = std::max(entry.probability.value, 0.0);
        if (w > 0.0) {
            last_positive = static_cast<std::ptrdiff_t>(cdf.size());
        }
        mass.add(w);
        cdf.push_back(mass.sum);
    }
    const double total = mass.sum;
    if (!(total > 0.0)) {
        throw NumericalError("sample: distribution has no positive mass");
    }
    SplitMix64 rng(seed);
    std::vector<int> draws;
    draws.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const double u = rng.next_uniform() * total;
        // First index with cdf > u: zero-width (suppressed) intervals can
        // never satisfy the strict inequality first. If rounding pushed u to
        // the very top of the range, fall back to the last positive entry.
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const auto idx = it == cdf.end() ? last_positive : it - cdf.begin();
        draws.push_back(static_cast<int>(idx));
    }
    return draws;
}

OutputDistribution fock_oracle(const InterferometerMatrix& u,
                               const std::vector<int>& input_ports,
                               const GramMatrix& gram) {
    const int n = static_cast<int>(input_ports.size());
    const int m = u.dim();
    if (gram.dim() != n) {
        std::ostringstream msg;
        msg << "fock_oracle: gram dimension " << gram.dim() << " does not match the "
            << n << " input ports";
        throw ValidationError(msg.str());
    }
    if (n > kOraclePhotonGuard || m > kOraclePortGuard) {
        std::ostringstream msg;
        msg << "fock_oracle refused for N = " << n << ", M = " << m << " (guards N <= "
            << kOraclePhotonGuard << ", M <= " << kOraclePortGuard
            << "): the assignment tree has (M * rank)^N leaves";
        throw FeasibilityError(msg.str());
    }
    for (std::size_t i = 0; i < input_ports.size(); ++i) {
        if (input_ports[i] < 0 || input_ports[i] >= m) {
            throw ValidationError("fock_oracle: input port index out of range");
        }
        for (std::size_t j = i + 1; j < input_ports.size(); ++j) {
            if (input_ports[i] == input_ports[j]) {
                throw ValidationError("fock_oracle: input ports must be distinct");
            }
        }
    }

    // Internal single-photon states c_s with <c_s|c_t> = G_st, from
    // G = V diag(lambda) V^H: column k of V sqrt(lambda) gives component k,
    // conjugated so the inner product convention (first argument conjugated)
    // reproduces G exactly.
    Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(gram.entries());
    if (solver.info() != Eigen::Success) {
        throw NumericalError("fock_oracle: gram eigendecomposition failed");
    }
    std::vector<int> kept;
    for (int k = 0; k < n; ++k) {
        if (solver.eigenvalues()(k) > kOracleRankFloor) {
            kept.push_back(k);
        }
    }
    const int rank = static_cast<int>(kept.size());
    MatrixXcd c(n, rank);
    for (int k = 0; k < rank; ++k) {
        const double lambda = solver.eigenvalues()(kept[static_cast<std::size_t>(k)]);
        c.col(k) = (std::sqrt(lambda) *
                    solver.eigenvectors().col(kept[static_cast<std::size_t>(k)]))
                       .conjugate();
    }

    // Walk every photon -> (output port, internal mode) assignment and
    // accumulate the amplitude of each (port, mode) occupation pattern.
    std::map<std::vector<int>, Complex> patterns;
    std::vector<int> pattern(static_cast<std::size_t>(m * rank), 0);
    const MatrixXcd& full = u.matrix();
    const auto walk = [&](auto&& self, int s, Complex amplitude) -> void {
        if (s == n) {
            patterns[pattern] += amplitude;
            return;
        }
        for (int d = 0; d < m; ++d) {
            const Complex hop = full(d, input_ports[static_cast<std::size_t>(s)]);
            if (hop.real() == 0.0 && hop.imag() == 0.0) {
                continue;
            }
            for (int k = 0; k < rank; ++k) {
                const Complex weight = c(s, k);
                if (weight.real() == 0.0 && weight.imag() == 0.0) {
                    continue;
                }
                auto& slot = pattern[static_cast<std::size_t>(d * rank + k)];
                ++slot;
                self(self, s + 1, amplitude * hop * weight);
                --slot;
            }
        }
    };
    walk(walk, 0, Complex(1.0, 0.0));

    // P(pattern) = prod n_{d,k}! |amplitude|^2; marginalize internal modes.
    std::map<std::vector<int>, double> by_ports;
    for (const auto& [key, amplitude] : patterns) {
        double weight = 1.0;
        std::vector<int> ports_only(static_cast<std::size_t>(m), 0);
        for (int d = 0; d < m; ++d) {
            for (int k = 0; k < rank; ++k) {
                const int occ = key[static_cast<std::size_t>(d * rank + k)];
                weight *= factorial(occ);
                ports_only[static_cast<std::size_t>(d)] += occ;
            }
        }
        by_ports[ports_only] += weight * std::norm(amplitude);
    }

    OutputDistribution dist;
    dist.port_count = m;
    dist.photon_count = n;
    KahanSum total;
    for (auto& outcome : enumerate_samples(m, n)) {
        double value = 0.0;
        if (const auto it = by_ports.find(outcome); it != by_ports.end()) {
            value = it->second;
        }
        double norm = 1.0;
        for (int occ : outcome) {
            norm *= factorial(occ);
        }
        total.add(value);
        dist.entries.push_back(
            {std::move(outcome), {value, value * norm, 0.0, ComputationPath::FockOracle}});
    }
    dist.total = total.sum;
    return dist;
}

std::string to_csv(const OutputDistribution& dist) {
    std::ostringstream out;
    for (int d = 0; d < dist.port_count; ++d) {
        out << "port_" << d << ",";
    }
    out << "probability,raw_rate,imaginary_residual,path\n";
    for (const auto& entry : dist.entries) {
        for (int occ : entry.occupation) {
            out << occ << ",";
        }
        out << format_double(entry.probability.value) << ","
            << format_double(entry.probability.raw_rate) << ","
            << format_double(entry.probability.imaginary_residual) << ","
            << to_string(entry.probability.path) << "\n";
    }
    return out.str();
}

std::string to_json_string(const OutputDistribution& dist) {
    nlohmann::ordered_json doc;
    doc["port_count"] = dist.port_count;
    doc["photon_count"] = dist.photon_count;
    doc["total"] = dist.total;
    doc["entries"] = nlohmann::ordered_json::array();
    for (const auto& entry : dist.entries) {
        nlohmann::ordered_json row;
        row["occupation"] = entry.occupation;
        row["probability"] = entry.probability.value;
        row["raw_rate"] = entry.probability.raw_rate;
        row["imaginary_residual"] = entry.probability.imaginary_residual;
        row["path"] = to_string(entry.probability.path);
        doc["entries"].push_back(std::move(row));
    }
    return doc.dump(2) + "\n";
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

double parse_double(const std::string& text) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ParseError("expected a number, got '" + text + "'");
    }
    if (used != text.size()) {
        throw ParseError("trailing characters after number: '" + text + "'");
    }
    return value;
}

int parse_int(const std::string& text) {
    std::size_t used = 0;
    int value = 0;
    try {
        value = std::stoi(text, &used);
    } catch (const std::exception&) {
        throw ParseError("expected an integer, got '" + text + "'");
    }
    if (used != text.size()) {
        throw ParseError("trailing characters after integer: '" + text + "'");
    }
    return value;
}

}  // namespace

OutputDistribution distribution_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("distribution CSV: empty input");
    }
    const auto header = split_csv_line(line);
    if (header.size() < 5) {
        throw ParseError("distribution CSV: header has too few columns");
    }
    const int m = static_cast<int>(header.size()) - 4;
    for (int d = 0; d < m; ++d) {
        const std::string expected = "port_" + std::to_string(d);
        if (header[static_cast<std::size_t>(d)] != expected) {
            throw ParseError("distribution CSV: expected header column '" + expected +
                             "', got '" + header[static_cast<std::size_t>(d)] + "'");
        }
    }
    const char* tail[] = {"probability", "raw_rate", "imaginary_residual", "path"};
    for (int i = 0; i < 4; ++i) {
        if (header[static_cast<std::size_t>(m + i)] != tail[i]) {
            throw ParseError(std::string("distribution CSV: expected header column '") +
                             tail[i] + "', got '" + header[static_cast<std::size_t>(m + i)] +
                             "'");
        }
    }

    OutputDistribution dist;
    dist.port_count = m;
    dist.photon_count = -1;
    KahanSum total;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            throw ParseError("distribution CSV: row has " + std::to_string(fields.size()) +
                             " fields, expected " + std::to_string(header.size()));
        }
        DistributionEntry entry;
        int photons = 0;
        for (int d = 0; d < m; ++d) {
            const int occ = parse_int(fields[static_cast<std::size_t>(d)]);
            if (occ < 0) {
                throw ParseError("distribution CSV: negative occupation");
            }
            photons += occ;
            entry.occupation.push_back(occ);
        }
        entry.probability.value = parse_double(fields[static_cast<std::size_t>(m)]);
        entry.probability.raw_rate = parse_double(fields[static_cast<std::size_t>(m + 1)]);
        entry.probability.imaginary_residual =
            parse_double(fields[static_cast<std::size_t>(m + 2)]);
        entry.probability.path = path_from_string(fields[static_cast<std::size_t>(m + 3)]);
        if (dist.photon_count < 0) {
            dist.photon_count = photons;
        } else if (photons != dist.photon_count) {
            throw ParseError("distribution CSV: inconsistent photon count across rows");
        }
        total.add(entry.probability.value);
        dist.entries.push_back(std::move(entry));
    }
    if (dist.entries.empty()) {
        throw ParseError("distribution CSV: no data rows");
    }
    dist.total = total.sum;
    return dist;
}

OutputDistribution distribution_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("distribution JSON: ") + e.what());
    }
    try {
        OutputDistribution dist;
        dist.port_count = doc.at("port_count").get<int>();
        dist.photon_count = doc.at("photon_count").get<int>();
        dist.total = doc.at("total").get<double>();
        for (const auto& row : doc.at("entries")) {
            DistributionEntry entry;
            entry.occupation = row.at("occupation").get<std::vector<int>>();
            if (static_cast<int>(entry.occupation.size()) != dist.port_count) {
                throw ParseError("distribution JSON: occupation length mismatch");
            }
            entry.probability.value = row.at("probability").get<double>();
            entry.probability.raw_rate = row.at("raw_rate").get<double>();
            entry.probability.imaginary_residual =
                row.at("imaginary_residual").get<double>();
            entry.probability.path = path_from_string(row.at("path").get<std::string>());
            dist.entries.push_back(std::move(entry));
        }
        return dist;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("distribution JSON: ") + e.what());
    }
}

}  // namespace multiboson
