#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "multiboson/distribution.hpp"
#include "multiboson/permanent.hpp"
#include "multiboson/probability.hpp"
#include "multiboson/scenario.hpp"
#include "multiboson/spectra.hpp"
#include "multiboson/unitary.hpp"

namespace {

using namespace multiboson;

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string format_complex(Complex z) {
    std::string out = format_double(z.real());
    out += z.imag() < 0.0 ? " - " : " + ";
    out += format_double(std::abs(z.imag()));
    out += "i";
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text) || !out.flush()) {
        throw ValidationError("cannot write output file '" + path + "'");
    }
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// Complex CSV token: "1.5", "2i", "-0.5+0.25i", "3e-2-4e-5i".
Complex parse_complex_token(const std::string& raw) {
    std::string s;
    for (char c : raw) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            s += c;
        }
    }
    if (s.empty()) {
        throw ParseError("matrix CSV: empty entry");
    }
    const auto to_double = [](const std::string& text) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(text, &used);
        } catch (const std::exception&) {
            throw ParseError("matrix CSV: malformed number '" + text + "'");
        }
        if (used != text.size()) {
            throw ParseError("matrix CSV: malformed number '" + text + "'");
        }
        return v;
    };
    if (s.back() != 'i') {
        return {to_double(s), 0.0};
    }
    s.pop_back();
    if (s.empty() || s == "+") {
        return {0.0, 1.0};
    }
    if (s == "-") {
        return {0.0, -1.0};
    }
    // Split real and imaginary at the last sign that is not an exponent sign.
    for (std::size_t pos = s.size() - 1; pos >= 1; --pos) {
        const char c = s[pos];
        if ((c == '+' || c == '-') && s[pos - 1] != 'e' && s[pos - 1] != 'E') {
            const std::string re = s.substr(0, pos);
            std::string im = s.substr(pos);
            if (im == "+") {
                im = "1";
            } else if (im == "-") {
                im = "-1";
            }
            return {to_double(re), to_double(im)};
        }
    }
    return {0.0, to_double(s)};
}

MatrixXcd matrix_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<Complex>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<Complex> row;
        std::istringstream fields(line);
        std::string field;
        while (std::getline(fields, field, ',')) {
            row.push_back(parse_complex_token(field));
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw ParseError("matrix CSV: ragged rows");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw ParseError("matrix CSV: no data");
    }
    MatrixXcd m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    return m;
}

MatrixXcd matrix_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("matrix JSON: ") + e.what());
    }
    if (!doc.is_array() || doc.empty()) {
        throw ParseError("matrix JSON: expected a non-empty array of rows");
    }
    MatrixXcd m;
    std::size_t cols = 0;
    for (std::size_t r = 0; r < doc.size(); ++r) {
        const auto& row = doc[r];
        if (!row.is_array() || row.empty()) {
            throw ParseError("matrix JSON: expected non-empty row arrays");
        }
        if (r == 0) {
            cols = row.size();
            m.resize(static_cast<Eigen::Index>(doc.size()), static_cast<Eigen::Index>(cols));
        } else if (row.size() != cols) {
            throw ParseError("matrix JSON: ragged rows");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            const auto& z = row[c];
            if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number()) {
                throw ParseError("matrix JSON: entries must be [re, im]");
            }
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                Complex(z[0].get<double>(), z[1].get<double>());
        }
    }
    return m;
}

MatrixXcd load_matrix(const std::string& path) {
    const std::string text = read_text(path);
    const auto dot = path.find_last_of('.');
    const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
    if (ext == ".json") {
        return matrix_from_json(text);
    }
    if (ext == ".csv") {
        return matrix_from_csv(text);
    }
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '[') {
        return matrix_from_json(text);
    }
    return matrix_from_csv(text);
}

std::vector<int> row_occupations(const std::vector<int>& outcome) {
    std::vector<int> occupations;
    for (int occ : outcome) {
        if (occ > 0) {
            occupations.push_back(occ);
        }
    }
    return occupations;
}

int run_distribution(const Scenario& scenario, const std::string& out_override,
                     const std::string& format_override, bool force_general) {
    const OutputDistribution dist = build_distribution(
        scenario.unitary, scenario.input_ports, scenario.gram,
        force_general ? PathSelection::ForceGeneral : PathSelection::Auto);
    const std::string format =
        format_override.empty() ? scenario.output_format : format_override;
    const std::string path = out_override.empty() ? scenario.output_path : out_override;
    write_text(path, format == "json" ? to_json_string(dist) : to_csv(dist));
    std::cerr << "distribution: " << dist.entries.size() << " outcomes, total = "
              << format_double(dist.total) << "\n";
    return 0;
}

int run_sample(const Scenario& scenario, int count, std::uint64_t seed,
               const std::string& out_override) {
    const OutputDistribution dist =
        build_distribution(scenario.unitary, scenario.input_ports, scenario.gram);
    const std::vector<int> draws = sample(dist, count, seed);
    std::ostringstream out;
    for (int idx : draws) {
        const auto& occupation = dist.entries[static_cast<std::size_t>(idx)].occupation;
        for (std::size_t d = 0; d < occupation.size(); ++d) {
            if (d > 0) {
                out << ' ';
            }
            out << occupation[d];
        }
        out << '\n';
    }
    const std::string path = out_override.empty() ? scenario.output_path : out_override;
    write_text(path, out.str());
    std::cerr << "sample: " << count << " draws, seed " << seed << "\n";
    return 0;
}

int run_dip_scan(const Scenario& scenario, double tau_min, double tau_max, int steps,
                 bool tau_range_given, const std::string& out_override) {
    if (scenario.spectra.size() != 2) {
        throw ValidationError(
            "dip-scan: needs exactly two photons with spectral descriptions "
            "(gram_override has no delay to scan)");
    }
    for (const auto& s : scenario.spectra) {
        if (s.kind() != SpectrumKind::GaussianPulse) {
            throw ValidationError("dip-scan: both spectra must be gaussian");
        }
    }
    if (steps < 1) {
        throw ValidationError("dip-scan: steps must be at least 1");
    }
    const SpectralAmplitude& a = scenario.spectra[0];
    const SpectralAmplitude& b = scenario.spectra[1];
    if (!tau_range_given) {
        const double bw = std::min(a.bandwidth(), b.bandwidth());
        tau_min = -5.0 / bw;
        tau_max = 5.0 / bw;
    }
    if (!(tau_min <= tau_max)) {
        throw ValidationError("dip-scan: tau range is empty");
    }

    // Coincidence outcome: one photon detected at each of the two used ports.
    std::vector<int> outcome(static_cast<std::size_t>(scenario.unitary.dim()), 0);
    for (int port : scenario.input_ports) {
        outcome[static_cast<std::size_t>(port)] = 1;
    }
    const PortConfiguration cfg(scenario.input_ports, outcome);
    const MatrixXcd u_sub = submatrix(scenario.unitary, cfg);
    const std::vector<int> occupations = row_occupations(outcome);

    std::ostringstream out;
    out << "tau,g2,p\n";
    for (int i = 0; i < steps; ++i) {
        const double tau =
            steps == 1 ? tau_min
                       : tau_min + (tau_max - tau_min) * static_cast<double>(i) /
                                       static_cast<double>(steps - 1);
        // The scan delays photon 1 by tau relative to photon 0's emission.
        const SpectralAmplitude delayed(b.kind(), b.central_frequency(), b.bandwidth(),
                                        a.emission_time() + tau, b.polarization());
        const GramMatrix gram = gram_matrix({a, delayed});
        const DetectionProbability p = probability_general(u_sub, gram, occupations);
        out << format_double(tau) << "," << format_double(std::norm(gram(0, 1))) << ","
            << format_double(p.value) << "\n";
    }
    const std::string path = out_override.empty() ? scenario.output_path : out_override;
    write_text(path, out.str());
    std::cerr << "dip-scan: " << steps << " points over [" << format_double(tau_min)
              << ", " << format_double(tau_max) << "]\n";
    return 0;
}

int run_permanent(const std::string& matrix_path, const std::string& algorithm,
                  int threads) {
    if (threads > 0) {
        setenv("MULTIBOSON_THREADS", std::to_string(threads).c_str(), 1);
    }
    const MatrixXcd m = load_matrix(matrix_path);
    const auto start = std::chrono::steady_clock::now();
    const PermanentResult result =
        algorithm == "naive" ? permanent_naive(m) : permanent_ryser(m);
    const auto stop = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(stop - start).count();
    std::cout << "perm = " << format_complex(result.value) << "\n";
    std::cerr << "n = " << result.n << ", algorithm = "
              << (result.algorithm == PermanentAlgorithm::Naive ? "naive" : "ryser-gray")
              << ", time = " << ms << " ms\n";
    if (result.ill_conditioned) {
        std::cerr << "warning: heavy cancellation detected; the result may carry few "
                     "significant digits\n";
    }
    return 0;
}

int run_validate(const Scenario& scenario) {
    struct Check {
        std::string name;
        std::string status;
        std::string detail;
    };
    std::vector<Check> checks;
    const int n = static_cast<int>(scenario.input_ports.size());
    const int m = scenario.unitary.dim();

    {
        const double defect = scenario.unitary.unitarity_defect();
        checks.push_back({"unitarity", defect < 1e-8 ? "pass" : "fail",
                          "max |UU+ - I| = " + format_double(defect)});
    }
    {
        const MatrixXcd& g = scenario.gram.entries();
        const double herm = (g - g.adjoint()).cwiseAbs().maxCoeff();
        const double diag =
            (g.diagonal().array() - Complex(1.0, 0.0)).abs().maxCoeff();
        Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(g, Eigen::EigenvaluesOnly);
        const double min_eig = solver.eigenvalues().minCoeff();
        const double max_mag = g.cwiseAbs().maxCoeff();
        const bool ok = herm <= 1e-10 && diag <= 1e-10 && min_eig >= -1e-9 &&
                        max_mag <= 1.0 + 1e-10;
        std::ostringstream detail;
        detail << "hermitian " << format_double(herm) << ", diag " << format_double(diag)
               << ", min eig " << format_double(min_eig) << ", max |g| "
               << format_double(max_mag);
        checks.push_back({"gram-invariants", ok ? "pass" : "fail", detail.str()});
    }

    const GramClassification cls = classify_gram(scenario.gram);
    {
        const char* label = "general";
        switch (cls.structure) {
            case GramStructure::Identity:
                label = "identity";
                break;
            case GramStructure::AllOnes:
                label = "all-ones";
                break;
            case GramStructure::Block:
                label = "block";
                break;
            case GramStructure::General:
                label = "general";
                break;
        }
        if (cls.structure == GramStructure::General) {
            checks.push_back({"fast-path", "skip", "gram has no fast-path structure"});
        } else if (n > 6) {
            checks.push_back(
                {"fast-path", "skip", "general-path cross-check too large for N > 6"});
        } else {
            const OutputDistribution fast = build_distribution(
                scenario.unitary, scenario.input_ports, scenario.gram, PathSelection::Auto);
            const OutputDistribution general =
                build_distribution(scenario.unitary, scenario.input_ports, scenario.gram,
                                   PathSelection::ForceGeneral);
            double max_diff = 0.0;
            for (std::size_t i = 0; i < fast.entries.size(); ++i) {
                max_diff = std::max(max_diff,
                                    std::abs(fast.entries[i].probability.value -
                                             general.entries[i].probability.value));
            }
            std::ostringstream detail;
            detail << "max |" << label << " - general| = " << format_double(max_diff);
            checks.push_back({"fast-path", max_diff < 1e-10 ? "pass" : "fail", detail.str()});
        }
    }
    {
        if (n <= 4 && m <= 6) {
            const OutputDistribution engine =
                build_distribution(scenario.unitary, scenario.input_ports, scenario.gram);
            const OutputDistribution oracle =
                fock_oracle(scenario.unitary, scenario.input_ports, scenario.gram);
            double max_diff = 0.0;
            for (std::size_t i = 0; i < engine.entries.size(); ++i) {
                max_diff = std::max(max_diff,
                                    std::abs(engine.entries[i].probability.value -
                                             oracle.entries[i].probability.value));
            }
            checks.push_back({"fock-oracle", max_diff < 1e-9 ? "pass" : "fail",
                              "max |engine - oracle| = " + format_double(max_diff)});
        } else {
            checks.push_back({"fock-oracle", "skip",
                              "oracle guarded at N <= 4, M <= 6"});
        }
    }
    {
        const OutputDistribution dist =
            build_distribution(scenario.unitary, scenario.input_ports, scenario.gram);
        const double err = std::abs(dist.total - 1.0);
        checks.push_back({"normalization", err < 1e-8 ? "pass" : "fail",
                          "|total - 1| = " + format_double(err)});
    }

    bool all_ok = true;
    for (const auto& check : checks) {
        std::printf("%-16s %-5s %s\n", check.name.c_str(), check.status.c_str(),
                    check.detail.c_str());
        if (check.status == "fail") {
            all_ok = false;
        }
    }
    return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "multiboson: output statistics of partially distinguishable photons in a "
        "linear interferometer"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_path;
    std::string format;
    bool force_general = false;
    int count = 1;
    std::uint64_t seed = 0;
    double tau_min = 0.0;
    double tau_max = 0.0;
    int steps = 101;
    std::string matrix_path;
    std::string algorithm = "ryser";
    int threads = 0;

    auto* dist_cmd =
        app.add_subcommand("distribution", "Compute the full output distribution");
    dist_cmd->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    dist_cmd->add_option("--out", out_path, "Output path (overrides the scenario output setting; default stdout)");
    dist_cmd->add_option("--format", format, "Output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    dist_cmd->add_flag("--force-general", force_general,
                       "Evaluate the full permutation sum even when a fast path applies");

    auto* sample_cmd = app.add_subcommand("sample", "Draw outcomes from the distribution");
    sample_cmd->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    sample_cmd->add_option("--count", count, "Number of draws")->required();
    sample_cmd->add_option("--seed", seed, "RNG seed (default 0)");
    sample_cmd->add_option("--out", out_path, "Output path (overrides the scenario output setting; default stdout)");

    auto* dip_cmd = app.add_subcommand(
        "dip-scan", "Two-photon coincidence probability against relative delay");
    dip_cmd->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
    auto* tau_min_opt = dip_cmd->add_option(
        "--tau-min", tau_min, "Smallest delay (default -5 / min bandwidth)");
    auto* tau_max_opt =
        dip_cmd->add_option("--tau-max", tau_max, "Largest delay (default +5 / min bandwidth)");
    dip_cmd->add_option("--steps", steps, "Number of scan points (default 101)");
    dip_cmd->add_option("--out", out_path, "Output path (overrides the scenario output setting; default stdout)");

    auto* perm_cmd = app.add_subcommand("permanent", "Evaluate one matrix permanent");
    perm_cmd->add_option("--matrix", matrix_path,
                         "Matrix file: JSON rows of [re, im], or CSV of re+imi tokens")
        ->required();
    perm_cmd->add_option("--algorithm", algorithm, "Kernel: naive or ryser (default)")
        ->check(CLI::IsMember({"naive", "ryser"}));
    perm_cmd->add_option("--threads", threads, "Worker threads for the ryser kernel");

    auto* validate_cmd =
        app.add_subcommand("validate", "Cross-check a scenario's numerical invariants");
    validate_cmd->add_option("--scenario", scenario_path, "Scenario JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (dist_cmd->parsed()) {
            return run_distribution(scenario_from_file(scenario_path), out_path, format,
                                    force_general);
        }
        if (sample_cmd->parsed()) {
            return run_sample(scenario_from_file(scenario_path), count, seed, out_path);
        }
        if (dip_cmd->parsed()) {
            const bool have_min = tau_min_opt->count() > 0;
            const bool have_max = tau_max_opt->count() > 0;
            if (have_min != have_max) {
                throw ValidationError("dip-scan: give both --tau-min and --tau-max");
            }
            const bool range_given = have_min && have_max;
            return run_dip_scan(scenario_from_file(scenario_path), tau_min, tau_max, steps,
                                range_given, out_path);
        }
        if (perm_cmd->parsed()) {
            return run_permanent(matrix_path, algorithm, threads);
        }
        if (validate_cmd->parsed()) {
            return run_validate(scenario_from_file(scenario_path));
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const FeasibilityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
