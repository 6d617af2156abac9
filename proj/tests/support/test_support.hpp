#pragma once

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "multiboson/rng.hpp"
#include "multiboson/spectra.hpp"

namespace multiboson_test {

inline std::string& cli_path_storage() {
    static std::string path;
    return path;
}

inline void set_cli_path(std::string path) { cli_path_storage() = std::move(path); }

inline const std::string& cli_path() {
    if (cli_path_storage().empty()) {
        throw std::runtime_error("pass --cli=PATH to the test binary");
    }
    return cli_path_storage();
}

struct CliResult {
    int exit_code;
    std::string output;
};

/// Runs the CLI under test with the given argument string, capturing stdout
/// (stderr is discarded unless merge_stderr).
inline CliResult run_cli(const std::string& args, bool merge_stderr = false) {
    const std::string cmd =
        cli_path() + " " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) {
        throw std::runtime_error("popen failed for: " + cmd);
    }
    std::string output;
    char buffer[4096];
    std::size_t got = 0;
    while ((got = fread(buffer, 1, sizeof(buffer), pipe)) > 0) {
        output.append(buffer, got);
    }
    const int status = pclose(pipe);
    const int exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return {exit_code, std::move(output)};
}

/// Writes content to a fresh file in the temp directory and returns its path.
inline std::string temp_file(const std::string& stem, const std::string& content) {
    static int counter = 0;
    const auto path = std::filesystem::temp_directory_path() /
                      (stem + "." + std::to_string(getpid()) + "." +
                       std::to_string(counter++));
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out.flush()) {
        throw std::runtime_error("cannot write " + path.string());
    }
    return path.string();
}

/// Random Gram matrix with the full set of invariants: B B+ rescaled to a
/// unit diagonal is Hermitian PSD with |g| <= 1 by Cauchy-Schwarz.
inline multiboson::GramMatrix random_psd_gram(int n, std::uint64_t seed) {
    multiboson::SplitMix64 rng(seed);
    multiboson::MatrixXcd b(n, n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            b(r, c) = multiboson::Complex(rng.next_gaussian(), rng.next_gaussian());
        }
    }
    multiboson::MatrixXcd g = b * b.adjoint();
    multiboson::VectorXd scale = g.diagonal().real().cwiseSqrt();
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            g(r, c) /= scale(r) * scale(c);
        }
    }
    // Pin the diagonal to exactly 1; the off-diagonal entries keep the
    // rescaled values.
    for (int r = 0; r < n; ++r) {
        g(r, r) = multiboson::Complex(1.0, 0.0);
    }
    return multiboson::GramMatrix(std::move(g));
}

/// Dense Simpson-rule overlap integral, independent of both the closed form
/// and the adaptive quadrature in the library. Gaussian spectra only.
inline multiboson::Complex simpson_overlap(const multiboson::SpectralAmplitude& a,
                                           const multiboson::SpectralAmplitude& b) {
    const double lo = std::min(a.central_frequency() - 12.0 * a.bandwidth(),
                               b.central_frequency() - 12.0 * b.bandwidth());
    const double hi = std::max(a.central_frequency() + 12.0 * a.bandwidth(),
                               b.central_frequency() + 12.0 * b.bandwidth());
    const int intervals = 40000;  // even
    const double h = (hi - lo) / intervals;
    const auto f = [&](double w) { return a.value(w).dot(b.value(w)); };
    multiboson::Complex sum = f(lo) + f(hi);
    for (int i = 1; i < intervals; ++i) {
        sum += f(lo + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return sum * (h / 3.0);
}

}  // namespace multiboson_test
