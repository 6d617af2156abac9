#pragma once

#include <string>
#include <vector>

#include "multiboson/spectra.hpp"
#include "multiboson/unitary.hpp"

namespace multiboson {

/// A fully resolved experiment description loaded from a scenario file:
/// interferometer, photon input ports, and the pairwise-overlap Gram matrix
/// (computed from per-photon spectra, or taken verbatim from gram_override).
struct Scenario {
    InterferometerMatrix unitary;
    std::vector<int> input_ports;
    /// Empty when the scenario supplied gram_override instead of spectra.
    std::vector<SpectralAmplitude> spectra;
    GramMatrix gram;
    std::string output_format;  // "csv" or "json"
    std::string output_path;    // empty means stdout
};

/// Parses and validates a scenario document. Schema violations (wrong types,
/// unknown keys, missing fields) raise ParseError; physically invalid content
/// (non-unitary matrix, bad Gram, duplicate ports, spectra and gram_override
/// together) raises ValidationError.
///
/// Document shape:
///
///   {
///     "unitary": {"haar": {"m": 4, "seed": 17}}
///               | {"beamsplitter": {}}
///               | {"explicit": [[[re, im], ...], ...]},
///     "inputs": [{"port": 0,
///                 "kind": "gaussian" | "delta",
///                 "omega0": 12.0,
///                 "delta_omega": 0.5,        // gaussian only
///                 "t0": 0.0,                 // optional, default 0
///                 "polarization": [1, 0, 0, 0]}, ...],  // optional, default H
///     "gram_override": [[[re, im], ...], ...],  // replaces spectral fields
///     "output": {"format": "csv" | "json", "path": "out.csv"}  // optional
///   }
Scenario scenario_from_json(const std::string& text);

/// Reads the file and delegates to scenario_from_json. Unreadable file ->
/// ParseError.
Scenario scenario_from_file(const std::string& path);

}  // namespace multiboson
