#include "multiboson/scenario.hpp"

#include <fstream>
#include <optional>
#include <sstream>

#include "json.hpp"

namespace multiboson {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const char* where,
                  std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : obj.items()) {
        bool known = false;
        for (const char* candidate : allowed) {
            if (key == candidate) {
                known = true;
                break;
            }
        }
        if (!known) {
            std::ostringstream msg;
            msg << "scenario: unknown key '" << key << "' in " << where;
            throw ParseError(msg.str());
        }
    }
}

const json& require_field(const json& obj, const char* where, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        std::ostringstream msg;
        msg << "scenario: missing key '" << key << "' in " << where;
        throw ParseError(msg.str());
    }
    return *it;
}

double number_field(const json& value, const char* where) {
    if (!value.is_number()) {
        std::ostringstream msg;
        msg << "scenario: expected a number for " << where;
        throw ParseError(msg.str());
    }
    return value.get<double>();
}

Complex complex_pair(const json& value, const char* where) {
    if (!value.is_array() || value.size() != 2 || !value[0].is_number() ||
        !value[1].is_number()) {
        std::ostringstream msg;
        msg << "scenario: expected [re, im] for " << where;
        throw ParseError(msg.str());
    }
    return {value[0].get<double>(), value[1].get<double>()};
}

MatrixXcd complex_matrix(const json& value, const char* where) {
    if (!value.is_array() || value.empty()) {
        std::ostringstream msg;
        msg << "scenario: expected a non-empty array of rows for " << where;
        throw ParseError(msg.str());
    }
    const std::size_t rows = value.size();
    std::size_t cols = 0;
    MatrixXcd m;
    for (std::size_t r = 0; r < rows; ++r) {
        const json& row = value[r];
        if (!row.is_array() || row.empty()) {
            std::ostringstream msg;
            msg << "scenario: expected a non-empty row array in " << where;
            throw ParseError(msg.str());
        }
        if (r == 0) {
            cols = row.size();
            m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        } else if (row.size() != cols) {
            std::ostringstream msg;
            msg << "scenario: ragged rows in " << where;
            throw ParseError(msg.str());
        }
        for (std::size_t c = 0; c < cols; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                complex_pair(row[c], where);
        }
    }
    return m;
}

InterferometerMatrix parse_unitary(const json& spec) {
    if (!spec.is_object()) {
        throw ParseError("scenario: 'unitary' must be an object");
    }
    require_keys(spec, "'unitary'", {"haar", "explicit", "beamsplitter"});
    if (spec.size() != 1) {
        throw ParseError(
            "scenario: 'unitary' needs exactly one of 'haar', 'explicit', "
            "'beamsplitter'");
    }
    if (const auto it = spec.find("haar"); it != spec.end()) {
        if (!it->is_object()) {
            throw ParseError("scenario: 'unitary.haar' must be an object");
        }
        require_keys(*it, "'unitary.haar'", {"m", "seed"});
        const json& m_field = require_field(*it, "'unitary.haar'", "m");
        const json& seed_field = require_field(*it, "'unitary.haar'", "seed");
        if (!m_field.is_number_integer()) {
            throw ParseError("scenario: 'unitary.haar.m' must be an integer");
        }
        if (!seed_field.is_number_integer() && !seed_field.is_number_unsigned()) {
            throw ParseError("scenario: 'unitary.haar.seed' must be an integer");
        }
        const int m = m_field.get<int>();
        if (m < 1) {
            throw ValidationError("scenario: 'unitary.haar.m' must be at least 1");
        }
        return haar_random(m, seed_field.get<std::uint64_t>());
    }
    if (const auto it = spec.find("explicit"); it != spec.end()) {
        return InterferometerMatrix::from_entries(complex_matrix(*it, "'unitary.explicit'"));
    }
    const json& bs = *spec.find("beamsplitter");
    if (!bs.is_object() || !bs.empty()) {
        throw ParseError("scenario: 'unitary.beamsplitter' must be an empty object");
    }
    return balanced_beam_splitter();
}

Vector2cd parse_polarization(const json& input) {
    const auto it = input.find("polarization");
    if (it == input.end()) {
        return Vector2cd(Complex(1.0, 0.0), Complex(0.0, 0.0));
    }
    const json& pol = *it;
    if (!pol.is_array() || pol.size() != 4 || !pol[0].is_number() || !pol[1].is_number() ||
        !pol[2].is_number() || !pol[3].is_number()) {
        throw ParseError(
            "scenario: 'polarization' must be [re0, im0, re1, im1] (four numbers)");
    }
    return Vector2cd(Complex(pol[0].get<double>(), pol[1].get<double>()),
                     Complex(pol[2].get<double>(), pol[3].get<double>()));
}

SpectralAmplitude parse_spectrum(const json& input) {
    const json& kind_field = require_field(input, "an 'inputs' entry", "kind");
    if (!kind_field.is_string()) {
        throw ParseError("scenario: 'kind' must be a string");
    }
    const std::string kind_name = kind_field.get<std::string>();
    const double omega0 =
        number_field(require_field(input, "an 'inputs' entry", "omega0"), "'omega0'");
    double t0 = 0.0;
    if (const auto it = input.find("t0"); it != input.end()) {
        t0 = number_field(*it, "'t0'");
    }
    const Vector2cd pol = parse_polarization(input);
    if (kind_name == "gaussian") {
        const double delta_omega = number_field(
            require_field(input, "a gaussian 'inputs' entry", "delta_omega"),
            "'delta_omega'");
        return {SpectrumKind::GaussianPulse, omega0, delta_omega, t0, pol};
    }
    if (kind_name == "delta") {
        if (input.contains("delta_omega")) {
            throw ParseError("scenario: delta spectra take no 'delta_omega'");
        }
        return {SpectrumKind::Delta, omega0, 0.0, t0, pol};
    }
    throw ParseError("scenario: 'kind' must be 'gaussian' or 'delta', got '" + kind_name +
                     "'");
}

}  // namespace

Scenario scenario_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("scenario: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ParseError("scenario: top level must be an object");
    }
    require_keys(doc, "the scenario", {"unitary", "inputs", "gram_override", "output"});

    InterferometerMatrix unitary = parse_unitary(require_field(doc, "the scenario", "unitary"));

    const json& inputs = require_field(doc, "the scenario", "inputs");
    if (!inputs.is_array() || inputs.empty()) {
        throw ParseError("scenario: 'inputs' must be a non-empty array");
    }
    const bool has_override = doc.contains("gram_override");

    std::vector<int> input_ports;
    std::vector<SpectralAmplitude> spectra;
    for (const json& input : inputs) {
        if (!input.is_object()) {
            throw ParseError("scenario: each 'inputs' entry must be an object");
        }
        require_keys(input, "an 'inputs' entry",
                     {"port", "kind", "omega0", "delta_omega", "t0", "polarization"});
        const json& port_field = require_field(input, "an 'inputs' entry", "port");
        if (!port_field.is_number_integer()) {
            throw ParseError("scenario: 'port' must be an integer");
        }
        input_ports.push_back(port_field.get<int>());
        const bool has_spectrum = input.contains("kind") || input.contains("omega0") ||
                                  input.contains("delta_omega") || input.contains("t0") ||
                                  input.contains("polarization");
        if (has_override) {
            if (has_spectrum) {
                throw ValidationError(
                    "scenario: photons carry either spectra or gram_override, not both");
            }
        } else {
            spectra.push_back(parse_spectrum(input));
        }
    }

    for (std::size_t i = 0; i < input_ports.size(); ++i) {
        if (input_ports[i] < 0 || input_ports[i] >= unitary.dim()) {
            std::ostringstream msg;
            msg << "scenario: input port " << input_ports[i] << " outside [0, "
                << unitary.dim() << ")";
            throw ValidationError(msg.str());
        }
        for (std::size_t j = i + 1; j < input_ports.size(); ++j) {
            if (input_ports[i] == input_ports[j]) {
                std::ostringstream msg;
                msg << "scenario: input port " << input_ports[i] << " listed twice";
                throw ValidationError(msg.str());
            }
        }
    }

    std::optional<GramMatrix> gram;
    if (has_override) {
        gram.emplace(complex_matrix(doc["gram_override"], "'gram_override'"));
        if (gram->dim() != static_cast<int>(input_ports.size())) {
            std::ostringstream msg;
            msg << "scenario: gram_override is " << gram->dim() << "x" << gram->dim()
                << " but there are " << input_ports.size() << " inputs";
            throw ValidationError(msg.str());
        }
    } else {
        gram.emplace(gram_matrix(spectra));
    }

    std::string format = "csv";
    std::string path;
    if (const auto it = doc.find("output"); it != doc.end()) {
        if (!it->is_object()) {
            throw ParseError("scenario: 'output' must be an object");
        }
        require_keys(*it, "'output'", {"format", "path"});
        if (const auto f = it->find("format"); f != it->end()) {
            if (!f->is_string()) {
                throw ParseError("scenario: 'output.format' must be a string");
            }
            format = f->get<std::string>();
            if (format != "csv" && format != "json") {
                throw ParseError("scenario: 'output.format' must be 'csv' or 'json'");
            }
        }
        if (const auto p = it->find("path"); p != it->end()) {
            if (!p->is_string()) {
                throw ParseError("scenario: 'output.path' must be a string");
            }
            path = p->get<std::string>();
        }
    }

    return Scenario{std::move(unitary), std::move(input_ports), std::move(spectra),
                    std::move(*gram), std::move(format), std::move(path)};
}

Scenario scenario_from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("scenario: cannot open file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return scenario_from_json(buffer.str());
}

}  // namespace multiboson
