#include "propmc/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "propmc/io.hpp"

namespace propmc {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: " + key + ": not a number: '" + value + "'");
    }
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return static_cast<int>(v);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: " + key + ": not an integer: '" + value + "'");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const std::uint64_t v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: " + key + ": not an unsigned integer: '" + value +
                                    "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw std::invalid_argument("config: " + key + ": expected true/false, got '" + value + "'");
}

}  // namespace

void RunConfig::validate() const {
    if (!(gamma >= 0.0) || !(gamma < 0.5))
        throw std::invalid_argument("config: gamma must lie in [0, 0.5), got " +
                                    format_double(gamma));
    if (!(epsilon >= 0.0)) throw std::invalid_argument("config: epsilon must be >= 0");
    if (!(amplitude > 0.0)) throw std::invalid_argument("config: amplitude must be > 0");
    if (cov_form != "power" && cov_form != "spectral")
        throw std::invalid_argument("config: cov_form must be 'power' or 'spectral', got '" +
                                    cov_form + "'");
    if (!(nu_max > 0.0)) throw std::invalid_argument("config: nu_max must be > 0");
    if (!(tau > 0.0)) throw std::invalid_argument("config: tau must be > 0");
    if (!(tau_min > 0.0) || !(tau_max > tau_min))
        throw std::invalid_argument("config: need 0 < tau_min < tau_max");
    if (n_tau < 2) throw std::invalid_argument("config: n_tau must be >= 2");
    if (n_steps < 1) throw std::invalid_argument("config: n_steps must be >= 1");
    if (n_samples < 2) throw std::invalid_argument("config: n_samples must be >= 2");
    if (n_boot < 1) throw std::invalid_argument("config: n_boot must be >= 1");
    if (threads < 0) throw std::invalid_argument("config: threads must be >= 0");
    if (signature.empty())
        throw std::invalid_argument("config: signature must hold at least one pair");
    for (const char c : signature)
        if (c != '+' && c != '-')
            throw std::invalid_argument("config: signature characters must be '+' or '-'");
    if (n_det < 0) throw std::invalid_argument("config: n_det must be >= 0");
    if (even_sector != "integrated" && even_sector != "pointwise")
        throw std::invalid_argument(
            "config: even_sector must be 'integrated' or 'pointwise', got '" + even_sector + "'");
    if (!(delta >= 0.0)) throw std::invalid_argument("config: delta must be >= 0");
    if (!(delta_min > 0.0) || !(delta_max >= delta_min))
        throw std::invalid_argument("config: need 0 < delta_min <= delta_max");
    if (n_delta < 1) throw std::invalid_argument("config: n_delta must be >= 1");
    if (!(regulator_eps >= 0.0))
        throw std::invalid_argument("config: regulator_eps must be >= 0");
    if (!(delta_floor >= 0.0)) throw std::invalid_argument("config: delta_floor must be >= 0");
    if (moment_order < 1) throw std::invalid_argument("config: moment_order must be >= 1");
    if (!(ks_factor > 0.0)) throw std::invalid_argument("config: ks_factor must be > 0");
    if (exp_n < 1) throw std::invalid_argument("config: exp_n must be >= 1");
    if (out_path.empty()) throw std::invalid_argument("config: out_path must not be empty");
    if (out_format != "csv" && out_format != "json" && out_format != "both")
        throw std::invalid_argument("config: out_format must be csv, json or both");
}

RunConfig config_from_map(const std::map<std::string, std::string>& kv) {
    RunConfig c;
    for (const auto& [key, value] : kv) {
        if (key == "gamma") c.gamma = parse_double(key, value);
        else if (key == "epsilon") c.epsilon = parse_double(key, value);
        else if (key == "amplitude") c.amplitude = parse_double(key, value);
        else if (key == "cov_form") c.cov_form = value;
        else if (key == "nu_max") c.nu_max = parse_double(key, value);
        else if (key == "tau") c.tau = parse_double(key, value);
        else if (key == "tau_min") c.tau_min = parse_double(key, value);
        else if (key == "tau_max") c.tau_max = parse_double(key, value);
        else if (key == "n_tau") c.n_tau = parse_int(key, value);
        else if (key == "n_steps") c.n_steps = parse_int(key, value);
        else if (key == "n_samples") c.n_samples = parse_int(key, value);
        else if (key == "n_boot") c.n_boot = parse_int(key, value);
        else if (key == "seed") c.seed = parse_u64(key, value);
        else if (key == "threads") c.threads = parse_int(key, value);
        else if (key == "signature") c.signature = value;
        else if (key == "n_det") c.n_det = parse_int(key, value);
        else if (key == "even_sector") c.even_sector = value;
        else if (key == "delta") c.delta = parse_double(key, value);
        else if (key == "delta_min") c.delta_min = parse_double(key, value);
        else if (key == "delta_max") c.delta_max = parse_double(key, value);
        else if (key == "n_delta") c.n_delta = parse_int(key, value);
        else if (key == "regulator_eps") c.regulator_eps = parse_double(key, value);
        else if (key == "delta_floor") c.delta_floor = parse_double(key, value);
        else if (key == "deterministic") c.deterministic = parse_bool(key, value);
        else if (key == "subtract_zero") c.subtract_zero = parse_bool(key, value);
        else if (key == "moment_order") c.moment_order = parse_int(key, value);
        else if (key == "ks_factor") c.ks_factor = parse_double(key, value);
        else if (key == "exp_n") c.exp_n = parse_int(key, value);
        else if (key == "out_path") c.out_path = value;
        else if (key == "out_format") c.out_format = value;
        else throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    c.validate();
    return c;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open file " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string text = trim(line);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: " + path + ":" + std::to_string(line_no) +
                                        ": expected key = value");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (kv.count(key))
            throw std::invalid_argument("config: duplicate key '" + key + "'");
        kv[key] = value;
    }
    return config_from_map(kv);
}

std::map<std::string, std::string> config_to_map(const RunConfig& c, bool include_threads) {
    std::map<std::string, std::string> kv;
    kv["gamma"] = format_double(c.gamma);
    kv["epsilon"] = format_double(c.epsilon);
    kv["amplitude"] = format_double(c.amplitude);
    kv["cov_form"] = c.cov_form;
    kv["nu_max"] = format_double(c.nu_max);
    kv["tau"] = format_double(c.tau);
    kv["tau_min"] = format_double(c.tau_min);
    kv["tau_max"] = format_double(c.tau_max);
    kv["n_tau"] = std::to_string(c.n_tau);
    kv["n_steps"] = std::to_string(c.n_steps);
    kv["n_samples"] = std::to_string(c.n_samples);
    kv["n_boot"] = std::to_string(c.n_boot);
    kv["seed"] = std::to_string(c.seed);
    if (include_threads) kv["threads"] = std::to_string(c.threads);
    kv["signature"] = c.signature;
    kv["n_det"] = std::to_string(c.n_det);
    kv["even_sector"] = c.even_sector;
    kv["delta"] = format_double(c.delta);
    kv["delta_min"] = format_double(c.delta_min);
    kv["delta_max"] = format_double(c.delta_max);
    kv["n_delta"] = std::to_string(c.n_delta);
    kv["regulator_eps"] = format_double(c.regulator_eps);
    kv["delta_floor"] = format_double(c.delta_floor);
    kv["deterministic"] = c.deterministic ? "true" : "false";
    kv["subtract_zero"] = c.subtract_zero ? "true" : "false";
    kv["moment_order"] = std::to_string(c.moment_order);
    kv["ks_factor"] = format_double(c.ks_factor);
    kv["exp_n"] = std::to_string(c.exp_n);
    kv["out_path"] = c.out_path;
    kv["out_format"] = c.out_format;
    return kv;
}

std::string serialize_config(const RunConfig& c, bool include_threads) {
    std::ostringstream out;
    for (const auto& [key, value] : config_to_map(c, include_threads))
        out << key << " = " << value << "\n";
    return out.str();
}

}  // namespace propmc
