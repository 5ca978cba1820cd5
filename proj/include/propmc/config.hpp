#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace propmc {

// Flat run configuration shared by every subcommand.  The on-disk form is a
// plain key = value file ('#' starts a comment); unknown keys are rejected by
// name, and every module-level precondition is checked here at parse time so
// failures carry the offending field.
struct RunConfig {
    // covariance
    double gamma = 0.25;
    double epsilon = 0.0;
    double amplitude = 1.0;
    std::string cov_form = "power";  // power | spectral
    double nu_max = 1e6;

    // proper-time grids
    double tau = 1.0;
    double tau_min = 0.25;
    double tau_max = 4.0;
    int n_tau = 5;

    // sampling
    int n_steps = 512;
    int n_samples = 100000;
    int n_boot = 1000;
    std::uint64_t seed = 1;
    int threads = 0;  // 0 = hardware concurrency; execution knob, not identity

    // propagator configuration
    std::string signature = "+";           // one of +,- per pair
    int n_det = 0;
    std::string even_sector = "integrated";  // integrated | pointwise
    double delta = 1.0;
    double delta_min = 0.1;
    double delta_max = 1.0;
    int n_delta = 6;
    double regulator_eps = 0.05;
    double delta_floor = 1e-4;  // floor coefficient, scaled by tau^(1-gamma)
    bool deterministic = false;
    bool subtract_zero = false;

    // analysis knobs
    int moment_order = 2;
    double ks_factor = 4.0;
    int exp_n = 2;

    // output
    std::string out_path = "propmc_out";
    std::string out_format = "both";  // csv | json | both

    void validate() const;

    int n_pairs() const { return static_cast<int>(signature.size()); }
};

// Parsers keep the full key set in one place.
RunConfig config_from_map(const std::map<std::string, std::string>& kv);
RunConfig load_config_file(const std::string& path);

// Canonical serialisation (fixed key order).  `include_threads = false` is
// used for manifests: the worker count does not affect any output byte and is
// deliberately not part of a run's identity.
std::string serialize_config(const RunConfig& config, bool include_threads = true);
std::map<std::string, std::string> config_to_map(const RunConfig& config, bool include_threads = true);

}  // namespace propmc
