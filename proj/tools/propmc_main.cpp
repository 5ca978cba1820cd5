// propmc: Monte Carlo laboratory for propagators of random-coefficient
// Schrodinger/wave operators with singular power-law covariances.
//
// Subcommands: gamma-moments, scaling, ks-scale, kernel, green-scan,
// exponents, rerun.  Every run writes CSV/JSON data plus a manifest that
// reproduces the run byte-for-byte (see rerun).

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "propmc/config.hpp"
#include "propmc/covariance.hpp"
#include "propmc/errors.hpp"
#include "propmc/exponents.hpp"
#include "propmc/gamma.hpp"
#include "propmc/io.hpp"
#include "propmc/kernel.hpp"
#include "propmc/paths.hpp"
#include "propmc/scaling.hpp"

#ifndef PROPMC_VERSION
#define PROPMC_VERSION "0.0.0"
#endif

namespace {

using nlohmann::json;
using namespace propmc;

json json_header(const std::string& subcommand, const RunConfig& cfg) {
    json j;
    j["schema"] = kJsonSchemaVersion;
    j["artifact_version"] = PROPMC_VERSION;
    j["subcommand"] = subcommand;
    j["seed"] = cfg.seed;
    return j;
}

void write_manifest(const std::string& subcommand, const RunConfig& cfg) {
    json m;
    m["schema"] = kManifestSchemaVersion;
    m["artifact_version"] = PROPMC_VERSION;
    m["subcommand"] = subcommand;
    m["config"] = config_to_map(cfg, /*include_threads=*/false);
    write_text_file(cfg.out_path + ".manifest.json", m.dump(2) + "\n");
}

void write_json_summary(const RunConfig& cfg, const json& j) {
    if (cfg.out_format == "json" || cfg.out_format == "both")
        write_text_file(cfg.out_path + ".json", j.dump(2) + "\n");
}

bool want_csv(const RunConfig& cfg) {
    return cfg.out_format == "csv" || cfg.out_format == "both";
}

CovarianceSpec covariance_from(const RunConfig& cfg) {
    CovarianceSpec cov;
    cov.gamma = cfg.gamma;
    cov.epsilon = cfg.epsilon;
    cov.amplitude = cfg.amplitude;
    cov.nu_max = cfg.nu_max;
    cov.form = cfg.cov_form == "spectral" ? CovForm::Spectral : CovForm::PowerLaw;
    return cov;
}

SignatureSpec signature_from(const RunConfig& cfg) {
    SignatureSpec sig;
    sig.n_pairs = cfg.n_pairs();
    for (const char c : cfg.signature) sig.signs.push_back(c == '+' ? 1 : -1);
    sig.n_det = cfg.n_det;
    sig.even_sector =
        cfg.even_sector == "pointwise" ? EvenSector::PointwiseZero : EvenSector::Integrated;
    return sig;
}

std::vector<double> geometric_list(double lo, double hi, int count) {
    std::vector<double> v(static_cast<std::size_t>(count));
    if (count == 1) {
        v[0] = lo;
        return v;
    }
    const double ratio = std::log(hi / lo) / (count - 1);
    for (int i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = lo * std::exp(ratio * i);
    return v;
}

json moment_to_json(const MomentEstimate& est) {
    return json{{"r", est.r},
                {"mean", est.mean},
                {"std_error", est.std_error},
                {"ci_lo", est.ci_lo},
                {"ci_hi", est.ci_hi},
                {"n_samples", est.n_samples}};
}

json fit_to_json(const ScalingFit& fit) {
    json points = json::array();
    for (const auto& p : fit.points)
        points.push_back(json{{"log_x", p.log_x}, {"log_y", p.log_y}, {"weight", p.weight}});
    return json{{"slope", fit.slope},
                {"intercept", fit.intercept},
                {"slope_stderr", fit.slope_stderr},
                {"r2", fit.r2},
                {"n_excluded", fit.n_excluded},
                {"warnings", fit.warnings},
                {"points", points}};
}

void run_exponents(const RunConfig& cfg) {
    json rows = json::array();
    std::optional<CsvWriter> csv;
    if (want_csv(cfg))
        csv.emplace(cfg.out_path + ".csv",
                    std::vector<std::string>{"kind", "n", "gamma", "exponent_on_square",
                                             "exponent_on_abs"});
    for (const ExponentKind kind : kAllExponentKinds) {
        const ExponentPrediction p = predict(kind, cfg.exp_n, cfg.gamma);
        if (csv)
            csv->row({to_string(kind), CsvWriter::cell(p.n), CsvWriter::cell(p.gamma),
                      CsvWriter::cell(p.exponent_on_square), CsvWriter::cell(p.exponent_on_abs)});
        rows.push_back(json{{"kind", to_string(kind)},
                            {"n", p.n},
                            {"gamma", p.gamma},
                            {"exponent_on_square", p.exponent_on_square},
                            {"exponent_on_abs", p.exponent_on_abs}});
    }
    json j = json_header("exponents", cfg);
    j["predictions"] = rows;
    write_json_summary(cfg, j);
}

void run_gamma_moments(const RunConfig& cfg) {
    const TimeGrid grid = make_grid(cfg.tau, cfg.n_steps);
    const GammaEnsemble ens =
        gamma_ensemble(grid, covariance_from(cfg), cfg.n_samples, cfg.seed, cfg.threads);

    if (want_csv(cfg)) {
        CsvWriter csv(cfg.out_path + ".csv", {"index", "value", "n_singular_hits"});
        for (int i = 0; i < ens.size(); ++i)
            csv.row({CsvWriter::cell(i), CsvWriter::cell(ens.samples[i].value),
                     CsvWriter::cell(ens.samples[i].n_singular_hits)});
    }

    long hits = 0;
    for (const auto& s : ens.samples) hits += s.n_singular_hits;
    json moments = json::array();
    // Both moment conventions are reported: E[Gamma^r] drives the scaling
    // fits, E[Gamma^(2r)] matches the paper's literal moment notation.
    for (int r = 1; r <= cfg.moment_order; ++r) {
        moments.push_back(moment_to_json(
            estimate_moment(ens, r, cfg.n_boot, mix_seed(cfg.seed, 1000 + r), cfg.threads)));
        moments.push_back(moment_to_json(
            estimate_moment(ens, 2 * r, cfg.n_boot, mix_seed(cfg.seed, 2000 + r), cfg.threads)));
    }
    json j = json_header("gamma-moments", cfg);
    j["tau"] = cfg.tau;
    j["n_steps"] = cfg.n_steps;
    j["gamma"] = cfg.gamma;
    j["moments"] = moments;
    j["total_singular_hits"] = hits;
    write_json_summary(cfg, j);
}

void run_scaling(const RunConfig& cfg) {
    const std::vector<double> taus = geometric_list(cfg.tau_min, cfg.tau_max, cfg.n_tau);
    const CovarianceSpec cov = covariance_from(cfg);

    std::vector<std::pair<double, MomentEstimate>> moments;
    for (std::size_t q = 0; q < taus.size(); ++q) {
        const TimeGrid grid = make_grid(taus[q], cfg.n_steps);
        const GammaEnsemble ens =
            gamma_ensemble(grid, cov, cfg.n_samples, mix_seed(cfg.seed, q), cfg.threads);
        moments.emplace_back(taus[q],
                             estimate_moment(ens, cfg.moment_order, cfg.n_boot,
                                             mix_seed(cfg.seed, 1000 + q), cfg.threads));
    }
    const ScalingFit fit = fit_scaling(moments);

    if (want_csv(cfg)) {
        CsvWriter csv(cfg.out_path + ".csv",
                      {"tau", "r", "mean", "std_error", "ci_lo", "ci_hi", "n_samples"});
        for (const auto& [tau, est] : moments)
            csv.row({CsvWriter::cell(tau), CsvWriter::cell(est.r), CsvWriter::cell(est.mean),
                     CsvWriter::cell(est.std_error), CsvWriter::cell(est.ci_lo),
                     CsvWriter::cell(est.ci_hi), CsvWriter::cell(est.n_samples)});
    }

    json j = json_header("scaling", cfg);
    j["gamma"] = cfg.gamma;
    j["moment_order"] = cfg.moment_order;
    j["fit"] = fit_to_json(fit);
    j["reference_slope"] = cfg.moment_order * (1.0 - cfg.gamma);
    json per_tau = json::array();
    for (const auto& [tau, est] : moments) {
        json row = moment_to_json(est);
        row["tau"] = tau;
        per_tau.push_back(row);
    }
    j["moments"] = per_tau;
    write_json_summary(cfg, j);
}

void run_ks_scale(const RunConfig& cfg) {
    const CovarianceSpec cov = covariance_from(cfg);
    const TimeGrid grid1 = make_grid(cfg.tau, cfg.n_steps);
    const TimeGrid grid2 = make_grid(cfg.ks_factor * cfg.tau, cfg.n_steps);
    const GammaEnsemble ens1 = gamma_ensemble(grid1, cov, cfg.n_samples, cfg.seed, cfg.threads);
    const GammaEnsemble ens2 = gamma_ensemble(grid2, cov, cfg.n_samples,
                                              mix_seed(cfg.seed, 0x6b73), cfg.threads);
    const KsResult res = ks_scaling_test(ens1, ens2, cfg.ks_factor, cfg.gamma);

    if (want_csv(cfg)) {
        CsvWriter csv(cfg.out_path + ".csv",
                      {"c", "gamma", "tau", "n_steps", "m1", "m2", "statistic", "p_value"});
        csv.row({CsvWriter::cell(cfg.ks_factor), CsvWriter::cell(cfg.gamma),
                 CsvWriter::cell(cfg.tau), CsvWriter::cell(cfg.n_steps), CsvWriter::cell(res.m1),
                 CsvWriter::cell(res.m2), CsvWriter::cell(res.statistic),
                 CsvWriter::cell(res.p_value)});
    }
    json j = json_header("ks-scale", cfg);
    j["c"] = cfg.ks_factor;
    j["gamma"] = cfg.gamma;
    j["statistic"] = res.statistic;
    j["p_value"] = res.p_value;
    j["m1"] = res.m1;
    j["m2"] = res.m2;
    write_json_summary(cfg, j);
}

void run_kernel(const RunConfig& cfg) {
    const SignatureSpec sig = signature_from(cfg);
    const TimeGrid grid = make_grid(cfg.tau, cfg.n_steps);
    const CovarianceSpec cov = covariance_from(cfg);

    std::vector<GammaEnsemble> ensembles;
    for (int k = 0; k < sig.n_pairs; ++k) {
        if (cfg.deterministic)
            ensembles.push_back(constant_ensemble(grid, cfg.tau));
        else
            ensembles.push_back(gamma_ensemble(grid, cov, cfg.n_samples,
                                               mix_seed(cfg.seed, static_cast<std::uint64_t>(k)),
                                               cfg.threads));
    }
    const double floor_abs = cfg.delta_floor * std::pow(cfg.tau, 1.0 - cfg.gamma);
    const std::vector<double> deltas(static_cast<std::size_t>(sig.n_pairs), cfg.delta);
    const KernelEstimate est = reduced_kernel(deltas, sig, cfg.tau, ensembles, floor_abs);

    if (want_csv(cfg)) {
        CsvWriter csv(cfg.out_path + ".csv", {"tau", "delta", "re_value", "im_value", "std_error",
                                              "n_truncated", "n_used"});
        csv.row({CsvWriter::cell(cfg.tau), CsvWriter::cell(cfg.delta),
                 CsvWriter::cell(est.value.real()), CsvWriter::cell(est.value.imag()),
                 CsvWriter::cell(est.std_error), CsvWriter::cell(est.n_truncated),
                 CsvWriter::cell(est.n_used)});
    }
    json j = json_header("kernel", cfg);
    j["tau"] = cfg.tau;
    j["delta"] = cfg.delta;
    j["re_value"] = est.value.real();
    j["im_value"] = est.value.imag();
    j["std_error"] = est.std_error;
    j["n_truncated"] = est.n_truncated;
    j["n_used"] = est.n_used;
    j["delta_floor"] = est.delta_floor;
    write_json_summary(cfg, j);
}

void run_green_scan(const RunConfig& cfg) {
    GreenConfig gc;
    gc.sig = signature_from(cfg);
    gc.cov_gamma = cfg.gamma;
    gc.cov_epsilon = cfg.epsilon;
    gc.cov_amplitude = cfg.amplitude;
    gc.tau_grid = {cfg.tau_min, cfg.tau_max, cfg.n_tau};
    gc.n_steps = cfg.n_steps;
    gc.n_samples = cfg.n_samples;
    gc.regulator_eps = cfg.regulator_eps;
    gc.delta_floor_coeff = cfg.delta_floor;
    gc.seed = cfg.seed;
    gc.threads = cfg.threads;
    gc.deterministic_gamma = cfg.deterministic;

    const std::vector<double> direction(static_cast<std::size_t>(gc.sig.n_pairs), 1.0);
    const std::vector<double> deltas = geometric_list(cfg.delta_min, cfg.delta_max, cfg.n_delta);
    const ScanResult scan = exponent_scan(gc, direction, deltas, cfg.subtract_zero);

    if (want_csv(cfg)) {
        CsvWriter csv(cfg.out_path + ".csv", {"delta", "tau_min", "tau_max", "re_value",
                                              "im_value", "std_error", "n_truncated"});
        for (std::size_t i = 0; i < scan.deltas.size(); ++i) {
            const GreenEstimate& g = scan.greens[i];
            long truncated = 0;
            for (const auto& k : g.per_tau) truncated += k.n_truncated;
            csv.row({CsvWriter::cell(scan.deltas[i]), CsvWriter::cell(cfg.tau_min),
                     CsvWriter::cell(cfg.tau_max), CsvWriter::cell(g.value.real()),
                     CsvWriter::cell(g.value.imag()), CsvWriter::cell(g.std_error),
                     CsvWriter::cell(truncated)});
        }
    }

    json j = json_header("green-scan", cfg);
    j["gamma"] = cfg.gamma;
    j["fit"] = fit_to_json(scan.fit);
    j["measured_exponent_on_square"] = scan.fit.slope;
    json per_delta = json::array();
    for (std::size_t i = 0; i < scan.deltas.size(); ++i) {
        const GreenEstimate& g = scan.greens[i];
        long truncated = 0, used = 0;
        for (const auto& k : g.per_tau) {
            truncated += k.n_truncated;
            used += k.n_used;
        }
        per_delta.push_back(json{
            {"delta", scan.deltas[i]},
            {"delta_sq", scan.delta_sq[i]},
            {"re_value", g.value.real()},
            {"im_value", g.value.imag()},
            {"std_error", g.std_error},
            {"floor_half_shift", std::abs(g.value - g.value_half_floor)},
            {"truncated_fraction",
             static_cast<double>(truncated) / static_cast<double>(truncated + used)},
            {"n_warnings", g.warnings.size()},
        });
    }
    j["per_delta"] = per_delta;
    json predictions;
    for (const ExponentKind kind : kAllExponentKinds)
        predictions[to_string(kind)] = predicted_exponent(kind, gc.sig.n_pairs, cfg.gamma);
    j["predicted_exponents_on_square"] = predictions;
    write_json_summary(cfg, j);
}

void dispatch(const std::string& subcommand, const RunConfig& cfg) {
    cfg.validate();
    if (subcommand == "exponents")
        run_exponents(cfg);
    else if (subcommand == "gamma-moments")
        run_gamma_moments(cfg);
    else if (subcommand == "scaling")
        run_scaling(cfg);
    else if (subcommand == "ks-scale")
        run_ks_scale(cfg);
    else if (subcommand == "kernel")
        run_kernel(cfg);
    else if (subcommand == "green-scan")
        run_green_scan(cfg);
    else
        throw std::invalid_argument("unknown subcommand '" + subcommand + "'");
    write_manifest(subcommand, cfg);
}

struct CliOptions {
    RunConfig cfg;
    std::string config_path;
    std::string manifest_path;
};

void add_common_options(CLI::App* app, CliOptions& opt) {
    app->add_option("--config", opt.config_path, "key = value configuration file");
    app->add_option("--gamma", opt.cfg.gamma, "covariance singularity exponent in [0, 0.5)");
    app->add_option("--epsilon", opt.cfg.epsilon, "covariance short-distance regulator");
    app->add_option("--amplitude", opt.cfg.amplitude, "covariance amplitude");
    app->add_option("--cov-form", opt.cfg.cov_form, "power | spectral");
    app->add_option("--nu-max", opt.cfg.nu_max, "spectral cutoff");
    app->add_option("--tau", opt.cfg.tau, "proper time");
    app->add_option("--tau-min", opt.cfg.tau_min, "proper-time grid lower edge");
    app->add_option("--tau-max", opt.cfg.tau_max, "proper-time grid upper edge");
    app->add_option("--n-tau", opt.cfg.n_tau, "proper-time grid points");
    app->add_option("--n-steps", opt.cfg.n_steps, "Brownian path steps");
    app->add_option("--samples", opt.cfg.n_samples, "Monte Carlo samples");
    app->add_option("--n-boot", opt.cfg.n_boot, "bootstrap resamples");
    app->add_option("--seed", opt.cfg.seed, "master seed");
    app->add_option("--threads", opt.cfg.threads, "worker threads (0 = auto)");
    app->add_option("--signature", opt.cfg.signature, "metric signs per pair, e.g. '+-'");
    app->add_option("--n-det", opt.cfg.n_det, "extra deterministic coordinates");
    app->add_option("--even-sector", opt.cfg.even_sector, "integrated | pointwise");
    app->add_option("--delta", opt.cfg.delta, "displacement (kernel)");
    app->add_option("--delta-min", opt.cfg.delta_min, "scan displacement lower edge");
    app->add_option("--delta-max", opt.cfg.delta_max, "scan displacement upper edge");
    app->add_option("--n-delta", opt.cfg.n_delta, "scan displacement count");
    app->add_option("--regulator-eps", opt.cfg.regulator_eps, "proper-time damping");
    app->add_option("--delta-floor", opt.cfg.delta_floor, "|Gamma| floor coefficient");
    app->add_flag("--deterministic,!--no-deterministic", opt.cfg.deterministic,
                  "Gamma == tau (free kernel mode)");
    app->add_flag("--subtract-zero,!--no-subtract-zero", opt.cfg.subtract_zero,
                  "subtract the coincidence value before fitting");
    app->add_option("--r", opt.cfg.moment_order, "moment order");
    app->add_option("--c-factor", opt.cfg.ks_factor, "KS scale factor c");
    app->add_option("--n", opt.cfg.exp_n, "pair count for exponent tables");
    app->add_option("--out", opt.cfg.out_path, "output path stem");
    app->add_option("--format", opt.cfg.out_format, "csv | json | both");
}

int run_main(int argc, char** argv) {
    CLI::App app{"Monte Carlo laboratory for random-coefficient propagators"};
    app.require_subcommand(1);

    // Config file first, then PROPMC_SEED, then explicit flags.
    std::string config_path;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config") config_path = argv[i + 1];

    CliOptions opt;
    if (!config_path.empty()) opt.cfg = load_config_file(config_path);
    if (const char* env_seed = std::getenv("PROPMC_SEED"))
        opt.cfg.seed = std::stoull(env_seed);

    const std::vector<std::string> subs = {"gamma-moments", "scaling", "ks-scale",
                                           "kernel", "green-scan", "exponents"};
    for (const auto& name : subs) add_common_options(app.add_subcommand(name), opt);

    CLI::App* rerun = app.add_subcommand("rerun", "re-run a manifest");
    rerun->add_option("manifest", opt.manifest_path, "manifest JSON path")->required();
    rerun->add_option("--threads", opt.cfg.threads, "worker threads (0 = auto)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints help or the parse error
        return code == 0 ? 0 : 2;
    }

    if (rerun->parsed()) {
        const json m = json::parse(read_text_file(opt.manifest_path));
        if (m.value("schema", "") != kManifestSchemaVersion)
            throw std::invalid_argument("rerun: unrecognised manifest schema");
        std::map<std::string, std::string> kv;
        for (const auto& [key, value] : m.at("config").items())
            kv[key] = value.get<std::string>();
        RunConfig cfg = config_from_map(kv);
        cfg.threads = opt.cfg.threads;
        dispatch(m.at("subcommand").get<std::string>(), cfg);
        return 0;
    }

    for (const auto& name : subs)
        if (app.get_subcommand(name)->parsed()) {
            dispatch(name, opt.cfg);
            return 0;
        }
    throw std::invalid_argument("no subcommand given");
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_main(argc, argv);
    } catch (const propmc::NumericalError& e) {
        json err;
        err["error"] = {{"kind", "numerical"}, {"module", e.module()}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        json err;
        err["error"] = {{"kind", "config"}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 2;
    } catch (const std::exception& e) {
        json err;
        err["error"] = {{"kind", "internal"}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 1;
    }
}
