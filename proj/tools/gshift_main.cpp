#include <CLI11.hpp>

#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "gshift/config.hpp"
#include "gshift/gchain.hpp"
#include "gshift/io.hpp"
#include "gshift/martingale.hpp"
#include "gshift/parallel.hpp"
#include "gshift/transfer.hpp"
#include "gshift/version.hpp"

namespace {

using namespace gshift;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitLimit = 3;
constexpr int kExitNoConvergence = 4;

struct CliFlags {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int workers = -1;
    bool has_out = false;
    bool has_seed = false;
    bool has_workers = false;
};

RunConfig resolve_config(const CliFlags& flags) {
    std::map<std::string, std::string> entries;
    if (!flags.config_path.empty()) entries = load_key_values(flags.config_path);
    RunConfig cfg = RunConfig::from_entries(entries);
    if (flags.has_out) cfg.out_dir = flags.out_dir;
    if (flags.has_seed) cfg.seed = flags.seed;
    if (flags.has_workers) cfg.workers = flags.workers;
    return cfg;
}

std::string out_path(const RunConfig& cfg, const std::string& table) {
    return (std::filesystem::path(cfg.out_dir) / (cfg.experiment + "." + table))
        .string();
}

using Meta = std::vector<std::pair<std::string, std::string>>;

const char* verdict_str(Verdict v) { return v == Verdict::yes ? "yes" : "no"; }

Meta base_meta(const RunConfig& cfg, const std::string& command,
               const GFunctionSpec& spec) {
    Meta meta;
    meta.emplace_back("library_version", kVersion);
    meta.emplace_back("command", command);
    meta.emplace_back("master_seed", std::to_string(cfg.seed));
    meta.emplace_back("family", spec.family_name());
    const RegimeReport rep = spec.classify(std::min<std::uint64_t>(cfg.horizon, 1000));
    meta.emplace_back("regime.summable", verdict_str(rep.summable));
    meta.emplace_back("regime.square_summable", verdict_str(rep.square_summable));
    return meta;
}

void finish_manifest(const RunConfig& cfg, Meta meta, double started) {
    meta.emplace_back("wall_clock_seconds", format_double(wall_time() - started));
    write_manifest(out_path(cfg, "manifest"), meta, cfg.echo());
}

void run_variations(const RunConfig& cfg) {
    const double t0 = wall_time();
    const GFunctionSpec spec = cfg.build_spec();
    write_variations_csv(out_path(cfg, "variations.csv"), spec, cfg.horizon,
                         cfg.brute_depth);
    const RegimeReport rep = spec.classify(cfg.horizon);
    Meta meta = base_meta(cfg, "variations", spec);
    meta.emplace_back("regime.partial_sum", format_double(rep.partial_sum));
    meta.emplace_back("regime.partial_sq_sum",
                      format_double(rep.partial_square_sum));
    meta.emplace_back("regime.note", rep.description);
    finish_manifest(cfg, std::move(meta), t0);
}

void run_iterate(const RunConfig& cfg) {
    const double t0 = wall_time();
    const GFunctionSpec spec = cfg.build_spec();
    const CylinderFunction f = cfg.build_observable();
    const ConvergenceResult res =
        convergence_to_mean(spec, f, cfg.steps, cfg.depth, cfg.tol);
    write_profile_csv(out_path(cfg, "profile.csv"), res.profile);
    Meta meta = base_meta(cfg, "iterate", spec);
    meta.emplace_back("mu_f", format_double(res.mu_f));
    meta.emplace_back("method", res.exact ? "exact" : "truncated");
    if (!res.exact) {
        meta.emplace_back("truncation_depth", std::to_string(res.truncation_depth));
        meta.emplace_back("bias_per_step", format_double(res.bias_per_step));
    }
    finish_manifest(cfg, std::move(meta), t0);
}

void run_invariant(const RunConfig& cfg) {
    const double t0 = wall_time();
    const GFunctionSpec spec = cfg.build_spec();
    const bool exact = spec.is_finite_range();
    const GFunctionSpec g = exact ? spec : spec.truncated(cfg.depth);
    const InvariantMeasure inv = invariant_measure(g, cfg.tol, cfg.max_iters);
    write_measure_csv(out_path(cfg, "invariant.csv"), inv.pi);
    Meta meta = base_meta(cfg, "invariant", spec);
    meta.emplace_back("method", exact ? "exact" : "truncated");
    meta.emplace_back("range", std::to_string(g.range()));
    meta.emplace_back("residual_l1", format_double(inv.residual_l1));
    meta.emplace_back("sweeps", std::to_string(inv.sweeps));
    finish_manifest(cfg, std::move(meta), t0);
}

void run_simulate(const RunConfig& cfg) {
    const double t0 = wall_time();
    const GFunctionSpec spec = cfg.build_spec();
    const PathEnsemble ens = sample_paths(spec, spec.tail_anchor(),
                                          cfg.path_length, cfg.replicas, cfg.seed,
                                          cfg.window);
    const MeasureVector emp =
        empirical_measure(ens, cfg.empirical_depth, cfg.burn_in);
    write_measure_csv(out_path(cfg, "empirical.csv"), emp);
    write_paths_binary(out_path(cfg, "paths.bin"), ens);
    write_paths_manifest_csv(out_path(cfg, "paths.csv"), ens);
    const ErgodicAverage avg =
        ergodic_average(cfg.build_observable(), ens, cfg.burn_in);
    Meta meta = base_meta(cfg, "simulate", spec);
    meta.emplace_back("per_step_distortion", format_double(ens.per_step_distortion));
    meta.emplace_back("ergodic_mean", format_double(avg.mean));
    meta.emplace_back("ergodic_std_error", format_double(avg.std_error));
    finish_manifest(cfg, std::move(meta), t0);
}

void run_martingale(const RunConfig& cfg) {
    const double t0 = wall_time();
    const GFunctionSpec spec = cfg.build_spec();
    const Anchor omega = cfg.parse_anchor_string(cfg.mart_omega);
    const Anchor omega_tilde = cfg.parse_anchor_string(cfg.mart_omega_tilde);
    const TraceEnsemble ens = simulate_traces(spec, omega, omega_tilde,
                                              cfg.path_length, cfg.replicas,
                                              cfg.seed);
    write_trace_csv(out_path(cfg, "trace.csv"), ens);
    write_tightness_csv(out_path(cfg, "tightness.csv"),
                        tightness_stat(ens, cfg.k_grid));
    Meta meta = base_meta(cfg, "martingale", spec);
    if (cfg.replicas >= 100) {
        const DoobReport doob = doob_check(ens, spec.envelope());
        if (doob.identically_zero) {
            meta.emplace_back("doob", "identically zero");
        } else {
            meta.emplace_back("doob.c1_sup", format_double(doob.c1_sup));
            meta.emplace_back("doob.c2_sup", format_double(doob.c2_sup));
        }
    } else {
        meta.emplace_back("doob", "skipped (needs >= 100 replicas)");
    }
    finish_manifest(cfg, std::move(meta), t0);
}

void run_rate(const RunConfig& cfg) {
    const double t0 = wall_time();
    const GFunctionSpec spec = cfg.build_spec();
    const CylinderFunction f = cfg.build_observable();
    const ConvergenceResult res =
        convergence_to_mean(spec, f, cfg.steps, cfg.depth, cfg.tol);
    const RateFit fit = rate_fit(res.profile);
    write_rate_csv(out_path(cfg, "rate.csv"), fit);
    Meta meta = base_meta(cfg, "rate", spec);
    meta.emplace_back("label", "EXPLORATORY");
    if (fit.exact_convergence)
        meta.emplace_back("exact_convergence_step", std::to_string(fit.exact_step));
    if (fit.geometric.points > 0) {
        meta.emplace_back("geometric_slope", format_double(fit.geometric.slope));
        meta.emplace_back("polynomial_exponent",
                          format_double(fit.polynomial.slope));
        meta.emplace_back("better_fit", fit.better_fit);
    }
    finish_manifest(cfg, std::move(meta), t0);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"g-functions, transfer-operator iteration, g-chain simulation "
                 "and likelihood-ratio martingales over finite-alphabet shifts"};
    app.require_subcommand(1);

    CliFlags flags;
    std::vector<CLI::App*> subs;
    for (const char* name :
         {"variations", "iterate", "invariant", "simulate", "martingale", "rate"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", flags.config_path, "key = value config file");
        sub->add_option("--out", flags.out_dir, "output directory")
            ->each([&flags](const std::string&) { flags.has_out = true; });
        sub->add_option("--seed", flags.seed, "master seed (u64)")
            ->each([&flags](const std::string&) { flags.has_seed = true; });
        sub->add_option("--workers", flags.workers, "parallel worker cap")
            ->each([&flags](const std::string&) { flags.has_workers = true; });
        subs.push_back(sub);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const RunConfig cfg = resolve_config(flags);
        set_workers(cfg.workers);
        std::filesystem::create_directories(cfg.out_dir);
        const std::string cmd = app.get_subcommands().front()->get_name();
        if (cmd == "variations") run_variations(cfg);
        else if (cmd == "iterate") run_iterate(cfg);
        else if (cmd == "invariant") run_invariant(cfg);
        else if (cmd == "simulate") run_simulate(cfg);
        else if (cmd == "martingale") run_martingale(cfg);
        else run_rate(cfg);
        return kExitOk;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const LimitError& e) {
        std::fprintf(stderr, "resource limit: %s\n", e.what());
        return kExitLimit;
    } catch (const ConvergenceError& e) {
        std::fprintf(stderr, "did not converge: %s\n", e.what());
        return kExitNoConvergence;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
