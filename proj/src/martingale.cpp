#include "gshift/martingale.hpp"

#include <algorithm>
#include <cmath>

namespace gshift {

namespace {

// Both kernel rows for the next step given the history so far.
inline void step_rows(TransitionEvaluator& ev, std::span<const Symbol> history,
                      const Anchor& omega, const Anchor& omega_tilde,
                      std::span<double> p, std::span<double> pt) {
    ev.kernel_history(history, omega, p);
    ev.kernel_history(history, omega_tilde, pt);
}

inline double kl_row(std::span<const double> pt, std::span<const double> p,
                     std::span<double> log_ratio) {
    double kl = 0.0;
    for (std::size_t s = 0; s < pt.size(); ++s) {
        log_ratio[s] = std::log(pt[s] / p[s]);
        kl += pt[s] * log_ratio[s];
    }
    return kl;
}

} // namespace

MartingaleTrace likelihood_trace(const GFunctionSpec& spec, const Anchor& omega,
                                 const Anchor& omega_tilde, std::uint64_t n,
                                 std::uint64_t seed) {
    const std::size_t A = static_cast<std::size_t>(spec.alphabet().size());
    MartingaleTrace tr;
    tr.seed = seed;
    tr.symbols.reserve(n);
    tr.logM.assign(n + 1, 0.0);
    tr.A.assign(n + 1, 0.0);
    tr.eta.assign(n + 1, 0.0);

    TransitionEvaluator ev(spec);
    RngStream rng(seed);
    double p[kMaxAlphabetSize], pt[kMaxAlphabetSize], lr[kMaxAlphabetSize];
    for (std::uint64_t t = 1; t <= n; ++t) {
        const std::span<const Symbol> hist(tr.symbols.data(), t - 1);
        step_rows(ev, hist, omega, omega_tilde, {p, A}, {pt, A});
        const double kl = kl_row({pt, A}, {p, A}, {lr, A});
        const Symbol s = sample_symbol({pt, A}, rng.uniform());
        tr.symbols.push_back(s);
        tr.logM[t] = tr.logM[t - 1] + lr[s];
        tr.A[t] = tr.A[t - 1] + kl;
        tr.eta[t] = tr.logM[t] - tr.A[t];
    }
    return tr;
}

namespace {

TraceEnsemble make_traces(const GFunctionSpec& spec, const Anchor& omega,
                          const Anchor& omega_tilde, std::uint64_t n,
                          std::uint64_t replicas, std::uint64_t master_seed,
                          bool parallel) {
    if (n < 1) throw std::invalid_argument("trace length must be >= 1");
    if (replicas < 1) throw std::invalid_argument("replica count must be >= 1");
    TraceEnsemble e{omega, omega_tilde, n, master_seed, {}};
    e.traces.resize(replicas);
    const std::int64_t R = static_cast<std::int64_t>(replicas);
#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t r = 0; r < R; ++r)
        e.traces[static_cast<std::uint64_t>(r)] = likelihood_trace(
            spec, omega, omega_tilde, n,
            replica_seed(master_seed, static_cast<std::uint64_t>(r)));
    return e;
}

} // namespace

TraceEnsemble simulate_traces(const GFunctionSpec& spec, const Anchor& omega,
                              const Anchor& omega_tilde, std::uint64_t n,
                              std::uint64_t replicas, std::uint64_t master_seed) {
    return make_traces(spec, omega, omega_tilde, n, replicas, master_seed, true);
}

TraceEnsemble simulate_traces_serial(const GFunctionSpec& spec, const Anchor& omega,
                                     const Anchor& omega_tilde, std::uint64_t n,
                                     std::uint64_t replicas,
                                     std::uint64_t master_seed) {
    return make_traces(spec, omega, omega_tilde, n, replicas, master_seed, false);
}

double compensator_increment(const GFunctionSpec& spec, const Anchor& omega,
                             const Anchor& omega_tilde,
                             std::span<const Symbol> history) {
    const std::size_t A = static_cast<std::size_t>(spec.alphabet().size());
    TransitionEvaluator ev(spec);
    double p[kMaxAlphabetSize], pt[kMaxAlphabetSize], lr[kMaxAlphabetSize];
    step_rows(ev, history, omega, omega_tilde, {p, A}, {pt, A});
    return kl_row({pt, A}, {p, A}, {lr, A});
}

std::vector<double> recompute_compensator(const GFunctionSpec& spec,
                                          const Anchor& omega,
                                          const Anchor& omega_tilde,
                                          std::span<const Symbol> symbols) {
    const std::size_t A = static_cast<std::size_t>(spec.alphabet().size());
    TransitionEvaluator ev(spec);
    double p[kMaxAlphabetSize], pt[kMaxAlphabetSize], lr[kMaxAlphabetSize];
    std::vector<double> out(symbols.size() + 1, 0.0);
    for (std::uint64_t t = 1; t <= symbols.size(); ++t) {
        step_rows(ev, symbols.subspan(0, t - 1), omega, omega_tilde, {p, A},
                  {pt, A});
        out[t] = out[t - 1] + kl_row({pt, A}, {p, A}, {lr, A});
    }
    return out;
}

DoobReport doob_check(const TraceEnsemble& ensemble,
                      const VariationEnvelope& envelope) {
    if (ensemble.traces.size() < 100)
        throw std::invalid_argument("doob_check needs at least 100 replicas");
    const std::uint64_t n = ensemble.length;
    const auto cum = envelope.cumulative(n);

    DoobReport report;
    if (cum.square_sum[n - 1] == 0.0) {
        report.identically_zero = true;
        return report;
    }
    report.series.reserve(n);
    for (std::uint64_t t = 1; t <= n; ++t) {
        const double pss = cum.square_sum[t - 1];
        if (pss == 0.0) continue; // increments are exactly zero up to here
        double a_max = 0.0, eta_sq_mean = 0.0;
        std::uint64_t count = 0;
        for (const MartingaleTrace& tr : ensemble.traces) {
            a_max = std::max(a_max, tr.A[t]);
            ++count;
            const double e2 = tr.eta[t] * tr.eta[t];
            eta_sq_mean += (e2 - eta_sq_mean) / static_cast<double>(count);
        }
        DoobPoint pt{t, a_max / pss, eta_sq_mean / pss};
        report.c1_sup = std::max(report.c1_sup, pt.c1);
        report.c2_sup = std::max(report.c2_sup, pt.c2);
        report.series.push_back(pt);
    }
    return report;
}

std::vector<TightnessRow> tightness_stat(const TraceEnsemble& ensemble,
                                         std::span<const double> k_grid) {
    for (std::size_t i = 1; i < k_grid.size(); ++i)
        if (!(k_grid[i] > k_grid[i - 1]))
            throw std::invalid_argument("K grid must be strictly increasing");
    std::vector<TightnessRow> rows;
    rows.reserve(k_grid.size());
    const double r_count = static_cast<double>(ensemble.traces.size());
    for (double K : k_grid) {
        TightnessRow row{K, 0.0, 0};
        for (std::uint64_t t = 1; t <= ensemble.length; ++t) {
            std::uint64_t exceed = 0;
            for (const MartingaleTrace& tr : ensemble.traces)
                if (tr.logM[t] > K) ++exceed;
            const double frac = static_cast<double>(exceed) / r_count;
            if (frac > row.sup_frac) {
                row.sup_frac = frac;
                row.argmax_n = t;
            }
        }
        rows.push_back(row);
    }
    return rows;
}

} // namespace gshift
