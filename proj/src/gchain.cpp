#include "gshift/gchain.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace gshift {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t replica_seed(std::uint64_t master_seed, std::uint64_t replica) {
    return splitmix64(master_seed + (replica + 1) * 0x9E3779B97F4A7C15ULL);
}

Symbol sample_symbol(std::span<const double> probs, double u) {
    double cum = 0.0;
    const std::size_t last = probs.size() - 1;
    for (std::size_t s = 0; s < last; ++s) {
        const double next = cum + probs[s];
        if (u < next) {
            assert(u >= cum && u < next);
            return static_cast<Symbol>(s);
        }
        cum = next;
    }
    assert(u >= cum);
    return static_cast<Symbol>(last);
}

Symbol step(const GFunctionSpec& spec, TransitionEvaluator& ev, ChainState& state,
            RngStream& rng) {
    double row[kMaxAlphabetSize];
    std::span<double> probs(row, static_cast<std::size_t>(spec.alphabet().size()));
    ev.kernel(state.window, state.anchor, probs);
    const Symbol s = sample_symbol(probs, rng.uniform());
    state.window.insert(state.window.begin(), s);
    if (state.window.size() > state.window_cap) state.window.pop_back();
    ++state.t;
    return s;
}

Symbol step(const GFunctionSpec& spec, ChainState& state, RngStream& rng) {
    TransitionEvaluator ev(spec);
    return step(spec, ev, state, rng);
}

namespace {

void run_replica(const GFunctionSpec& spec, const Anchor& anchor, std::uint64_t n,
                 std::uint32_t window_cap, std::uint64_t replica,
                 std::uint64_t seed, Symbol* out) {
    TransitionEvaluator ev(spec);
    RngStream rng(seed);
    ChainState state{Word{}, anchor, window_cap, 0, replica};
    state.window.reserve(window_cap);
    for (std::uint64_t t = 0; t < n; ++t) out[t] = step(spec, ev, state, rng);
}

PathEnsemble make_ensemble(const GFunctionSpec& spec, const Anchor& anchor,
                           std::uint64_t n, std::uint64_t replicas,
                           std::uint64_t master_seed, std::uint32_t window_cap,
                           bool parallel) {
    if (n < 1) throw std::invalid_argument("path length must be >= 1");
    if (replicas < 1) throw std::invalid_argument("replica count must be >= 1");
    if (window_cap < 1) throw std::invalid_argument("window cap must be >= 1");
    if (spec.is_finite_range() && spec.range() - 1 > static_cast<int>(window_cap))
        throw std::invalid_argument("window cap too small for the range of g");

    PathEnsemble e{spec.alphabet(), anchor, replicas, n, master_seed, window_cap,
                   0.0,           {},     {}};
    if (!spec.is_finite_range())
        e.per_step_distortion = spec.envelope().value(window_cap);
    e.seeds.resize(replicas);
    for (std::uint64_t r = 0; r < replicas; ++r)
        e.seeds[r] = replica_seed(master_seed, r);
    e.symbols.resize(replicas * n);

    const std::int64_t R = static_cast<std::int64_t>(replicas);
#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t r = 0; r < R; ++r)
        run_replica(spec, anchor, n, window_cap, static_cast<std::uint64_t>(r),
                    e.seeds[static_cast<std::uint64_t>(r)],
                    e.symbols.data() + static_cast<std::uint64_t>(r) * n);
    return e;
}

} // namespace

PathEnsemble sample_paths(const GFunctionSpec& spec, const Anchor& anchor,
                          std::uint64_t n, std::uint64_t replicas,
                          std::uint64_t master_seed, std::uint32_t window_cap) {
    return make_ensemble(spec, anchor, n, replicas, master_seed, window_cap, true);
}

PathEnsemble sample_paths_serial(const GFunctionSpec& spec, const Anchor& anchor,
                                 std::uint64_t n, std::uint64_t replicas,
                                 std::uint64_t master_seed,
                                 std::uint32_t window_cap) {
    return make_ensemble(spec, anchor, n, replicas, master_seed, window_cap, false);
}

namespace {

// Word index at position t: newest `depth` coordinates of the point after
// t steps, closed by the anchor when t < depth.
inline std::uint64_t word_index_at(std::span<const Symbol> path,
                                   const Anchor& anchor, int A, int depth,
                                   std::uint64_t t) {
    std::uint64_t idx = 0;
    for (int j = 0; j < depth; ++j) {
        const std::uint64_t jj = static_cast<std::uint64_t>(j);
        const Symbol s = jj < t ? path[t - 1 - jj] : anchor.at(jj - t);
        idx = idx * static_cast<std::uint64_t>(A) + s;
    }
    return idx;
}

} // namespace

std::vector<std::uint64_t> empirical_counts(const PathEnsemble& ensemble, int depth,
                                            std::uint64_t burn_in) {
    if (depth < 0) throw std::invalid_argument("negative word depth");
    if (ensemble.length < burn_in ||
        ensemble.length - burn_in < static_cast<std::uint64_t>(depth))
        throw std::invalid_argument("depth exceeds usable path length");
    const int A = ensemble.alphabet.size();
    const std::uint64_t table = ensemble.alphabet.num_words(depth);
    std::vector<std::uint64_t> counts(table, 0);

    const std::int64_t R = static_cast<std::int64_t>(ensemble.replicas);
#pragma omp parallel
    {
        std::vector<std::uint64_t> local(table, 0);
#pragma omp for schedule(static) nowait
        for (std::int64_t r = 0; r < R; ++r) {
            const auto path = ensemble.path(static_cast<std::uint64_t>(r));
            for (std::uint64_t t = burn_in + 1; t <= ensemble.length; ++t)
                ++local[word_index_at(path, ensemble.anchor, A, depth, t)];
        }
#pragma omp critical
        for (std::uint64_t i = 0; i < table; ++i) counts[i] += local[i];
    }
    return counts;
}

MeasureVector empirical_measure(const PathEnsemble& ensemble, int depth,
                                std::uint64_t burn_in) {
    const std::vector<std::uint64_t> counts =
        empirical_counts(ensemble, depth, burn_in);
    const double total = static_cast<double>(ensemble.replicas) *
                         static_cast<double>(ensemble.length - burn_in);
    std::vector<double> p(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i)
        p[i] = static_cast<double>(counts[i]) / total;
    return {ensemble.alphabet, depth, std::move(p)};
}

ErgodicAverage ergodic_average(const CylinderFunction& f,
                               const PathEnsemble& ensemble,
                               std::uint64_t burn_in) {
    const int depth = f.range();
    if (depth > static_cast<int>(ensemble.window_cap))
        throw std::invalid_argument("observable range exceeds the chain window");
    if (ensemble.length < burn_in ||
        ensemble.length - burn_in < static_cast<std::uint64_t>(depth))
        throw std::invalid_argument("depth exceeds usable path length");
    const int A = ensemble.alphabet.size();
    const std::uint64_t positions = ensemble.length - burn_in;

    std::vector<double> replica_mean(ensemble.replicas);
    const std::int64_t R = static_cast<std::int64_t>(ensemble.replicas);
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < R; ++r) {
        const auto path = ensemble.path(static_cast<std::uint64_t>(r));
        double mean = 0.0;
        std::uint64_t count = 0;
        for (std::uint64_t t = burn_in + 1; t <= ensemble.length; ++t) {
            const double x =
                f.at_index(word_index_at(path, ensemble.anchor, A, depth, t));
            ++count;
            mean += (x - mean) / static_cast<double>(count);
        }
        replica_mean[static_cast<std::uint64_t>(r)] = mean;
    }

    // Welford over replica means, in replica order.
    double mean = 0.0, m2 = 0.0;
    for (std::uint64_t r = 0; r < ensemble.replicas; ++r) {
        const double x = replica_mean[r];
        const double d0 = x - mean;
        mean += d0 / static_cast<double>(r + 1);
        m2 += d0 * (x - mean);
    }
    ErgodicAverage out;
    out.mean = mean;
    out.replicas = ensemble.replicas;
    out.positions = positions;
    out.std_error =
        ensemble.replicas > 1
            ? std::sqrt(m2 / (static_cast<double>(ensemble.replicas - 1) *
                              static_cast<double>(ensemble.replicas)))
            : 0.0;
    return out;
}

} // namespace gshift
