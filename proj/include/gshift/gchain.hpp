#ifndef GSHIFT_GCHAIN_HPP
#define GSHIFT_GCHAIN_HPP

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "gshift/gfunction.hpp"
#include "gshift/transfer.hpp"

namespace gshift {

/// SplitMix64 finalizer; good avalanche, used only for seed derivation.
std::uint64_t splitmix64(std::uint64_t x);

/// Independent stream seed for one replica, a pure function of
/// (master_seed, replica). Worker counts never enter.
std::uint64_t replica_seed(std::uint64_t master_seed, std::uint64_t replica);

/// mt19937_64 plus an explicit 53-bit uniform, so draws are fully
/// standard-specified and reproducible across toolchains.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : gen_(seed) {}
    std::uint64_t next_u64() { return gen_(); }
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

  private:
    std::mt19937_64 gen_;
};

/// Inverse-CDF draw: cumulative sums in symbol order, first symbol whose
/// cumulative bracket contains u; the last symbol absorbs the residual
/// normalization slack (< 1e-12).
Symbol sample_symbol(std::span<const double> probs, double u);

/// State of one simulated g-chain: the most recent window_cap coordinates
/// of the current one-sided point (index 0 newest), closed by the anchor.
struct ChainState {
    Word window;
    Anchor anchor;
    std::uint32_t window_cap = 64;
    std::uint64_t t = 0;
    std::uint64_t stream_id = 0;
};

/// One backward-prepending step: sample s with probability g(s . window .
/// anchor), prepend it, advance t. Returns the sampled symbol.
Symbol step(const GFunctionSpec& spec, TransitionEvaluator& ev, ChainState& state,
            RngStream& rng);
Symbol step(const GFunctionSpec& spec, ChainState& state, RngStream& rng);

/// R independent replicas of (x_{-1}, ..., x_{-n}); path index -t lives at
/// array index t-1. A pure function of (spec, anchor, n, R, master_seed).
struct PathEnsemble {
    Alphabet alphabet;
    Anchor anchor;
    std::uint64_t replicas = 0;
    std::uint64_t length = 0;
    std::uint64_t master_seed = 0;
    std::uint32_t window_cap = 64;
    double per_step_distortion = 0.0; // envelope v_W; 0 for finite-range g
    std::vector<std::uint64_t> seeds;
    std::vector<Symbol> symbols; // replica-major

    std::span<const Symbol> path(std::uint64_t r) const {
        return {symbols.data() + r * length, length};
    }
};

PathEnsemble sample_paths(const GFunctionSpec& spec, const Anchor& anchor,
                          std::uint64_t n, std::uint64_t replicas,
                          std::uint64_t master_seed, std::uint32_t window_cap = 64);
PathEnsemble sample_paths_serial(const GFunctionSpec& spec, const Anchor& anchor,
                                 std::uint64_t n, std::uint64_t replicas,
                                 std::uint64_t master_seed,
                                 std::uint32_t window_cap = 64);

/// Word counts at the given depth over all post-burn-in positions t in
/// (burn_in, n] and all replicas: the word at position t reads the newest
/// `depth` coordinates of the point, anchor-closed for t < depth. The same
/// position set serves every depth, so marginalizing the oldest coordinate
/// of the depth-m counts reproduces the depth-(m-1) counts exactly.
std::vector<std::uint64_t> empirical_counts(const PathEnsemble& ensemble, int depth,
                                            std::uint64_t burn_in);

MeasureVector empirical_measure(const PathEnsemble& ensemble, int depth,
                                std::uint64_t burn_in);

struct ErgodicAverage {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t replicas = 0;
    std::uint64_t positions = 0; // per replica
};

/// Time-and-replica average of f over the sliding window, with standard
/// error from replica-level batch means. Welford accumulation keeps the
/// constant-observable case exact.
ErgodicAverage ergodic_average(const CylinderFunction& f,
                               const PathEnsemble& ensemble, std::uint64_t burn_in);

} // namespace gshift

#endif
