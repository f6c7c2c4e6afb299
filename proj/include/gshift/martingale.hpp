#ifndef GSHIFT_MARTINGALE_HPP
#define GSHIFT_MARTINGALE_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "gshift/gchain.hpp"
#include "gshift/gfunction.hpp"

namespace gshift {

/// Likelihood-ratio record of one forward g-chain replica against a second
/// deterministic past. The path is sampled under the omega-tilde chain;
/// with P_t = g(x_{-t}, ..., x_{-1}, omega...) and Pt_t the same under
/// omega-tilde,
///   logM[t] = sum_{s<=t} log(Pt_s / P_s),
///   A[t]    = sum_{s<=t} KL(Pt-row || P-row)   (exact, previsible),
///   eta[t]  = logM[t] - A[t]                   (identity at bit level).
/// Arrays are indexed by step t = 0..n with logM[0] = A[0] = eta[0] = 0;
/// symbols[t-1] holds x_{-t}.
struct MartingaleTrace {
    std::uint64_t seed = 0;
    std::vector<Symbol> symbols;
    std::vector<double> logM;
    std::vector<double> A;
    std::vector<double> eta;
};

MartingaleTrace likelihood_trace(const GFunctionSpec& spec, const Anchor& omega,
                                 const Anchor& omega_tilde, std::uint64_t n,
                                 std::uint64_t seed);

struct TraceEnsemble {
    Anchor omega;
    Anchor omega_tilde;
    std::uint64_t length = 0;
    std::uint64_t master_seed = 0;
    std::vector<MartingaleTrace> traces;
};

TraceEnsemble simulate_traces(const GFunctionSpec& spec, const Anchor& omega,
                              const Anchor& omega_tilde, std::uint64_t n,
                              std::uint64_t replicas, std::uint64_t master_seed);
TraceEnsemble simulate_traces_serial(const GFunctionSpec& spec, const Anchor& omega,
                                     const Anchor& omega_tilde, std::uint64_t n,
                                     std::uint64_t replicas,
                                     std::uint64_t master_seed);

/// Exact one-step compensator increment given the symbols generated so far:
/// sum_s Pt(s) log(Pt(s)/P(s)), a KL divergence, hence >= 0. Depends only
/// on the history, never on the next symbol.
double compensator_increment(const GFunctionSpec& spec, const Anchor& omega,
                             const Anchor& omega_tilde,
                             std::span<const Symbol> history);

/// Recompute the full compensator path from stored symbols alone; equals
/// the trace's A array bitwise (previsibility check).
std::vector<double> recompute_compensator(const GFunctionSpec& spec,
                                          const Anchor& omega,
                                          const Anchor& omega_tilde,
                                          std::span<const Symbol> symbols);

struct DoobPoint {
    std::uint64_t n = 0;
    double c1 = 0.0; // max over replicas of A[n] / partial_square_sum(n)
    double c2 = 0.0; // mean over replicas of eta[n]^2 / partial_square_sum(n)
};

struct DoobReport {
    bool identically_zero = false; // envelope square sum vanishes at horizon
    double c1_sup = 0.0;           // sup over n of the per-n c1
    double c2_sup = 0.0;
    std::vector<DoobPoint> series; // one point per n with positive square sum
};

/// Empirical counterparts of the Doob-decomposition constants: the ratios
/// that the square-summable hypothesis bounds. Needs >= 100 replicas.
DoobReport doob_check(const TraceEnsemble& ensemble,
                      const VariationEnvelope& envelope);

struct TightnessRow {
    double K = 0.0;
    double sup_frac = 0.0;     // max over n of fraction(logM[n] > K)
    std::uint64_t argmax_n = 0;
};

/// sup_n of the replica fraction with logM[n] > K, for each K in the grid.
std::vector<TightnessRow> tightness_stat(const TraceEnsemble& ensemble,
                                         std::span<const double> k_grid);

} // namespace gshift

#endif
