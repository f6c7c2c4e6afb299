// Serial reference vs OpenMP kernels: times both paths on sizeable
// instances (best of three runs) and verifies the outputs agree bitwise.

#include <cstdio>
#include <cstring>
#include <vector>

#include "gshift/gchain.hpp"
#include "gshift/gfunction.hpp"
#include "gshift/martingale.hpp"
#include "gshift/parallel.hpp"
#include "gshift/transfer.hpp"

using namespace gshift;

namespace {

GFunctionSpec random_finite_range(Alphabet a, int k, std::uint64_t seed) {
    RngStream rng(seed);
    const std::uint64_t contexts = a.pow(k - 1);
    std::vector<double> table(a.num_words(k));
    for (std::uint64_t u = 0; u < contexts; ++u) {
        double sum = 0.0;
        for (int s = 0; s < a.size(); ++s) {
            const double v = 0.1 + rng.uniform();
            table[static_cast<std::uint64_t>(s) * contexts + u] = v;
            sum += v;
        }
        for (int s = 0; s < a.size(); ++s)
            table[static_cast<std::uint64_t>(s) * contexts + u] /= sum;
    }
    return make_finite_range(a, k, std::move(table), 0.01);
}

CylinderFunction random_function(Alphabet a, int range, std::uint64_t seed) {
    RngStream rng(seed);
    std::vector<double> v(a.num_words(range));
    for (double& x : v) x = rng.uniform();
    return CylinderFunction(a, range, std::move(v));
}

template <class F>
double best_of_three(F&& run) {
    double best = 1e300;
    for (int rep = 0; rep < 3; ++rep) {
        const double t0 = wall_time();
        run();
        best = std::min(best, wall_time() - t0);
    }
    return best;
}

void print_row(const char* name, double serial_s, double parallel_s,
               bool identical) {
    std::printf("%-28s %10.4f s %10.4f s   x%5.2f   %s\n", name, serial_s,
                parallel_s, serial_s / parallel_s,
                identical ? "bitwise-identical" : "MISMATCH");
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() &&
           std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

} // namespace

int main() {
    const Alphabet a(2);
    std::printf("workers available: %d\n\n", max_workers());
    std::printf("%-28s %12s %12s %8s\n", "kernel", "serial", "parallel", "speedup");

    {
        const GFunctionSpec g = random_finite_range(a, 12, 11);
        const CylinderFunction f = random_function(a, 22, 12);
        CylinderFunction rs = apply_transfer_serial(g, f);
        CylinderFunction rp = apply_transfer(g, f);
        const double ts = best_of_three([&] { rs = apply_transfer_serial(g, f); });
        const double tp = best_of_three([&] { rp = apply_transfer(g, f); });
        print_row("apply_transfer (2^22 cells)", ts, tp,
                  same_bits(rs.values(), rp.values()));
    }
    {
        const GFunctionSpec g = random_finite_range(a, 16, 21);
        InvariantMeasure ms = invariant_measure_serial(g, 1e-13);
        InvariantMeasure mp = invariant_measure(g, 1e-13);
        const double ts =
            best_of_three([&] { ms = invariant_measure_serial(g, 1e-13); });
        const double tp = best_of_three([&] { mp = invariant_measure(g, 1e-13); });
        print_row("invariant_measure (k=16)", ts, tp,
                  same_bits(ms.pi.p, mp.pi.p) && ms.sweeps == mp.sweeps);
    }
    {
        const GFunctionSpec g = random_finite_range(a, 2, 31);
        PathEnsemble es = sample_paths_serial(g, Anchor{}, 1000, 20000, 99);
        PathEnsemble ep = sample_paths(g, Anchor{}, 1000, 20000, 99);
        const double ts = best_of_three(
            [&] { es = sample_paths_serial(g, Anchor{}, 1000, 20000, 99); });
        const double tp =
            best_of_three([&] { ep = sample_paths(g, Anchor{}, 1000, 20000, 99); });
        print_row("sample_paths (2e7 steps)", ts, tp, es.symbols == ep.symbols);
    }
    {
        const GFunctionSpec g = make_long_range(a, 1.75, 0.05, {1, -1});
        const Anchor omega(0), omega_tilde(1);
        TraceEnsemble ts_e = simulate_traces_serial(g, omega, omega_tilde, 1500, 200, 7);
        TraceEnsemble tp_e = simulate_traces(g, omega, omega_tilde, 1500, 200, 7);
        const double ts = best_of_three([&] {
            ts_e = simulate_traces_serial(g, omega, omega_tilde, 1500, 200, 7);
        });
        const double tp = best_of_three(
            [&] { tp_e = simulate_traces(g, omega, omega_tilde, 1500, 200, 7); });
        bool same = ts_e.traces.size() == tp_e.traces.size();
        for (std::size_t i = 0; same && i < ts_e.traces.size(); ++i)
            same = ts_e.traces[i].logM == tp_e.traces[i].logM &&
                   ts_e.traces[i].symbols == tp_e.traces[i].symbols;
        print_row("likelihood traces (n=1500)", ts, tp, same);
    }
    return 0;
}
