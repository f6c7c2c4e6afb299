// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failing criteria. Run a subset by listing criterion numbers as arguments.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gshift/config.hpp"
#include "gshift/gchain.hpp"
#include "gshift/io.hpp"
#include "gshift/martingale.hpp"
#include "gshift/parallel.hpp"
#include "gshift/tail_sums.hpp"
#include "gshift/transfer.hpp"
#include "oracles.hpp"

using namespace gshift;

namespace {

const Alphabet kBin(2);

GFunctionSpec fixture() {
    return make_finite_range(kBin, 2, {0.9, 0.2, 0.1, 0.8});
}

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
    void note(const std::string& what) {
        if (!detail.empty()) detail += "; ";
        detail += what;
    }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// --- criterion 1: normalization and positivity --------------------------

Check criterion1() {
    Check c;
    std::vector<GFunctionSpec> specs;
    specs.push_back(make_bernoulli(kBin, {0.3, 0.7}));
    specs.push_back(fixture());
    for (double alpha : {1.25, 1.75, 2.5})
        specs.push_back(make_long_range(kBin, alpha, 0.05, {1, -1}));

    std::mt19937_64 gen(1001);
    double worst_norm = 0.0, worst_floor = 1.0;
    for (const GFunctionSpec& spec : specs) {
        for (int trial = 0; trial < 1000; ++trial) {
            const int len = static_cast<int>(gen() % 16);
            Word ctx(static_cast<std::size_t>(len));
            for (Symbol& s : ctx) s = static_cast<Symbol>(gen() % 2);
            const auto row = spec.kernel(ctx);
            double sum = 0.0;
            for (double v : row) {
                sum += v;
                worst_floor = std::min(worst_floor, v);
            }
            worst_norm = std::max(worst_norm, std::abs(sum - 1.0));
        }
    }
    c.require(worst_norm <= 1e-12, "normalization residual " + fmt(worst_norm));
    c.require(worst_floor >= 0.05, "positivity floor " + fmt(worst_floor));
    c.note("max |sum-1| = " + fmt(worst_norm) + ", min g = " + fmt(worst_floor));
    return c;
}

// --- criterion 2: variation regime ---------------------------------------

// Independent tail closure: one long direct summation anchors T(N+1), then
// a backward recurrence fills T(n) = T(n+1) + n^-alpha.
std::vector<long double> tail_table_direct(double alpha, std::uint64_t N) {
    const std::uint64_t far = N + 3000000;
    long double anchor = 0.0L;
    for (std::uint64_t m = far - 1; m > N; --m)
        anchor += std::pow(static_cast<long double>(m),
                           -static_cast<long double>(alpha));
    anchor += std::pow(static_cast<long double>(far) - 0.5L,
                       1.0L - static_cast<long double>(alpha)) /
              (static_cast<long double>(alpha) - 1.0L);
    std::vector<long double> T(N + 2);
    T[N + 1] = anchor;
    for (std::uint64_t n = N; n >= 1; --n) {
        T[n] = T[n + 1] + std::pow(static_cast<long double>(n),
                                   -static_cast<long double>(alpha));
        if (n == 1) break;
    }
    return T;
}

Check criterion2() {
    Check c;
    const double cc = 0.05;
    for (double alpha : {1.75, 2.5}) {
        const GFunctionSpec lr = make_long_range(kBin, alpha, cc, {1, -1});
        const VariationEnvelope env = lr.envelope();
        const auto cum = env.cumulative(10000);
        const auto T = tail_table_direct(alpha, 10000);
        long double ps4 = 0.0L, pss4 = 0.0L;
        for (std::uint64_t n = 1; n <= 10000; ++n) {
            const long double v = 2.0L * static_cast<long double>(cc) * T[n];
            ps4 += v;
            pss4 += v * v;
        }
        const double pss_rel =
            std::abs(cum.square_sum[9999] / static_cast<double>(pss4) - 1.0);
        const double ps_rel =
            std::abs(cum.sum[9999] / static_cast<double>(ps4) - 1.0);
        c.require(pss_rel <= 0.01, "alpha=" + fmt(alpha) +
                                       " partial_sq_sum off by " + fmt(pss_rel));
        if (alpha == 1.75) {
            const double growth = cum.sum[9999] / cum.sum[999];
            c.require(growth > 1.5,
                      "divergence signature ratio " + fmt(growth) + " <= 1.5");
            c.note("alpha=1.75: pss(1e4) = " + fmt(cum.square_sum[9999]) +
                   " (rel err " + fmt(pss_rel) + "), sum ratio = " + fmt(growth));
        } else {
            c.require(ps_rel <= 0.01, "alpha=" + fmt(alpha) +
                                          " partial_sum off by " + fmt(ps_rel));
            c.note("alpha=2.5: sum rel err " + fmt(ps_rel) + ", sq rel err " +
                   fmt(pss_rel));
        }
    }
    return c;
}

// --- criterion 3: invariant-measure oracle --------------------------------

Check criterion3() {
    Check c;
    const GFunctionSpec fix = fixture();
    const InvariantMeasure inv = invariant_measure(fix);
    const auto dense = oracle::stationary_dense(fix);
    c.require(std::abs(inv.pi.p[0] - dense[0]) <= 1e-10 &&
                  std::abs(inv.pi.p[1] - dense[1]) <= 1e-10,
              "power iteration vs dense solve");
    c.require(std::abs(inv.pi.p[0] - 2.0 / 3.0) <= 1e-10, "pi[0] != 2/3");
    c.require(std::abs(inv.pi.p[1] - 1.0 / 3.0) <= 1e-10, "pi[1] != 1/3");
    const double mu11 = cylinder_measure(fix, inv.pi, Word{1, 1});
    c.require(std::abs(mu11 - 4.0 / 15.0) <= 1e-10, "mu[11] != 4/15");
    c.note("pi = (" + fmt(inv.pi.p[0]) + ", " + fmt(inv.pi.p[1]) +
           "), mu[11] = " + fmt(mu11));
    return c;
}

// --- criterion 4: convergence of L^n f on the fixture ---------------------

Check criterion4() {
    Check c;
    const GFunctionSpec fix = fixture();
    const CylinderFunction ind = CylinderFunction::indicator(kBin, Word{1});
    const ConvergenceResult res = convergence_to_mean(fix, ind, 200);

    // Brute-force recomputation through word-level operators and the dense
    // stationary solve.
    const auto dense = oracle::stationary_dense(fix);
    const MeasureVector pi_oracle{kBin, 1, {dense[0], dense[1]}};
    double mu_oracle = 0.0;
    for (const Word& w : kBin.enumerate_words(2))
        mu_oracle += ind.at(w) * cylinder_measure(fix, pi_oracle, w);
    CylinderFunction cur = ind;
    std::vector<double> e_oracle;
    for (int n = 0; n <= 2; ++n) {
        double e = 0.0;
        for (double v : cur.values()) e = std::max(e, std::abs(v - mu_oracle));
        e_oracle.push_back(e);
        cur = oracle::apply_transfer_words(fix, cur);
    }
    const double expected[3] = {2.0 / 3.0, 7.0 / 15.0, 49.0 / 150.0};
    for (int n = 0; n <= 2; ++n) {
        const double lib = *res.profile.rows[static_cast<std::size_t>(n)].err;
        c.require(std::abs(lib - e_oracle[static_cast<std::size_t>(n)]) <= 1e-12,
                  "e_" + std::to_string(n) + " vs brute force");
        c.require(std::abs(lib - expected[n]) <= 1e-12,
                  "e_" + std::to_string(n) + " vs exact rational");
    }
    const double e200 = *res.profile.rows[200].err;
    c.require(e200 < 1e-8, "e_200 = " + fmt(e200));
    bool monotone = true;
    for (std::size_t i = 1; i < res.profile.rows.size(); ++i)
        monotone = monotone &&
                   *res.profile.rows[i].err <= *res.profile.rows[i - 1].err;
    c.require(monotone, "error sequence not nonincreasing");
    c.note("e_0..2 match to 1e-12, e_200 = " + fmt(e200));
    return c;
}

// --- criterion 5: Bernoulli exactness --------------------------------------

Check criterion5() {
    Check c;
    const GFunctionSpec bern = make_bernoulli(kBin, {0.3, 0.7});
    const InvariantMeasure inv = invariant_measure(bern);
    std::mt19937_64 gen(55);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    double worst = 0.0;
    for (int m = 1; m <= 6; ++m) {
        std::vector<double> fv(kBin.num_words(m));
        for (double& v : fv) v = unif(gen);
        const CylinderFunction f(kBin, m, std::move(fv));
        const double mu_f = integrate(f, bern, inv.pi);
        CylinderFunction cur = f;
        for (int n = 1; n <= m + 2; ++n) {
            cur = apply_transfer(bern, cur);
            if (n >= m) {
                for (double v : cur.values())
                    worst = std::max(worst, std::abs(v - mu_f));
            }
        }
    }
    c.require(worst <= 1e-14, "max |L^n f - mu(f)| = " + fmt(worst));
    c.note("max deviation over m <= 6, n >= m: " + fmt(worst));
    return c;
}

// --- criterion 6: duality ---------------------------------------------------

Check criterion6() {
    Check c;
    std::mt19937_64 gen(66);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    double worst = 0.0;
    for (const GFunctionSpec& g : {fixture(), make_bernoulli(kBin, {0.3, 0.7})}) {
        const InvariantMeasure inv = invariant_measure(g);
        for (int trial = 0; trial < 100; ++trial) {
            const int m = static_cast<int>(gen() % 4);
            std::vector<double> fv(kBin.num_words(m));
            for (double& v : fv) v = unif(gen);
            worst = std::max(
                worst, duality_residual(g, CylinderFunction(kBin, m, std::move(fv)),
                                        inv.pi));
        }
    }
    c.require(worst <= 1e-10, "max duality residual " + fmt(worst));
    c.note("max |int Lf dmu - int f dmu| = " + fmt(worst));
    return c;
}

// --- criterion 7: g-chain consistency + worker-count bitwise stability ------

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "<missing:" + path + ">";
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Check criterion7() {
    Check c;
    const std::uint64_t master_seed = 20250811;
    const GFunctionSpec fix = fixture();
    const PathEnsemble e = sample_paths(fix, Anchor{}, 1000, 10000, master_seed);
    const InvariantMeasure inv = invariant_measure(fix);
    const MeasureVector emp = empirical_measure(e, 2, 100);

    // Binomial sigma with the chain's effective sample size: the two-state
    // prepend chain has second eigenvalue g(0,0)+g(1,1)-1 = 0.7.
    const double lambda = 0.7;
    const double n_eff = 10000.0 * 900.0 * (1 - lambda) / (1 + lambda);
    double worst_z = 0.0;
    for (const Word& w : kBin.enumerate_words(2)) {
        const double mu = cylinder_measure(fix, inv.pi, w);
        const double sigma = std::sqrt(mu * (1 - mu) / n_eff);
        worst_z = std::max(worst_z,
                           std::abs(emp.p[kBin.index_of(w)] - mu) / sigma);
    }
    c.require(worst_z <= 4.0, "depth-2 deviation " + fmt(worst_z) + " sigma");

    // CLI rerun with different worker caps: byte-identical outputs.
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "gshift_acceptance7";
    fs::remove_all(base);
    fs::create_directories(base);
    const fs::path cfg_path = base / "chain.cfg";
    {
        std::ofstream cfg(cfg_path);
        cfg << "experiment = chain\n"
            << "family.kind = finite_range\n"
            << "family.k = 2\n"
            << "family.values = 0.9,0.2,0.1,0.8\n"
            << "run.replicas = 10000\n"
            << "run.path_length = 1000\n"
            << "run.burn_in = 100\n"
            << "run.empirical_depth = 2\n"
            << "seed = " << master_seed << "\n";
    }
    for (int workers : {1, 8}) {
        const std::string cmd = std::string(GSHIFT_CLI_PATH) +
                                " simulate --config " + cfg_path.string() +
                                " --out " + (base / std::to_string(workers)).string() +
                                " --workers " + std::to_string(workers);
        const int rc = std::system(cmd.c_str());
        c.require(rc == 0, "CLI exit code " + std::to_string(rc));
    }
    for (const char* name : {"chain.empirical.csv", "chain.paths.csv",
                             "chain.paths.bin"}) {
        const std::string a = slurp((base / "1" / name).string());
        const std::string b = slurp((base / "8" / name).string());
        c.require(!a.empty() && a == b,
                  std::string(name) + " differs between worker counts");
    }
    c.note("worst word deviation " + fmt(worst_z) +
           " sigma; workers 1 vs 8 outputs byte-identical");
    return c;
}

// --- criteria 8 and 9: martingale machinery --------------------------------

struct MartingaleRun {
    TraceEnsemble ensemble;
    VariationEnvelope envelope;
};

const MartingaleRun& long_range_run() {
    static MartingaleRun run = [] {
        const GFunctionSpec lr = make_long_range(kBin, 1.75, 0.05, {1, -1});
        return MartingaleRun{simulate_traces(lr, Anchor(0), Anchor(1), 2000, 500,
                                             424242),
                             lr.envelope()};
    }();
    return run;
}

Check criterion8() {
    Check c;
    const GFunctionSpec fix = fixture();
    const double jump0 = std::log(0.2 / 0.9);
    const double jump1 = std::log(0.8 / 0.1);
    const TraceEnsemble fe = simulate_traces(fix, Anchor(0), Anchor(1), 50, 200, 7);
    bool structure = true;
    for (const MartingaleTrace& tr : fe.traces) {
        structure = structure && (tr.logM[1] == jump0 || tr.logM[1] == jump1);
        for (std::uint64_t t = 2; t <= 50; ++t)
            structure = structure && tr.logM[t] == tr.logM[1];
        for (std::uint64_t t = 1; t <= 50; ++t)
            structure = structure && tr.A[t] >= tr.A[t - 1] &&
                        tr.eta[t] == tr.logM[t] - tr.A[t];
    }
    c.require(structure, "finite-range trace structure");

    const MartingaleRun& run = long_range_run();
    const GFunctionSpec lr = make_long_range(kBin, 1.75, 0.05, {1, -1});
    const auto cum = run.envelope.cumulative(2000);
    bool bound_ok = true;
    for (const MartingaleTrace& tr : run.ensemble.traces)
        for (std::uint64_t t = 1; t <= 2000 && bound_ok; ++t)
            bound_ok = std::abs(tr.logM[t] - tr.logM[t - 1]) <=
                       cum.value[t - 1] / lr.delta();
    c.require(bound_ok, "increment bound |dlogM| <= v_t/delta");

    auto ratios = [&](std::uint64_t n) {
        double a_max = 0.0, eta2 = 0.0;
        std::uint64_t count = 0;
        for (const MartingaleTrace& tr : run.ensemble.traces) {
            a_max = std::max(a_max, tr.A[n]);
            ++count;
            eta2 += (tr.eta[n] * tr.eta[n] - eta2) / static_cast<double>(count);
        }
        const double pss = cum.square_sum[n - 1];
        return std::pair<double, double>{a_max / pss, eta2 / pss};
    };
    const auto [c1_1000, c2_1000] = ratios(1000);
    const auto [c1_2000, c2_2000] = ratios(2000);
    const double drift1 = std::abs(c1_2000 / c1_1000 - 1.0);
    const double drift2 = std::abs(c2_2000 / c2_1000 - 1.0);
    c.require(drift1 <= 0.25, "C1 drift " + fmt(drift1));
    c.require(drift2 <= 0.25, "C2 drift " + fmt(drift2));
    c.note("C1: " + fmt(c1_1000) + " -> " + fmt(c1_2000) + " (drift " +
           fmt(drift1) + "); C2: " + fmt(c2_1000) + " -> " + fmt(c2_2000) +
           " (drift " + fmt(drift2) + ")");
    return c;
}

Check criterion9() {
    Check c;
    const std::vector<double> grid{1.0, 2.0, 4.0, 8.0};
    const auto rows = tightness_stat(long_range_run().ensemble, grid);
    std::string table;
    for (const TightnessRow& r : rows) {
        if (!table.empty()) table += ", ";
        table += "K=" + fmt(r.K) + ": " + fmt(r.sup_frac);
    }
    c.note(table);
    bool strict = true;
    for (std::size_t i = 1; i < rows.size(); ++i)
        strict = strict && rows[i].sup_frac < rows[i - 1].sup_frac;
    c.require(strict, "not strictly decreasing");
    c.require(rows.back().sup_frac < 0.05,
              "tail fraction at K=8 is " + fmt(rows.back().sup_frac));
    return c;
}

// --- criterion 10: rate-fit sanity ------------------------------------------

Check criterion10() {
    Check c;
    ConvergenceProfile geo;
    for (int n = 0; n <= 40; ++n) {
        ProfileRow r;
        r.n = static_cast<std::uint64_t>(n);
        r.err = std::pow(0.5, n);
        geo.rows.push_back(r);
    }
    const RateFit gfit = rate_fit(geo);
    c.require(std::abs(gfit.geometric.slope - std::log(0.5)) <= 1e-10,
              "geometric slope " + fmt(gfit.geometric.slope));
    c.require(gfit.better_fit == "geometric", "geometric not preferred");

    ConvergenceProfile poly;
    for (int n = 1; n <= 60; ++n) {
        ProfileRow r;
        r.n = static_cast<std::uint64_t>(n);
        r.err = std::pow(static_cast<double>(n), -2.0);
        poly.rows.push_back(r);
    }
    const RateFit pfit = rate_fit(poly);
    c.require(std::abs(pfit.polynomial.slope + 2.0) <= 1e-10,
              "polynomial exponent " + fmt(pfit.polynomial.slope));

    // The emitted report carries the EXPLORATORY label.
    const std::string path =
        (std::filesystem::temp_directory_path() / "gshift_rate.csv").string();
    write_rate_csv(path, gfit);
    const std::string text = slurp(path);
    c.require(text.find("EXPLORATORY") != std::string::npos,
              "rate report not labeled EXPLORATORY");
    c.note("slopes " + fmt(gfit.geometric.slope) + " and " +
           fmt(pfit.polynomial.slope) + "; report labeled EXPLORATORY");
    return c;
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<int, std::function<Check()>>> criteria = {
        {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},
        {5, criterion5}, {6, criterion6}, {7, criterion7}, {8, criterion8},
        {9, criterion9}, {10, criterion10},
    };
    std::vector<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& [number, fn] : criteria) {
        if (!wanted.empty() &&
            std::find(wanted.begin(), wanted.end(), number) == wanted.end())
            continue;
        const double t0 = wall_time();
        Check c;
        try {
            c = fn();
        } catch (const std::exception& e) {
            c.ok = false;
            c.detail = std::string("exception: ") + e.what();
        }
        const double dt = wall_time() - t0;
        std::printf("%s criterion %2d (%.2fs): %s\n", c.ok ? "PASS" : "FAIL",
                    number, dt, c.detail.c_str());
        std::fflush(stdout);
        if (!c.ok) ++failures;
    }
    return failures;
}
