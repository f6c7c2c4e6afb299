#include <doctest.h>

#include <cmath>
#include <random>

#include "gshift/transfer.hpp"
#include "oracles.hpp"

using namespace gshift;

namespace {

const Alphabet kBin(2);

GFunctionSpec fixture() {
    return make_finite_range(kBin, 2, {0.9, 0.2, 0.1, 0.8});
}

CylinderFunction random_function(int range, std::uint64_t seed,
                                 Alphabet a = Alphabet(2)) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<double> v(a.num_words(range));
    for (double& x : v) x = unif(gen);
    return CylinderFunction(a, range, std::move(v));
}

} // namespace

TEST_CASE("apply_transfer examples") {
    // Bernoulli with f(x) = x0: Lf is the constant 0.7.
    const GFunctionSpec bern = make_bernoulli(kBin, {0.3, 0.7});
    const CylinderFunction coord(kBin, 1, {0.0, 1.0});
    const CylinderFunction lf = apply_transfer(bern, coord);
    CHECK(lf.range() == 0);
    CHECK(lf.at_index(0) == doctest::Approx(0.7).epsilon(1e-15));

    // Fixture with f = indicator of [1]: Lf(u) = g(1 . u).
    const GFunctionSpec fix = fixture();
    const CylinderFunction ind = CylinderFunction::indicator(kBin, Word{1});
    const CylinderFunction l1 = apply_transfer(fix, ind);
    CHECK(l1.range() == 1);
    CHECK(l1.at_index(0) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(l1.at_index(1) == doctest::Approx(0.8).epsilon(1e-15));

    const CylinderFunction l2 = apply_transfer(fix, l1);
    CHECK(l2.at_index(0) == doctest::Approx(0.17).epsilon(1e-14));
    CHECK(l2.at_index(1) == doctest::Approx(0.66).epsilon(1e-14));
}

TEST_CASE("apply_transfer matches the word-level oracle") {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 20; ++trial) {
        const Alphabet a(trial % 2 == 0 ? 2 : 3);
        const int k = 1 + static_cast<int>(gen() % 3);
        // Random normalized table with a small positivity floor.
        const std::uint64_t contexts = a.pow(k - 1);
        std::vector<double> table(a.num_words(k));
        std::uniform_real_distribution<double> unif(0.05, 1.0);
        for (std::uint64_t u = 0; u < contexts; ++u) {
            double sum = 0.0;
            for (int s = 0; s < a.size(); ++s) {
                const double v = unif(gen);
                table[static_cast<std::uint64_t>(s) * contexts + u] = v;
                sum += v;
            }
            for (int s = 0; s < a.size(); ++s)
                table[static_cast<std::uint64_t>(s) * contexts + u] /= sum;
        }
        const GFunctionSpec g = make_finite_range(a, k, std::move(table), 0.01);
        const int m = static_cast<int>(gen() % 4);
        const CylinderFunction f = random_function(m, gen(), a);
        const CylinderFunction fast = apply_transfer(g, f);
        const CylinderFunction slow = oracle::apply_transfer_words(g, f);
        CHECK(fast.range() == slow.range());
        for (std::size_t i = 0; i < fast.values().size(); ++i)
            CHECK(fast.values()[i] ==
                  doctest::Approx(slow.values()[i]).epsilon(1e-14));
    }
}

TEST_CASE("transfer invariants") {
    const GFunctionSpec fix = fixture();

    // L1 = 1 within 1e-14 for every finite-range representative.
    for (const GFunctionSpec& g :
         {fix, make_bernoulli(kBin, {0.3, 0.7}),
          make_long_range(kBin, 1.75, 0.05, {1, -1}).truncated(8)}) {
        const CylinderFunction one = CylinderFunction::constant(kBin, 1.0);
        const CylinderFunction lone = apply_transfer(g, one);
        for (double v : lone.values()) CHECK(std::abs(v - 1.0) <= 1e-14);
    }

    // Averaging bounds and oscillation decay.
    const CylinderFunction f = random_function(4, 99);
    CylinderFunction cur = f;
    double prev_osc = cur.max_value() - cur.min_value();
    for (int n = 0; n < 8; ++n) {
        const CylinderFunction next = apply_transfer(fix, cur);
        CHECK(next.min_value() >= cur.min_value() - 1e-15);
        CHECK(next.max_value() <= cur.max_value() + 1e-15);
        const double osc = next.max_value() - next.min_value();
        CHECK(osc <= prev_osc + 1e-15);
        prev_osc = osc;
        cur = next;
    }

    // Linearity on random tables.
    const CylinderFunction h = random_function(3, 100);
    const CylinderFunction f3 = random_function(3, 101);
    const double alpha = 1.7, beta = -0.4;
    std::vector<double> combo(f3.values().size());
    for (std::size_t i = 0; i < combo.size(); ++i)
        combo[i] = alpha * f3.values()[i] + beta * h.values()[i];
    const CylinderFunction lcombo =
        apply_transfer(fix, CylinderFunction(kBin, 3, std::move(combo)));
    const CylinderFunction lf3 = apply_transfer(fix, f3);
    const CylinderFunction lh = apply_transfer(fix, h);
    for (std::size_t i = 0; i < lcombo.values().size(); ++i)
        CHECK(lcombo.values()[i] ==
              doctest::Approx(alpha * lf3.values()[i] + beta * lh.values()[i])
                  .epsilon(1e-12));

    // Range contraction: range(L^n f) = max(k-1, m-n).
    CylinderFunction it = random_function(5, 102);
    for (int n = 1; n <= 7; ++n) {
        it = apply_transfer(fix, it);
        CHECK(it.range() == std::max(2 - 1, 5 - n));
    }
}

TEST_CASE("invariant measure") {
    // Fixture: pi = (2/3, 1/3), against the dense balance solve.
    const GFunctionSpec fix = fixture();
    const InvariantMeasure inv = invariant_measure(fix);
    CHECK(inv.residual_l1 < 1e-13);
    CHECK(inv.pi.p[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
    CHECK(inv.pi.p[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
    const auto dense = oracle::stationary_dense(fix);
    CHECK(inv.pi.p[0] == doctest::Approx(dense[0]).epsilon(1e-10));
    CHECK(inv.pi.p[1] == doctest::Approx(dense[1]).epsilon(1e-10));

    // Symmetric table: uniform stationary law.
    const GFunctionSpec sym = make_finite_range(kBin, 2, {0.5, 0.5, 0.5, 0.5});
    const InvariantMeasure sinv = invariant_measure(sym);
    CHECK(sinv.pi.p[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sinv.pi.p[1] == doctest::Approx(0.5).epsilon(1e-12));

    // Bernoulli: k = 1 gives the trivial measure on the empty word.
    const InvariantMeasure binv = invariant_measure(make_bernoulli(kBin, {0.3, 0.7}));
    CHECK(binv.pi.depth == 0);
    CHECK(binv.pi.p == std::vector<double>{1.0});

    // Random |S|=3, k=2 instance against the dense solve.
    std::mt19937_64 gen(17);
    const Alphabet a3(3);
    std::vector<double> table(9);
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    for (int u = 0; u < 3; ++u) {
        double sum = 0.0;
        for (int s = 0; s < 3; ++s) {
            table[static_cast<std::size_t>(s * 3 + u)] = unif(gen);
            sum += table[static_cast<std::size_t>(s * 3 + u)];
        }
        for (int s = 0; s < 3; ++s) table[static_cast<std::size_t>(s * 3 + u)] /= sum;
    }
    const GFunctionSpec g3 = make_finite_range(a3, 2, std::move(table), 0.01);
    const InvariantMeasure inv3 = invariant_measure(g3);
    const auto dense3 = oracle::stationary_dense(g3);
    for (int i = 0; i < 3; ++i)
        CHECK(inv3.pi.p[static_cast<std::size_t>(i)] ==
              doctest::Approx(dense3[static_cast<std::size_t>(i)]).epsilon(1e-10));

    // Non-convergence signals a too-tight tolerance.
    CHECK_THROWS_AS(invariant_measure(fix, 1e-18, 3), ConvergenceError);
}

TEST_CASE("cylinder measure and integration") {
    const GFunctionSpec fix = fixture();
    const InvariantMeasure inv = invariant_measure(fix);

    CHECK(cylinder_measure(fix, inv.pi, Word{1, 1}) ==
          doctest::Approx(4.0 / 15.0).epsilon(1e-10));
    CHECK_THROWS_AS(cylinder_measure(fix, inv.pi, Word{}), std::invalid_argument);

    // Bernoulli: product measure.
    const GFunctionSpec bern = make_bernoulli(kBin, {0.3, 0.7});
    const InvariantMeasure binv = invariant_measure(bern);
    CHECK(cylinder_measure(bern, binv.pi, Word{1, 1}) ==
          doctest::Approx(0.49).epsilon(1e-14));
    CHECK(cylinder_measure(bern, binv.pi, Word{0, 1, 0}) ==
          doctest::Approx(0.3 * 0.7 * 0.3).epsilon(1e-14));

    // Depth-3 cylinder probabilities sum to 1 and agree with the recursion.
    const MeasureVector mu3 = measure_table(fix, inv.pi, 3);
    CHECK(std::abs(mu3.total() - 1.0) <= 1e-12);
    for (const Word& w : kBin.enumerate_words(3))
        CHECK(mu3.p[kBin.index_of(w)] ==
              doctest::Approx(cylinder_measure(fix, inv.pi, w)).epsilon(1e-14));

    // Marginal consistency of the produced tables.
    const MeasureVector mu2 = measure_table(fix, inv.pi, 2);
    const MeasureVector marg = mu3.marginalized();
    for (std::size_t i = 0; i < mu2.p.size(); ++i)
        CHECK(marg.p[i] == doctest::Approx(mu2.p[i]).epsilon(1e-12));

    // Integration examples.
    CHECK(integrate(CylinderFunction::constant(kBin, 3.25), fix, inv.pi) ==
          doctest::Approx(3.25).epsilon(1e-14));
    CHECK(integrate(CylinderFunction::indicator(kBin, Word{1}), fix, inv.pi) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-10));
    CHECK(integrate(CylinderFunction::indicator(kBin, Word{1, 1}), bern, binv.pi) ==
          doctest::Approx(0.49).epsilon(1e-14));
}

TEST_CASE("duality") {
    const GFunctionSpec fix = fixture();
    const InvariantMeasure inv = invariant_measure(fix);

    // f = 1: both sides are the same sum, so the residual vanishes.
    CHECK(duality_residual(fix, CylinderFunction::constant(kBin, 1.0), inv.pi) ==
          0.0);

    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial)
        worst = std::max(worst, duality_residual(fix, random_function(3, 1000 + trial),
                                                 inv.pi));
    CHECK(worst <= 1e-10);

    const GFunctionSpec trunc = make_long_range(kBin, 1.75, 0.05, {1, -1}).truncated(8);
    const InvariantMeasure tinv = invariant_measure(trunc);
    for (int trial = 0; trial < 20; ++trial)
        CHECK(duality_residual(trunc, random_function(4, 2000 + trial), tinv.pi) <=
              1e-10);
}

TEST_CASE("convergence to the mean") {
    const GFunctionSpec fix = fixture();
    const CylinderFunction ind = CylinderFunction::indicator(kBin, Word{1});
    const ConvergenceResult res = convergence_to_mean(fix, ind, 200);
    CHECK(res.exact);
    CHECK(res.mu_f == doctest::Approx(1.0 / 3.0).epsilon(1e-10));

    const auto& rows = res.profile.rows;
    REQUIRE(rows.size() == 201);
    CHECK(*rows[0].err == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(*rows[1].err == doctest::Approx(7.0 / 15.0).epsilon(1e-12));
    CHECK(*rows[2].err == doctest::Approx(49.0 / 150.0).epsilon(1e-12));
    CHECK(*rows[200].err < 1e-8);
    for (std::size_t i = 1; i < rows.size(); ++i)
        CHECK(*rows[i].err <= *rows[i - 1].err + 1e-15);

    // Bernoulli: exact constancy from n = m on.
    const GFunctionSpec bern = make_bernoulli(kBin, {0.3, 0.7});
    const CylinderFunction f = random_function(3, 55);
    const ConvergenceResult bres = convergence_to_mean(bern, f, 10);
    for (std::size_t n = 3; n < bres.profile.rows.size(); ++n)
        CHECK(*bres.profile.rows[n].err <= 1e-14);

    // Long-range path must be asked for a truncation depth.
    const GFunctionSpec lr = make_long_range(kBin, 1.75, 0.05, {1, -1});
    CHECK_THROWS_AS(convergence_to_mean(lr, ind, 10, 0), std::invalid_argument);
    const ConvergenceResult lres = convergence_to_mean(lr, ind, 50, 10);
    CHECK_FALSE(lres.exact);
    CHECK(lres.bias_per_step == doctest::Approx(2 * lr.envelope().value(10)));
    CHECK(*lres.profile.rows[50].bias_bound ==
          doctest::Approx(50 * lres.bias_per_step));
    CHECK(*lres.profile.rows[50].err < *lres.profile.rows[0].err);
}

TEST_CASE("convergence on random finite-range fixtures") {
    // delta = 0.05 forces a Dobrushin contraction of at least 1 - |S| delta
    // per step, so 200 iterations land far below 1e-8.
    std::mt19937_64 gen(314);
    std::uniform_real_distribution<double> unif(0.05, 1.0);
    for (int k : {1, 2, 3}) {
        const std::uint64_t contexts = kBin.pow(k - 1);
        std::vector<double> table(kBin.num_words(k));
        for (std::uint64_t u = 0; u < contexts; ++u) {
            double sum = 0.0;
            for (int s = 0; s < 2; ++s) {
                table[static_cast<std::uint64_t>(s) * contexts + u] = unif(gen);
                sum += table[static_cast<std::uint64_t>(s) * contexts + u];
            }
            for (int s = 0; s < 2; ++s)
                table[static_cast<std::uint64_t>(s) * contexts + u] /= sum;
        }
        const GFunctionSpec g = make_finite_range(kBin, k, std::move(table));
        const ConvergenceResult res = convergence_to_mean(
            g, CylinderFunction::indicator(kBin, Word{1}), 200);
        CHECK(*res.profile.rows[200].err < 1e-8);
        for (std::size_t i = 1; i < res.profile.rows.size(); ++i)
            CHECK(*res.profile.rows[i].err <=
                  *res.profile.rows[i - 1].err + 1e-15);
    }
}

TEST_CASE("rate fit") {
    // Exact geometric sequence: slope log(0.5) within 1e-10.
    ConvergenceProfile geo;
    for (int n = 0; n <= 40; ++n) {
        ProfileRow r;
        r.n = static_cast<std::uint64_t>(n);
        r.err = std::pow(0.5, n);
        geo.rows.push_back(r);
    }
    const RateFit gfit = rate_fit(geo);
    CHECK(gfit.geometric.slope == doctest::Approx(std::log(0.5)).epsilon(1e-10));
    CHECK(gfit.better_fit == "geometric");
    CHECK(gfit.geometric.rss < gfit.polynomial.rss);

    // Exact polynomial decay: exponent -2 within 1e-10.
    ConvergenceProfile poly;
    for (int n = 0; n <= 50; ++n) {
        ProfileRow r;
        r.n = static_cast<std::uint64_t>(n);
        r.err = n == 0 ? 1.0 : std::pow(static_cast<double>(n), -2.0);
        poly.rows.push_back(r);
    }
    const RateFit pfit = rate_fit(poly);
    CHECK(pfit.polynomial.slope == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(pfit.better_fit == "polynomial");

    // The fixture profile prefers the geometric model.
    const ConvergenceResult res = convergence_to_mean(
        fixture(), CylinderFunction::indicator(kBin, Word{1}), 40);
    CHECK(rate_fit(res.profile).better_fit == "geometric");

    // Degenerate profile: exact convergence report.
    ConvergenceProfile exact;
    for (int n = 0; n <= 20; ++n) {
        ProfileRow r;
        r.n = static_cast<std::uint64_t>(n);
        r.err = n < 3 ? 1.0 / (n + 1.0) : 0.0;
        exact.rows.push_back(r);
    }
    const RateFit efit = rate_fit(exact);
    CHECK(efit.exact_convergence);
    CHECK(efit.exact_step == 3);

    // Too few positive rows and no zero tail: hard error.
    ConvergenceProfile tiny;
    for (int n = 0; n < 5; ++n) {
        ProfileRow r;
        r.n = static_cast<std::uint64_t>(n);
        r.err = 1.0;
        tiny.rows.push_back(r);
    }
    CHECK_THROWS_AS(rate_fit(tiny), std::invalid_argument);
}
