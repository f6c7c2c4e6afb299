#include "gshift/transfer.hpp"

#include <algorithm>
#include <cmath>

namespace gshift {

double MeasureVector::total() const {
    double s = 0.0;
    for (double v : p) s += v;
    return s;
}

MeasureVector MeasureVector::marginalized() const {
    if (depth < 1)
        throw std::invalid_argument("cannot marginalize a depth-0 measure");
    const int A = alphabet.size();
    std::vector<double> out(p.size() / static_cast<std::size_t>(A));
    for (std::size_t u = 0; u < out.size(); ++u) {
        double s = 0.0;
        for (int z = 0; z < A; ++z)
            s += p[u * static_cast<std::size_t>(A) + static_cast<std::size_t>(z)];
        out[u] = s;
    }
    return {alphabet, depth - 1, std::move(out)};
}

namespace {

struct TransferDims {
    int k;                  // range of g
    int m;                  // range of f
    int out_range;          // max(k, m) - 1, clamped at 0
    std::uint64_t g_shift;  // out index -> g context index divisor
    std::uint64_t g_stride; // |S|^(k-1)
    std::uint64_t f_shift;  // out index -> f prefix index divisor (m >= 1)
    std::uint64_t f_stride; // |S|^(m-1)
};

TransferDims transfer_dims(const GFunctionSpec& g, const CylinderFunction& f) {
    TransferDims d;
    d.k = g.range();
    d.m = f.range();
    d.out_range = std::max(d.k, d.m) - 1;
    if (d.out_range < 0) d.out_range = 0;
    const Alphabet& a = g.alphabet();
    a.num_words(d.out_range); // enforce the table limit
    d.g_shift = a.pow(d.out_range - (d.k - 1));
    d.g_stride = a.pow(d.k - 1);
    d.f_shift = d.m >= 1 ? a.pow(d.out_range - (d.m - 1)) : 1;
    d.f_stride = d.m >= 1 ? a.pow(d.m - 1) : 0;
    return d;
}

// One output cell: fixed ascending-symbol summation order.
inline double transfer_cell(std::span<const double> gt,
                            std::span<const double> fv, const TransferDims& d,
                            int A, std::uint64_t i) {
    const std::uint64_t gctx = i / d.g_shift;
    double acc = 0.0;
    if (d.m >= 1) {
        const std::uint64_t fctx = i / d.f_shift;
        for (int s = 0; s < A; ++s)
            acc += gt[static_cast<std::uint64_t>(s) * d.g_stride + gctx] *
                   fv[static_cast<std::uint64_t>(s) * d.f_stride + fctx];
    } else {
        for (int s = 0; s < A; ++s)
            acc += gt[static_cast<std::uint64_t>(s) * d.g_stride + gctx] * fv[0];
    }
    return acc;
}

} // namespace

CylinderFunction apply_transfer_serial(const GFunctionSpec& g,
                                       const CylinderFunction& f) {
    if (!(g.alphabet() == f.alphabet()))
        throw std::invalid_argument("alphabet mismatch between g and f");
    const TransferDims d = transfer_dims(g, f);
    const int A = g.alphabet().size();
    std::span<const double> gt = g.table();
    std::span<const double> fv = f.values();
    std::vector<double> out(g.alphabet().num_words(d.out_range));
    for (std::uint64_t i = 0; i < out.size(); ++i)
        out[i] = transfer_cell(gt, fv, d, A, i);
    return CylinderFunction(g.alphabet(), d.out_range, std::move(out));
}

CylinderFunction apply_transfer(const GFunctionSpec& g, const CylinderFunction& f) {
    if (!(g.alphabet() == f.alphabet()))
        throw std::invalid_argument("alphabet mismatch between g and f");
    const TransferDims d = transfer_dims(g, f);
    const int A = g.alphabet().size();
    std::span<const double> gt = g.table();
    std::span<const double> fv = f.values();
    std::vector<double> out(g.alphabet().num_words(d.out_range));
    const std::int64_t n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static) if (n >= 1024)
    for (std::int64_t i = 0; i < n; ++i)
        out[static_cast<std::uint64_t>(i)] =
            transfer_cell(gt, fv, d, A, static_cast<std::uint64_t>(i));
    return CylinderFunction(g.alphabet(), d.out_range, std::move(out));
}

IterateResult iterate_transfer(const GFunctionSpec& g, const CylinderFunction& f,
                               std::uint64_t n_steps) {
    IterateResult r{ConvergenceProfile{}, f};
    CylinderFunction cur = f;
    for (std::uint64_t n = 0;; ++n) {
        ProfileRow row;
        row.n = n;
        row.sup = cur.max_value();
        row.inf = cur.min_value();
        row.osc = row.sup - row.inf;
        r.profile.rows.push_back(row);
        if (n == n_steps) break;
        cur = apply_transfer(g, cur);
    }
    r.final_function = std::move(cur);
    return r;
}

namespace {

InvariantMeasure power_iteration(const GFunctionSpec& g, double tol,
                                 std::uint64_t max_sweeps, bool parallel) {
    const int k = g.range();
    const Alphabet& a = g.alphabet();
    if (k <= 1)
        return {MeasureVector{a, 0, {1.0}}, 0.0, 0};

    const int A = a.size();
    const std::uint64_t dim = a.num_words(k - 1);
    const std::uint64_t src_mod = a.pow(k - 2);
    std::span<const double> gt = g.table();

    std::vector<double> cur(dim, 1.0 / static_cast<double>(dim));
    std::vector<double> next(dim);
    for (std::uint64_t sweep = 1; sweep <= max_sweeps; ++sweep) {
        const std::int64_t n = static_cast<std::int64_t>(dim);
#pragma omp parallel for schedule(static) if (parallel && n >= 256)
        for (std::int64_t vi = 0; vi < n; ++vi) {
            const std::uint64_t v = static_cast<std::uint64_t>(vi);
            const std::uint64_t src_base = (v % src_mod) * static_cast<std::uint64_t>(A);
            const std::uint64_t g_base = v * static_cast<std::uint64_t>(A);
            double acc = 0.0;
            for (int z = 0; z < A; ++z)
                acc += gt[g_base + static_cast<std::uint64_t>(z)] *
                       cur[src_base + static_cast<std::uint64_t>(z)];
            next[v] = acc;
        }
        double sum = 0.0;
        for (double v : next) sum += v;
        double tv = 0.0;
        for (std::uint64_t i = 0; i < dim; ++i) {
            next[i] /= sum;
            tv += std::abs(next[i] - cur[i]);
        }
        cur.swap(next);
        if (tv < tol)
            return {MeasureVector{a, k - 1, std::move(cur)}, tv, sweep};
    }
    throw ConvergenceError("invariant measure power iteration did not reach "
                           "tol after max sweeps (tol may be too tight)");
}

} // namespace

InvariantMeasure invariant_measure(const GFunctionSpec& g, double tol,
                                   std::uint64_t max_sweeps) {
    return power_iteration(g, tol, max_sweeps, true);
}

InvariantMeasure invariant_measure_serial(const GFunctionSpec& g, double tol,
                                          std::uint64_t max_sweeps) {
    return power_iteration(g, tol, max_sweeps, false);
}

double cylinder_measure(const GFunctionSpec& g, const MeasureVector& pi,
                        const Word& w) {
    const int k = g.range();
    const int m = static_cast<int>(w.size());
    if (m < k - 1)
        throw std::invalid_argument("cylinder_measure needs |w| >= k-1");
    const Alphabet& a = g.alphabet();
    Word suffix(w.end() - (k - 1), w.end());
    double acc = pi.p[a.index_of(suffix)];
    std::span<const double> gt = g.table();
    for (int j = m - k; j >= 0; --j) {
        std::uint64_t idx = 0;
        for (int i = 0; i < k; ++i)
            idx = idx * static_cast<std::uint64_t>(a.size()) +
                  w[static_cast<std::size_t>(j + i)];
        acc = gt[idx] * acc;
    }
    return acc;
}

MeasureVector measure_table(const GFunctionSpec& g, const MeasureVector& pi,
                            int depth) {
    const int k = g.range();
    if (depth < k - 1)
        throw std::invalid_argument("measure_table needs depth >= k-1");
    const Alphabet& a = g.alphabet();
    a.num_words(depth); // limit check
    const int A = a.size();
    std::span<const double> gt = g.table();
    std::vector<double> cur = pi.p;
    for (int d = k - 1; d < depth; ++d) {
        const std::uint64_t sz = a.pow(d);
        const std::uint64_t gdiv = a.pow(d - (k - 1));
        const std::uint64_t gstride = a.pow(k - 1);
        std::vector<double> ext(sz * static_cast<std::uint64_t>(A));
        for (int s = 0; s < A; ++s) {
            const std::uint64_t base = static_cast<std::uint64_t>(s) * sz;
            for (std::uint64_t u = 0; u < sz; ++u)
                ext[base + u] =
                    gt[static_cast<std::uint64_t>(s) * gstride + u / gdiv] * cur[u];
        }
        cur.swap(ext);
    }
    return {a, depth, std::move(cur)};
}

double integrate(const CylinderFunction& f, const GFunctionSpec& g,
                 const MeasureVector& pi) {
    const int k = g.range();
    const int depth = std::max(f.range(), k - 1);
    const MeasureVector mu = measure_table(g, pi, depth);
    const std::uint64_t fdiv = f.alphabet().pow(depth - f.range());
    double acc = 0.0;
    for (std::uint64_t i = 0; i < mu.p.size(); ++i)
        acc += f.at_index(i / fdiv) * mu.p[i];
    return acc;
}

double duality_residual(const GFunctionSpec& g, const CylinderFunction& f,
                        const MeasureVector& pi) {
    const double lhs = integrate(apply_transfer(g, f), g, pi);
    const double rhs = integrate(f, g, pi);
    return std::abs(lhs - rhs);
}

ConvergenceResult convergence_to_mean(const GFunctionSpec& spec,
                                      const CylinderFunction& f,
                                      std::uint64_t n_steps, int truncation_depth,
                                      double tol) {
    ConvergenceResult res;
    const GFunctionSpec* g = &spec;
    std::optional<GFunctionSpec> truncated;
    if (!spec.is_finite_range()) {
        if (truncation_depth < 1)
            throw std::invalid_argument(
                "long-range g needs a truncation depth >= 1 for iteration");
        truncated.emplace(spec.truncated(truncation_depth));
        g = &*truncated;
        res.exact = false;
        res.truncation_depth = truncation_depth;
        const double f_sup =
            std::max(std::abs(f.max_value()), std::abs(f.min_value()));
        // One application of the truncated operator deviates by at most
        // sum_s |g - g_k|(s.x) <= v_k * sum_s |w_s| per unit of ||f||; the
        // weight sum is 2 for every +/-1 binary family.
        double weight_sum = 2.0;
        if (const auto* lr = std::get_if<LongRangeAdditiveFamily>(&spec.family())) {
            double s = 0.0;
            for (int w : lr->weights) s += std::abs(w);
            weight_sum = std::max(weight_sum, s);
        }
        res.bias_per_step =
            weight_sum *
            spec.envelope().value(static_cast<std::uint64_t>(truncation_depth)) *
            f_sup;
    }

    const InvariantMeasure inv = invariant_measure(*g, tol);
    res.mu_f = integrate(f, *g, inv.pi);

    CylinderFunction cur = f;
    for (std::uint64_t n = 0;; ++n) {
        ProfileRow row;
        row.n = n;
        row.sup = cur.max_value();
        row.inf = cur.min_value();
        row.osc = row.sup - row.inf;
        row.err = std::max(std::abs(row.sup - res.mu_f), std::abs(row.inf - res.mu_f));
        if (!res.exact)
            row.bias_bound = static_cast<double>(n) * res.bias_per_step;
        res.profile.rows.push_back(row);
        if (n == n_steps) break;
        cur = apply_transfer(*g, cur);
    }
    return res;
}

namespace {

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    LineFit fit;
    fit.points = x.size();
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - fit.intercept - fit.slope * x[i];
        fit.rss += r * r;
    }
    return fit;
}

} // namespace

RateFit rate_fit(const ConvergenceProfile& profile) {
    RateFit r;
    std::vector<double> ns, loge, logn;
    std::uint64_t first_zero = 0;
    bool in_zero_tail = false;
    for (const ProfileRow& row : profile.rows) {
        const double e = row.err ? *row.err : row.osc;
        if (e == 0.0) {
            if (!in_zero_tail) {
                first_zero = row.n;
                in_zero_tail = true;
            }
        } else {
            in_zero_tail = false;
            if (row.n >= 1) {
                ns.push_back(static_cast<double>(row.n));
                logn.push_back(std::log(static_cast<double>(row.n)));
                loge.push_back(std::log(e));
            }
        }
    }
    r.exact_convergence = in_zero_tail;
    r.exact_step = first_zero;
    if (ns.size() < 10) {
        if (r.exact_convergence) return r;
        throw std::invalid_argument(
            "rate_fit needs at least 10 rows with positive error");
    }
    r.geometric = least_squares(ns, loge);
    r.polynomial = least_squares(logn, loge);
    r.better_fit = r.geometric.rss <= r.polynomial.rss ? "geometric" : "polynomial";
    return r;
}

} // namespace gshift
