#include "gshift/gfunction.hpp"

#include <algorithm>
#include <cmath>

#include "gshift/tail_sums.hpp"

namespace gshift {

double VariationEnvelope::partial_sum(std::uint64_t n) const {
    double acc = 0.0;
    for (std::uint64_t t = 1; t <= n; ++t) acc += value_fn_(t);
    return acc;
}

double VariationEnvelope::partial_square_sum(std::uint64_t n) const {
    double acc = 0.0;
    for (std::uint64_t t = 1; t <= n; ++t) {
        const double v = value_fn_(t);
        acc += v * v;
    }
    return acc;
}

VariationEnvelope::Cumulative
VariationEnvelope::cumulative(std::uint64_t horizon) const {
    Cumulative c;
    c.value.resize(horizon);
    c.sum.resize(horizon);
    c.square_sum.resize(horizon);
    double s = 0.0, sq = 0.0;
    for (std::uint64_t t = 1; t <= horizon; ++t) {
        const double v = value_fn_(t);
        s += v;
        sq += v * v;
        c.value[t - 1] = v;
        c.sum[t - 1] = s;
        c.square_sum[t - 1] = sq;
    }
    return c;
}

GFunctionSpec::GFunctionSpec(Alphabet alphabet, Family family, double delta,
                             Anchor tail_anchor)
    : alphabet_(alphabet), family_(std::move(family)), delta_(delta),
      anchor_(std::move(tail_anchor)) {
    validate();
}

namespace {

constexpr double kNormTol = 1e-12;

void check_probability_row(std::span<const double> row, double delta,
                           const char* what) {
    double sum = 0.0;
    for (double v : row) {
        if (!(v + 1e-12 >= delta))
            throw std::invalid_argument(std::string(what) +
                                        ": value below positivity floor delta");
        sum += v;
    }
    if (std::abs(sum - 1.0) > kNormTol)
        throw std::invalid_argument(std::string(what) +
                                    ": row does not sum to 1 within 1e-12");
}

} // namespace

void GFunctionSpec::validate() const {
    if (!(delta_ > 0.0))
        throw std::invalid_argument("positivity floor delta must be > 0");
    for (Symbol s : anchor_.prefix())
        if (s >= alphabet_.size())
            throw std::invalid_argument("anchor prefix symbol out of range");
    if (anchor_.repeat() >= alphabet_.size())
        throw std::invalid_argument("anchor repeat symbol out of range");

    if (const auto* b = std::get_if<BernoulliFamily>(&family_)) {
        if (static_cast<int>(b->p.size()) != alphabet_.size())
            throw std::invalid_argument("Bernoulli p must have one entry per symbol");
        check_probability_row(b->p, delta_, "Bernoulli");
    } else if (const auto* f = std::get_if<FiniteRangeFamily>(&family_)) {
        if (f->k < 1) throw std::invalid_argument("finite range k must be >= 1");
        if (f->table.size() != alphabet_.num_words(f->k))
            throw std::invalid_argument("finite-range table size must be |S|^k");
        const std::uint64_t contexts = alphabet_.pow(f->k - 1);
        std::vector<double> row(static_cast<std::size_t>(alphabet_.size()));
        for (std::uint64_t u = 0; u < contexts; ++u) {
            for (int s = 0; s < alphabet_.size(); ++s)
                row[static_cast<std::size_t>(s)] =
                    f->table[static_cast<std::uint64_t>(s) * contexts + u];
            check_probability_row(row, delta_, "finite-range g");
        }
    } else {
        const auto& lr = std::get<LongRangeAdditiveFamily>(family_);
        if (!(lr.alpha > 1.0))
            throw std::invalid_argument("long-range alpha must be > 1");
        if (!(lr.c > 0.0)) throw std::invalid_argument("long-range c must be > 0");
        if (static_cast<int>(lr.weights.size()) != alphabet_.size())
            throw std::invalid_argument("weights must have one entry per symbol");
        int sum = 0, max_abs = 0;
        for (int w : lr.weights) {
            if (w < -1 || w > 1)
                throw std::invalid_argument("weights must lie in {-1, 0, +1}");
            sum += w;
            max_abs = std::max(max_abs, std::abs(w));
        }
        if (sum != 0)
            throw std::invalid_argument("weights must sum to zero (normalization)");
        const double reach = lr.c * riemann_zeta(lr.alpha) * max_abs;
        if (reach > 1.0 / alphabet_.size() - delta_)
            throw std::invalid_argument(
                "long-range family violates positivity: c*zeta(alpha)*max|w| "
                "must be <= 1/|S| - delta");
    }
}

bool GFunctionSpec::is_finite_range() const noexcept {
    return !std::holds_alternative<LongRangeAdditiveFamily>(family_);
}

int GFunctionSpec::range() const {
    if (const auto* f = std::get_if<FiniteRangeFamily>(&family_)) return f->k;
    if (std::holds_alternative<BernoulliFamily>(family_)) return 1;
    throw std::logic_error("long-range g has no finite range; truncate first");
}

std::span<const double> GFunctionSpec::table() const {
    if (const auto* f = std::get_if<FiniteRangeFamily>(&family_)) return f->table;
    if (const auto* b = std::get_if<BernoulliFamily>(&family_)) return b->p;
    throw std::logic_error("long-range g has no finite table; truncate first");
}

TransitionEvaluator::TransitionEvaluator(const GFunctionSpec& spec)
    : spec_(&spec) {}

void TransitionEvaluator::ensure(std::uint64_t m) {
    const auto* lr = std::get_if<LongRangeAdditiveFamily>(&spec_->family());
    if (!lr) return;
    const std::uint64_t have = inv_pow_.size();
    if (m < have) return;
    std::uint64_t grow = std::max<std::uint64_t>(m + 1, have == 0 ? 64 : 2 * have);
    inv_pow_.resize(grow);
    tail_.resize(grow);
    const std::uint64_t from = have == 0 ? 1 : have;
    for (std::uint64_t j = from; j < grow; ++j) {
        inv_pow_[j] = std::pow(static_cast<double>(j), -lr->alpha);
        tail_[j] = power_tail_sum(lr->alpha, j);
    }
}

template <class CtxAt>
void TransitionEvaluator::kernel_impl(std::uint64_t len, CtxAt ctx_at,
                                      const Anchor& anchor, std::span<double> out) {
    const Alphabet& a = spec_->alphabet();
    const int A = a.size();
    if (static_cast<int>(out.size()) != A)
        throw std::invalid_argument("kernel output span must have |S| entries");

    if (const auto* b = std::get_if<BernoulliFamily>(&spec_->family())) {
        std::copy(b->p.begin(), b->p.end(), out.begin());
        return;
    }
    if (const auto* f = std::get_if<FiniteRangeFamily>(&spec_->family())) {
        // First k-1 coordinates after the new symbol, anchor-closed.
        std::uint64_t ctx_idx = 0;
        for (std::uint64_t m = 1; m < static_cast<std::uint64_t>(f->k); ++m) {
            const Symbol s = m <= len ? ctx_at(m) : anchor.at(m - len - 1);
            ctx_idx = ctx_idx * static_cast<std::uint64_t>(A) + s;
        }
        const std::uint64_t contexts = a.pow(f->k - 1);
        for (int s = 0; s < A; ++s)
            out[static_cast<std::size_t>(s)] =
                f->table[static_cast<std::uint64_t>(s) * contexts + ctx_idx];
        return;
    }

    const auto& lr = std::get<LongRangeAdditiveFamily>(spec_->family());
    const std::uint64_t pref = anchor.prefix().size();
    ensure(len + pref + 1);
    double h = 0.0;
    for (std::uint64_t m = 1; m <= len; ++m)
        h += inv_pow_[m] * lr.weights[ctx_at(m)];
    for (std::uint64_t j = 0; j < pref; ++j)
        h += inv_pow_[len + 1 + j] * lr.weights[anchor.prefix()[j]];
    h += lr.weights[anchor.repeat()] * tail_[len + 1 + pref];
    h *= lr.c;
    const double base = 1.0 / A;
    for (int s = 0; s < A; ++s)
        out[static_cast<std::size_t>(s)] =
            base + lr.weights[static_cast<std::size_t>(s)] * h;
}

void TransitionEvaluator::kernel(std::span<const Symbol> context,
                                 const Anchor& anchor, std::span<double> out) {
    kernel_impl(
        context.size(), [context](std::uint64_t m) { return context[m - 1]; },
        anchor, out);
}

void TransitionEvaluator::kernel_history(std::span<const Symbol> history,
                                         const Anchor& anchor,
                                         std::span<double> out) {
    kernel_impl(
        history.size(),
        [history](std::uint64_t m) { return history[history.size() - m]; }, anchor,
        out);
}

double TransitionEvaluator::eval(std::span<const Symbol> word,
                                 const Anchor& anchor) {
    if (word.empty())
        throw std::invalid_argument("g is evaluated on nonempty words");
    std::vector<double> row(static_cast<std::size_t>(spec_->alphabet().size()));
    kernel(word.subspan(1), anchor, row);
    return row[word[0]];
}

double GFunctionSpec::eval(const Word& w) const {
    return eval(w, static_cast<int>(w.size()));
}

double GFunctionSpec::eval(const Word& w, int depth) const {
    if (w.empty()) throw std::invalid_argument("g is evaluated on nonempty words");
    if (depth < 1) throw std::invalid_argument("evaluation depth must be >= 1");
    const std::size_t eff = std::min(w.size(), static_cast<std::size_t>(depth));
    TransitionEvaluator ev(*this);
    return ev.eval(std::span<const Symbol>(w.data(), eff), anchor_);
}

std::vector<double> GFunctionSpec::kernel(std::span<const Symbol> context,
                                          const Anchor& anchor) const {
    std::vector<double> row(static_cast<std::size_t>(alphabet_.size()));
    TransitionEvaluator ev(*this);
    ev.kernel(context, anchor, row);
    return row;
}

std::vector<double> GFunctionSpec::kernel(std::span<const Symbol> context) const {
    return kernel(context, anchor_);
}

VariationEnvelope GFunctionSpec::envelope() const {
    if (std::holds_alternative<BernoulliFamily>(family_))
        return VariationEnvelope([](std::uint64_t) { return 0.0; });

    if (const auto* f = std::get_if<FiniteRangeFamily>(&family_)) {
        // Exact: g depends on k coordinates, so var_n is a finite table scan.
        CylinderFunction tab(alphabet_, f->k, f->table);
        std::vector<double> v(static_cast<std::size_t>(f->k), 0.0);
        for (int n = 1; n < f->k; ++n)
            v[static_cast<std::size_t>(n)] = variation(tab, n);
        return VariationEnvelope([v](std::uint64_t n) {
            return n < v.size() ? v[static_cast<std::size_t>(n)] : 0.0;
        });
    }

    const auto& lr = std::get<LongRangeAdditiveFamily>(family_);
    const bool degenerate =
        std::all_of(lr.weights.begin(), lr.weights.end(), [](int w) { return w == 0; });
    if (degenerate) return VariationEnvelope([](std::uint64_t) { return 0.0; });
    const double alpha = lr.alpha, c = lr.c;
    return VariationEnvelope([alpha, c](std::uint64_t n) {
        return 2.0 * c * power_tail_sum(alpha, n);
    });
}

RegimeReport GFunctionSpec::classify(std::uint64_t horizon) const {
    if (horizon < 1) throw std::invalid_argument("classification horizon must be >= 1");
    RegimeReport r;
    r.horizon = horizon;
    const auto cum = envelope().cumulative(horizon);
    r.partial_sum = cum.sum.back();
    r.partial_square_sum = cum.square_sum.back();
    if (const auto* lr = std::get_if<LongRangeAdditiveFamily>(&family_)) {
        const bool zero = std::all_of(lr->weights.begin(), lr->weights.end(),
                                      [](int w) { return w == 0; });
        r.square_summable = (zero || lr->alpha > 1.5) ? Verdict::yes : Verdict::no;
        r.summable = (zero || lr->alpha > 2.0) ? Verdict::yes : Verdict::no;
        r.description = "long-range additive: var_n ~ n^(1-alpha); "
                        "square-summable iff alpha > 3/2, summable iff alpha > 2";
    } else {
        r.summable = Verdict::yes;
        r.square_summable = Verdict::yes;
        r.description = "finite range: variations vanish beyond the range";
    }
    return r;
}

double GFunctionSpec::log_variation(int n, int depth) const {
    if (n < 0 || depth < n)
        throw std::invalid_argument("log_variation needs 0 <= n <= depth");
    if (depth < 1) throw std::invalid_argument("depth must be >= 1");
    const std::uint64_t count = alphabet_.num_words(depth);
    std::vector<double> logs(count);
    TransitionEvaluator ev(*this);
    Word w(static_cast<std::size_t>(depth));
    for (std::uint64_t i = 0; i < count; ++i) {
        std::uint64_t rest = i;
        for (int j = depth - 1; j >= 0; --j) {
            w[static_cast<std::size_t>(j)] =
                static_cast<Symbol>(rest % static_cast<std::uint64_t>(alphabet_.size()));
            rest /= static_cast<std::uint64_t>(alphabet_.size());
        }
        logs[i] = std::log(ev.eval(w, anchor_));
    }
    return variation(CylinderFunction(alphabet_, depth, std::move(logs)), n);
}

GFunctionSpec GFunctionSpec::truncated(int k) const {
    if (k < 1) throw std::invalid_argument("truncation range must be >= 1");
    const std::uint64_t count = alphabet_.num_words(k);
    const std::uint64_t contexts = alphabet_.pow(k - 1);
    std::vector<double> table(count);
    TransitionEvaluator ev(*this);
    Word w(static_cast<std::size_t>(k));
    for (std::uint64_t i = 0; i < count; ++i) {
        std::uint64_t rest = i;
        for (int j = k - 1; j >= 0; --j) {
            w[static_cast<std::size_t>(j)] =
                static_cast<Symbol>(rest % static_cast<std::uint64_t>(alphabet_.size()));
            rest /= static_cast<std::uint64_t>(alphabet_.size());
        }
        table[i] = ev.eval(w, anchor_);
    }
    // Renormalize each context row so the truncation is again a g-function.
    for (std::uint64_t u = 0; u < contexts; ++u) {
        double sum = 0.0;
        for (int s = 0; s < alphabet_.size(); ++s)
            sum += table[static_cast<std::uint64_t>(s) * contexts + u];
        for (int s = 0; s < alphabet_.size(); ++s)
            table[static_cast<std::uint64_t>(s) * contexts + u] /= sum;
    }
    return GFunctionSpec(alphabet_, FiniteRangeFamily{k, std::move(table)}, delta_,
                         anchor_);
}

std::string GFunctionSpec::family_name() const {
    if (std::holds_alternative<BernoulliFamily>(family_)) return "bernoulli";
    if (std::holds_alternative<FiniteRangeFamily>(family_)) return "finite_range";
    return "long_range_additive";
}

GFunctionSpec make_bernoulli(Alphabet a, std::vector<double> p, double delta,
                             Anchor anchor) {
    return GFunctionSpec(a, BernoulliFamily{std::move(p)}, delta, std::move(anchor));
}

GFunctionSpec make_finite_range(Alphabet a, int k, std::vector<double> table,
                                double delta, Anchor anchor) {
    return GFunctionSpec(a, FiniteRangeFamily{k, std::move(table)}, delta,
                         std::move(anchor));
}

GFunctionSpec make_long_range(Alphabet a, double alpha, double c,
                              std::vector<int> weights, double delta, Anchor anchor) {
    return GFunctionSpec(a, LongRangeAdditiveFamily{alpha, c, std::move(weights)},
                         delta, std::move(anchor));
}

} // namespace gshift
