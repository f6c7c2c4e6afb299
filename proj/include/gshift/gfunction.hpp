#ifndef GSHIFT_GFUNCTION_HPP
#define GSHIFT_GFUNCTION_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gshift/alphabet.hpp"
#include "gshift/cylinder.hpp"

namespace gshift {

/// Eventually-constant one-sided reference sequence used to close off
/// truncated contexts: an explicit prefix followed by a repeated symbol.
class Anchor {
  public:
    Anchor() = default;
    explicit Anchor(Symbol repeat, Word prefix = {})
        : prefix_(std::move(prefix)), repeat_(repeat) {}

    Symbol at(std::uint64_t i) const {
        return i < prefix_.size() ? prefix_[i] : repeat_;
    }
    const Word& prefix() const noexcept { return prefix_; }
    Symbol repeat() const noexcept { return repeat_; }

    friend bool operator==(const Anchor& a, const Anchor& b) {
        return a.repeat_ == b.repeat_ && a.prefix_ == b.prefix_;
    }

  private:
    Word prefix_;
    Symbol repeat_ = 0;
};

/// Certified upper bound v_n >= var_n g, n >= 1, with partial sums
/// sum_{t<=n} v_t and sum_{t<=n} v_t^2. v_n is nonincreasing.
class VariationEnvelope {
  public:
    explicit VariationEnvelope(std::function<double(std::uint64_t)> value_fn)
        : value_fn_(std::move(value_fn)) {}

    double value(std::uint64_t n) const { return value_fn_(n); }
    double partial_sum(std::uint64_t n) const;
    double partial_square_sum(std::uint64_t n) const;

    /// v_1..v_horizon plus running partial sums, for hot loops and CSVs.
    struct Cumulative {
        std::vector<double> value;       // value[t-1] = v_t
        std::vector<double> sum;         // sum[t-1] = partial_sum(t)
        std::vector<double> square_sum;  // square_sum[t-1] = partial_square_sum(t)
    };
    Cumulative cumulative(std::uint64_t horizon) const;

  private:
    std::function<double(std::uint64_t)> value_fn_;
};

struct BernoulliFamily {
    std::vector<double> p; // one entry per symbol
};

struct FiniteRangeFamily {
    int k = 1;                 // range: g depends on (x0, ..., x_{k-1})
    std::vector<double> table; // dense over words of length k, index order
};

/// g(s.x) = 1/|S| + w_s * h(x),  h(x) = c * sum_{n>=1} n^-alpha * w_{x_n},
/// with weights w: S -> {-1, 0, +1} summing to zero. Variations decay like
/// n^(1-alpha): square-summable iff alpha > 3/2, summable iff alpha > 2.
struct LongRangeAdditiveFamily {
    double alpha = 2.0;
    double c = 0.05;
    std::vector<int> weights; // one entry per symbol, in {-1, 0, +1}
};

/// Regime classification of a variation envelope at a finite horizon.
enum class Verdict { yes, no };

struct RegimeReport {
    std::uint64_t horizon = 0;
    double partial_sum = 0.0;
    double partial_square_sum = 0.0;
    Verdict summable = Verdict::yes;
    Verdict square_summable = Verdict::yes;
    std::string description;
};

/// A member of one of the concrete g-function families, together with a
/// positivity floor delta and a tail anchor. Evaluation closes any finite
/// context with the anchor, so g is computable at every truncation depth
/// with error controlled by the variation envelope. Immutable; evaluation
/// is pure and safe for unrestricted concurrent use.
class GFunctionSpec {
  public:
    using Family =
        std::variant<BernoulliFamily, FiniteRangeFamily, LongRangeAdditiveFamily>;

    GFunctionSpec(Alphabet alphabet, Family family, double delta = 0.05,
                  Anchor tail_anchor = Anchor{});

    const Alphabet& alphabet() const noexcept { return alphabet_; }
    const Family& family() const noexcept { return family_; }
    double delta() const noexcept { return delta_; }
    const Anchor& tail_anchor() const noexcept { return anchor_; }

    /// True when g has finite range (Bernoulli or FiniteRange family).
    bool is_finite_range() const noexcept;
    /// Range k of a finite-range spec (Bernoulli reports 1).
    int range() const;
    /// Dense g-value table of a finite-range spec, |S|^k entries.
    std::span<const double> table() const;

    /// g evaluated at the point (w0, ..., w_{d-1}, anchor...). A depth below
    /// |w| truncates the word first; depth >= |w| changes nothing since the
    /// anchor already extends the word indefinitely.
    double eval(const Word& w) const;
    double eval(const Word& w, int depth) const;

    /// Transition row p[s] = g(s . context . anchor), context newest-first.
    /// Sums to 1 within 1e-12 by construction of every family.
    std::vector<double> kernel(std::span<const Symbol> context,
                               const Anchor& anchor) const;
    std::vector<double> kernel(std::span<const Symbol> context) const;

    VariationEnvelope envelope() const;
    RegimeReport classify(std::uint64_t horizon) const;

    /// Brute-force var_n of log g over all depth-`depth` anchor-closed words.
    double log_variation(int n, int depth) const;

    /// Finite-range approximation at range k: tabulate anchor-closed values
    /// and renormalize each context row. Sup-distance to g is at most 2 v_k.
    GFunctionSpec truncated(int k) const;

    std::string family_name() const;

  private:
    Alphabet alphabet_;
    Family family_;
    double delta_;
    Anchor anchor_;

    void validate() const;
};

/// Amortized evaluation context for one worker: caches the m^-alpha and
/// tail-sum tables the long-range family needs, so repeated kernel calls on
/// growing contexts stay O(context length). Cached entries are computed
/// individually from the closed forms, so values do not depend on the cache
/// growth pattern and results stay bitwise-stable across worker counts.
/// Not thread-safe; hold one per thread or replica.
class TransitionEvaluator {
  public:
    explicit TransitionEvaluator(const GFunctionSpec& spec);

    /// p[s] = g(s . context . anchor) written into out (size |S|).
    void kernel(std::span<const Symbol> context, const Anchor& anchor,
                std::span<double> out);

    /// Same row with the context supplied in generation order, oldest
    /// symbol first: coordinate m of the evaluation point is
    /// history[len - m]. Lets grow-only history buffers feed the kernel
    /// without per-step reversal.
    void kernel_history(std::span<const Symbol> history, const Anchor& anchor,
                        std::span<double> out);

    /// g at the anchor-closed word (word[0], word[1], ..., anchor...).
    double eval(std::span<const Symbol> word, const Anchor& anchor);

  private:
    const GFunctionSpec* spec_;
    std::vector<double> inv_pow_; // inv_pow_[m] = m^-alpha
    std::vector<double> tail_;    // tail_[m] = sum_{j>=m} j^-alpha

    void ensure(std::uint64_t m);

    template <class CtxAt> // CtxAt(m) = coordinate m of the point, m >= 1
    void kernel_impl(std::uint64_t len, CtxAt ctx_at, const Anchor& anchor,
                     std::span<double> out);
};

/// Canonical fixtures used across tests and docs.
GFunctionSpec make_bernoulli(Alphabet a, std::vector<double> p, double delta = 0.05,
                             Anchor anchor = Anchor{});
GFunctionSpec make_finite_range(Alphabet a, int k, std::vector<double> table,
                                double delta = 0.05, Anchor anchor = Anchor{});
GFunctionSpec make_long_range(Alphabet a, double alpha, double c,
                              std::vector<int> weights, double delta = 0.05,
                              Anchor anchor = Anchor{});

} // namespace gshift

#endif
