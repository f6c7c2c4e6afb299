#ifndef GSHIFT_CYLINDER_HPP
#define GSHIFT_CYLINDER_HPP

#include <span>
#include <vector>

#include "gshift/alphabet.hpp"

namespace gshift {

/// A real-valued function of finite range m on the one-sided shift space:
/// f(x) depends only on (x0, ..., x_{m-1}). Stored as a dense table over all
/// |S|^m words in lexicographic order, so all words sharing a length-n prefix
/// occupy one contiguous block. Immutable after construction.
class CylinderFunction {
  public:
    CylinderFunction(Alphabet alphabet, int range, std::vector<double> values);

    static CylinderFunction constant(Alphabet alphabet, double value);
    /// Indicator of the cylinder set [w]; range = |w|.
    static CylinderFunction indicator(Alphabet alphabet, const Word& w);

    const Alphabet& alphabet() const noexcept { return alphabet_; }
    int range() const noexcept { return range_; }
    const std::vector<double>& values() const noexcept { return values_; }

    double at_index(std::uint64_t i) const { return values_[i]; }
    /// Value at any word with |w| >= range (only the prefix matters).
    double at(const Word& w) const;

    double max_value() const;
    double min_value() const;

    /// Same function re-tabulated at a larger range.
    CylinderFunction extended(int new_range) const;

  private:
    Alphabet alphabet_;
    int range_;
    std::vector<double> values_;
};

/// var_n f: largest oscillation of f over points agreeing in the first n
/// coordinates. n = 0 gives the global oscillation sup f - inf f, and
/// n >= range gives 0. Computed per prefix block as (max - min).
double variation(const CylinderFunction& f, int n);

} // namespace gshift

#endif
