#include "gshift/cylinder.hpp"

#include <algorithm>
#include <cmath>

namespace gshift {

CylinderFunction::CylinderFunction(Alphabet alphabet, int range,
                                   std::vector<double> values)
    : alphabet_(alphabet), range_(range), values_(std::move(values)) {
    if (range < 0) throw std::invalid_argument("negative range");
    const std::uint64_t expect = alphabet_.num_words(range);
    if (values_.size() != expect)
        throw std::invalid_argument("cylinder table size " +
                                    std::to_string(values_.size()) +
                                    " does not match |S|^range = " +
                                    std::to_string(expect));
    for (double v : values_)
        if (!std::isfinite(v))
            throw std::invalid_argument("non-finite cylinder table entry");
}

CylinderFunction CylinderFunction::constant(Alphabet alphabet, double value) {
    return CylinderFunction(alphabet, 0, {value});
}

CylinderFunction CylinderFunction::indicator(Alphabet alphabet, const Word& w) {
    std::vector<double> v(alphabet.num_words(static_cast<int>(w.size())), 0.0);
    v[alphabet.index_of(w)] = 1.0;
    return CylinderFunction(alphabet, static_cast<int>(w.size()), std::move(v));
}

double CylinderFunction::at(const Word& w) const {
    if (static_cast<int>(w.size()) < range_)
        throw std::invalid_argument("word shorter than function range");
    std::uint64_t idx = 0;
    for (int i = 0; i < range_; ++i)
        idx = idx * static_cast<std::uint64_t>(alphabet_.size()) +
              w[static_cast<std::size_t>(i)];
    return values_[idx];
}

double CylinderFunction::max_value() const {
    return *std::max_element(values_.begin(), values_.end());
}

double CylinderFunction::min_value() const {
    return *std::min_element(values_.begin(), values_.end());
}

CylinderFunction CylinderFunction::extended(int new_range) const {
    if (new_range < range_)
        throw std::invalid_argument("extended() cannot shrink the range");
    const std::uint64_t n = alphabet_.num_words(new_range);
    const std::uint64_t block = alphabet_.pow(new_range - range_);
    std::vector<double> v(n);
    for (std::uint64_t i = 0; i < n; ++i) v[i] = values_[i / block];
    return CylinderFunction(alphabet_, new_range, std::move(v));
}

double variation(const CylinderFunction& f, int n) {
    if (n < 0) throw std::invalid_argument("negative variation level");
    if (n >= f.range()) return 0.0;
    const auto& vals = f.values();
    const std::uint64_t block = f.alphabet().pow(f.range() - n);
    double worst = 0.0;
    for (std::uint64_t start = 0; start < vals.size(); start += block) {
        double lo = vals[start], hi = vals[start];
        for (std::uint64_t i = start + 1; i < start + block; ++i) {
            lo = std::min(lo, vals[i]);
            hi = std::max(hi, vals[i]);
        }
        worst = std::max(worst, hi - lo);
    }
    return worst;
}

} // namespace gshift
