#include "gshift/tail_sums.hpp"

#include <cmath>
#include <stdexcept>

namespace gshift {

namespace {

// Euler-Maclaurin closure of sum_{m >= M} m^-alpha:
//   M^(1-a)/(a-1) + M^-a/2 + a*M^(-a-1)/12
//   - a(a+1)(a+2)*M^(-a-3)/720 + a(a+1)(a+2)(a+3)(a+4)*M^(-a-5)/30240
// Truncation error is of order M^(-a-7); negligible for M >= 48.
double em_tail(double a, double m) {
    const double ia = std::pow(m, 1.0 - a) / (a - 1.0);
    const double f0 = std::pow(m, -a);
    const double t1 = a * std::pow(m, -a - 1.0) / 12.0;
    const double t3 = a * (a + 1.0) * (a + 2.0) * std::pow(m, -a - 3.0) / 720.0;
    const double t5 = a * (a + 1.0) * (a + 2.0) * (a + 3.0) * (a + 4.0) *
                      std::pow(m, -a - 5.0) / 30240.0;
    return ia + 0.5 * f0 + t1 - t3 + t5;
}

} // namespace

double power_tail_sum(double alpha, std::uint64_t n) {
    if (!(alpha > 1.0)) throw std::invalid_argument("power_tail_sum needs alpha > 1");
    if (n == 0) throw std::invalid_argument("power_tail_sum needs n >= 1");
    const std::uint64_t cutoff = n < 48 ? 48 : n;
    double head = 0.0;
    for (std::uint64_t m = n; m < cutoff; ++m)
        head += std::pow(static_cast<double>(m), -alpha);
    return head + em_tail(alpha, static_cast<double>(cutoff));
}

double riemann_zeta(double alpha) { return power_tail_sum(alpha, 1); }

TailBracket power_tail_bracket(double alpha, std::uint64_t n) {
    if (!(alpha > 1.0)) throw std::invalid_argument("bracket needs alpha > 1");
    const double x = static_cast<double>(n);
    const double integral = std::pow(x, 1.0 - alpha) / (alpha - 1.0);
    return {integral, std::pow(x, -alpha) + integral};
}

} // namespace gshift
