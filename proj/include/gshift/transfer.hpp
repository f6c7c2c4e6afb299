#ifndef GSHIFT_TRANSFER_HPP
#define GSHIFT_TRANSFER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gshift/cylinder.hpp"
#include "gshift/gfunction.hpp"

namespace gshift {

/// Power iteration (or similar) failed to reach tolerance.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A probability vector over all words of a fixed depth.
struct MeasureVector {
    Alphabet alphabet;
    int depth = 0;
    std::vector<double> p; // |S|^depth entries, index order

    double total() const;
    /// Sum out the last (oldest) coordinate: depth m -> depth m-1.
    MeasureVector marginalized() const;
};

/// (Lf)(x) = sum_s g(s.x) f(s.x) over dense tables; result range is
/// max(k, range f) - 1, clamped at 0. Exact arithmetic, fixed summation
/// order per output cell. g must be finite-range.
CylinderFunction apply_transfer(const GFunctionSpec& g, const CylinderFunction& f);
/// Serial reference implementation of the same kernel (bitwise identical).
CylinderFunction apply_transfer_serial(const GFunctionSpec& g,
                                       const CylinderFunction& f);

struct ProfileRow {
    std::uint64_t n = 0;
    double sup = 0.0;
    double inf = 0.0;
    double osc = 0.0;
    std::optional<double> err;        // max_x |L^n f(x) - mu(f)|
    std::optional<double> bias_bound; // truncation bias, long-range runs only
};

struct ConvergenceProfile {
    std::vector<ProfileRow> rows;
};

struct IterateResult {
    ConvergenceProfile profile; // rows n = 0..n_steps
    CylinderFunction final_function;
};

/// Iterate L n_steps times, recording sup/inf/oscillation per step.
IterateResult iterate_transfer(const GFunctionSpec& g, const CylinderFunction& f,
                               std::uint64_t n_steps);

struct InvariantMeasure {
    MeasureVector pi;       // stationary law over words of length k-1
    double residual_l1;     // ||pi P - pi||_1 at exit
    std::uint64_t sweeps;
};

/// Stationary law of the prepend chain on S^(k-1): state u, next state
/// (s, u0..u_{k-3}) with probability g(s.u). Power iteration with
/// total-variation increment stopping; strict positivity of g makes the
/// chain irreducible and aperiodic, so convergence is geometric.
InvariantMeasure invariant_measure(const GFunctionSpec& g, double tol = 1e-13,
                                   std::uint64_t max_sweeps = 200000);
InvariantMeasure invariant_measure_serial(const GFunctionSpec& g, double tol = 1e-13,
                                          std::uint64_t max_sweeps = 200000);

/// mu[w] by the recursion mu[w0..w_{m-1}] = g(w0..w_{k-1}) mu[w1..w_{m-1}],
/// grounded at pi on words of length k-1. Requires |w| >= k-1.
double cylinder_measure(const GFunctionSpec& g, const MeasureVector& pi,
                        const Word& w);

/// All cylinder probabilities mu[w] for |w| = depth as one dense vector,
/// built by prepend recursion from pi. Requires depth >= k-1.
MeasureVector measure_table(const GFunctionSpec& g, const MeasureVector& pi,
                            int depth);

/// Exact integral of a cylinder function against the invariant measure.
double integrate(const CylinderFunction& f, const GFunctionSpec& g,
                 const MeasureVector& pi);

/// |integral(Lf) - integral(f)|; the fixed-point property in integrated form.
double duality_residual(const GFunctionSpec& g, const CylinderFunction& f,
                        const MeasureVector& pi);

struct ConvergenceResult {
    ConvergenceProfile profile; // rows n = 0..n_steps with err filled in
    double mu_f = 0.0;
    bool exact = true;           // false when g was truncated first
    double bias_per_step = 0.0;  // 2 v_k ||f||_inf for truncated runs
    int truncation_depth = 0;
};

/// Error sequence e_n = max_x |L^n f(x) - mu(f)| for finite-range g, or for
/// the depth-k truncation of a long-range g with the accumulated bias bound
/// reported per row.
ConvergenceResult convergence_to_mean(const GFunctionSpec& spec,
                                      const CylinderFunction& f,
                                      std::uint64_t n_steps,
                                      int truncation_depth = 0,
                                      double tol = 1e-13);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rss = 0.0; // residual sum of squares
    std::uint64_t points = 0;
};

struct RateFit {
    bool exact_convergence = false;
    std::uint64_t exact_step = 0; // first n with e_n = 0, when exact
    LineFit geometric;  // log e_n against n: slope = log(rate)
    LineFit polynomial; // log e_n against log n: slope = exponent
    std::string better_fit; // "geometric" or "polynomial" by residual sum
};

/// Least-squares diagnostics for the decay of an error sequence. Fits both
/// models on the rows with n >= 1 and e_n > 0 and reports both; it makes no
/// claim about which model is true.
RateFit rate_fit(const ConvergenceProfile& profile);

} // namespace gshift

#endif
