#ifndef GSHIFT_CONFIG_HPP
#define GSHIFT_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gshift/gfunction.hpp"

namespace gshift {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat `key = value` text with section prefixes in the key (for example
/// `family.alpha = 1.75`). Lines starting with '#' and blank lines are
/// ignored, so run manifests load unchanged. Later assignments win.
std::map<std::string, std::string> parse_key_values(const std::string& text);
std::map<std::string, std::string> load_key_values(const std::string& path);

/// One experiment's resolved knobs. Unknown keys are a hard error; values
/// outside the documented bounds are rejected with named errors.
struct RunConfig {
    std::string experiment = "run";
    int alphabet_size = 2;

    std::string family_kind; // bernoulli | finite_range | long_range
    std::vector<double> bernoulli_p;
    int finite_k = 0;
    std::vector<double> finite_values; // inline table, word-index order
    std::string finite_table_path;     // or a context,symbol,value CSV
    double alpha = 0.0;
    double c = 0.0;
    std::vector<int> weights; // defaults to (+1, -1, 0, ...) when empty
    double delta = 0.05;
    std::string anchor = "0"; // last symbol repeats forever

    std::string observable_word = "1";

    std::uint64_t steps = 200;
    int depth = 10; // truncation depth for long-range runs
    std::uint64_t horizon = 10000;
    int brute_depth = 12;
    int empirical_depth = 2;
    std::uint64_t replicas = 1000;
    std::uint64_t path_length = 1000;
    std::uint64_t burn_in = 100;
    std::vector<double> k_grid = {1.0, 2.0, 4.0, 8.0};
    double tol = 1e-13;
    std::uint64_t max_iters = 200000;
    std::uint32_t window = 64;
    std::string mart_omega = "0";
    std::string mart_omega_tilde = "1";

    std::uint64_t seed = 12345;
    std::string out_dir = ".";
    int workers = 0;

    static RunConfig from_entries(const std::map<std::string, std::string>& kv);

    /// Full canonical key = value echo; reloading it reproduces this config.
    std::map<std::string, std::string> echo() const;

    Alphabet make_alphabet() const;
    std::vector<int> default_weights() const; // +1 on symbol 0, -1 on symbol 1
    Anchor parse_anchor_string(const std::string& text) const;
    GFunctionSpec build_spec() const; // reads the table CSV when configured
    CylinderFunction build_observable() const;
};

} // namespace gshift

#endif
