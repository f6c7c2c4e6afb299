#include "gshift/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "gshift/io.hpp"

namespace gshift {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ConfigError(key + ": bad numeric value '" + s + "'");
    return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& s) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ConfigError(key + ": bad integer value '" + s + "'");
    return v;
}

int to_int(const std::string& key, const std::string& s) {
    int v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw ConfigError(key + ": bad integer value '" + s + "'");
    return v;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            parts.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    parts.push_back(trim(cur));
    return parts;
}

std::vector<double> to_double_list(const std::string& key, const std::string& s) {
    std::vector<double> out;
    for (const std::string& part : split_list(s)) out.push_back(to_double(key, part));
    return out;
}

std::vector<int> to_int_list(const std::string& key, const std::string& s) {
    std::vector<int> out;
    for (const std::string& part : split_list(s)) out.push_back(to_int(key, part));
    return out;
}

std::string join_doubles(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s.push_back(',');
        s += format_double(v[i]);
    }
    return s;
}

std::string join_ints(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s.push_back(',');
        s += std::to_string(v[i]);
    }
    return s;
}

} // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) +
                              ": expected 'key = value', got '" + t + "'");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        kv[key] = value;
    }
    return kv;
}

std::map<std::string, std::string> load_key_values(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_key_values(buf.str());
}

RunConfig RunConfig::from_entries(const std::map<std::string, std::string>& kv) {
    RunConfig c;
    for (const auto& [key, value] : kv) {
        if (key == "experiment") c.experiment = value;
        else if (key == "alphabet.size") c.alphabet_size = to_int(key, value);
        else if (key == "family.kind") c.family_kind = value;
        else if (key == "family.p") c.bernoulli_p = to_double_list(key, value);
        else if (key == "family.k") c.finite_k = to_int(key, value);
        else if (key == "family.values") c.finite_values = to_double_list(key, value);
        else if (key == "family.table") c.finite_table_path = value;
        else if (key == "family.alpha") c.alpha = to_double(key, value);
        else if (key == "family.c") c.c = to_double(key, value);
        else if (key == "family.weights") c.weights = to_int_list(key, value);
        else if (key == "family.delta") c.delta = to_double(key, value);
        else if (key == "family.anchor") c.anchor = value;
        else if (key == "observable.word") c.observable_word = value;
        else if (key == "run.steps") c.steps = to_u64(key, value);
        else if (key == "run.depth") c.depth = to_int(key, value);
        else if (key == "run.horizon") c.horizon = to_u64(key, value);
        else if (key == "run.brute_depth") c.brute_depth = to_int(key, value);
        else if (key == "run.empirical_depth") c.empirical_depth = to_int(key, value);
        else if (key == "run.replicas") c.replicas = to_u64(key, value);
        else if (key == "run.path_length") c.path_length = to_u64(key, value);
        else if (key == "run.burn_in") c.burn_in = to_u64(key, value);
        else if (key == "run.k_grid") c.k_grid = to_double_list(key, value);
        else if (key == "run.tol") c.tol = to_double(key, value);
        else if (key == "run.max_iters") c.max_iters = to_u64(key, value);
        else if (key == "run.window")
            c.window = static_cast<std::uint32_t>(to_u64(key, value));
        else if (key == "mart.omega") c.mart_omega = value;
        else if (key == "mart.omega_tilde") c.mart_omega_tilde = value;
        else if (key == "seed") c.seed = to_u64(key, value);
        else if (key == "out") c.out_dir = value;
        else if (key == "workers") c.workers = to_int(key, value);
        else throw ConfigError("unknown config key '" + key + "'");
    }

    if (c.experiment.empty()) throw ConfigError("experiment: must not be empty");
    if (c.alphabet_size < 2 || c.alphabet_size > kMaxAlphabetSize)
        throw ConfigError("alphabet.size: must be in [2, " +
                          std::to_string(kMaxAlphabetSize) + "]");
    if (c.family_kind.empty())
        throw ConfigError("family.kind: required (bernoulli | finite_range | "
                          "long_range)");
    if (c.family_kind != "bernoulli" && c.family_kind != "finite_range" &&
        c.family_kind != "long_range")
        throw ConfigError("family.kind: unknown family '" + c.family_kind + "'");
    if (!(c.tol > 0.0)) throw ConfigError("run.tol: must be > 0");
    if (c.steps < 1) throw ConfigError("run.steps: must be >= 1");
    if (c.depth < 1) throw ConfigError("run.depth: must be >= 1");
    if (c.horizon < 1) throw ConfigError("run.horizon: must be >= 1");
    if (c.brute_depth < 1 || c.brute_depth > 26)
        throw ConfigError("run.brute_depth: must be in [1, 26]");
    if (c.empirical_depth < 0) throw ConfigError("run.empirical_depth: must be >= 0");
    if (c.replicas < 1) throw ConfigError("run.replicas: must be >= 1");
    if (c.path_length < 1) throw ConfigError("run.path_length: must be >= 1");
    if (c.window < 1) throw ConfigError("run.window: must be >= 1");
    if (c.max_iters < 1) throw ConfigError("run.max_iters: must be >= 1");
    if (c.k_grid.empty()) throw ConfigError("run.k_grid: must not be empty");
    for (std::size_t i = 1; i < c.k_grid.size(); ++i)
        if (!(c.k_grid[i] > c.k_grid[i - 1]))
            throw ConfigError("run.k_grid: must be strictly increasing");
    if (c.workers < 0) throw ConfigError("workers: must be >= 0");
    return c;
}

std::map<std::string, std::string> RunConfig::echo() const {
    std::map<std::string, std::string> kv;
    kv["experiment"] = experiment;
    kv["alphabet.size"] = std::to_string(alphabet_size);
    kv["family.kind"] = family_kind;
    if (family_kind == "bernoulli") kv["family.p"] = join_doubles(bernoulli_p);
    if (family_kind == "finite_range") {
        if (!finite_table_path.empty()) kv["family.table"] = finite_table_path;
        else {
            kv["family.k"] = std::to_string(finite_k);
            kv["family.values"] = join_doubles(finite_values);
        }
    }
    if (family_kind == "long_range") {
        kv["family.alpha"] = format_double(alpha);
        kv["family.c"] = format_double(c);
        kv["family.weights"] =
            join_ints(weights.empty() ? default_weights() : weights);
    }
    kv["family.delta"] = format_double(delta);
    kv["family.anchor"] = anchor;
    kv["observable.word"] = observable_word;
    kv["run.steps"] = std::to_string(steps);
    kv["run.depth"] = std::to_string(depth);
    kv["run.horizon"] = std::to_string(horizon);
    kv["run.brute_depth"] = std::to_string(brute_depth);
    kv["run.empirical_depth"] = std::to_string(empirical_depth);
    kv["run.replicas"] = std::to_string(replicas);
    kv["run.path_length"] = std::to_string(path_length);
    kv["run.burn_in"] = std::to_string(burn_in);
    kv["run.k_grid"] = join_doubles(k_grid);
    kv["run.tol"] = format_double(tol);
    kv["run.max_iters"] = std::to_string(max_iters);
    kv["run.window"] = std::to_string(window);
    kv["mart.omega"] = mart_omega;
    kv["mart.omega_tilde"] = mart_omega_tilde;
    kv["seed"] = std::to_string(seed);
    kv["out"] = out_dir;
    kv["workers"] = std::to_string(workers);
    return kv;
}

Alphabet RunConfig::make_alphabet() const { return Alphabet(alphabet_size); }

Anchor RunConfig::parse_anchor_string(const std::string& text) const {
    if (text.empty()) throw ConfigError("anchor: must name at least one symbol");
    Word w;
    try {
        w = parse_word(text, make_alphabet());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("anchor: ") + e.what());
    }
    const Symbol repeat = w.back();
    w.pop_back();
    return Anchor(repeat, std::move(w));
}

std::vector<int> RunConfig::default_weights() const {
    std::vector<int> w(static_cast<std::size_t>(alphabet_size), 0);
    w[0] = 1;
    w[1] = -1;
    return w;
}

GFunctionSpec RunConfig::build_spec() const {
    const Alphabet a = make_alphabet();
    const Anchor anc = parse_anchor_string(anchor);
    try {
        if (family_kind == "bernoulli") {
            if (bernoulli_p.empty())
                throw ConfigError("family.p: required for the Bernoulli family");
            return make_bernoulli(a, bernoulli_p, delta, anc);
        }
        if (family_kind == "finite_range") {
            if (!finite_table_path.empty()) {
                const GTableData data = read_gtable_csv(finite_table_path, a);
                return make_finite_range(a, data.k, data.table, delta, anc);
            }
            if (finite_k < 1 || finite_values.empty())
                throw ConfigError("family.k and family.values (or family.table): "
                                  "required for the finite-range family");
            return make_finite_range(a, finite_k, finite_values, delta, anc);
        }
        if (!(alpha > 0.0) || !(c > 0.0))
            throw ConfigError("family.alpha and family.c: required for the "
                              "long-range family");
        return make_long_range(a, alpha, c,
                               weights.empty() ? default_weights() : weights,
                               delta, anc);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("family: ") + e.what());
    }
}

CylinderFunction RunConfig::build_observable() const {
    const Alphabet a = make_alphabet();
    try {
        return CylinderFunction::indicator(a, parse_word(observable_word, a));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("observable.word: ") + e.what());
    }
}

} // namespace gshift
