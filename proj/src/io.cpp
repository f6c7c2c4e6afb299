#include "gshift/io.hpp"

#include <charconv>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace gshift {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::string fmt_u64(std::uint64_t v) { return std::to_string(v); }

double parse_double(const std::string& s) {
    double v = 0.0;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    const auto res = std::from_chars(begin, end, v);
    if (res.ec != std::errc{} || res.ptr != end)
        throw std::invalid_argument("bad numeric field '" + s + "'");
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    return cells;
}

} // namespace

CsvWriter::CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
    if (!out_) throw std::runtime_error("write failure");
}

void write_measure_csv(const std::string& path, const MeasureVector& mu) {
    CsvWriter w(path);
    w.row({"word", "probability"});
    for (std::uint64_t i = 0; i < mu.p.size(); ++i)
        w.row({format_word(mu.alphabet.word_at(i, mu.depth)),
               format_double(mu.p[i])});
}

void write_profile_csv(const std::string& path, const ConvergenceProfile& profile) {
    CsvWriter w(path);
    w.row({"n", "sup", "inf", "osc", "err", "bias_bound"});
    for (const ProfileRow& r : profile.rows)
        w.row({fmt_u64(r.n), format_double(r.sup), format_double(r.inf),
               format_double(r.osc), r.err ? format_double(*r.err) : "",
               r.bias_bound ? format_double(*r.bias_bound) : ""});
}

void write_variations_csv(const std::string& path, const GFunctionSpec& spec,
                          std::uint64_t horizon, int brute_depth) {
    const auto cum = spec.envelope().cumulative(horizon);
    // Brute-force variation columns where a dense table is feasible: exact
    // for finite-range g at every n, up to brute_depth after truncation
    // otherwise, blank when even that table would exceed the entry limit.
    const bool finite = spec.is_finite_range();
    std::optional<GFunctionSpec> probe;
    if (finite) probe = spec;
    else {
        std::uint64_t size = 1;
        bool fits = true;
        for (int i = 0; i < brute_depth && fits; ++i) {
            size *= static_cast<std::uint64_t>(spec.alphabet().size());
            fits = size <= kMaxTableEntries;
        }
        if (fits) probe = spec.truncated(brute_depth);
    }
    std::optional<CylinderFunction> table, log_table;
    if (probe) {
        table.emplace(probe->alphabet(), probe->range(),
                      std::vector<double>(probe->table().begin(),
                                          probe->table().end()));
        std::vector<double> logs(table->values().size());
        for (std::size_t i = 0; i < logs.size(); ++i)
            logs[i] = std::log(table->values()[i]);
        log_table.emplace(probe->alphabet(), probe->range(), std::move(logs));
    }

    CsvWriter w(path);
    w.row({"n", "var_g", "var_log_g", "envelope", "partial_sum",
           "partial_sq_sum"});
    for (std::uint64_t n = 1; n <= horizon; ++n) {
        const bool in_reach =
            table && (finite || n <= static_cast<std::uint64_t>(brute_depth));
        w.row({fmt_u64(n),
               in_reach ? format_double(variation(*table, static_cast<int>(n)))
                        : "",
               in_reach
                   ? format_double(variation(*log_table, static_cast<int>(n)))
                   : "",
               format_double(cum.value[n - 1]), format_double(cum.sum[n - 1]),
               format_double(cum.square_sum[n - 1])});
    }
}

void write_trace_csv(const std::string& path, const TraceEnsemble& ensemble) {
    CsvWriter w(path);
    w.row({"replica", "t", "logM", "A", "eta"});
    for (std::uint64_t r = 0; r < ensemble.traces.size(); ++r) {
        const MartingaleTrace& tr = ensemble.traces[r];
        for (std::uint64_t t = 1; t <= ensemble.length; ++t)
            w.row({fmt_u64(r), fmt_u64(t), format_double(tr.logM[t]),
                   format_double(tr.A[t]), format_double(tr.eta[t])});
    }
}

void write_tightness_csv(const std::string& path,
                         const std::vector<TightnessRow>& rows) {
    CsvWriter w(path);
    w.row({"K", "sup_frac", "argmax_n"});
    for (const TightnessRow& r : rows)
        w.row({format_double(r.K), format_double(r.sup_frac), fmt_u64(r.argmax_n)});
}

void write_rate_csv(const std::string& path, const RateFit& fit) {
    CsvWriter w(path);
    w.row({"label", "model", "slope", "intercept", "rss", "points", "better_fit",
           "exact_step"});
    if (fit.exact_convergence && fit.geometric.points == 0) {
        w.row({"EXPLORATORY", "exact_convergence", "", "", "", "0", "",
               fmt_u64(fit.exact_step)});
        return;
    }
    const std::string exact =
        fit.exact_convergence ? fmt_u64(fit.exact_step) : "";
    w.row({"EXPLORATORY", "geometric", format_double(fit.geometric.slope),
           format_double(fit.geometric.intercept), format_double(fit.geometric.rss),
           fmt_u64(fit.geometric.points), fit.better_fit, exact});
    w.row({"EXPLORATORY", "polynomial", format_double(fit.polynomial.slope),
           format_double(fit.polynomial.intercept),
           format_double(fit.polynomial.rss), fmt_u64(fit.polynomial.points),
           fit.better_fit, exact});
}

void write_paths_manifest_csv(const std::string& path, const PathEnsemble& e) {
    CsvWriter w(path);
    w.row({"replica", "seed", "length"});
    for (std::uint64_t r = 0; r < e.replicas; ++r)
        w.row({fmt_u64(r), fmt_u64(e.seeds[r]), fmt_u64(e.length)});
}

void write_paths_binary(const std::string& path, const PathEnsemble& e) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(reinterpret_cast<const char*>(e.symbols.data()),
              static_cast<std::streamsize>(e.symbols.size()));
    if (!out) throw std::runtime_error("write failure");
}

void write_gtable_csv(const std::string& path, const GFunctionSpec& spec) {
    const int k = spec.range();
    const Alphabet& a = spec.alphabet();
    const std::uint64_t contexts = a.pow(k - 1);
    const auto table = spec.table();
    CsvWriter w(path);
    w.row({"context", "symbol", "value"});
    for (std::uint64_t u = 0; u < contexts; ++u)
        for (int s = 0; s < a.size(); ++s)
            w.row({format_word(a.word_at(u, k - 1)), std::to_string(s),
                   format_double(table[static_cast<std::uint64_t>(s) * contexts + u])});
}

GTableData read_gtable_csv(const std::string& path, const Alphabet& alphabet) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open g table: " + path);
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("empty g table file: " + path);
    if (split_csv_line(line) != std::vector<std::string>{"context", "symbol", "value"})
        throw std::invalid_argument("bad g table header in " + path);

    int k = -1;
    std::vector<double> table;
    std::uint64_t contexts = 0;
    std::uint64_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 3)
            throw std::invalid_argument("bad g table row: " + line);
        const Word ctx = parse_word(cells[0], alphabet);
        if (k == -1) {
            k = static_cast<int>(ctx.size()) + 1;
            contexts = alphabet.num_words(k - 1);
            table.assign(alphabet.num_words(k), 0.0);
        } else if (static_cast<int>(ctx.size()) + 1 != k) {
            throw std::invalid_argument("inconsistent context length in " + path);
        }
        const int s = std::stoi(cells[1]);
        if (s < 0 || s >= alphabet.size())
            throw std::invalid_argument("symbol out of range in " + path);
        table[static_cast<std::uint64_t>(s) * contexts + alphabet.index_of(ctx)] =
            parse_double(cells[2]);
        ++rows;
    }
    if (k == -1) throw std::invalid_argument("g table has no rows: " + path);
    if (rows != table.size())
        throw std::invalid_argument("g table is missing rows: " + path);
    return {k, std::move(table)};
}

void write_manifest(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& meta,
                    const std::map<std::string, std::string>& config_echo) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (const auto& [key, value] : meta) out << "# " << key << ": " << value << '\n';
    for (const auto& [key, value] : config_echo)
        out << key << " = " << value << '\n';
    if (!out) throw std::runtime_error("write failure");
}

} // namespace gshift
