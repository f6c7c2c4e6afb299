#ifndef GSHIFT_IO_HPP
#define GSHIFT_IO_HPP

#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "gshift/gchain.hpp"
#include "gshift/gfunction.hpp"
#include "gshift/martingale.hpp"
#include "gshift/transfer.hpp"

namespace gshift {

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

/// Fixed CSV dialect: comma separator, '.' decimal point, round-trip
/// precision, mandatory header row, '\n' line ends.
class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path);
    void row(const std::vector<std::string>& cells);

  private:
    std::ofstream out_;
};

void write_measure_csv(const std::string& path, const MeasureVector& mu);
void write_profile_csv(const std::string& path, const ConvergenceProfile& profile);
void write_variations_csv(const std::string& path, const GFunctionSpec& spec,
                          std::uint64_t horizon, int brute_depth);
void write_trace_csv(const std::string& path, const TraceEnsemble& ensemble);
void write_tightness_csv(const std::string& path,
                         const std::vector<TightnessRow>& rows);
void write_rate_csv(const std::string& path, const RateFit& fit);
void write_paths_manifest_csv(const std::string& path, const PathEnsemble& e);
void write_paths_binary(const std::string& path, const PathEnsemble& e);

/// Finite-range g tables as `context,symbol,value` rows, context-major.
void write_gtable_csv(const std::string& path, const GFunctionSpec& spec);
/// Read such a file back into (k, dense table); validation happens when the
/// caller constructs the GFunctionSpec.
struct GTableData {
    int k = 0;
    std::vector<double> table;
};
GTableData read_gtable_csv(const std::string& path, const Alphabet& alphabet);

/// Run manifest: `# key: value` metadata comments followed by a full
/// `key = value` config echo, so the file is itself a loadable config.
void write_manifest(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& meta,
                    const std::map<std::string, std::string>& config_echo);

} // namespace gshift

#endif
