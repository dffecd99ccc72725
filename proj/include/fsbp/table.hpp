#ifndef FSBP_TABLE_HPP
#define FSBP_TABLE_HPP

#include <string>
#include <vector>

namespace fsbp {

/// Tabular experiment output with a provenance footer.
struct OutputTable {
    std::vector<std::string> headers;
    std::vector<std::vector<std::string>> rows;
    std::string config_digest;
    unsigned long seed = 0;

    void add_row(std::vector<std::string> row);

    /// Renders the table; separator is ',' for "csv" and '\t' for "tsv".
    /// The footer line carries config digest, seed, and artifact version.
    std::string render(const std::string& format = "csv") const;

    void write(const std::string& path, const std::string& format = "csv") const;
};

std::string format_double(double v, int precision = 10);

/// FNV-1a digest of a canonical config string, as fixed-width hex.
std::string config_digest(const std::string& canonical_config);

inline constexpr const char* kArtifactVersion = "1.0.0";

} // namespace fsbp

#endif
