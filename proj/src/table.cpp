#include "fsbp/table.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fsbp {

void OutputTable::add_row(std::vector<std::string> row) {
    if (!headers.empty() && row.size() != headers.size())
        throw std::invalid_argument("OutputTable: row width does not match headers");
    rows.push_back(std::move(row));
}

std::string OutputTable::render(const std::string& format) const {
    char sep;
    if (format == "csv")
        sep = ',';
    else if (format == "tsv")
        sep = '\t';
    else
        throw std::invalid_argument("unknown table format '" + format + "'");

    std::ostringstream out;
    for (size_t i = 0; i < headers.size(); ++i) out << (i ? std::string(1, sep) : "") << headers[i];
    out << '\n';
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) out << (i ? std::string(1, sep) : "") << row[i];
        out << '\n';
    }
    out << "# provenance: config=" << config_digest << " seed=" << seed
        << " version=" << kArtifactVersion << '\n';
    return out.str();
}

void OutputTable::write(const std::string& path, const std::string& format) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << render(format);
}

std::string format_double(double v, int precision) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*e", precision, v);
    return buf;
}

std::string config_digest(const std::string& canonical_config) {
    std::uint64_t hash = 1469598103934665603ULL;
    for (unsigned char c : canonical_config) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

} // namespace fsbp
