#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace propmc {

inline constexpr const char* kCsvSchemaVersion = "propmc.csv.v1";
inline constexpr const char* kJsonSchemaVersion = "propmc.json.v1";
inline constexpr const char* kManifestSchemaVersion = "propmc.manifest.v1";

// Shortest-exact decimal form of a double (%.17g round-trips bit-exactly).
std::string format_double(double v);

// CSV with the schema version on a leading comment line, then the header row.
// Numeric cells go through format_double, so files are byte-stable across
// reruns and worker counts.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns);

    void row(const std::vector<std::string>& cells);

    static std::string cell(double v) { return format_double(v); }
    static std::string cell(long v) { return std::to_string(v); }
    static std::string cell(int v) { return std::to_string(v); }

private:
    std::ofstream out_;
    std::size_t n_columns_;
};

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace propmc
