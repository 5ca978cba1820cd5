#include "propmc/io.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace propmc {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns)
    : out_(path, std::ios::binary), n_columns_(columns.size()) {
    if (!out_) throw std::runtime_error("cannot open output file " + path);
    out_ << "# " << kCsvSchemaVersion << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
        out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != n_columns_)
        throw std::runtime_error("csv row width mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i)
        out_ << cells[i] << (i + 1 < cells.size() ? "," : "\n");
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file " + path);
    out << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace propmc
