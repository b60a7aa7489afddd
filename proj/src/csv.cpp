#include "clab/csv.hpp"

#include <cstdio>
#include <filesystem>

#include "clab/errors.hpp"

namespace clab {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw ConfigError("cannot open output file: " + path);
}

void CsvWriter::header(std::initializer_list<const char*> names) {
    bool first = true;
    for (const char* n : names) {
        if (!first) out_ << ',';
        out_ << n;
        first = false;
    }
    out_ << '\n';
}

void CsvWriter::row(std::initializer_list<double> cells) {
    bool first = true;
    for (double c : cells) {
        if (!first) out_ << ',';
        out_ << format_double(c);
        first = false;
    }
    out_ << '\n';
}

void CsvWriter::raw_row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
}

void ensure_directory(const std::string& path) {
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) throw ConfigError("cannot create directory " + path + ": " + ec.message());
}

}  // namespace clab
