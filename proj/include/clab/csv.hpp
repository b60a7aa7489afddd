#pragma once

#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace clab {

/// Formats a double with 17 significant digits (round-trip exact).
std::string format_double(double v);

/// Line-oriented CSV writer; numeric cells use format_double so reruns of a
/// deterministic computation produce byte-identical files.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path);

    void header(std::initializer_list<const char*> names);
    void row(std::initializer_list<double> cells);
    void raw_row(const std::vector<std::string>& cells);

private:
    std::ofstream out_;
};

void ensure_directory(const std::string& path);

}  // namespace clab
