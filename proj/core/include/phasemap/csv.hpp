#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace phasemap {

/// Comma-separated text; doubles carry 17 significant digits.
class CsvWriter {
public:
    CsvWriter(std::ostream& out, const std::vector<std::string>& header);

    void row(const std::vector<double>& values);
    void raw_row(const std::string& line);

private:
    std::ostream& out_;
    std::size_t columns_;
};

std::string format_double(double value);

}  // namespace phasemap
