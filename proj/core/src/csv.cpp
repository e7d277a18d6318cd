#include "phasemap/csv.hpp"

#include <iomanip>
#include <sstream>

#include "phasemap/errors.hpp"

namespace phasemap {

std::string format_double(double value)
{
    std::ostringstream os;
    os << std::setprecision(17) << value;
    return os.str();
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), columns_(header.size())
{
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values)
{
    if (values.size() != columns_) throw ContractViolation("CSV row width mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
        out_ << (i ? "," : "") << format_double(values[i]);
    }
    out_ << '\n';
}

void CsvWriter::raw_row(const std::string& line) { out_ << line << '\n'; }

}  // namespace phasemap
