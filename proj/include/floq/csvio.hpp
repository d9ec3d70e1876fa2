#ifndef FLOQ_CSVIO_HPP
#define FLOQ_CSVIO_HPP

#include <string>
#include <tuple>
#include <vector>

#include "floq/trace.hpp"

namespace floq {

// CSV conventions: one header row, comma separators, LF line endings,
// numbers rendered as lowercase scientific with 9 significant digits.
// Identical data always produces identical bytes.

std::string format_number(double x);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Strict numeric CSV reader: consistent column counts, fully parsed fields.
// Malformed input raises a config error naming the line.
CsvTable read_csv(const std::string& path);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

// Spectrum files carry columns freq_hz,s_het on the heterodyne axis.
// Internally the trace is angular and shot-noise normalized.
void write_spectrum_csv(const std::string& path, const SpectrumTrace& trace);
SpectrumTrace read_spectrum_csv(const std::string& path);

// Report files carry rows of quantity,value,uncertainty.
void write_report_csv(const std::string& path,
                      const std::vector<std::tuple<std::string, double, double>>& rows);

}  // namespace floq

#endif
