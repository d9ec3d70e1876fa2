#include "floq/csvio.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "floq/errors.hpp"
#include "floq/units.hpp"

namespace floq {
namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_field(const std::string& field, std::size_t line_no) {
  const char* begin = field.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0') {
    std::ostringstream msg;
    msg << "malformed CSV number '" << field << "' on line " << line_no;
    throw config_error(msg.str());
  }
  return v;
}

}  // namespace

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.8e", x);
  return buf;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open CSV file: " + path);
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (line_no == 1) {
      table.header = fields;
      continue;
    }
    if (fields.size() != table.header.size()) {
      std::ostringstream msg;
      msg << "CSV line " << line_no << " has " << fields.size() << " fields, expected "
          << table.header.size();
      throw config_error(msg.str());
    }
    std::vector<double> row(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) row[c] = parse_field(fields[c], line_no);
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw config_error("CSV file has no header row: " + path);
  return table;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot write CSV file: " + path);
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c > 0) out << ',';
    out << header[c];
  }
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw config_error("CSV row width does not match the header");
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out << ',';
      out << format_number(row[c]);
    }
    out << '\n';
  }
  if (!out) throw config_error("failed writing CSV file: " + path);
}

void write_spectrum_csv(const std::string& path, const SpectrumTrace& trace) {
  validate_structure(trace);
  std::vector<std::vector<double>> rows(trace.freq.size());
  for (std::size_t i = 0; i < trace.freq.size(); ++i)
    rows[i] = {rad_to_hz(trace.freq[i]), trace.values[i]};
  write_csv(path, {"freq_hz", "s_het"}, rows);
}

SpectrumTrace read_spectrum_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  if (table.header.size() != 2 || table.header[0] != "freq_hz" ||
      table.header[1] != "s_het")
    throw config_error("spectrum CSV must have header freq_hz,s_het: " + path);
  SpectrumTrace trace;
  trace.normalization = Normalization::ShotNoiseNormalized;
  trace.freq.reserve(table.rows.size());
  trace.values.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    trace.freq.push_back(hz_to_rad(row[0]));
    trace.values.push_back(row[1]);
  }
  return trace;
}

void write_report_csv(const std::string& path,
                      const std::vector<std::tuple<std::string, double, double>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot write CSV file: " + path);
  out << "quantity,value,uncertainty\n";
  for (const auto& [name, value, sigma] : rows)
    out << name << ',' << format_number(value) << ',' << format_number(sigma) << '\n';
  if (!out) throw config_error("failed writing CSV file: " + path);
}

}  // namespace floq
