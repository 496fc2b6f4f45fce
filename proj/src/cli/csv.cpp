#include <cstdio>
#include <fstream>

#include "bandgap_qed/cli.hpp"
#include "bandgap_qed/errors.hpp"

namespace bgq::cli {

std::string format_number(double v) {
  if (v == 0.0) return "0";  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& config_line, const std::vector<std::string>& header)
    : columns_(header.size()) {
  comment(config_line);
  for (std::size_t i = 0; i < header.size(); ++i) text_ += (i ? "," : "") + header[i];
  text_ += '\n';
}

void CsvWriter::comment(const std::string& text) { text_ += "# " + text + '\n'; }

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw NumericalError(ErrorCode::InvalidArgument, "CSV row width mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) text_ += (i ? "," : "") + cells[i];
  text_ += '\n';
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << content;
  if (!out) throw ConfigError("write to '" + path + "' failed");
}

}  // namespace bgq::cli
