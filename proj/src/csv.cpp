#include "learnpath/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "learnpath/error.hpp"

namespace learnpath {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) text_ += ',';
    text_ += header[i];
  }
  text_ += '\n';
}

void CsvTable::add_row(const std::vector<double>& values) { add_row({}, values); }

void CsvTable::add_row(const std::vector<std::string>& labels, const std::vector<double>& values) {
  if (labels.size() + values.size() != columns_) {
    throw_error(ErrorCode::kInvalidInput, "CsvTable: row width does not match the header");
  }
  bool first = true;
  for (const auto& l : labels) {
    if (!first) text_ += ',';
    text_ += l;
    first = false;
  }
  for (double v : values) {
    if (!first) text_ += ',';
    text_ += format_double(v);
    first = false;
  }
  text_ += '\n';
  ++rows_;
}

void CsvTable::write(const std::string& path) const { write_text_file(path, text_); }

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw_error(ErrorCode::kIoError, "cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw_error(ErrorCode::kIoError, "write to '" + path + "' failed");
}

}  // namespace learnpath
