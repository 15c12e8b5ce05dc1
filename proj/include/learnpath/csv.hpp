#pragma once

#include <string>
#include <vector>

namespace learnpath {

// 17 significant digits, '.' decimal point, independent of the C locale.
std::string format_double(double x);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(const std::vector<double>& values);
  // Leading text cells followed by numbers.
  void add_row(const std::vector<std::string>& labels, const std::vector<double>& values);

  std::size_t rows() const { return rows_; }
  const std::string& text() const { return text_; }
  void write(const std::string& path) const;

 private:
  std::size_t columns_;
  std::size_t rows_ = 0;
  std::string text_;
};

void write_text_file(const std::string& path, const std::string& content);

}  // namespace learnpath
