#include "learnpath/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "learnpath/error.hpp"

namespace learnpath {
namespace {

constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

std::uint32_t read_be32(const std::vector<std::uint8_t>& bytes, std::size_t offset, const char* what) {
  if (offset + 4 > bytes.size()) {
    std::ostringstream msg;
    msg << "load_idx: " << what << " file truncated at byte offset " << bytes.size() << " (needed "
        << offset + 4 << " bytes)";
    throw_error(ErrorCode::kFormatError, msg.str());
  }
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void check_magic(std::uint32_t got, std::uint32_t want, const char* what) {
  if (got != want) {
    std::ostringstream msg;
    msg << "load_idx: " << what << " file has magic 0x" << std::hex << got << ", expected 0x" << want
        << " (byte offset 0)";
    throw_error(ErrorCode::kFormatError, msg.str());
  }
}

void check_payload(const std::vector<std::uint8_t>& bytes, std::size_t header, std::uint64_t payload,
                   const char* what) {
  if (bytes.size() < header + payload) {
    std::ostringstream msg;
    msg << "load_idx: " << what << " file truncated at byte offset " << bytes.size() << " (needed "
        << header + payload << " bytes)";
    throw_error(ErrorCode::kFormatError, msg.str());
  }
  if (bytes.size() > header + payload) {
    std::ostringstream msg;
    msg << "load_idx: " << what << " file has trailing data at byte offset " << header + payload;
    throw_error(ErrorCode::kFormatError, msg.str());
  }
}

void put_be32(std::vector<std::uint8_t>& out, std::uint32_t x) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(x >> shift));
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void shuffle_rows(Dataset& d, std::mt19937_64& rng) {
  std::vector<int> order(static_cast<std::size_t>(d.size()));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  d = d.subset(order);
}

}  // namespace

void Dataset::validate() const {
  if (is_regression()) {
    if (targets.rows() != inputs.rows()) throw_error(ErrorCode::kInvalidInput, "Dataset: target row count differs");
    return;
  }
  if (classes < 0) throw_error(ErrorCode::kInvalidInput, "Dataset: negative class count");
  if (static_cast<Eigen::Index>(labels.size()) != inputs.rows()) {
    throw_error(ErrorCode::kInvalidInput, "Dataset: label count differs from row count");
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= classes) {
      std::ostringstream msg;
      msg << "Dataset: label " << labels[i] << " at row " << i << " outside [0, " << classes << ")";
      throw_error(ErrorCode::kInvalidInput, msg.str());
    }
  }
}

Dataset Dataset::subset(const std::vector<int>& rows) const {
  Dataset out;
  out.classes = classes;
  out.inputs.resize(static_cast<Eigen::Index>(rows.size()), inputs.cols());
  if (is_regression()) out.targets.resize(out.inputs.rows(), targets.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = rows[i];
    if (r < 0 || r >= size()) throw_error(ErrorCode::kInvalidInput, "Dataset::subset: row out of range");
    out.inputs.row(static_cast<Eigen::Index>(i)) = inputs.row(r);
    if (is_regression()) {
      out.targets.row(static_cast<Eigen::Index>(i)) = targets.row(r);
    } else {
      out.labels.push_back(labels[static_cast<std::size_t>(r)]);
    }
  }
  return out;
}

const char* synthetic_name(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::kBlobs: return "blobs";
    case SyntheticKind::kAnisotropicQuadratic: return "anisotropic_quadratic";
    case SyntheticKind::kTwoMoons: return "two_moons";
  }
  return "unknown";
}

SyntheticKind parse_synthetic(const std::string& name) {
  for (auto k : {SyntheticKind::kBlobs, SyntheticKind::kAnisotropicQuadratic, SyntheticKind::kTwoMoons}) {
    if (name == synthetic_name(k)) return k;
  }
  throw_error(ErrorCode::kInvalidInput, "unknown synthetic dataset '" + name + "'");
}

Dataset make_synthetic(SyntheticKind kind, int n, std::uint64_t seed) {
  if (n < 2) throw_error(ErrorCode::kInvalidInput, "make_synthetic: need n >= 2");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  constexpr double kPi = 3.14159265358979323846;

  Dataset d;
  d.inputs.resize(n, 2);
  switch (kind) {
    case SyntheticKind::kBlobs: {
      d.classes = 2;
      const double half = 5.0 / std::sqrt(2.0);  // centres (±half, ±half), 10 apart
      for (int i = 0; i < n; ++i) {
        const int y = i % 2;
        const double sign = y == 0 ? -1.0 : 1.0;
        d.inputs(i, 0) = sign * half + normal(rng);
        d.inputs(i, 1) = sign * half + normal(rng);
        d.labels.push_back(y);
      }
      break;
    }
    case SyntheticKind::kTwoMoons: {
      d.classes = 2;
      for (int i = 0; i < n; ++i) {
        const int y = i % 2;
        const double t = kPi * uniform(rng);
        const double x0 = y == 0 ? std::cos(t) : 1.0 - std::cos(t);
        const double x1 = y == 0 ? std::sin(t) : 0.5 - std::sin(t);
        d.inputs(i, 0) = x0 + 0.1 * normal(rng);
        d.inputs(i, 1) = x1 + 0.1 * normal(rng);
        d.labels.push_back(y);
      }
      break;
    }
    case SyntheticKind::kAnisotropicQuadratic: {
      d.targets.resize(n, 1);
      for (int i = 0; i < n; ++i) {
        d.inputs(i, 0) = normal(rng);
        d.inputs(i, 1) = 2.0 * normal(rng);
        d.targets(i, 0) = d.inputs(i, 0) - d.inputs(i, 1) + 0.1 * normal(rng);
      }
      break;
    }
  }
  shuffle_rows(d, rng);
  return d;
}

DatasetSplit split_dataset(const Dataset& data, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw_error(ErrorCode::kInvalidInput, "split_dataset: test_fraction must lie in (0, 1)");
  }
  const int n_test = static_cast<int>(std::lround(test_fraction * data.size()));
  if (n_test < 1 || n_test >= data.size()) {
    throw_error(ErrorCode::kInvalidInput, "split_dataset: split leaves an empty side");
  }
  std::vector<int> order(static_cast<std::size_t>(data.size()));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const std::vector<int> test(order.begin(), order.begin() + n_test);
  const std::vector<int> train(order.begin() + n_test, order.end());
  return {data.subset(train), data.subset(test)};
}

Dataset load_csv_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_error(ErrorCode::kIoError, "load_csv_dataset: cannot open '" + path + "'");
  auto fail = [&](int line, const std::string& why) -> void {
    std::ostringstream msg;
    msg << "load_csv_dataset: " << path << ":" << line << ": " << why;
    throw_error(ErrorCode::kFormatError, msg.str());
  };

  std::string line;
  if (!std::getline(in, line)) fail(1, "missing header row");
  const auto header = split_csv(line);
  const auto label_it = std::find(header.begin(), header.end(), "label");
  if (label_it == header.end()) fail(1, "no column named 'label'");
  const auto label_col = static_cast<std::size_t>(label_it - header.begin());
  const auto features = static_cast<Eigen::Index>(header.size() - 1);

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      std::ostringstream why;
      why << "expected " << header.size() << " fields, got " << cells.size();
      fail(line_no, why.str());
    }
    std::vector<double> row;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto& cell = cells[c];
      if (c == label_col) {
        int y = 0;
        const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), y);
        if (ec != std::errc() || ptr != cell.data() + cell.size() || y < 0) {
          fail(line_no, "label '" + cell + "' is not a non-negative integer");
        }
        labels.push_back(y);
      } else {
        double x = 0.0;
        const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), x);
        if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(x)) {
          fail(line_no, "column '" + header[c] + "' value '" + cell + "' is not a finite number");
        }
        row.push_back(x);
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(line_no, "no data rows");

  Dataset d;
  d.inputs.resize(static_cast<Eigen::Index>(rows.size()), features);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Eigen::Index j = 0; j < features; ++j) d.inputs(static_cast<Eigen::Index>(i), j) = rows[i][j];
  }
  d.labels = std::move(labels);
  d.classes = *std::max_element(d.labels.begin(), d.labels.end()) + 1;
  return d;
}

Dataset parse_idx(const std::vector<std::uint8_t>& images, const std::vector<std::uint8_t>& labels) {
  check_magic(read_be32(images, 0, "images"), kIdxImagesMagic, "images");
  const std::uint64_t n = read_be32(images, 4, "images");
  const std::uint64_t rows = read_be32(images, 8, "images");
  const std::uint64_t cols = read_be32(images, 12, "images");
  check_payload(images, 16, n * rows * cols, "images");

  check_magic(read_be32(labels, 0, "labels"), kIdxLabelsMagic, "labels");
  const std::uint64_t n_labels = read_be32(labels, 4, "labels");
  check_payload(labels, 8, n_labels, "labels");
  if (n_labels != n) {
    std::ostringstream msg;
    msg << "load_idx: " << n << " images but " << n_labels << " labels";
    throw_error(ErrorCode::kFormatError, msg.str());
  }

  Dataset d;
  const auto pixels = static_cast<Eigen::Index>(rows * cols);
  d.inputs.resize(static_cast<Eigen::Index>(n), pixels);
  for (std::uint64_t i = 0; i < n; ++i) {
    for (Eigen::Index p = 0; p < pixels; ++p) {
      d.inputs(static_cast<Eigen::Index>(i), p) = images[16 + i * pixels + p] / 255.0;
    }
    d.labels.push_back(labels[8 + i]);
  }
  d.classes = d.labels.empty() ? 1 : *std::max_element(d.labels.begin(), d.labels.end()) + 1;
  return d;
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_error(ErrorCode::kIoError, "cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
  return parse_idx(read_file_bytes(images_path), read_file_bytes(labels_path));
}

IdxBytes encode_idx(const Dataset& data, int rows, int cols) {
  if (data.is_regression()) throw_error(ErrorCode::kInvalidInput, "encode_idx: regression dataset");
  if (rows <= 0 || cols <= 0 || static_cast<Eigen::Index>(rows) * cols != data.inputs.cols()) {
    throw_error(ErrorCode::kInvalidInput, "encode_idx: image shape does not match the feature count");
  }
  IdxBytes out;
  put_be32(out.images, kIdxImagesMagic);
  put_be32(out.images, static_cast<std::uint32_t>(data.size()));
  put_be32(out.images, static_cast<std::uint32_t>(rows));
  put_be32(out.images, static_cast<std::uint32_t>(cols));
  for (Eigen::Index i = 0; i < data.inputs.rows(); ++i) {
    for (Eigen::Index p = 0; p < data.inputs.cols(); ++p) {
      const double x = std::clamp(data.inputs(i, p), 0.0, 1.0);
      out.images.push_back(static_cast<std::uint8_t>(std::lround(x * 255.0)));
    }
  }
  put_be32(out.labels, kIdxLabelsMagic);
  put_be32(out.labels, static_cast<std::uint32_t>(data.size()));
  for (int y : data.labels) {
    if (y < 0 || y > 255) throw_error(ErrorCode::kInvalidInput, "encode_idx: label outside a byte");
    out.labels.push_back(static_cast<std::uint8_t>(y));
  }
  return out;
}

}  // namespace learnpath
