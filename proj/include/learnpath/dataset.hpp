#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "learnpath/types.hpp"

namespace learnpath {

// Rows are examples. Classification sets have classes > 0 and labels in
// [0, classes); regression sets have classes == 0 and one target row per example.
struct Dataset {
  Matrix inputs;
  std::vector<int> labels;
  int classes = 0;
  Matrix targets;

  int size() const { return static_cast<int>(inputs.rows()); }
  int features() const { return static_cast<int>(inputs.cols()); }
  bool is_regression() const { return classes == 0; }
  void validate() const;
  Dataset subset(const std::vector<int>& rows) const;
};

enum class SyntheticKind { kBlobs, kAnisotropicQuadratic, kTwoMoons };
const char* synthetic_name(SyntheticKind kind);
SyntheticKind parse_synthetic(const std::string& name);

// blobs: two isotropic unit-σ Gaussians in 2D, centres 10σ apart.
// anisotropic_quadratic: x ~ N(0, diag(1, 4)), y = x₁ − x₂ + 0.1·noise.
// two_moons: interleaved half circles with 0.1 noise.
// Classes alternate before shuffling, so counts differ by at most one.
Dataset make_synthetic(SyntheticKind kind, int n, std::uint64_t seed);

// Deterministic train/test split.
struct DatasetSplit {
  Dataset train, test;
};
DatasetSplit split_dataset(const Dataset& data, double test_fraction, std::uint64_t seed);

// Header row required; the column named "label" holds integer classes, all
// others are features.
Dataset load_csv_dataset(const std::string& path);

// IDX (MNIST) ingestion. Pixels are scaled to [0, 1].
Dataset parse_idx(const std::vector<std::uint8_t>& images, const std::vector<std::uint8_t>& labels);
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

struct IdxBytes {
  std::vector<std::uint8_t> images, labels;
};
// Inverse of parse_idx for inputs that came from it; rows and cols give the image shape.
IdxBytes encode_idx(const Dataset& data, int rows, int cols);

std::vector<std::uint8_t> read_file_bytes(const std::string& path);

}  // namespace learnpath
