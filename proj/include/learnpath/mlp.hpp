#pragma once

#include <cstdint>
#include <vector>

#include "learnpath/dataset.hpp"
#include "learnpath/types.hpp"

namespace learnpath {

enum class Activation { kRelu, kTanh };

struct MlpSpec {
  std::vector<int> widths;  // input, hidden..., output
  Activation activation = Activation::kRelu;
  double init_scale = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
  int layers() const { return static_cast<int>(widths.size()) - 1; }
  int param_count() const;
};

// Flat layout per layer: W (out × in, column-major) then b.
Vector init_params(const MlpSpec& spec);

Matrix mlp_forward(const MlpSpec& spec, const Vector& params, const Matrix& inputs);

struct LossAndGrad {
  double loss;
  Vector gradient;
};

// Mean softmax cross-entropy for classification sets, mean ½‖ŷ − y‖² for
// regression sets.
LossAndGrad mlp_forward_backward(const MlpSpec& spec, const Vector& params, const Dataset& batch);
double mlp_loss(const MlpSpec& spec, const Vector& params, const Dataset& batch);
double mlp_accuracy(const MlpSpec& spec, const Vector& params, const Dataset& data);

}  // namespace learnpath
