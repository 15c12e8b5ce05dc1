#include "learnpath/mlp.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "learnpath/error.hpp"

namespace learnpath {
namespace {

using ConstMap = Eigen::Map<const Matrix>;
using Map = Eigen::Map<Matrix>;

struct LayerView {
  Eigen::Index offset, rows, cols;
};

std::vector<LayerView> layout(const MlpSpec& spec) {
  std::vector<LayerView> views;
  Eigen::Index offset = 0;
  for (int l = 0; l < spec.layers(); ++l) {
    views.push_back({offset, spec.widths[l + 1], spec.widths[l]});
    offset += static_cast<Eigen::Index>(spec.widths[l + 1]) * (spec.widths[l] + 1);
  }
  return views;
}

Matrix activate(const MlpSpec& spec, const Matrix& z) {
  return spec.activation == Activation::kRelu ? Matrix(z.cwiseMax(0.0)) : Matrix(z.array().tanh().matrix());
}

// derivative expressed through pre-activation z and activation a
Matrix activation_grad(const MlpSpec& spec, const Matrix& z, const Matrix& a) {
  if (spec.activation == Activation::kRelu) return (z.array() > 0.0).cast<double>().matrix();
  return (1.0 - a.array().square()).matrix();
}

void check_inputs(const MlpSpec& spec, const Vector& params, const Matrix& inputs) {
  spec.validate();
  if (params.size() != spec.param_count()) {
    std::ostringstream msg;
    msg << "mlp: expected " << spec.param_count() << " parameters, got " << params.size();
    throw_error(ErrorCode::kInvalidInput, msg.str());
  }
  if (inputs.cols() != spec.widths.front()) {
    std::ostringstream msg;
    msg << "mlp: input width " << inputs.cols() << " does not match " << spec.widths.front();
    throw_error(ErrorCode::kInvalidInput, msg.str());
  }
}

struct Forward {
  std::vector<Matrix> pre, post;  // post[0] = inputs
};

Forward run_forward(const MlpSpec& spec, const Vector& params, const Matrix& inputs) {
  Forward f;
  f.post.push_back(inputs);
  const auto views = layout(spec);
  for (int l = 0; l < spec.layers(); ++l) {
    const auto& lv = views[l];
    const ConstMap w(params.data() + lv.offset, lv.rows, lv.cols);
    const Eigen::Map<const Vector> b(params.data() + lv.offset + lv.rows * lv.cols, lv.rows);
    Matrix z = f.post.back() * w.transpose();
    z.rowwise() += b.transpose();
    const bool last = l + 1 == spec.layers();
    f.post.push_back(last ? z : activate(spec, z));
    f.pre.push_back(std::move(z));
  }
  return f;
}

// Loss and ∂loss/∂logits.
std::pair<double, Matrix> output_loss(const Matrix& logits, const Dataset& batch) {
  const double n = static_cast<double>(logits.rows());
  if (batch.is_regression()) {
    if (batch.targets.cols() != logits.cols()) {
      throw_error(ErrorCode::kInvalidInput, "mlp: target width does not match the output layer");
    }
    const Matrix diff = logits - batch.targets;
    return {0.5 * diff.squaredNorm() / n, diff / n};
  }
  if (batch.classes != logits.cols()) {
    throw_error(ErrorCode::kInvalidInput, "mlp: class count does not match the output layer");
  }
  Matrix grad(logits.rows(), logits.cols());
  double loss = 0.0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double peak = logits.row(i).maxCoeff();
    const Eigen::RowVectorXd e = (logits.row(i).array() - peak).exp().matrix();
    const double total = e.sum();
    const int y = batch.labels[static_cast<std::size_t>(i)];
    loss += std::log(total) - (logits(i, y) - peak);
    grad.row(i) = e / total;
    grad(i, y) -= 1.0;
  }
  return {loss / n, grad / n};
}

}  // namespace

void MlpSpec::validate() const {
  if (widths.size() < 2) throw_error(ErrorCode::kInvalidInput, "MlpSpec: need at least input and output widths");
  for (int w : widths) {
    if (w <= 0) throw_error(ErrorCode::kInvalidInput, "MlpSpec: widths must be positive");
  }
  if (!(init_scale >= 0.0) || !std::isfinite(init_scale)) {
    throw_error(ErrorCode::kInvalidInput, "MlpSpec: init_scale must be finite and non-negative");
  }
}

int MlpSpec::param_count() const {
  int count = 0;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) count += widths[l + 1] * (widths[l] + 1);
  return count;
}

Vector init_params(const MlpSpec& spec) {
  spec.validate();
  Vector params = Vector::Zero(spec.param_count());
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double gain = spec.activation == Activation::kRelu ? std::sqrt(2.0) : 1.0;
  for (const auto& lv : layout(spec)) {
    const double scale = spec.init_scale * gain / std::sqrt(static_cast<double>(lv.cols));
    for (Eigen::Index i = 0; i < lv.rows * lv.cols; ++i) params(lv.offset + i) = scale * normal(rng);
  }
  return params;
}

Matrix mlp_forward(const MlpSpec& spec, const Vector& params, const Matrix& inputs) {
  check_inputs(spec, params, inputs);
  return run_forward(spec, params, inputs).post.back();
}

LossAndGrad mlp_forward_backward(const MlpSpec& spec, const Vector& params, const Dataset& batch) {
  check_inputs(spec, params, batch.inputs);
  if (batch.size() == 0) throw_error(ErrorCode::kInvalidInput, "mlp: empty batch");
  const Forward f = run_forward(spec, params, batch.inputs);
  auto [loss, delta] = output_loss(f.post.back(), batch);

  LossAndGrad out{loss, Vector::Zero(params.size())};
  const auto views = layout(spec);
  for (int l = spec.layers() - 1; l >= 0; --l) {
    const auto& lv = views[l];
    Map gw(out.gradient.data() + lv.offset, lv.rows, lv.cols);
    gw = delta.transpose() * f.post[l];
    out.gradient.segment(lv.offset + lv.rows * lv.cols, lv.rows) = delta.colwise().sum().transpose();
    if (l > 0) {
      const ConstMap w(params.data() + lv.offset, lv.rows, lv.cols);
      delta = (delta * w).cwiseProduct(activation_grad(spec, f.pre[l - 1], f.post[l]));
    }
  }
  return out;
}

double mlp_loss(const MlpSpec& spec, const Vector& params, const Dataset& batch) {
  check_inputs(spec, params, batch.inputs);
  return output_loss(run_forward(spec, params, batch.inputs).post.back(), batch).first;
}

double mlp_accuracy(const MlpSpec& spec, const Vector& params, const Dataset& data) {
  if (data.is_regression()) throw_error(ErrorCode::kInvalidInput, "mlp_accuracy: regression dataset");
  if (data.size() == 0) return 0.0;
  const Matrix logits = mlp_forward(spec, params, data.inputs);
  int hits = 0;
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    Eigen::Index arg = 0;
    logits.row(i).maxCoeff(&arg);
    hits += arg == data.labels[static_cast<std::size_t>(i)];
  }
  return static_cast<double>(hits) / data.size();
}

}  // namespace learnpath
