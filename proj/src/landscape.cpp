#include "learnpath/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "learnpath/error.hpp"
#include "learnpath/matfun.hpp"

namespace learnpath {

void Landscape::check_dim(const Vector& theta) const {
  if (theta.size() != dim()) {
    std::ostringstream msg;
    msg << kind() << ": parameter dimension " << theta.size() << " does not match landscape dimension " << dim();
    throw_error(ErrorCode::kInvalidInput, msg.str());
  }
}

QuadraticLoss::QuadraticLoss(Vector base_point, double base_value, Vector gradient, Matrix hessian)
    : base_point_(std::move(base_point)),
      base_value_(base_value),
      gradient_(std::move(gradient)),
      hessian_(std::move(hessian)) {
  const auto n = base_point_.size();
  if (n == 0 || gradient_.size() != n || hessian_.rows() != n || hessian_.cols() != n) {
    throw_error(ErrorCode::kInvalidInput, "quadratic: inconsistent base point / gradient / Hessian shapes");
  }
  if (!base_point_.allFinite() || !gradient_.allFinite() || !hessian_.allFinite() || !std::isfinite(base_value_)) {
    throw_error(ErrorCode::kInvalidInput, "quadratic: non-finite coefficient");
  }
  const double scale = std::max(1.0, hessian_.cwiseAbs().maxCoeff());
  if ((hessian_ - hessian_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw_error(ErrorCode::kInvalidInput, "quadratic: Hessian is not symmetric");
  }
  hessian_ = 0.5 * (hessian_ + hessian_.transpose());
}

LossEval QuadraticLoss::eval(const Vector& theta) const {
  check_dim(theta);
  const Vector d = theta - base_point_;
  const Vector hd = hessian_ * d;
  return {base_value_ + gradient_.dot(d) + 0.5 * d.dot(hd), gradient_ + hd, hessian_};
}

Vector QuadraticLoss::minimizer() const {
  return base_point_ - matfun::spd_inverse(hessian_) * gradient_;
}

DoubleWell2D::DoubleWell2D(double a, double b, double c, double d) : a_(a), b_(b), c_(c), d_(d) {
  if (!(a > 0.0) || !(c > 0.0) || !std::isfinite(b) || !std::isfinite(d)) {
    throw_error(ErrorCode::kInvalidInput, "double_well_2d: requires a > 0, c > 0 and finite b, d");
  }
}

LossEval DoubleWell2D::eval(const Vector& theta) const {
  check_dim(theta);
  const double x = theta(0), y = theta(1);
  const double w = x * x - b_;
  LossEval out;
  out.value = a_ * w * w + c_ * y * y + d_ * x;
  out.gradient = Vector(2);
  out.gradient << 4.0 * a_ * x * w + d_, 2.0 * c_ * y;
  out.hessian = Matrix::Zero(2, 2);
  out.hessian(0, 0) = 4.0 * a_ * w + 8.0 * a_ * x * x;
  out.hessian(1, 1) = 2.0 * c_;
  return out;
}

std::vector<Vector> DoubleWell2D::minima() const {
  // roots of 4a x³ − 4ab x + d, polished by Newton from a dense bracket scan
  auto f = [&](double x) { return 4.0 * a_ * x * (x * x - b_) + d_; };
  auto fp = [&](double x) { return 12.0 * a_ * x * x - 4.0 * a_ * b_; };
  const double span = 2.0 + std::sqrt(std::abs(b_)) + std::cbrt(std::abs(d_) / a_);
  std::vector<Vector> out;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    double lo = -span + 2.0 * span * i / n;
    double hi = -span + 2.0 * span * (i + 1) / n;
    if (f(lo) * f(hi) > 0.0 && f(lo) != 0.0) continue;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (f(lo) * f(mid) <= 0.0) hi = mid; else lo = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 3; ++it) {
      const double dfx = fp(x);
      if (dfx != 0.0) x -= f(x) / dfx;
    }
    if (fp(x) > 0.0) {
      Vector p(2);
      p << x, 0.0;
      if (out.empty() || std::abs(out.back()(0) - x) > 1e-9) out.push_back(p);
    }
  }
  std::sort(out.begin(), out.end(), [&](const Vector& l, const Vector& r) { return value(l) < value(r); });
  return out;
}

DoubleWell1D::DoubleWell1D(double h, double q, double theta_star) : h_(h), q_(q), theta_star_(theta_star) {
  if (!(h > 0.0) || !(q >= 0.0) || !std::isfinite(q) || !std::isfinite(theta_star)) {
    throw_error(ErrorCode::kInvalidInput, "double_well_1d: requires h > 0, q >= 0 and finite θ*");
  }
  l_min_ = raw_value(critical_points().plus);
}

double DoubleWell1D::raw_value(double theta) const {
  const double w = theta * theta - theta_star_ * theta_star_;
  return 0.25 * h_ * w * w - q_ / 3.0 * theta * theta * theta;
}

double DoubleWell1D::value_at(double theta) const { return raw_value(theta) - l_min_; }

double DoubleWell1D::derivative_at(double theta) const {
  return theta * (h_ * theta * theta - q_ * theta - h_ * theta_star_ * theta_star_);
}

double DoubleWell1D::second_derivative_at(double theta) const {
  return 3.0 * h_ * theta * theta - 2.0 * q_ * theta - h_ * theta_star_ * theta_star_;
}

CriticalPoints1D DoubleWell1D::critical_points() const {
  const double centre = q_ / (2.0 * h_);
  const double radius = std::sqrt(theta_star_ * theta_star_ + centre * centre);
  // θ₋ via the product of roots to avoid cancellation
  const double plus = centre + radius;
  const double minus = plus != 0.0 ? -(theta_star_ * theta_star_) / plus : 0.0;
  return {minus, 0.0, plus};
}

LossEval DoubleWell1D::eval(const Vector& theta) const {
  check_dim(theta);
  const double x = theta(0);
  LossEval out;
  out.value = value_at(x);
  out.gradient = Vector::Constant(1, derivative_at(x));
  out.hessian = Matrix::Constant(1, 1, second_derivative_at(x));
  return out;
}

FiniteDiffReport finite_diff_check(const Landscape& landscape, const Vector& theta, double step) {
  if (!(step > 0.0)) throw_error(ErrorCode::kInvalidInput, "finite_diff_check: step must be positive");
  const LossEval base = landscape.eval(theta);
  FiniteDiffReport report;
  const auto n = theta.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector up = theta, down = theta;
    up(i) += step;
    down(i) -= step;
    const LossEval eu = landscape.eval(up);
    const LossEval ed = landscape.eval(down);
    const double g_fd = (eu.value - ed.value) / (2.0 * step);
    report.grad_error = std::max(report.grad_error, std::abs(g_fd - base.gradient(i)));
    const Vector h_fd = (eu.gradient - ed.gradient) / (2.0 * step);
    report.hess_error = std::max(report.hess_error, (h_fd - base.hessian.col(i)).cwiseAbs().maxCoeff());
  }
  return report;
}

std::shared_ptr<QuadraticLoss> make_diagonal_quadratic(const Vector& curvatures) {
  const auto n = curvatures.size();
  return std::make_shared<QuadraticLoss>(Vector::Zero(n), 0.0, Vector::Zero(n), Matrix(curvatures.asDiagonal()));
}

}  // namespace learnpath
