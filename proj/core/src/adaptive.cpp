#include "roomsim/adaptive.hpp"

#include <cmath>
#include <string>

#include "roomsim/error.hpp"

namespace roomsim {

AdaptiveFilter::AdaptiveFilter(std::size_t length) {
  if (length == 0) throw Error(ErrorCode::Config, "adaptive filter length must be >= 1");
  w_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(length));
  x_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(length));
}

AdaptiveOutput AdaptiveFilter::update(double x, double d) {
  if (!std::isfinite(x) || !std::isfinite(d)) throw Error(ErrorCode::Usage, "non-finite adaptive filter input");
  const Eigen::Index n = x_.size();
  for (Eigen::Index i = n - 1; i > 0; --i) x_(i) = x_(i - 1);
  x_(0) = x;
  AdaptiveOutput out;
  out.y = w_.dot(x_);
  out.e = d - out.y;
  adapt(out.e);
  ++n_updates_;
  return out;
}

void AdaptiveFilter::reset() {
  w_.setZero();
  x_.setZero();
  n_updates_ = 0;
}

Lms::Lms(std::size_t length, double mu) : AdaptiveFilter(length), mu_(mu) {
  if (!(mu > 0.0)) throw Error(ErrorCode::Config, "LMS step must be positive");
}

void Lms::adapt(double e) { w_ += mu_ * e * x_; }

Nlms::Nlms(std::size_t length, double mu, double eps) : AdaptiveFilter(length), mu_(mu), eps_(eps) {
  if (!(mu > 0.0)) throw Error(ErrorCode::Config, "NLMS step must be positive");
  if (!(eps > 0.0)) throw Error(ErrorCode::Config, "NLMS regularizer must be positive");
}

void Nlms::adapt(double e) { w_ += (mu_ * e / (eps_ + x_.squaredNorm())) * x_; }

Rls::Rls(std::size_t length, double lambda, double delta) : AdaptiveFilter(length), lambda_(lambda), delta_(delta) {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw Error(ErrorCode::Config, "RLS forgetting factor must lie in (0, 1]");
  if (!(delta > 0.0)) throw Error(ErrorCode::Config, "RLS delta must be positive");
  p_ = Eigen::MatrixXd::Identity(w_.size(), w_.size()) / delta_;
}

void Rls::reset() {
  AdaptiveFilter::reset();
  p_ = Eigen::MatrixXd::Identity(w_.size(), w_.size()) / delta_;
}

void Rls::adapt(double e) {
  const Eigen::VectorXd px = p_ * x_;
  const Eigen::VectorXd k = px / (lambda_ + x_.dot(px));
  w_ += k * e;
  p_ = (p_ - k * px.transpose()) / lambda_;
  p_ = 0.5 * (p_ + p_.transpose()).eval();
}

std::unique_ptr<AdaptiveFilter> make_adaptive_filter(std::string_view method, std::size_t length, double param) {
  if (method == "lms") return std::make_unique<Lms>(length, param);
  if (method == "nlms") return std::make_unique<Nlms>(length, param);
  if (method == "rls") return std::make_unique<Rls>(length, param);
  throw Error(ErrorCode::Usage, "unknown adaptive method '" + std::string(method) + "'");
}

}  // namespace roomsim
