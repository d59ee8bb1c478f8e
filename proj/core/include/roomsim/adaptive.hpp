#pragma once

#include <cstddef>
#include <memory>
#include <string_view>

#include <Eigen/Core>

namespace roomsim {

struct AdaptiveOutput {
  double y = 0.0;  // prediction w^T x_buf
  double e = 0.0;  // d - y
};

/// Sample-by-sample real FIR adaptive filter of length L. The input buffer
/// holds the last L samples, most recent first.
class AdaptiveFilter {
 public:
  explicit AdaptiveFilter(std::size_t length);
  virtual ~AdaptiveFilter() = default;

  // Rejects non-finite samples with a Usage error and leaves the state alone.
  AdaptiveOutput update(double x, double d);
  virtual void reset();

  std::size_t length() const noexcept { return static_cast<std::size_t>(w_.size()); }
  const Eigen::VectorXd& weights() const noexcept { return w_; }
  const Eigen::VectorXd& buffer() const noexcept { return x_; }
  std::size_t updates() const noexcept { return n_updates_; }

 protected:
  virtual void adapt(double e) = 0;

  Eigen::VectorXd w_;
  Eigen::VectorXd x_;

 private:
  std::size_t n_updates_ = 0;
};

class Lms : public AdaptiveFilter {
 public:
  Lms(std::size_t length, double mu);

 protected:
  void adapt(double e) override;

 private:
  double mu_;
};

class Nlms : public AdaptiveFilter {
 public:
  Nlms(std::size_t length, double mu, double eps = 1e-8);

 protected:
  void adapt(double e) override;

 private:
  double mu_;
  double eps_;
};

class Rls : public AdaptiveFilter {
 public:
  Rls(std::size_t length, double lambda = 1.0, double delta = 1e-2);

  void reset() override;
  const Eigen::MatrixXd& precision() const noexcept { return p_; }

 protected:
  void adapt(double e) override;

 private:
  double lambda_;
  double delta_;
  Eigen::MatrixXd p_;
};

// "lms", "nlms" or "rls"; `param` is mu for LMS/NLMS and lambda for RLS.
std::unique_ptr<AdaptiveFilter> make_adaptive_filter(std::string_view method, std::size_t length, double param);

}  // namespace roomsim
