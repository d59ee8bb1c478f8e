#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "roomsim/adaptive.hpp"
#include "roomsim/error.hpp"

using namespace roomsim;

namespace {

struct Data {
  std::vector<double> x, d;
};

// d = h * x + noise, with x white Gaussian.
Data system_id(const Eigen::VectorXd& h, std::size_t n, double noise, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Data out;
  out.x.resize(n);
  for (auto& v : out.x) v = g(rng);
  out.d.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0;
    for (Eigen::Index k = 0; k < h.size() && static_cast<std::size_t>(k) <= i; ++k) acc += h(k) * out.x[i - k];
    out.d[i] = acc + noise * g(rng);
  }
  return out;
}

}  // namespace

TEST(Nlms, ScalarConvergesToTwo) {
  Nlms f(1, 0.5);
  int steps = 0;
  while (std::abs(f.weights()(0) - 2.0) > 1e-6 && steps < 50) {
    f.update(1.0, 2.0);
    ++steps;
  }
  EXPECT_LE(steps, 50);
  EXPECT_NEAR(f.weights()(0), 2.0, 1e-6);
}

TEST(AdaptiveFilter, OutputPlusErrorIsDesired) {
  const auto data = system_id(Eigen::VectorXd::Random(8), 300, 0.1, 1);
  for (const char* m : {"lms", "nlms", "rls"}) {
    auto f = make_adaptive_filter(m, 8, m == std::string("lms") ? 0.01 : m == std::string("nlms") ? 0.5 : 1.0);
    for (std::size_t i = 0; i < data.x.size(); ++i) {
      const auto out = f->update(data.x[i], data.d[i]);
      EXPECT_NEAR(out.y + out.e, data.d[i], 1e-12);
    }
    EXPECT_EQ(f->updates(), data.x.size());
  }
}

TEST(Lms, StableForSmallStep) {
  const auto data = system_id(Eigen::VectorXd::Random(16), 100000, 0.01, 2);
  Lms f(16, 0.01);
  double last = 0;
  for (std::size_t i = 0; i < data.x.size(); ++i) last = f.update(data.x[i], data.d[i]).e;
  EXPECT_TRUE(f.weights().allFinite());
  EXPECT_LT(std::abs(last), 1.0);
}

TEST(AdaptiveFilter, ResetMatchesFreshFilter) {
  const auto data = system_id(Eigen::VectorXd::Random(4), 200, 0.05, 3);
  for (const char* m : {"lms", "nlms", "rls"}) {
    auto used = make_adaptive_filter(m, 4, m == std::string("lms") ? 0.05 : m == std::string("nlms") ? 0.5 : 0.99);
    for (std::size_t i = 0; i < 50; ++i) used->update(data.x[i], data.d[i]);
    used->reset();
    used->reset();
    EXPECT_EQ(used->updates(), 0u);
    auto fresh = make_adaptive_filter(m, 4, m == std::string("lms") ? 0.05 : m == std::string("nlms") ? 0.5 : 0.99);
    for (std::size_t i = 0; i < data.x.size(); ++i) {
      const auto a = used->update(data.x[i], data.d[i]);
      const auto b = fresh->update(data.x[i], data.d[i]);
      ASSERT_EQ(a.e, b.e) << m << " step " << i;
    }
  }
}

TEST(AdaptiveFilter, RejectsNonFiniteWithoutChangingState) {
  Rls f(3);
  f.update(0.5, 1.0);
  f.update(-0.2, 0.3);
  const Eigen::VectorXd w = f.weights(), x = f.buffer();
  const Eigen::MatrixXd p = f.precision();
  for (auto [xv, dv] : {std::pair{std::numeric_limits<double>::quiet_NaN(), 1.0},
                        std::pair{1.0, std::numeric_limits<double>::infinity()}}) {
    try {
      f.update(xv, dv);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::Usage);
    }
  }
  EXPECT_EQ(f.weights(), w);
  EXPECT_EQ(f.buffer(), x);
  EXPECT_EQ(f.precision(), p);
  EXPECT_EQ(f.updates(), 2u);
}

TEST(Rls, MatchesRegularizedBatchSolution) {
  for (unsigned seed = 10; seed < 15; ++seed) {
    const std::size_t L = 3 + seed % 5;
    const auto data = system_id(Eigen::VectorXd::Random(static_cast<Eigen::Index>(L)), 120, 0.2, seed);
    Rls f(L, 1.0, 1e-2);
    for (std::size_t i = 0; i < data.x.size(); ++i) f.update(data.x[i], data.d[i]);
    const Eigen::VectorXd ref = oracle::regularized_ls(data.x, data.d, L, 1e-2);
    EXPECT_LT((f.weights() - ref).norm(), 1e-9) << seed;
  }
}

TEST(Rls, ForgettingFactorMatchesWeightedBatch) {
  const double lambda = 0.97, delta = 0.1;
  const std::size_t L = 4, n = 150;
  const auto data = system_id(Eigen::VectorXd::Random(4), n, 0.3, 21);
  Rls f(L, lambda, delta);
  for (std::size_t i = 0; i < n; ++i) f.update(data.x[i], data.d[i]);
  // (lambda^n delta I + sum lambda^(n-1-i) x_i x_i^T) w = sum lambda^(n-1-i) x_i d_i
  Eigen::MatrixXd A = std::pow(lambda, static_cast<double>(n)) * delta * Eigen::MatrixXd::Identity(L, L);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(L);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd xi = Eigen::VectorXd::Zero(L);
    for (std::size_t k = 0; k < L && k <= i; ++k) xi(static_cast<Eigen::Index>(k)) = data.x[i - k];
    const double s = std::pow(lambda, static_cast<double>(n - 1 - i));
    A += s * xi * xi.transpose();
    b += s * xi * data.d[i];
  }
  EXPECT_LT((f.weights() - A.fullPivLu().solve(b)).norm(), 1e-9);
}

TEST(Rls, IdentifiesSystemWithSmallDelta) {
  Eigen::VectorXd h(5);
  h << 0.8, -0.3, 0.2, 0.05, -0.1;
  const auto data = system_id(h, 500, 0.0, 31);
  Rls f(5, 1.0, 1e-8);
  for (std::size_t i = 0; i < data.x.size(); ++i) f.update(data.x[i], data.d[i]);
  EXPECT_LT((f.weights() - h).norm(), 1e-6);
}

TEST(Factory, Errors) {
  EXPECT_THROW(make_adaptive_filter("kalman", 4, 1.0), Error);
  EXPECT_THROW(make_adaptive_filter("rls", 0, 1.0), Error);
  EXPECT_THROW(Rls(4, 1.5), Error);
  EXPECT_THROW(Lms(4, -0.1), Error);
}
