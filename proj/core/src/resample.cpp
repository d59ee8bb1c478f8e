#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "roomsim/error.hpp"
#include "roomsim/rir.hpp"

namespace roomsim {

namespace {

long integral_rate(double fs) {
  if (!(fs > 0.0) || !std::isfinite(fs)) throw Error(ErrorCode::Config, "sampling rates must be positive");
  const double r = std::round(fs);
  if (std::abs(fs - r) > 1e-6 || r > 1e12)
    throw Error(ErrorCode::Config, "sampling rate " + std::to_string(fs) + " Hz is not an integer; ratio is not rational");
  return static_cast<long>(r);
}

double sinc(double x) {
  if (x == 0.0) return 1.0;
  return std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
}

}  // namespace

std::vector<double> resample(std::span<const double> x, double fs_in, double fs_out) {
  const long in = integral_rate(fs_in);
  const long out = integral_rate(fs_out);
  const long g = std::gcd(in, out);
  const long up = out / g;
  const long down = in / g;
  if (up > kMaxResampleFactor || down > kMaxResampleFactor)
    throw Error(ErrorCode::Config, "resampling ratio " + std::to_string(out) + "/" + std::to_string(in) +
                                       " reduces to " + std::to_string(up) + "/" + std::to_string(down) +
                                       ", which exceeds the supported factor");
  if (up == 1 && down == 1) return {x.begin(), x.end()};

  const auto out_len = static_cast<std::size_t>(std::llround(static_cast<double>(x.size()) * up / down));
  // Filter runs at the common rate in * up; cutoff 0.9 x Nyquist of the lower
  // rate, transition band 0.1 x the lower rate, ~100 dB Kaiser stopband.
  const long factor = std::max(up, down);
  const double fc = 0.45 / static_cast<double>(factor);  // cycles per sample at the common rate
  const long half = 32 * factor;
  const double beta = 0.1102 * (100.0 - 8.7);
  const double i0_beta = std::cyl_bessel_i(0.0, beta);
  std::vector<double> h(static_cast<std::size_t>(2 * half + 1));
  for (long j = -half; j <= half; ++j) {
    const double r = static_cast<double>(j) / static_cast<double>(half);
    const double kaiser = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
    h[static_cast<std::size_t>(j + half)] = static_cast<double>(up) * 2.0 * fc * sinc(2.0 * fc * j) * kaiser;
  }

  const auto len = static_cast<long>(x.size());
  std::vector<double> y(out_len, 0.0);
  for (std::size_t n = 0; n < out_len; ++n) {
    const long center = static_cast<long>(n) * down;
    // Input sample q sits at common-rate index q * up; use taps |center - q*up| <= half.
    const long first = center - half;
    const long q_lo = first <= 0 ? 0 : (first + up - 1) / up;
    const long q_hi = std::min(len - 1, (center + half) / up);
    double acc = 0.0;
    for (long q = q_lo; q <= q_hi; ++q)
      acc += h[static_cast<std::size_t>(center - q * up + half)] * x[static_cast<std::size_t>(q)];
    y[n] = acc;
  }
  return y;
}

}  // namespace roomsim
