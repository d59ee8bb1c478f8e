#include "roomsim/fft.hpp"

#include <unsupported/Eigen/FFT>

#include "roomsim/error.hpp"

namespace roomsim {

struct RealFft::Impl {
  Eigen::FFT<double> engine;
  std::vector<Complex> spectrum;
  std::vector<double> signal;
};

RealFft::RealFft(std::size_t n) : n_(n), impl_(std::make_unique<Impl>()) {
  if (n == 0) throw Error(ErrorCode::Config, "FFT length must be positive");
  impl_->engine.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  impl_->spectrum.resize(n);
  impl_->signal.resize(n);
}

RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

void RealFft::forward(std::span<const double> in, std::span<Complex> out) {
  if (in.size() != n_ || out.size() != bins()) throw Error(ErrorCode::Usage, "RealFft::forward size mismatch");
  if (n_ == 1) {  // kissfft does not handle length 1
    out[0] = in[0];
    return;
  }
  std::copy(in.begin(), in.end(), impl_->signal.begin());
  impl_->engine.fwd(impl_->spectrum.data(), impl_->signal.data(), static_cast<Eigen::Index>(n_));
  std::copy_n(impl_->spectrum.begin(), bins(), out.begin());
  // Exact zeros for the purely real bins.
  out[0].imag(0.0);
  if (n_ % 2 == 0) out[n_ / 2].imag(0.0);
}

void RealFft::inverse(std::span<const Complex> in, std::span<double> out) {
  if (in.size() != bins() || out.size() != n_) throw Error(ErrorCode::Usage, "RealFft::inverse size mismatch");
  if (n_ == 1) {
    out[0] = in[0].real();
    return;
  }
  std::copy(in.begin(), in.end(), impl_->spectrum.begin());
  impl_->spectrum[0].imag(0.0);
  if (n_ % 2 == 0) impl_->spectrum[n_ / 2].imag(0.0);
  // Rebuild the conjugate-symmetric upper half for backends that read it.
  for (std::size_t k = bins(); k < n_; ++k) impl_->spectrum[k] = std::conj(impl_->spectrum[n_ - k]);
  impl_->engine.inv(impl_->signal.data(), impl_->spectrum.data(), static_cast<Eigen::Index>(n_));
  std::copy(impl_->signal.begin(), impl_->signal.end(), out.begin());
}

std::vector<Complex> RealFft::forward(std::span<const double> in) {
  std::vector<Complex> out(bins());
  forward(in, out);
  return out;
}

std::vector<double> RealFft::inverse(std::span<const Complex> in) {
  std::vector<double> out(n_);
  inverse(in, out);
  return out;
}

std::vector<double> convolve_direct(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double ai = a[i];
    if (ai == 0.0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += ai * b[j];
  }
  return out;
}

std::vector<double> convolve_fft(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  const std::size_t len = a.size() + b.size() - 1;
  std::size_t n = 1;
  while (n < len) n <<= 1;
  RealFft fft(n);
  std::vector<double> xa(n, 0.0), xb(n, 0.0);
  std::copy(a.begin(), a.end(), xa.begin());
  std::copy(b.begin(), b.end(), xb.begin());
  auto fa = fft.forward(xa);
  const auto fb = fft.forward(xb);
  for (std::size_t k = 0; k < fa.size(); ++k) fa[k] *= fb[k];
  auto y = fft.inverse(fa);
  y.resize(len);
  return y;
}

std::vector<double> convolve(std::span<const double> a, std::span<const double> b) {
  if (a.size() * b.size() > kDirectConvolutionLimit) return convolve_fft(a, b);
  return convolve_direct(a, b);
}

}  // namespace roomsim
