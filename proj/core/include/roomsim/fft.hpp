#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

namespace roomsim {

using Complex = std::complex<double>;

/// Real-input DFT of a fixed length n (any n >= 1). Forward output holds bins
/// 0..n/2 inclusive; inverse is scaled by 1/n so inverse(forward(x)) == x.
/// An instance caches twiddles and is not safe for concurrent use.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(RealFft&&) noexcept;
  RealFft& operator=(RealFft&&) noexcept;

  std::size_t size() const noexcept { return n_; }
  std::size_t bins() const noexcept { return n_ / 2 + 1; }

  void forward(std::span<const double> in, std::span<Complex> out);
  void inverse(std::span<const Complex> in, std::span<double> out);

  std::vector<Complex> forward(std::span<const double> in);
  std::vector<double> inverse(std::span<const Complex> in);

 private:
  struct Impl;
  std::size_t n_;
  std::unique_ptr<Impl> impl_;
};

// Linear convolution. Uses the FFT route when a.size() * b.size() exceeds
// kDirectConvolutionLimit, direct summation otherwise.
inline constexpr std::size_t kDirectConvolutionLimit = 1u << 16;
std::vector<double> convolve(std::span<const double> a, std::span<const double> b);
std::vector<double> convolve_direct(std::span<const double> a, std::span<const double> b);
std::vector<double> convolve_fft(std::span<const double> a, std::span<const double> b);

}  // namespace roomsim
