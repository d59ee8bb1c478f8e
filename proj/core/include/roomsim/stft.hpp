#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "roomsim/fft.hpp"

namespace roomsim {

// Periodic Hann window and its square root (COLA at 50% overlap).
std::vector<double> hann_window(std::size_t n);
std::vector<double> sqrt_hann_window(std::size_t n);

struct StftConfig {
  std::size_t frame_len = 512;
  std::size_t hop = 256;
  std::size_t zeros_front = 0;
  std::size_t zeros_back = 0;
  // Empty means rectangular.
  std::vector<double> analysis_window;
  std::vector<double> synthesis_window;
  std::size_t channels = 1;

  std::size_t fft_len() const noexcept { return frame_len + zeros_front + zeros_back; }
  std::size_t bins() const noexcept { return fft_len() / 2 + 1; }
  void validate() const;

  // sqrt-Hann analysis and synthesis windows.
  static StftConfig sqrt_hann(std::size_t frame_len, std::size_t hop, std::size_t channels = 1);
};

/// One frame in the STFT domain: bins (fft_len / 2 + 1) x channels.
struct SpectralFrame {
  Eigen::MatrixXcd bins;
  std::size_t frame_index = 0;
};

/// Streaming STFT engine. Each analysis() call consumes `hop` new samples per
/// channel; each synthesis() call returns `hop` output samples per channel by
/// overlap-add. For unmodified spectra and COLA windows the output equals the
/// input delayed by frame_len - hop samples.
///
/// Output is normalized by the window overlap constant computed at
/// construction. The synthesis window is applied to the frame_len core of the
/// inverse transform; zero-padded regions are overlap-added unweighted, and
/// anything landing in the front padding of a frame is dropped because those
/// samples were already emitted.
class Stft {
 public:
  explicit Stft(StftConfig cfg);

  const StftConfig& config() const noexcept { return cfg_; }
  std::size_t latency() const noexcept { return cfg_.frame_len - cfg_.hop; }
  double cola_constant() const noexcept { return cola_; }
  bool is_cola() const noexcept { return is_cola_; }

  // x: channels x hop.
  SpectralFrame analysis(const Eigen::Ref<const Eigen::MatrixXd>& x);
  // Returns channels x hop.
  Eigen::MatrixXd synthesis(const SpectralFrame& frame);

  void reset();

 private:
  StftConfig cfg_;
  RealFft fft_;
  Eigen::MatrixXd input_;   // channels x frame_len
  Eigen::MatrixXd output_;  // channels x fft_len overlap-add accumulator
  std::vector<double> time_;
  std::vector<Complex> spec_;
  std::size_t frames_in_ = 0;
  double cola_ = 1.0;
  bool is_cola_ = true;
};

// One-shot transforms equivalent to streaming over the whole signal. The input
// (channels x samples) is zero-padded to a whole number of hops.
std::vector<SpectralFrame> stft_once(const Eigen::Ref<const Eigen::MatrixXd>& x, const StftConfig& cfg);
// Returns channels x (frames * hop), delayed by frame_len - hop like the stream.
Eigen::MatrixXd istft_once(std::span<const SpectralFrame> frames, const StftConfig& cfg);

}  // namespace roomsim
