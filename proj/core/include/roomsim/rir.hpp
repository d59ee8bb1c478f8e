#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "roomsim/image_source.hpp"
#include "roomsim/microphone_array.hpp"

namespace roomsim {

/// Fractional-delay kernel: raised-cosine windowed sinc spanning `width`
/// sample intervals (width + 1 taps).
struct SincKernelConfig {
  int width = 80;
};

// 0.5 (1 + cos(2 pi t / width)) sinc(t) for |t| <= width / 2, 0 elsewhere.
double delta_lp(double t, const SincKernelConfig& cfg = {});

struct Rir {
  std::vector<double> samples;
  double fs = 0.0;
};

// Sum over visible images of damping / (4 pi d) * delta_lp(n - fs d / c).
// Sample 0 is the emission time. Length is ceil(fs d_max / c) + width + 1.
Rir compute_rir(const ImageSourceSet& images, const std::vector<bool>& visible, const Point& mic, double fs,
                double c, const SincKernelConfig& cfg = {});
Rir compute_rir(std::span<const ImageSource> images, const Point& mic, double fs, double c,
                const SincKernelConfig& cfg = {});

struct SoundSource {
  Point position = Point::Zero();
  std::vector<double> signal;
  // Rate of `signal`; 0 means "same as the room".
  double fs = 0.0;
  // Start offset in seconds, applied as a whole number of samples.
  double delay = 0.0;
};

/// Room plus acoustic parameters, sources and a microphone array.
class Simulation {
 public:
  Simulation(Room room, double fs, double c = 343.0, int max_order = 1, SincKernelConfig kernel = {});

  const Room& room() const noexcept { return room_; }
  double fs() const noexcept { return fs_; }
  double c() const noexcept { return c_; }
  int max_order() const noexcept { return max_order_; }

  void add_source(SoundSource source);
  void set_microphones(MicrophoneArray mics);

  std::span<const SoundSource> sources() const noexcept { return sources_; }
  const MicrophoneArray& microphones() const;

  // Runs the image source model and builds every (source, mic) RIR.
  void compute_rirs();
  bool has_rirs() const noexcept { return !rirs_.empty(); }
  const Rir& rir(std::size_t source, std::size_t mic) const;
  const Enumeration& images(std::size_t source) const;
  std::vector<std::string> warnings() const;

  // Microphone signals (rows) at the array rate. Computes RIRs on demand.
  Eigen::MatrixXd simulate();

 private:
  Room room_;
  double fs_;
  double c_;
  int max_order_;
  SincKernelConfig kernel_;
  std::vector<SoundSource> sources_;
  std::optional<MicrophoneArray> mics_;
  std::vector<Enumeration> enumerations_;
  std::vector<std::vector<Rir>> rirs_;  // [source][mic]
};

// Rational-ratio polyphase resampling with a Kaiser-windowed sinc lowpass at
// 0.9 x the Nyquist rate of the lower of the two rates. Output length is
// round(len(x) * fs_out / fs_in). Rates must be integers (in Hz) whose reduced
// ratio has terms no larger than kMaxResampleFactor.
inline constexpr long kMaxResampleFactor = 1024;
std::vector<double> resample(std::span<const double> x, double fs_in, double fs_out);

}  // namespace roomsim
