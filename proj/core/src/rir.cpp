#include "roomsim/rir.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "roomsim/error.hpp"
#include "roomsim/fft.hpp"
#include "roomsim/parallel.hpp"

namespace roomsim {

namespace {

struct Tap {
  double distance;
  double amplitude;
  std::size_t image;
};

Rir accumulate(const std::vector<Tap>& taps, double fs, double c, const SincKernelConfig& cfg) {
  if (!(fs > 0.0) || !(c > 0.0)) throw Error(ErrorCode::Config, "fs and c must be positive");
  if (cfg.width < 2 || cfg.width % 2 != 0) throw Error(ErrorCode::Config, "kernel width must be an even integer >= 2");
  double d_max = 0.0;
  for (const auto& t : taps) {
    if (t.distance < 1e-6)
      throw Error(ErrorCode::Singularity,
                  "microphone coincides with image source " + std::to_string(t.image));
    d_max = std::max(d_max, t.distance);
  }
  const auto len = static_cast<std::size_t>(std::ceil(fs * d_max / c)) + static_cast<std::size_t>(cfg.width) + 1;
  Rir rir{std::vector<double>(len, 0.0), fs};
  const long half = cfg.width / 2;
  for (const auto& t : taps) {
    if (t.amplitude == 0.0) continue;
    const double delay = fs * t.distance / c;
    const long center = std::lround(delay);
    for (long k = -half; k <= half; ++k) {
      const long n = center + k;
      if (n < 0 || n >= static_cast<long>(len)) continue;
      rir.samples[static_cast<std::size_t>(n)] += t.amplitude * delta_lp(static_cast<double>(n) - delay, cfg);
    }
  }
  return rir;
}

}  // namespace

double delta_lp(double t, const SincKernelConfig& cfg) {
  const double half = 0.5 * cfg.width;
  if (std::abs(t) > half) return 0.0;
  const double window = 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * t / cfg.width));
  const double sinc = t == 0.0 ? 1.0 : std::sin(std::numbers::pi * t) / (std::numbers::pi * t);
  return window * sinc;
}

Rir compute_rir(const ImageSourceSet& images, const std::vector<bool>& visible, const Point& mic, double fs,
                double c, const SincKernelConfig& cfg) {
  if (images.empty()) throw Error(ErrorCode::Usage, "compute_rir needs at least one image source");
  if (visible.size() != images.size()) throw Error(ErrorCode::Usage, "visibility size does not match images");
  std::vector<Tap> taps;
  taps.reserve(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (!visible[i]) continue;
    const double d = (mic - images.position(i)).norm();
    taps.push_back({d, d < 1e-6 ? 0.0 : images.damping(i) / (4.0 * std::numbers::pi * d), i});
  }
  return accumulate(taps, fs, c, cfg);
}

Rir compute_rir(std::span<const ImageSource> images, const Point& mic, double fs, double c,
                const SincKernelConfig& cfg) {
  if (images.empty()) throw Error(ErrorCode::Usage, "compute_rir needs at least one image source");
  std::vector<Tap> taps;
  taps.reserve(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    const double d = (mic - images[i].position).norm();
    taps.push_back({d, d < 1e-6 ? 0.0 : images[i].damping / (4.0 * std::numbers::pi * d), i});
  }
  return accumulate(taps, fs, c, cfg);
}

Simulation::Simulation(Room room, double fs, double c, int max_order, SincKernelConfig kernel)
    : room_(std::move(room)), fs_(fs), c_(c), max_order_(max_order), kernel_(kernel) {
  if (!(fs_ > 0.0) || !std::isfinite(fs_)) throw Error(ErrorCode::Config, "room fs must be positive");
  if (!(c_ > 0.0) || !std::isfinite(c_)) throw Error(ErrorCode::Config, "speed of sound must be positive");
  if (max_order_ < 0) throw Error(ErrorCode::Config, "max_order must be >= 0");
}

void Simulation::add_source(SoundSource source) {
  sources_.push_back(std::move(source));
  rirs_.clear();
  enumerations_.clear();
}

void Simulation::set_microphones(MicrophoneArray mics) {
  mics_ = std::move(mics);
  rirs_.clear();
  enumerations_.clear();
}

const MicrophoneArray& Simulation::microphones() const {
  if (!mics_) throw Error(ErrorCode::InvalidScene, "no microphone array attached");
  return *mics_;
}

void Simulation::compute_rirs() {
  const auto& mics = microphones();
  if (sources_.empty()) throw Error(ErrorCode::InvalidScene, "no sound source attached");
  std::vector<Enumeration> enumerations;
  enumerations.reserve(sources_.size());
  for (const auto& s : sources_) enumerations.push_back(enumerate(room_, s.position, mics.positions(), max_order_));

  const std::size_t num_mics = mics.size();
  std::vector<std::vector<Rir>> rirs(sources_.size(), std::vector<Rir>(num_mics));
  parallel_for(sources_.size() * num_mics, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const std::size_t s = k / num_mics;
      const std::size_t m = k % num_mics;
      const auto& e = enumerations[s];
      rirs[s][m] = compute_rir(e.images, e.visibility.column(m), mics.position(m), fs_, c_, kernel_);
    }
  });
  enumerations_ = std::move(enumerations);
  rirs_ = std::move(rirs);
}

const Rir& Simulation::rir(std::size_t source, std::size_t mic) const {
  if (rirs_.empty()) throw Error(ErrorCode::Usage, "RIRs have not been computed");
  return rirs_.at(source).at(mic);
}

const Enumeration& Simulation::images(std::size_t source) const {
  if (enumerations_.empty()) throw Error(ErrorCode::Usage, "RIRs have not been computed");
  return enumerations_.at(source);
}

std::vector<std::string> Simulation::warnings() const {
  std::vector<std::string> out;
  for (const auto& e : enumerations_)
    for (const auto& w : e.warnings)
      if (std::find(out.begin(), out.end(), w) == out.end()) out.push_back(w);
  return out;
}

Eigen::MatrixXd Simulation::simulate() {
  const auto& mics = microphones();
  for (std::size_t k = 0; k < sources_.size(); ++k) {
    const auto& s = sources_[k];
    if (s.signal.empty()) throw Error(ErrorCode::InvalidScene, "source " + std::to_string(k) + " has no signal");
    if (s.fs != 0.0 && s.fs != fs_)
      throw Error(ErrorCode::InvalidScene, "source " + std::to_string(k) + " signal rate " + std::to_string(s.fs) +
                                               " Hz differs from room rate " + std::to_string(fs_) + " Hz");
    for (double v : s.signal)
      if (!std::isfinite(v)) throw Error(ErrorCode::InvalidScene, "source " + std::to_string(k) + " signal is not finite");
    if (!(s.delay >= 0.0)) throw Error(ErrorCode::InvalidScene, "source delay must be >= 0");
  }
  if (!has_rirs()) compute_rirs();

  const std::size_t num_mics = mics.size();
  std::vector<std::size_t> offsets(sources_.size());
  std::size_t length = 0;
  for (std::size_t k = 0; k < sources_.size(); ++k) {
    offsets[k] = static_cast<std::size_t>(std::lround(sources_[k].delay * fs_));
    for (std::size_t m = 0; m < num_mics; ++m)
      length = std::max(length, offsets[k] + sources_[k].signal.size() + rirs_[k][m].samples.size() - 1);
  }

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(num_mics), static_cast<Eigen::Index>(length));
  // Sources are summed in a fixed order so the result is bit-reproducible.
  parallel_for(num_mics, [&](std::size_t begin, std::size_t end) {
    for (std::size_t m = begin; m < end; ++m) {
      for (std::size_t k = 0; k < sources_.size(); ++k) {
        const auto y = convolve(sources_[k].signal, rirs_[k][m].samples);
        for (std::size_t n = 0; n < y.size(); ++n)
          out(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(offsets[k] + n)) += y[n];
      }
    }
  });

  if (mics.fs() == fs_) return out;
  std::vector<std::vector<double>> rows(num_mics);
  for (std::size_t m = 0; m < num_mics; ++m) {
    std::vector<double> row(length);
    for (std::size_t n = 0; n < length; ++n) row[n] = out(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    rows[m] = resample(row, fs_, mics.fs());
  }
  Eigen::MatrixXd resampled(static_cast<Eigen::Index>(num_mics), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t m = 0; m < num_mics; ++m)
    for (std::size_t n = 0; n < rows[m].size(); ++n)
      resampled(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) = rows[m][n];
  return resampled;
}

}  // namespace roomsim
