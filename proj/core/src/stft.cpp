#include "roomsim/stft.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "roomsim/error.hpp"

namespace roomsim {

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / n));
  return w;
}

std::vector<double> sqrt_hann_window(std::size_t n) {
  auto w = hann_window(n);
  for (auto& v : w) v = std::sqrt(v);
  return w;
}

void StftConfig::validate() const {
  if (frame_len == 0 || hop == 0 || hop > frame_len)
    throw Error(ErrorCode::Config, "STFT needs 0 < hop <= frame_len");
  if (channels == 0) throw Error(ErrorCode::Config, "STFT needs at least one channel");
  if (!analysis_window.empty() && analysis_window.size() != frame_len)
    throw Error(ErrorCode::Config, "analysis window length must equal frame_len");
  if (!synthesis_window.empty() && synthesis_window.size() != frame_len)
    throw Error(ErrorCode::Config, "synthesis window length must equal frame_len");
}

StftConfig StftConfig::sqrt_hann(std::size_t frame_len, std::size_t hop, std::size_t channels) {
  StftConfig cfg;
  cfg.frame_len = frame_len;
  cfg.hop = hop;
  cfg.channels = channels;
  cfg.analysis_window = sqrt_hann_window(frame_len);
  cfg.synthesis_window = sqrt_hann_window(frame_len);
  return cfg;
}

Stft::Stft(StftConfig cfg) : cfg_(std::move(cfg)), fft_((cfg_.validate(), cfg_.fft_len())) {
  input_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cfg_.channels), static_cast<Eigen::Index>(cfg_.frame_len));
  output_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cfg_.channels), static_cast<Eigen::Index>(cfg_.fft_len()));
  time_.assign(cfg_.fft_len(), 0.0);
  spec_.assign(cfg_.bins(), Complex{});

  // Overlap constant sum_m wa(n + m hop) ws(n + m hop) over one hop period.
  auto wa = [&](std::size_t i) { return cfg_.analysis_window.empty() ? 1.0 : cfg_.analysis_window[i]; };
  auto ws = [&](std::size_t i) { return cfg_.synthesis_window.empty() ? 1.0 : cfg_.synthesis_window[i]; };
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sum = 0.0;
  for (std::size_t n = 0; n < cfg_.hop; ++n) {
    double s = 0.0;
    for (std::size_t i = n; i < cfg_.frame_len; i += cfg_.hop) s += wa(i) * ws(i);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
    sum += s;
  }
  cola_ = sum / static_cast<double>(cfg_.hop);
  is_cola_ = hi - lo <= 1e-10 * std::abs(hi);
  if (!(std::abs(cola_) > 0.0)) throw Error(ErrorCode::Config, "window overlap sums to zero");
}

void Stft::reset() {
  input_.setZero();
  output_.setZero();
  frames_in_ = 0;
}

SpectralFrame Stft::analysis(const Eigen::Ref<const Eigen::MatrixXd>& x) {
  if (x.rows() != static_cast<Eigen::Index>(cfg_.channels) || x.cols() != static_cast<Eigen::Index>(cfg_.hop))
    throw Error(ErrorCode::Usage, "analysis expects exactly hop samples per channel");
  const auto hop = static_cast<Eigen::Index>(cfg_.hop);
  const auto keep = static_cast<Eigen::Index>(cfg_.frame_len) - hop;
  if (keep > 0) input_.leftCols(keep) = input_.rightCols(keep).eval();
  input_.rightCols(hop) = x;

  SpectralFrame frame;
  frame.frame_index = frames_in_++;
  frame.bins.resize(static_cast<Eigen::Index>(cfg_.bins()), static_cast<Eigen::Index>(cfg_.channels));
  for (std::size_t ch = 0; ch < cfg_.channels; ++ch) {
    std::fill(time_.begin(), time_.end(), 0.0);
    for (std::size_t i = 0; i < cfg_.frame_len; ++i) {
      const double w = cfg_.analysis_window.empty() ? 1.0 : cfg_.analysis_window[i];
      time_[cfg_.zeros_front + i] = w * input_(static_cast<Eigen::Index>(ch), static_cast<Eigen::Index>(i));
    }
    fft_.forward(time_, spec_);
    for (std::size_t k = 0; k < spec_.size(); ++k)
      frame.bins(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(ch)) = spec_[k];
  }
  return frame;
}

Eigen::MatrixXd Stft::synthesis(const SpectralFrame& frame) {
  if (frame.bins.rows() != static_cast<Eigen::Index>(cfg_.bins()) ||
      frame.bins.cols() != static_cast<Eigen::Index>(cfg_.channels))
    throw Error(ErrorCode::Usage, "spectral frame does not match the STFT configuration");
  const std::size_t n = cfg_.fft_len();
  for (std::size_t ch = 0; ch < cfg_.channels; ++ch) {
    for (std::size_t k = 0; k < spec_.size(); ++k)
      spec_[k] = frame.bins(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(ch));
    fft_.inverse(spec_, time_);
    for (std::size_t i = 0; i < n; ++i) {
      double w = 1.0;
      if (!cfg_.synthesis_window.empty() && i >= cfg_.zeros_front && i < cfg_.zeros_front + cfg_.frame_len)
        w = cfg_.synthesis_window[i - cfg_.zeros_front];
      output_(static_cast<Eigen::Index>(ch), static_cast<Eigen::Index>(i)) += w * time_[i];
    }
  }
  const auto hop = static_cast<Eigen::Index>(cfg_.hop);
  const auto front = static_cast<Eigen::Index>(cfg_.zeros_front);
  Eigen::MatrixXd ready = output_.middleCols(front, hop) / cola_;
  const auto len = static_cast<Eigen::Index>(n);
  output_.leftCols(len - hop) = output_.rightCols(len - hop).eval();
  output_.rightCols(hop).setZero();
  return ready;
}

std::vector<SpectralFrame> stft_once(const Eigen::Ref<const Eigen::MatrixXd>& x, const StftConfig& cfg) {
  Stft engine(cfg);
  if (x.rows() != static_cast<Eigen::Index>(cfg.channels))
    throw Error(ErrorCode::Usage, "signal channel count does not match the STFT configuration");
  const auto hop = static_cast<Eigen::Index>(cfg.hop);
  const Eigen::Index frames = (x.cols() + hop - 1) / hop;
  std::vector<SpectralFrame> out;
  out.reserve(static_cast<std::size_t>(frames));
  Eigen::MatrixXd block(x.rows(), hop);
  for (Eigen::Index t = 0; t < frames; ++t) {
    const Eigen::Index start = t * hop;
    const Eigen::Index avail = std::min(hop, x.cols() - start);
    block.setZero();
    block.leftCols(avail) = x.middleCols(start, avail);
    out.push_back(engine.analysis(block));
  }
  return out;
}

Eigen::MatrixXd istft_once(std::span<const SpectralFrame> frames, const StftConfig& cfg) {
  Stft engine(cfg);
  const auto hop = static_cast<Eigen::Index>(cfg.hop);
  Eigen::MatrixXd y(static_cast<Eigen::Index>(cfg.channels), static_cast<Eigen::Index>(frames.size()) * hop);
  for (std::size_t t = 0; t < frames.size(); ++t)
    y.middleCols(static_cast<Eigen::Index>(t) * hop, hop) = engine.synthesis(frames[t]);
  return y;
}

}  // namespace roomsim
