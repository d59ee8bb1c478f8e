#include "roomsim/beamforming.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "roomsim/error.hpp"

namespace roomsim {

namespace {

constexpr Complex kJ{0.0, 1.0};

Eigen::VectorXcd summed_target(double freq, std::span<const Point> targets, const MicrophoneArray& array,
                               FieldMode mode, double c, std::span<const double> gains) {
  if (targets.empty()) throw Error(ErrorCode::DegenerateTarget, "no beamforming target given");
  if (!gains.empty() && gains.size() != targets.size())
    throw Error(ErrorCode::Config, "rake gains must match the number of targets");
  const Eigen::MatrixXcd a = steering_vector(freq, targets, array, mode, true, c);
  Eigen::VectorXcd sum = Eigen::VectorXcd::Zero(a.rows());
  for (Eigen::Index k = 0; k < a.cols(); ++k) sum += (gains.empty() ? 1.0 : gains[static_cast<std::size_t>(k)]) * a.col(k);
  return sum;
}

}  // namespace

Point direction_from_angles(double azimuth, double colatitude) {
  return Point(std::sin(colatitude) * std::cos(azimuth), std::sin(colatitude) * std::sin(azimuth),
               std::cos(colatitude));
}

Eigen::MatrixXcd steering_vector(double freq, std::span<const Point> locations, const MicrophoneArray& array,
                                 FieldMode mode, bool normalize, double c) {
  if (!(freq >= 0.0)) throw Error(ErrorCode::Config, "steering frequency must be >= 0");
  const auto num_mics = static_cast<Eigen::Index>(array.size());
  const Point ref = array.centroid();
  const double k = 2.0 * std::numbers::pi * freq / c;
  Eigen::MatrixXcd a(num_mics, static_cast<Eigen::Index>(locations.size()));
  for (std::size_t l = 0; l < locations.size(); ++l) {
    const Point& loc = locations[l];
    for (Eigen::Index m = 0; m < num_mics; ++m) {
      const Point& p = array.position(static_cast<std::size_t>(m));
      if (mode == FieldMode::Far) {
        const double n = loc.norm();
        if (n < 1e-12) throw Error(ErrorCode::DegenerateTarget, "far-field direction has zero length");
        a(m, static_cast<Eigen::Index>(l)) = std::exp(kJ * (k * (p - ref).dot(loc) / n));
      } else {
        const double d = (p - loc).norm();
        if (d < 1e-6)
          throw Error(ErrorCode::Singularity, "near-field point coincides with microphone " + std::to_string(m));
        const double d_ref = (ref - loc).norm();
        a(m, static_cast<Eigen::Index>(l)) = std::exp(-kJ * (k * (d - d_ref))) / (4.0 * std::numbers::pi * d);
      }
    }
    if (normalize) a.col(static_cast<Eigen::Index>(l)).normalize();
  }
  return a;
}

std::vector<double> stft_bin_frequencies(std::size_t fft_len, double fs) {
  std::vector<double> f(fft_len / 2 + 1);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = fs * static_cast<double>(k) / static_cast<double>(fft_len);
  return f;
}

BeamformerWeights ds_weights(std::span<const Point> targets, const MicrophoneArray& array,
                             std::span<const double> freqs, FieldMode mode, double c,
                             std::span<const double> rake_gains) {
  BeamformerWeights out;
  out.mode = mode;
  out.freqs.assign(freqs.begin(), freqs.end());
  out.w.resize(static_cast<Eigen::Index>(freqs.size()), static_cast<Eigen::Index>(array.size()));
  for (std::size_t b = 0; b < freqs.size(); ++b) {
    const Eigen::VectorXcd a = summed_target(freqs[b], targets, array, mode, c, rake_gains);
    const double n2 = a.squaredNorm();
    if (n2 < 1e-24)
      throw Error(ErrorCode::DegenerateTarget, "steering vector vanishes at " + std::to_string(freqs[b]) + " Hz");
    out.w.row(static_cast<Eigen::Index>(b)) = (a / n2).transpose();
  }
  return out;
}

BeamformerWeights mvdr_weights(std::span<const Point> targets, std::span<const Point> interferers,
                               double noise_floor, const MicrophoneArray& array, std::span<const double> freqs,
                               FieldMode mode, double c) {
  if (!(noise_floor > 0.0)) throw Error(ErrorCode::Config, "MVDR noise floor must be positive");
  for (const auto& t : targets)
    for (const auto& i : interferers) {
      const bool same = mode == FieldMode::Far ? (t.normalized() - i.normalized()).norm() < 1e-6
                                               : (t - i).norm() < 1e-6;
      if (same) throw Error(ErrorCode::Config, "MVDR target coincides with an interferer");
    }
  const auto num_mics = static_cast<Eigen::Index>(array.size());
  BeamformerWeights out;
  out.mode = mode;
  out.freqs.assign(freqs.begin(), freqs.end());
  out.w.resize(static_cast<Eigen::Index>(freqs.size()), num_mics);
  for (std::size_t b = 0; b < freqs.size(); ++b) {
    const Eigen::VectorXcd a = summed_target(freqs[b], targets, array, mode, c, {});
    Eigen::MatrixXcd R = noise_floor * Eigen::MatrixXcd::Identity(num_mics, num_mics);
    if (!interferers.empty()) {
      const Eigen::MatrixXcd ai = steering_vector(freqs[b], interferers, array, mode, true, c);
      R += ai * ai.adjoint();
    }
    const Eigen::VectorXcd r_inv_a = R.ldlt().solve(a);
    const Complex denom = a.dot(r_inv_a);  // a^H R^-1 a
    if (std::abs(denom) < 1e-24)
      throw Error(ErrorCode::DegenerateTarget, "MVDR target is degenerate at " + std::to_string(freqs[b]) + " Hz");
    out.w.row(static_cast<Eigen::Index>(b)) = (r_inv_a / std::conj(denom)).transpose();
  }
  return out;
}

BeamformerFilters weights_to_filters(const BeamformerWeights& weights, double fs, std::size_t filter_len, bool center) {
  if (filter_len == 0) throw Error(ErrorCode::Config, "filter length must be >= 1");
  if (!(fs > 0.0)) throw Error(ErrorCode::Config, "fs must be positive");
  const auto bins = static_cast<Eigen::Index>(weights.freqs.size());
  const auto len = static_cast<Eigen::Index>(filter_len);
  const std::size_t offset = center ? filter_len / 2 : 0;

  // Real least squares over stacked real and imaginary parts. Bins strictly
  // between DC and Nyquist stand for a conjugate pair and count twice.
  Eigen::MatrixXd A(2 * bins, len);
  Eigen::VectorXd weight(2 * bins);
  for (Eigen::Index b = 0; b < bins; ++b) {
    const double f = weights.freqs[static_cast<std::size_t>(b)];
    const bool edge = f == 0.0 || std::abs(f - 0.5 * fs) < 1e-9 * fs;
    const double sw = std::sqrt(edge ? 1.0 : 2.0);
    weight(2 * b) = sw;
    weight(2 * b + 1) = sw;
    for (Eigen::Index n = 0; n < len; ++n) {
      const double phase = -2.0 * std::numbers::pi * f * (static_cast<double>(n) - static_cast<double>(offset)) / fs;
      A(2 * b, n) = sw * std::cos(phase);
      A(2 * b + 1, n) = sw * std::sin(phase);
    }
  }
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> solver(A);

  BeamformerFilters out;
  out.fs = fs;
  out.offset = offset;
  out.h.resize(weights.w.cols(), len);
  for (Eigen::Index m = 0; m < weights.w.cols(); ++m) {
    Eigen::VectorXd rhs(2 * bins);
    for (Eigen::Index b = 0; b < bins; ++b) {
      const Complex target = std::conj(weights.w(b, m));
      rhs(2 * b) = weight(2 * b) * target.real();
      rhs(2 * b + 1) = weight(2 * b + 1) * target.imag();
    }
    out.h.row(m) = solver.solve(rhs).transpose();
  }
  return out;
}

BeamformerWeights filters_to_weights(const BeamformerFilters& filters, std::span<const double> freqs) {
  if (!(filters.fs > 0.0)) throw Error(ErrorCode::Config, "filter fs must be positive");
  BeamformerWeights out;
  out.freqs.assign(freqs.begin(), freqs.end());
  out.w.resize(static_cast<Eigen::Index>(freqs.size()), filters.h.rows());
  for (std::size_t b = 0; b < freqs.size(); ++b) {
    for (Eigen::Index m = 0; m < filters.h.rows(); ++m) {
      Complex response{};
      for (Eigen::Index n = 0; n < filters.h.cols(); ++n) {
        const double phase = -2.0 * std::numbers::pi * freqs[b] *
                             (static_cast<double>(n) - static_cast<double>(filters.offset)) / filters.fs;
        response += filters.h(m, n) * std::exp(kJ * phase);
      }
      out.w(static_cast<Eigen::Index>(b), m) = std::conj(response);
    }
  }
  return out;
}

std::vector<double> beampattern(const Eigen::Ref<const Eigen::VectorXcd>& w, double freq,
                                std::span<const Point> directions, const MicrophoneArray& array, bool db, double c) {
  if (w.size() != static_cast<Eigen::Index>(array.size()))
    throw Error(ErrorCode::Usage, "weight vector length does not match the array");
  const Eigen::MatrixXcd a = steering_vector(freq, directions, array, FieldMode::Far, true, c);
  std::vector<double> gains(directions.size());
  for (std::size_t d = 0; d < directions.size(); ++d) {
    const double g = std::abs(w.dot(a.col(static_cast<Eigen::Index>(d))));
    gains[d] = db ? 20.0 * std::log10(std::max(g, 1e-300)) : g;
  }
  return gains;
}

std::vector<double> beampattern(const BeamformerFilters& filters, double freq, std::span<const Point> directions,
                                const MicrophoneArray& array, bool db, double c) {
  const double f[] = {freq};
  const auto w = filters_to_weights(filters, f);
  return beampattern(w.w.row(0).transpose(), freq, directions, array, db, c);
}

Eigen::VectorXd process(const Eigen::Ref<const Eigen::MatrixXd>& signals, const BeamformerWeights& weights,
                        const StftConfig& cfg) {
  if (signals.rows() != static_cast<Eigen::Index>(cfg.channels) || weights.w.cols() != signals.rows())
    throw Error(ErrorCode::Usage, "channel count does not match the weights or STFT configuration");
  if (weights.w.rows() != static_cast<Eigen::Index>(cfg.bins()))
    throw Error(ErrorCode::Usage, "weights bin count does not match the STFT configuration");

  StftConfig mono = cfg;
  mono.channels = 1;
  Stft analysis(cfg);
  Stft synthesis(mono);
  const auto hop = static_cast<Eigen::Index>(cfg.hop);
  const Eigen::Index frames = (signals.cols() + hop - 1) / hop;
  Eigen::VectorXd out(frames * hop);
  Eigen::MatrixXd block(signals.rows(), hop);
  SpectralFrame y;
  y.bins.resize(weights.w.rows(), 1);
  for (Eigen::Index t = 0; t < frames; ++t) {
    const Eigen::Index start = t * hop;
    const Eigen::Index avail = std::min(hop, signals.cols() - start);
    block.setZero();
    block.leftCols(avail) = signals.middleCols(start, avail);
    const SpectralFrame x = analysis.analysis(block);
    // Row-wise w^H x: sum over mics of conj(w_m) X_m.
    y.bins.col(0) = (weights.w.conjugate().cwiseProduct(x.bins)).rowwise().sum();
    y.frame_index = x.frame_index;
    out.segment(start, hop) = synthesis.synthesis(y).row(0).transpose();
  }
  return out;
}

}  // namespace roomsim
