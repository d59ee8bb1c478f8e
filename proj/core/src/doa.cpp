#include "roomsim/doa.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "roomsim/error.hpp"

namespace roomsim {

namespace {

void check_frames(std::span<const SpectralFrame> frames) {
  if (frames.empty()) throw Error(ErrorCode::Usage, "DOA needs at least one frame");
  for (const auto& f : frames)
    if (f.bins.rows() != frames[0].bins.rows() || f.bins.cols() != frames[0].bins.cols())
      throw Error(ErrorCode::Usage, "frames have inconsistent shapes");
}

}  // namespace

DoaGrid DoaGrid::circle(double resolution) {
  if (!(resolution > 0.0) || resolution > std::numbers::pi)
    throw Error(ErrorCode::Config, "grid resolution must lie in (0, pi]");
  const auto n = static_cast<std::size_t>(std::max(3.0, std::round(2.0 * std::numbers::pi / resolution)));
  DoaGrid g;
  g.resolution_ = 2.0 * std::numbers::pi / static_cast<double>(n);
  g.azimuths_.resize(n);
  for (std::size_t k = 0; k < n; ++k) g.azimuths_[k] = g.resolution_ * static_cast<double>(k);
  return g;
}

DoaGrid DoaGrid::sphere(double resolution) {
  DoaGrid g = circle(resolution);
  const auto m = static_cast<std::size_t>(std::max(1.0, std::round(std::numbers::pi / resolution)));
  g.colatitudes_.resize(m + 1);
  for (std::size_t j = 0; j <= m; ++j)
    g.colatitudes_[j] = std::numbers::pi * static_cast<double>(j) / static_cast<double>(m);
  return g;
}

std::size_t DoaGrid::size() const noexcept {
  return azimuths_.size() * std::max<std::size_t>(1, colatitudes_.size());
}

double DoaGrid::azimuth(std::size_t i) const {
  return azimuths_.at(is_3d() ? i / colatitudes_.size() : i);
}

double DoaGrid::colatitude(std::size_t i) const {
  return is_3d() ? colatitudes_.at(i % colatitudes_.size()) : 0.5 * std::numbers::pi;
}

Point DoaGrid::direction(std::size_t i) const {
  if (!is_3d()) {
    const double a = azimuth(i);
    return Point(std::cos(a), std::sin(a), 0.0);
  }
  return direction_from_angles(azimuth(i), colatitude(i));
}

std::vector<Point> DoaGrid::directions() const {
  std::vector<Point> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = direction(i);
  return out;
}

std::vector<std::size_t> DoaGrid::neighbors(std::size_t i) const {
  const std::size_t naz = azimuths_.size();
  std::vector<std::size_t> out;
  if (!is_3d()) {
    out.push_back((i + naz - 1) % naz);
    out.push_back((i + 1) % naz);
    return out;
  }
  const std::size_t ncol = colatitudes_.size();
  const auto ai = static_cast<long>(i / ncol);
  const auto ci = static_cast<long>(i % ncol);
  for (long da = -1; da <= 1; ++da)
    for (long dc = -1; dc <= 1; ++dc) {
      if (da == 0 && dc == 0) continue;
      const long c = ci + dc;
      if (c < 0 || c >= static_cast<long>(ncol)) continue;
      const long a = (ai + da + static_cast<long>(naz)) % static_cast<long>(naz);
      const auto j = static_cast<std::size_t>(a) * ncol + static_cast<std::size_t>(c);
      if (j != i && std::find(out.begin(), out.end(), j) == out.end()) out.push_back(j);
    }
  return out;
}

BinCovariance estimate_covariance(std::span<const SpectralFrame> frames, std::span<const std::size_t> bins) {
  check_frames(frames);
  if (bins.empty()) throw Error(ErrorCode::Usage, "covariance needs a non-empty bin selection");
  BinCovariance cov;
  cov.bins.assign(bins.begin(), bins.end());
  cov.num_frames = frames.size();
  const Eigen::Index mics = frames[0].bins.cols();
  for (auto b : bins) {
    if (static_cast<Eigen::Index>(b) >= frames[0].bins.rows()) throw Error(ErrorCode::Usage, "bin index out of range");
    Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(mics, mics);
    for (const auto& f : frames) {
      const Eigen::VectorXcd x = f.bins.row(static_cast<Eigen::Index>(b)).transpose();
      R.noalias() += x * x.adjoint();
    }
    cov.matrices.push_back(R / static_cast<double>(frames.size()));
  }
  return cov;
}

std::vector<std::size_t> select_bins(std::span<const SpectralFrame> frames, double fs, std::size_t fft_len,
                                     const BinSelection& selection) {
  check_frames(frames);
  const auto num_bins = static_cast<std::size_t>(frames[0].bins.rows());
  std::vector<std::size_t> candidates;
  std::vector<double> power;
  for (std::size_t k = 0; k < num_bins; ++k) {
    const double f = fs * static_cast<double>(k) / static_cast<double>(fft_len);
    if (f < selection.min_freq || f > selection.max_freq) continue;
    double p = 0.0;
    for (const auto& fr : frames) p += fr.bins.row(static_cast<Eigen::Index>(k)).squaredNorm();
    candidates.push_back(k);
    power.push_back(p / static_cast<double>(frames.size() * static_cast<std::size_t>(frames[0].bins.cols())));
  }
  if (candidates.empty()) throw Error(ErrorCode::Usage, "no frequency bin inside the selected band");
  const double peak = *std::max_element(power.begin(), power.end());
  const double floor = peak * std::pow(10.0, -selection.dynamic_range_db / 10.0);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (power[i] > 0.0 && power[i] >= floor) out.push_back(candidates[i]);
  if (out.empty()) throw Error(ErrorCode::Usage, "all candidate bins are silent");
  return out;
}

std::vector<double> music(const BinCovariance& cov, std::size_t num_src, const DoaGrid& grid,
                          const MicrophoneArray& array, std::span<const double> freqs, double c) {
  const std::size_t mics = array.size();
  if (num_src >= mics) throw Error(ErrorCode::Usage, "MUSIC needs fewer sources than microphones");
  if (freqs.size() != cov.bins.size()) throw Error(ErrorCode::Usage, "one frequency per covariance bin is required");
  const auto dirs = grid.directions();
  std::vector<double> spectrum(grid.size(), 0.0);
  std::vector<double> per_bin(grid.size());
  for (std::size_t b = 0; b < cov.matrices.size(); ++b) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(cov.matrices[b]);
    const Eigen::MatrixXcd noise = es.eigenvectors().leftCols(static_cast<Eigen::Index>(mics - num_src));
    const Eigen::MatrixXcd a = steering_vector(freqs[b], dirs, array, FieldMode::Far, true, c);
    const Eigen::MatrixXcd proj = noise.adjoint() * a;
    double peak = 0.0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const double d = proj.col(static_cast<Eigen::Index>(g)).squaredNorm();
      per_bin[g] = 1.0 / std::max(d, 1e-300);
      peak = std::max(peak, per_bin[g]);
    }
    for (std::size_t g = 0; g < grid.size(); ++g) spectrum[g] += per_bin[g] / peak;
  }
  for (auto& v : spectrum) v /= static_cast<double>(std::max<std::size_t>(1, cov.matrices.size()));
  return spectrum;
}

std::vector<double> srp_phat(std::span<const SpectralFrame> frames, const DoaGrid& grid, const MicrophoneArray& array,
                             std::span<const std::size_t> bins, std::span<const double> freqs, double c) {
  check_frames(frames);
  const auto mics = static_cast<Eigen::Index>(array.size());
  if (mics < 2) throw Error(ErrorCode::Usage, "SRP-PHAT needs at least two microphones");
  if (frames[0].bins.cols() != mics) throw Error(ErrorCode::Usage, "frame channels do not match the array");
  if (freqs.size() != bins.size()) throw Error(ErrorCode::Usage, "one frequency per bin is required");
  const auto dirs = grid.directions();
  std::vector<double> power(grid.size(), 0.0);
  for (std::size_t b = 0; b < bins.size(); ++b) {
    // Sum of PHAT-weighted cross spectra over frames, upper triangle only.
    Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(mics, mics);
    for (const auto& f : frames) {
      const auto x = f.bins.row(static_cast<Eigen::Index>(bins[b]));
      for (Eigen::Index m = 0; m < mics; ++m)
        for (Eigen::Index n = m + 1; n < mics; ++n) {
          const Complex cross = x(m) * std::conj(x(n));
          const double mag = std::abs(cross);
          if (mag > 0.0) q(m, n) += cross / mag;
        }
    }
    const Eigen::MatrixXcd a = steering_vector(freqs[b], dirs, array, FieldMode::Far, false, c);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const auto col = a.col(static_cast<Eigen::Index>(g));
      double acc = 0.0;
      for (Eigen::Index m = 0; m < mics; ++m)
        for (Eigen::Index n = m + 1; n < mics; ++n) acc += (q(m, n) * std::conj(col(m)) * col(n)).real();
      power[g] += acc;
    }
  }
  return power;
}

std::vector<std::size_t> find_peaks(std::span<const double> spectrum, const DoaGrid& grid, std::size_t count) {
  if (spectrum.size() != grid.size()) throw Error(ErrorCode::Usage, "spectrum does not match the grid");
  std::vector<std::size_t> maxima;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    bool is_max = true;
    for (auto j : grid.neighbors(i)) {
      if (spectrum[j] > spectrum[i] || (spectrum[j] == spectrum[i] && j < i)) {
        is_max = false;
        break;
      }
    }
    if (is_max) maxima.push_back(i);
  }
  auto stronger = [&](std::size_t a, std::size_t b) {
    return spectrum[a] != spectrum[b] ? spectrum[a] > spectrum[b] : a < b;
  };
  std::sort(maxima.begin(), maxima.end(), stronger);

  std::vector<std::size_t> picked;
  std::vector<bool> suppressed(spectrum.size(), false);
  auto take = [&](std::size_t i) {
    picked.push_back(i);
    suppressed[i] = true;
    for (auto j : grid.neighbors(i)) suppressed[j] = true;
  };
  for (auto i : maxima) {
    if (picked.size() == count) break;
    if (!suppressed[i]) take(i);
  }
  if (picked.size() < count) {
    std::vector<std::size_t> all(spectrum.size());
    std::iota(all.begin(), all.end(), 0);
    std::sort(all.begin(), all.end(), stronger);
    for (auto i : all) {
      if (picked.size() == count) break;
      if (!suppressed[i]) take(i);
    }
  }
  return picked;
}

DoaMethod parse_doa_method(std::string_view name) {
  if (name == "music" || name == "MUSIC") return DoaMethod::Music;
  if (name == "srp-phat" || name == "srp_phat" || name == "srp" || name == "SRP-PHAT") return DoaMethod::SrpPhat;
  throw Error(ErrorCode::Config, "unknown DOA method '" + std::string(name) + "'");
}

std::string_view doa_method_name(DoaMethod method) {
  return method == DoaMethod::Music ? "music" : "srp-phat";
}

DoaResult locate_sources(std::span<const SpectralFrame> frames, std::size_t num_src, DoaMethod method,
                         const DoaGrid& grid, const MicrophoneArray& array, double fs,
                         std::span<const std::size_t> bins, double c) {
  check_frames(frames);
  if (num_src == 0) throw Error(ErrorCode::Usage, "num_src must be >= 1");
  const std::size_t fft_len = 2 * (static_cast<std::size_t>(frames[0].bins.rows()) - 1);
  DoaResult result;
  result.bins = bins.empty() ? select_bins(frames, fs, fft_len) : std::vector<std::size_t>(bins.begin(), bins.end());
  std::vector<double> freqs;
  for (auto b : result.bins) freqs.push_back(fs * static_cast<double>(b) / static_cast<double>(fft_len));

  switch (method) {
    case DoaMethod::Music:
      result.spectrum = music(estimate_covariance(frames, result.bins), num_src, grid, array, freqs, c);
      break;
    case DoaMethod::SrpPhat:
      result.spectrum = srp_phat(frames, grid, array, result.bins, freqs, c);
      break;
  }
  result.peak_indices = find_peaks(result.spectrum, grid, num_src);
  for (auto i : result.peak_indices) result.directions.push_back({grid.azimuth(i), grid.colatitude(i)});
  return result;
}

}  // namespace roomsim
