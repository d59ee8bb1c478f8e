#pragma once

#include <numbers>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "roomsim/beamforming.hpp"
#include "roomsim/microphone_array.hpp"
#include "roomsim/stft.hpp"

namespace roomsim {

/// Search grid of far-field directions. 2D grids sweep azimuth only; 3D grids
/// are the product of azimuths and colatitudes in [0, pi]. Flat index
/// i = azimuth_index * num_colatitudes + colatitude_index.
class DoaGrid {
 public:
  static DoaGrid circle(double resolution);
  static DoaGrid sphere(double resolution);

  bool is_3d() const noexcept { return !colatitudes_.empty(); }
  double resolution() const noexcept { return resolution_; }
  std::span<const double> azimuths() const noexcept { return azimuths_; }
  std::span<const double> colatitudes() const noexcept { return colatitudes_; }
  std::size_t size() const noexcept;

  double azimuth(std::size_t i) const;
  double colatitude(std::size_t i) const;
  Point direction(std::size_t i) const;
  std::vector<Point> directions() const;
  // Neighbouring cells; azimuth wraps around, colatitude does not.
  std::vector<std::size_t> neighbors(std::size_t i) const;

 private:
  std::vector<double> azimuths_;
  std::vector<double> colatitudes_;
  double resolution_ = 0.0;
};

struct BinCovariance {
  std::vector<std::size_t> bins;
  std::vector<Eigen::MatrixXcd> matrices;  // one mics x mics matrix per bin
  std::size_t num_frames = 0;
};

// R_f = (1/T) sum_t x_{t,f} x_{t,f}^H for every selected bin.
BinCovariance estimate_covariance(std::span<const SpectralFrame> frames, std::span<const std::size_t> bins);

struct BinSelection {
  double min_freq = 300.0;
  double max_freq = 3500.0;
  double dynamic_range_db = 30.0;
};

// Bins inside [min_freq, max_freq] whose mean power (over frames and
// channels) is within dynamic_range_db of the strongest such bin.
std::vector<std::size_t> select_bins(std::span<const SpectralFrame> frames, double fs, std::size_t fft_len,
                                     const BinSelection& selection = {});

// Incoherent broadband MUSIC: per-bin pseudo-spectra 1 / |E_n^H a|^2, each
// scaled to unit maximum, then averaged. freqs[k] is the frequency of cov.bins[k].
std::vector<double> music(const BinCovariance& cov, std::size_t num_src, const DoaGrid& grid,
                          const MicrophoneArray& array, std::span<const double> freqs, double c = kSpeedOfSound);

// Steered response power with phase transform, summed over frames, selected
// bins and microphone pairs. freqs[k] is the frequency of bins[k].
std::vector<double> srp_phat(std::span<const SpectralFrame> frames, const DoaGrid& grid, const MicrophoneArray& array,
                             std::span<const std::size_t> bins, std::span<const double> freqs,
                             double c = kSpeedOfSound);

// Up to `count` local maxima, strongest first, with one-cell suppression around
// each pick. Equal values resolve toward the smaller index.
std::vector<std::size_t> find_peaks(std::span<const double> spectrum, const DoaGrid& grid, std::size_t count);

enum class DoaMethod { Music, SrpPhat };
DoaMethod parse_doa_method(std::string_view name);
std::string_view doa_method_name(DoaMethod method);

struct Direction {
  double azimuth = 0.0;
  double colatitude = 0.5 * std::numbers::pi;
};

struct DoaResult {
  std::vector<Direction> directions;
  std::vector<std::size_t> peak_indices;
  std::vector<double> spectrum;
  std::vector<std::size_t> bins;
};

// Runs the chosen method on the frames and picks num_src directions. When
// `bins` is empty, select_bins() with default settings is used.
DoaResult locate_sources(std::span<const SpectralFrame> frames, std::size_t num_src, DoaMethod method,
                         const DoaGrid& grid, const MicrophoneArray& array, double fs,
                         std::span<const std::size_t> bins = {}, double c = kSpeedOfSound);

}  // namespace roomsim
