#pragma once

#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "roomsim/microphone_array.hpp"
#include "roomsim/stft.hpp"

namespace roomsim {

inline constexpr double kSpeedOfSound = 343.0;

enum class FieldMode { Far, Near };

// Unit vector toward (azimuth, colatitude), both in radians.
Point direction_from_angles(double azimuth, double colatitude = 0.5 * std::numbers::pi);

/// Steering matrix (mics x locations), phase-referenced to the array centroid.
///
/// Far field: each location is a unit vector pointing from the array toward the
/// source, entry exp(+j 2 pi f (p_m - centroid) . u / c), i.e. the phase of a
/// plane wave arriving from u. Near field: each location is a point g, entry
/// exp(-j 2 pi f (|p_m - g| - |centroid - g|) / c) / (4 pi |p_m - g|).
/// With normalize, every column is scaled to unit Euclidean norm.
Eigen::MatrixXcd steering_vector(double freq, std::span<const Point> locations, const MicrophoneArray& array,
                                 FieldMode mode, bool normalize = false, double c = kSpeedOfSound);

// Centre frequencies of the real-DFT bins 0..fft_len/2.
std::vector<double> stft_bin_frequencies(std::size_t fft_len, double fs);

/// Frequency-domain weights; the beamformer output is w^H x.
struct BeamformerWeights {
  Eigen::MatrixXcd w;  // bins x mics
  std::vector<double> freqs;
  FieldMode mode = FieldMode::Far;
};

/// Time-domain filters, one row per microphone. `offset` is the circular shift
/// (samples) applied to centre the filters; it is undone by filters_to_weights.
struct BeamformerFilters {
  Eigen::MatrixXd h;  // mics x filter_len
  double fs = 0.0;
  std::size_t offset = 0;
};

// Delay-and-sum toward one target, or a rake over several (e.g. the direct
// source plus selected image sources). Per bin w = a / |a|^2 with a the sum of
// normalized steering columns, optionally weighted by rake_gains.
BeamformerWeights ds_weights(std::span<const Point> targets, const MicrophoneArray& array,
                             std::span<const double> freqs, FieldMode mode = FieldMode::Far,
                             double c = kSpeedOfSound, std::span<const double> rake_gains = {});

// MVDR with a model covariance R = sum_i a_i a_i^H + noise_floor I built from
// normalized interferer steering columns: w = R^-1 a / (a^H R^-1 a).
BeamformerWeights mvdr_weights(std::span<const Point> targets, std::span<const Point> interferers,
                               double noise_floor, const MicrophoneArray& array, std::span<const double> freqs,
                               FieldMode mode = FieldMode::Far, double c = kSpeedOfSound);

// Real FIR filters whose frequency response, sampled at weights.freqs, fits
// conj(w) in the least-squares sense (exact when filter_len equals the DFT
// length of a full bin grid).
BeamformerFilters weights_to_filters(const BeamformerWeights& weights, double fs, std::size_t filter_len,
                                     bool center = true);
BeamformerWeights filters_to_weights(const BeamformerFilters& filters, std::span<const double> freqs);

// |w^H a(f, theta)| with normalized far-field steering, linear or in dB.
std::vector<double> beampattern(const Eigen::Ref<const Eigen::VectorXcd>& w, double freq,
                                std::span<const Point> directions, const MicrophoneArray& array, bool db = false,
                                double c = kSpeedOfSound);
std::vector<double> beampattern(const BeamformerFilters& filters, double freq, std::span<const Point> directions,
                                const MicrophoneArray& array, bool db = false, double c = kSpeedOfSound);

// STFT-domain beamforming of mics x samples input. Returns the single-channel
// output, delayed by the STFT latency and padded to a whole number of hops.
Eigen::VectorXd process(const Eigen::Ref<const Eigen::MatrixXd>& signals, const BeamformerWeights& weights,
                        const StftConfig& cfg);

}  // namespace roomsim
