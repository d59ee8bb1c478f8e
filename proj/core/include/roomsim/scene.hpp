#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "roomsim/geometry.hpp"
#include "roomsim/microphone_array.hpp"

namespace roomsim {

struct SourceSpec {
  Point position = Point::Zero();
  std::vector<double> signal;  // at signal_fs
  double signal_fs = 0.0;
  double delay = 0.0;
  std::string kind;  // wav, tone, noise, impulse
};

struct DoaSpec {
  std::string method = "srp-phat";
  std::size_t num_src = 1;
  double resolution_deg = 1.0;
  bool three_d = false;
  std::size_t frame_len = 512;
  std::size_t hop = 256;
  double fmin = 300.0;
  double fmax = 3500.0;
};

struct BeamformSpec {
  std::string type = "ds";  // ds or mvdr
  double target_azimuth_deg = 0.0;
  double target_colatitude_deg = 90.0;
  std::vector<double> interferer_azimuths_deg;
  double noise_floor = 1e-6;
  std::vector<double> freqs{2000.0, 4000.0, 8000.0};
  double resolution_deg = 1.0;
  std::size_t fft_len = 512;
};

struct AdaptSpec {
  std::string method = "rls";
  std::size_t taps = 32;
  // mu for lms/nlms, lambda for rls.
  double param = 1.0;
  std::size_t samples = 2000;
  double noise_std = 0.0;
};

/// Fully validated scene with defaults applied.
struct Scene {
  Room room = Room::shoebox(Point(1.0, 1.0, 1.0), 3, 0.0);
  double fs = 16000.0;
  double c = 343.0;
  int max_order = 1;
  std::uint64_t seed = 0;
  std::vector<SourceSpec> sources;
  std::optional<MicrophoneArray> mics;
  DoaSpec doa;
  BeamformSpec beamform;
  AdaptSpec adapt;

  // Files the scene depends on (WAV signals), resolved against base_dir.
  std::vector<std::filesystem::path> inputs;
  // Canonical JSON echo of the resolved configuration.
  std::string resolved;
};

// Parses a JSON scene. Relative file references resolve against base_dir.
// `seed` overrides the scene-level seed. Errors carry a JSON pointer to the
// offending value and one of the SCENE_* codes.
Scene parse_scene(const std::string& text, const std::filesystem::path& base_dir = {},
                  std::optional<std::uint64_t> seed = std::nullopt);
Scene load_scene(const std::filesystem::path& path, std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace roomsim
