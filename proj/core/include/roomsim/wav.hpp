#pragma once

#include <filesystem>

#include <Eigen/Core>

namespace roomsim {

struct WavData {
  Eigen::MatrixXd samples;  // channels x frames
  double fs = 0.0;
};

// RIFF/WAVE, IEEE float32, little endian, interleaved.
void write_wav(const std::filesystem::path& path, const Eigen::Ref<const Eigen::MatrixXd>& samples, double fs);
// Reads float32 and 16-bit PCM files. PCM is scaled to [-1, 1).
WavData read_wav(const std::filesystem::path& path);

}  // namespace roomsim
