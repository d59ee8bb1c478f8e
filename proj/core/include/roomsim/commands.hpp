#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "roomsim/scene.hpp"

namespace roomsim {

std::string_view version() noexcept;

struct CommandOptions {
  bool dump_images = false;
};

/// Files written by a command, relative to the output directory, in order.
struct CommandResult {
  std::vector<std::string> outputs;
  std::string summary;  // human-readable, printed by the CLI
};

// Each command writes its outputs into out_dir (created if needed) followed by
// manifest.json, which lists the resolved scene, the library version, SHA-256
// hashes of the inputs and of every output.
CommandResult cmd_rir(const Scene& scene, const std::filesystem::path& out_dir, const CommandOptions& opt = {});
CommandResult cmd_simulate(const Scene& scene, const std::filesystem::path& out_dir, const CommandOptions& opt = {});
CommandResult cmd_beampattern(const Scene& scene, const std::filesystem::path& out_dir);
CommandResult cmd_doa(const Scene& scene, const std::filesystem::path& out_dir, const CommandOptions& opt = {});
CommandResult cmd_adapt_demo(const Scene& scene, const std::filesystem::path& out_dir);
// STFT passthrough on the simulated microphone signals (or seeded noise when
// the scene has no sources): reports the reconstruction error.
CommandResult cmd_stft_check(const Scene& scene, const std::filesystem::path& out_dir);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace roomsim
