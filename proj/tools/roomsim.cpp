#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "roomsim/commands.hpp"
#include "roomsim/error.hpp"
#include "roomsim/scene.hpp"

namespace {

constexpr int kExitPipeline = 1;
constexpr int kExitUsage = 2;

int report(roomsim::ErrorCode code, const std::string& what) {
  std::cerr << "error: " << roomsim::error_code_name(code) << ": " << what << "\n";
  const bool usage = code == roomsim::ErrorCode::Usage || code == roomsim::ErrorCode::Config;
  return usage ? kExitUsage : kExitPipeline;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Room acoustics simulation toolkit"};
  app.set_version_flag("--version", std::string(roomsim::version()));
  app.require_subcommand(1);

  std::string scene_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool dump = false;

  auto add = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--scene", scene_path, "Scene file (JSON)")->required();
    sub->add_option("--out", out_dir, "Output directory")->required();
    sub->add_option("--seed", seed, "Override the scene seed");
    sub->add_flag("--dump-images", dump, "Write the image source table as CSV");
    return sub;
  };
  auto* rir = add("rir", "Room impulse response per (source, mic) pair");
  auto* simulate = add("simulate", "Microphone signals as a multichannel WAV");
  auto* beampattern = add("beampattern", "Beamformer weights and beampattern CSV");
  auto* doa = add("doa", "Direction of arrival on the simulated scene");
  auto* adapt = add("adapt", "Adaptive filter system identification demo");
  auto* stft_check = add("stft-check", "STFT passthrough reconstruction check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: USAGE: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    const roomsim::Scene scene = roomsim::load_scene(scene_path, seed);
    const roomsim::CommandOptions opt{dump};
    roomsim::CommandResult result;
    if (rir->parsed()) result = roomsim::cmd_rir(scene, out_dir, opt);
    else if (simulate->parsed()) result = roomsim::cmd_simulate(scene, out_dir, opt);
    else if (beampattern->parsed()) result = roomsim::cmd_beampattern(scene, out_dir);
    else if (doa->parsed()) result = roomsim::cmd_doa(scene, out_dir, opt);
    else if (adapt->parsed()) result = roomsim::cmd_adapt_demo(scene, out_dir);
    else if (stft_check->parsed()) result = roomsim::cmd_stft_check(scene, out_dir);
    std::cout << result.summary;
    return 0;
  } catch (const roomsim::Error& e) {
    return report(e.code(), e.what());
  } catch (const std::exception& e) {
    std::cerr << "error: INTERNAL: " << e.what() << "\n";
    return kExitPipeline;
  }
}
