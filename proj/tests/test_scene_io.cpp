#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "oracles.hpp"
#include "roomsim/commands.hpp"
#include "roomsim/csv.hpp"
#include "roomsim/error.hpp"
#include "roomsim/scene.hpp"
#include "roomsim/wav.hpp"

using namespace roomsim;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  const fs::path dir = fs::temp_directory_path() / "roomsim_tests" / info->test_suite_name() / info->name();
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json minimal() {
  return json::parse(R"({
    "room": {"shoebox": [6, 4, 3]},
    "absorption": 0.3,
    "fs": 16000,
    "max_order": 1,
    "sources": [{"position": [1, 1, 1], "signal": "impulse"}],
    "mic_array": {"positions": [[4, 3, 2], [5, 1, 1]]}
  })");
}

ErrorCode code_of(const json& j, const fs::path& base = {}) {
  try {
    parse_scene(j.dump(), base);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "scene accepted: " << j.dump();
  return ErrorCode::Io;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(Scene, MinimalIsValid) {
  const Scene s = parse_scene(minimal().dump());
  EXPECT_EQ(s.sources.size(), 1u);
  ASSERT_TRUE(s.mics.has_value());
  EXPECT_EQ(s.mics->size(), 2u);
  EXPECT_EQ(s.mics->fs(), 16000.0);
  EXPECT_EQ(s.c, 343.0);
  EXPECT_TRUE(s.room.is_shoebox());
  const json echo = json::parse(s.resolved);
  EXPECT_EQ(echo["c"], 343.0);
}

TEST(Scene, ErrorCodes) {
  auto j = minimal();
  j["sources"][0]["position"] = {7, 1, 1};
  EXPECT_EQ(code_of(j), ErrorCode::ScenePosition);

  j = minimal();
  j["absorption"] = 1.2;
  EXPECT_EQ(code_of(j), ErrorCode::SceneRange);

  j = minimal();
  j["fs"] = -1;
  EXPECT_EQ(code_of(j), ErrorCode::SceneRange);

  j = minimal();
  j["sources"][0]["signal"] = {{"wav", "missing.wav"}};
  EXPECT_EQ(code_of(j, scratch()), ErrorCode::SceneFile);

  j = minimal();
  j["colour"] = "blue";
  EXPECT_EQ(code_of(j), ErrorCode::SceneSchema);

  j = minimal();
  j["doa"] = {{"method", "esprit"}};
  EXPECT_EQ(code_of(j), ErrorCode::Usage);

  EXPECT_THROW(parse_scene("{not json"), Error);
  try {
    load_scene(scratch() / "nope.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SceneFile);
  }
}

TEST(Scene, AbsorptionMapAndCorners) {
  auto j = minimal();
  j["absorption"] = {{"default", 0.2}, {"ceiling", 0.9}};
  const Scene s = parse_scene(j.dump());
  for (const auto& w : s.room.walls()) EXPECT_DOUBLE_EQ(w.absorption(), w.name() == "ceiling" ? 0.9 : 0.2);

  j = minimal();
  j["room"] = json::parse(R"({"corners": [[0,0],[0,4],[8,4],[8,8],[11,8],[11,0]], "extrude_height": 3})");
  j["sources"][0]["position"] = {9.5, 6, 1.5};
  j["mic_array"] = json::parse(R"({"positions": [[10, 1, 1.2]]})");
  const Scene l = parse_scene(j.dump());
  EXPECT_EQ(l.room.num_walls(), 8u);
  EXPECT_EQ(l.room.dim(), 3);
}

TEST(Scene, SeedOverrideChangesNoise) {
  auto j = minimal();
  j["sources"][0]["signal"] = json::parse(R"({"noise": {"dur": 0.01}})");
  const auto a = parse_scene(j.dump(), {}, 1);
  const auto b = parse_scene(j.dump(), {}, 1);
  const auto c = parse_scene(j.dump(), {}, 2);
  EXPECT_EQ(a.sources[0].signal, b.sources[0].signal);
  EXPECT_NE(a.sources[0].signal, c.sources[0].signal);
  EXPECT_EQ(a.sources[0].signal.size(), 160u);
}

TEST(Wav, FloatRoundTrip) {
  const auto dir = scratch();
  Eigen::MatrixXd x(2, 100);
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    // Exactly representable in float32.
    x(0, i) = static_cast<double>(i % 37) / 64.0 - 0.25;
    x(1, i) = -static_cast<double>(i) / 128.0;
  }
  write_wav(dir / "a.wav", x, 22050);
  const auto back = read_wav(dir / "a.wav");
  EXPECT_EQ(back.fs, 22050.0);
  EXPECT_EQ((back.samples - x).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(fs::file_size(dir / "a.wav"), 44u + 2u * 100u * 4u);
}

TEST(Wav, ReadsPcm16) {
  const auto dir = scratch();
  const std::int16_t pcm[] = {0, 16384, -32768, 32767};
  auto put32 = [](std::string& s, std::uint32_t v) {
    for (int k = 0; k < 4; ++k) s.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
  };
  auto put16 = [](std::string& s, std::uint16_t v) {
    s.push_back(static_cast<char>(v & 0xff));
    s.push_back(static_cast<char>(v >> 8));
  };
  std::string b = "RIFF";
  put32(b, 36 + 8);
  b += "WAVEfmt ";
  put32(b, 16);
  put16(b, 1);
  put16(b, 1);
  put32(b, 8000);
  put32(b, 16000);
  put16(b, 2);
  put16(b, 16);
  b += "data";
  put32(b, 8);
  for (auto v : pcm) put16(b, static_cast<std::uint16_t>(v));
  std::ofstream(dir / "p.wav", std::ios::binary) << b;
  const auto w = read_wav(dir / "p.wav");
  EXPECT_EQ(w.fs, 8000.0);
  ASSERT_EQ(w.samples.cols(), 4);
  EXPECT_DOUBLE_EQ(w.samples(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(w.samples(0, 2), -1.0);
}

TEST(Csv, SignalHeader) {
  const auto dir = scratch();
  Eigen::MatrixXd x(2, 3);
  x << 1, 2, 3, 4, 5, 6;
  write_signal_csv(dir / "s.csv", x, 16000);
  const auto rows = read_csv(dir / "s.csv");
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"sample(fs=16000)", "ch0", "ch1"}));
  EXPECT_EQ(rows[2], (std::vector<std::string>{"1", "2", "5"}));
}

TEST(Manifest, Sha256KnownAnswer) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Commands, SimulateIsDeterministic) {
  const auto dir = scratch();
  auto j = minimal();
  j["sources"][0]["signal"] = json::parse(R"({"noise": {"dur": 0.1}})");
  const Scene s = parse_scene(j.dump());
  cmd_simulate(s, dir / "a");
  cmd_simulate(s, dir / "b");
  EXPECT_EQ(slurp(dir / "a" / "simulate.wav"), slurp(dir / "b" / "simulate.wav"));
  EXPECT_EQ(slurp(dir / "a" / "manifest.json"), slurp(dir / "b" / "manifest.json"));
  const json m = json::parse(slurp(dir / "a" / "manifest.json"));
  EXPECT_EQ(m["command"], "simulate");
  for (const auto& o : m["outputs"]) EXPECT_EQ(o["sha256"], sha256_file(dir / "a" / o["file"].get<std::string>()));
  for (const auto& e : fs::directory_iterator(dir / "a")) EXPECT_NE(e.path().extension(), ".tmp");
}

TEST(Commands, AnechoicRirIsSingleKernel) {
  const auto dir = scratch();
  auto j = minimal();
  j["max_order"] = 0;
  cmd_rir(parse_scene(j.dump()), dir);
  const auto h = read_wav(dir / "rir_s0_m0.wav");
  const double d = (Point(1, 1, 1) - Point(4, 3, 2)).norm();
  const auto ref = oracle::single_path_rir(d, 16000, 343, 80, static_cast<std::size_t>(h.samples.cols()));
  for (std::size_t n = 0; n < ref.size(); ++n) EXPECT_NEAR(h.samples(0, static_cast<Eigen::Index>(n)), ref[n], 1e-8);
  EXPECT_TRUE(fs::exists(dir / "rir_s0_m1.csv"));
}

TEST(Commands, FirstOrderAddsOnlyFirstOrderTaps) {
  const auto dir = scratch();
  auto j = minimal();
  j["max_order"] = 0;
  cmd_rir(parse_scene(j.dump()), dir / "n0");
  j["max_order"] = 1;
  cmd_rir(parse_scene(j.dump()), dir / "n1", CommandOptions{true});
  const auto h0 = read_wav(dir / "n0" / "rir_s0_m0.wav").samples;
  const auto h1 = read_wav(dir / "n1" / "rir_s0_m0.wav").samples;
  // The six first-order images of (1,1,1) in a 6x4x3 box.
  const Point images[] = {Point(-1, 1, 1), Point(11, 1, 1), Point(1, -1, 1),
                          Point(1, 7, 1),  Point(1, 1, -1), Point(1, 1, 5)};
  const auto len = static_cast<std::size_t>(h1.cols());
  std::vector<double> added(len, 0.0);
  for (const auto& p : images) {
    const auto k = oracle::single_path_rir((p - Point(4, 3, 2)).norm(), 16000, 343, 80, len);
    for (std::size_t n = 0; n < len; ++n) added[n] += 0.7 * k[n];
  }
  for (std::size_t n = 0; n < len; ++n) {
    const double base = n < static_cast<std::size_t>(h0.cols()) ? h0(0, static_cast<Eigen::Index>(n)) : 0.0;
    EXPECT_NEAR(h1(0, static_cast<Eigen::Index>(n)) - base, added[n], 1e-7);
  }
  EXPECT_EQ(read_csv(dir / "n1" / "images_s0.csv").size(), 8u);
}

TEST(Commands, ImpulseSimulationEqualsRir) {
  const auto dir = scratch();
  const Scene s = parse_scene(minimal().dump());
  cmd_rir(s, dir);
  cmd_simulate(s, dir);
  const auto y = read_wav(dir / "simulate.wav").samples;
  for (int m = 0; m < 2; ++m) {
    const auto h = read_wav(dir / ("rir_s0_m" + std::to_string(m) + ".wav")).samples;
    ASSERT_LE(h.cols(), y.cols());
    EXPECT_EQ(h.row(0), y.row(m).leftCols(h.cols()));
  }
}

TEST(Commands, HalfRateMicsHalveLength) {
  const auto dir = scratch();
  auto j = minimal();
  j["sources"][0]["signal"] = json::parse(R"({"tone": {"freq": 500, "dur": 0.2}})");
  cmd_simulate(parse_scene(j.dump()), dir / "full");
  j["mic_array"]["fs"] = 8000;
  cmd_simulate(parse_scene(j.dump()), dir / "half");
  const auto full = read_wav(dir / "full" / "simulate.wav");
  const auto half = read_wav(dir / "half" / "simulate.wav");
  EXPECT_EQ(half.fs, 8000.0);
  EXPECT_NEAR(static_cast<double>(half.samples.cols()), full.samples.cols() / 2.0, 1.0);
}

TEST(Commands, BeampatternCsv) {
  const auto dir = scratch();
  const Scene s = load_scene(fs::path(ROOMSIM_SCENES_DIR) / "beampattern.json");
  cmd_beampattern(s, dir);
  const auto rows = read_csv(dir / "beampattern.csv");
  ASSERT_EQ(rows[0].size(), 4u);
  EXPECT_EQ(rows[0][1], "gain_db_2000Hz");
  EXPECT_EQ(rows[0][3], "gain_db_8000Hz");
  // Main lobe on the target azimuth at every frequency.
  const double target = s.beamform.target_azimuth_deg;
  for (std::size_t col = 1; col < 4; ++col) {
    std::size_t best = 1;
    for (std::size_t r = 1; r < rows.size(); ++r)
      if (std::stod(rows[r][col]) > std::stod(rows[best][col])) best = r;
    EXPECT_NEAR(std::stod(rows[best][0]), target, 1.0) << rows[0][col];
  }
}

TEST(Commands, DoaFindsSourceAt45Degrees) {
  const auto dir = scratch();
  cmd_doa(load_scene(fs::path(ROOMSIM_SCENES_DIR) / "doa.json"), dir);
  const json r = json::parse(slurp(dir / "doa.json"));
  ASSERT_EQ(r["estimates"].size(), 1u);
  EXPECT_NEAR(r["estimates"][0]["azimuth_deg"].get<double>(), 45.0, 2.0);
}

TEST(Commands, AdaptErrorDecays) {
  const auto dir = scratch();
  cmd_adapt_demo(load_scene(fs::path(ROOMSIM_SCENES_DIR) / "adapt.json"), dir);
  const auto rows = read_csv(dir / "adapt.csv");
  const std::size_t n = rows.size() - 1;
  ASSERT_GT(n, 100u);
  double head = 0, tail = 0;
  for (std::size_t i = 1; i <= n / 10; ++i) head += std::stod(rows[i][2]);
  for (std::size_t i = n - n / 10 + 1; i <= n; ++i) tail += std::stod(rows[i][2]);
  EXPECT_LT(tail, 1e-3 * head);
}

TEST(Commands, StftCheckReportsExactReconstruction) {
  const auto dir = scratch();
  cmd_stft_check(load_scene(fs::path(ROOMSIM_SCENES_DIR) / "shoebox.json"), dir);
  const json r = json::parse(slurp(dir / "stft_check.json"));
  EXPECT_LT(r["max_abs_error"].get<double>(), 1e-12);
  EXPECT_EQ(r["stream_vs_oneshot"].get<double>(), 0.0);
}
