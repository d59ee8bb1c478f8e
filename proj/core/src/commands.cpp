#include "roomsim/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include <openssl/evp.h>

#include "json.hpp"
#include "roomsim/adaptive.hpp"
#include "roomsim/beamforming.hpp"
#include "roomsim/csv.hpp"
#include "roomsim/doa.hpp"
#include "roomsim/error.hpp"
#include "roomsim/rir.hpp"
#include "roomsim/stft.hpp"
#include "roomsim/wav.hpp"

namespace roomsim {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view version() noexcept { return ROOMSIM_VERSION; }

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::Io, "SHA-256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

void prepare(const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) throw Error(ErrorCode::Io, "cannot create output directory '" + out_dir.string() + "'");
}

void write_manifest(const Scene& scene, const std::string& command, const fs::path& out_dir,
                    CommandResult& result) {
  json m;
  m["command"] = command;
  m["version"] = std::string(version());
  m["scene"] = json::parse(scene.resolved);
  m["inputs"] = json::array();
  for (const auto& p : scene.inputs)
    m["inputs"].push_back({{"path", p.lexically_normal().generic_string()}, {"sha256", sha256_file(p)}});
  m["outputs"] = json::array();
  for (const auto& f : result.outputs) m["outputs"].push_back({{"file", f}, {"sha256", sha256_file(out_dir / f)}});
  write_file_atomic(out_dir / "manifest.json", m.dump(2) + "\n");
  result.outputs.push_back("manifest.json");
}

const MicrophoneArray& need_mics(const Scene& scene) {
  if (!scene.mics) throw Error(ErrorCode::SceneSchema, "/mic_array: this command needs a microphone array");
  return *scene.mics;
}

Simulation build_simulation(const Scene& scene) {
  if (scene.sources.empty()) throw Error(ErrorCode::SceneSchema, "/sources: this command needs at least one source");
  Simulation sim(scene.room, scene.fs, scene.c, scene.max_order);
  for (const auto& s : scene.sources) {
    SoundSource src;
    src.position = s.position;
    src.signal = s.signal_fs == scene.fs ? s.signal : resample(s.signal, s.signal_fs, scene.fs);
    src.delay = s.delay;
    sim.add_source(std::move(src));
  }
  sim.set_microphones(need_mics(scene));
  return sim;
}

Eigen::MatrixXd row(const std::vector<double>& v) {
  Eigen::MatrixXd out(1, static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(0, static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

void dump_images(const Simulation& sim, const fs::path& out_dir, CommandResult& result) {
  for (std::size_t s = 0; s < sim.sources().size(); ++s) {
    std::ostringstream os;
    write_images_csv(os, sim.images(s));
    const std::string name = "images_s" + std::to_string(s) + ".csv";
    write_file_atomic(out_dir / name, os.str());
    result.outputs.push_back(name);
  }
}

std::string warnings_text(const Simulation& sim) {
  std::string out;
  for (const auto& w : sim.warnings()) out += "warning: " + w + "\n";
  return out;
}

}  // namespace

CommandResult cmd_rir(const Scene& scene, const fs::path& out_dir, const CommandOptions& opt) {
  Simulation sim = build_simulation(scene);
  sim.compute_rirs();
  prepare(out_dir);
  CommandResult result;
  result.summary = warnings_text(sim);
  for (std::size_t s = 0; s < sim.sources().size(); ++s)
    for (std::size_t m = 0; m < sim.microphones().size(); ++m) {
      const Rir& r = sim.rir(s, m);
      const std::string stem = "rir_s" + std::to_string(s) + "_m" + std::to_string(m);
      write_wav(out_dir / (stem + ".wav"), row(r.samples), r.fs);
      write_signal_csv(out_dir / (stem + ".csv"), row(r.samples), r.fs);
      result.outputs.push_back(stem + ".wav");
      result.outputs.push_back(stem + ".csv");
      result.summary += stem + ": " + std::to_string(r.samples.size()) + " samples, " +
                        std::to_string(sim.images(s).visibility.count_visible(m)) + " visible images\n";
    }
  if (opt.dump_images) dump_images(sim, out_dir, result);
  write_manifest(scene, "rir", out_dir, result);
  return result;
}

CommandResult cmd_simulate(const Scene& scene, const fs::path& out_dir, const CommandOptions& opt) {
  Simulation sim = build_simulation(scene);
  const Eigen::MatrixXd y = sim.simulate();
  prepare(out_dir);
  CommandResult result;
  result.summary = warnings_text(sim);
  write_wav(out_dir / "simulate.wav", y, sim.microphones().fs());
  result.outputs.push_back("simulate.wav");
  result.summary += "simulate.wav: " + std::to_string(y.rows()) + " channels, " + std::to_string(y.cols()) +
                    " samples at " + std::to_string(std::lround(sim.microphones().fs())) + " Hz\n";
  if (opt.dump_images) dump_images(sim, out_dir, result);
  write_manifest(scene, "simulate", out_dir, result);
  return result;
}

CommandResult cmd_beampattern(const Scene& scene, const fs::path& out_dir) {
  const auto& array = need_mics(scene);
  const auto& b = scene.beamform;
  const Point target = direction_from_angles(b.target_azimuth_deg * kDeg, b.target_colatitude_deg * kDeg);
  std::vector<Point> interferers;
  for (double a : b.interferer_azimuths_deg) interferers.push_back(direction_from_angles(a * kDeg));
  const Point targets[] = {target};
  const BeamformerWeights w =
      b.type == "mvdr" ? mvdr_weights(targets, interferers, b.noise_floor, array, b.freqs, FieldMode::Far, scene.c)
                       : ds_weights(targets, array, b.freqs, FieldMode::Far, scene.c);

  const DoaGrid grid = DoaGrid::circle(b.resolution_deg * kDeg);
  const auto dirs = grid.directions();
  std::vector<std::string> header{"angle_deg"};
  for (double f : b.freqs) {
    std::ostringstream os;
    os << "gain_db_" << f << "Hz";
    header.push_back(os.str());
  }
  std::vector<std::vector<double>> rows(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) rows[g].push_back(grid.azimuth(g) / kDeg);
  for (std::size_t k = 0; k < b.freqs.size(); ++k) {
    const auto gains = beampattern(w.w.row(static_cast<Eigen::Index>(k)).transpose(), b.freqs[k], dirs, array, true,
                                   scene.c);
    for (std::size_t g = 0; g < grid.size(); ++g) rows[g].push_back(gains[g]);
  }
  prepare(out_dir);
  CommandResult result;
  write_table_csv(out_dir / "beampattern.csv", header, rows);
  result.outputs.push_back("beampattern.csv");

  std::vector<std::vector<double>> wrows;
  for (std::size_t k = 0; k < b.freqs.size(); ++k)
    for (Eigen::Index m = 0; m < w.w.cols(); ++m) {
      const Complex v = w.w(static_cast<Eigen::Index>(k), m);
      wrows.push_back({b.freqs[k], static_cast<double>(m), v.real(), v.imag()});
    }
  write_table_csv(out_dir / "weights.csv", {"freq_hz", "mic", "real", "imag"}, wrows);
  result.outputs.push_back("weights.csv");
  result.summary = "beampattern.csv: " + std::to_string(grid.size()) + " directions x " +
                   std::to_string(b.freqs.size()) + " frequencies\n";
  write_manifest(scene, "beampattern", out_dir, result);
  return result;
}

CommandResult cmd_doa(const Scene& scene, const fs::path& out_dir, const CommandOptions& opt) {
  Simulation sim = build_simulation(scene);
  const Eigen::MatrixXd y = sim.simulate();
  const auto& array = sim.microphones();
  const auto& d = scene.doa;
  const StftConfig cfg = StftConfig::sqrt_hann(d.frame_len, d.hop, array.size());
  const auto frames = stft_once(y, cfg);
  const DoaGrid grid = d.three_d ? DoaGrid::sphere(d.resolution_deg * kDeg) : DoaGrid::circle(d.resolution_deg * kDeg);
  const auto bins = select_bins(frames, array.fs(), cfg.fft_len(), BinSelection{d.fmin, d.fmax, 30.0});
  const DoaResult r =
      locate_sources(frames, d.num_src, parse_doa_method(d.method), grid, array, array.fs(), bins, scene.c);

  prepare(out_dir);
  CommandResult result;
  result.summary = warnings_text(sim);
  json out;
  out["method"] = d.method;
  out["estimates"] = json::array();
  for (const auto& dir : r.directions) {
    out["estimates"].push_back({{"azimuth_deg", dir.azimuth / kDeg}, {"colatitude_deg", dir.colatitude / kDeg}});
    std::ostringstream os;
    os << "azimuth " << std::fixed << std::setprecision(1) << dir.azimuth / kDeg << " deg, colatitude "
       << dir.colatitude / kDeg << " deg\n";
    result.summary += os.str();
  }
  out["num_bins"] = r.bins.size();
  write_file_atomic(out_dir / "doa.json", out.dump(2) + "\n");
  result.outputs.push_back("doa.json");

  std::vector<std::vector<double>> rows;
  for (std::size_t g = 0; g < grid.size(); ++g)
    rows.push_back({grid.azimuth(g) / kDeg, grid.colatitude(g) / kDeg, r.spectrum[g]});
  write_table_csv(out_dir / "doa_spectrum.csv", {"azimuth_deg", "colatitude_deg", "value"}, rows);
  result.outputs.push_back("doa_spectrum.csv");
  if (opt.dump_images) dump_images(sim, out_dir, result);
  write_manifest(scene, "doa", out_dir, result);
  return result;
}

CommandResult cmd_adapt_demo(const Scene& scene, const fs::path& out_dir) {
  const auto& a = scene.adapt;
  std::mt19937_64 rng(scene.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd h(static_cast<Eigen::Index>(a.taps));
  for (auto& v : h) v = normal(rng);
  auto filter = make_adaptive_filter(a.method, a.taps, a.param);

  // Unknown FIR h driven by white noise; buf mirrors the filter's input buffer.
  Eigen::VectorXd buf = Eigen::VectorXd::Zero(h.size());
  std::vector<std::vector<double>> rows;
  rows.reserve(a.samples);
  for (std::size_t n = 0; n < a.samples; ++n) {
    const double x = normal(rng);
    for (Eigen::Index i = buf.size() - 1; i > 0; --i) buf(i) = buf(i - 1);
    buf(0) = x;
    const double d = h.dot(buf) + a.noise_std * normal(rng);
    const auto out = filter->update(x, d);
    const double mis = (filter->weights() - h).squaredNorm() / h.squaredNorm();
    rows.push_back({static_cast<double>(n), out.e * out.e, mis});
  }
  prepare(out_dir);
  CommandResult result;
  write_table_csv(out_dir / "adapt.csv", {"step", "error_sq", "misalignment"}, rows);
  result.outputs.push_back("adapt.csv");
  std::ostringstream os;
  os << a.method << ": final misalignment " << std::scientific << std::setprecision(3) << rows.back()[2] << "\n";
  result.summary = os.str();
  write_manifest(scene, "adapt", out_dir, result);
  return result;
}

CommandResult cmd_stft_check(const Scene& scene, const fs::path& out_dir) {
  Eigen::MatrixXd x;
  if (!scene.sources.empty() && scene.mics) {
    x = build_simulation(scene).simulate();
  } else {
    std::mt19937_64 rng(scene.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    x.resize(1, static_cast<Eigen::Index>(std::lround(10.0 * scene.fs)));
    for (Eigen::Index t = 0; t < x.cols(); ++t) x(0, t) = normal(rng);
  }
  const auto& d = scene.doa;
  const StftConfig cfg = StftConfig::sqrt_hann(d.frame_len, d.hop, static_cast<std::size_t>(x.rows()));
  const auto hop = static_cast<Eigen::Index>(cfg.hop);
  const Eigen::Index frames = (x.cols() + hop - 1) / hop;
  Eigen::MatrixXd padded = Eigen::MatrixXd::Zero(x.rows(), frames * hop);
  padded.leftCols(x.cols()) = x;

  Stft stft(cfg);
  Eigen::MatrixXd stream(x.rows(), frames * hop);
  for (Eigen::Index f = 0; f < frames; ++f)
    stream.middleCols(f * hop, hop) = stft.synthesis(stft.analysis(padded.middleCols(f * hop, hop)));
  const Eigen::MatrixXd once = istft_once(stft_once(x, cfg), cfg);

  const auto lat = static_cast<Eigen::Index>(stft.latency());
  double err = 0.0;
  for (Eigen::Index t = lat; t < stream.cols(); ++t)
    err = std::max(err, (stream.col(t) - padded.col(t - lat)).cwiseAbs().maxCoeff());
  const double diff = (stream - once).cwiseAbs().maxCoeff();

  prepare(out_dir);
  CommandResult result;
  json out{{"frame_len", cfg.frame_len}, {"hop", cfg.hop},        {"channels", x.rows()},
           {"samples", x.cols()},       {"latency", stft.latency()}, {"max_abs_error", err},
           {"stream_vs_oneshot", diff}};
  write_file_atomic(out_dir / "stft_check.json", out.dump(2) + "\n");
  result.outputs.push_back("stft_check.json");
  std::ostringstream os;
  os << "passthrough max abs error " << std::scientific << std::setprecision(3) << err << ", stream vs one-shot "
     << diff << "\n";
  result.summary = os.str();
  write_manifest(scene, "stft-check", out_dir, result);
  return result;
}

}  // namespace roomsim
