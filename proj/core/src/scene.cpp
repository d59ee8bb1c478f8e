#include "roomsim/scene.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "roomsim/error.hpp"
#include "roomsim/wav.hpp"

namespace roomsim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(ErrorCode code, const std::string& path, const std::string& msg) {
  throw Error(code, (path.empty() ? std::string("/") : path) + ": " + msg);
}

std::string join(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string join(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }

const json& require(const json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(ErrorCode::SceneSchema, path, std::string("missing required key '") + key + "'");
  return *it;
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(ErrorCode::SceneSchema, path, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!ok.count(it.key())) fail(ErrorCode::SceneSchema, join(path, it.key()), "unknown key");
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(ErrorCode::SceneSchema, path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(ErrorCode::SceneRange, path, "must be finite");
  return x;
}

double positive(const json& v, const std::string& path) {
  const double x = number(v, path);
  if (!(x > 0.0)) fail(ErrorCode::SceneRange, path, "must be positive");
  return x;
}

long long integer(const json& v, const std::string& path, long long lo, long long hi) {
  if (!v.is_number_integer()) fail(ErrorCode::SceneSchema, path, "expected an integer");
  const auto x = v.get<long long>();
  if (x < lo || x > hi)
    fail(ErrorCode::SceneRange, path, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return x;
}

std::string string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(ErrorCode::SceneSchema, path, "expected a string");
  return v.get<std::string>();
}

double absorption_value(const json& v, const std::string& path) {
  const double a = number(v, path);
  if (a < 0.0 || a > 1.0) fail(ErrorCode::SceneRange, path, "absorption must lie in [0, 1]");
  return a;
}

Point point(const json& v, const std::string& path, int dim) {
  if (!v.is_array() || v.size() < 2 || v.size() > 3)
    fail(ErrorCode::SceneSchema, path, "expected an array of 2 or 3 numbers");
  Point p = Point::Zero();
  for (std::size_t i = 0; i < v.size(); ++i) p[static_cast<Eigen::Index>(i)] = number(v[i], join(path, i));
  if (dim == 3 && v.size() != 3) fail(ErrorCode::SceneSchema, path, "3D room needs [x, y, z]");
  if (dim == 2 && v.size() == 3 && p.z() != 0.0) fail(ErrorCode::SceneSchema, path, "2D room needs z = 0");
  return p;
}

std::vector<double> number_list(const json& v, const std::string& path) {
  if (!v.is_array()) fail(ErrorCode::SceneSchema, path, "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], join(path, i)));
  return out;
}

Room parse_room(const json& doc) {
  const json& r = require(doc, "", "room");
  check_keys(r, "/room", {"shoebox", "corners", "extrude_height"});
  const bool box = r.contains("shoebox");
  if (box == r.contains("corners")) fail(ErrorCode::SceneSchema, "/room", "give exactly one of 'shoebox' or 'corners'");

  const json* abs = doc.contains("absorption") ? &doc["absorption"] : nullptr;
  std::optional<double> uniform;
  if (!abs) uniform = 0.0;
  else if (abs->is_number()) uniform = absorption_value(*abs, "/absorption");
  else if (!abs->is_object()) fail(ErrorCode::SceneSchema, "/absorption", "expected a number or an object of wall names");

  Room room = Room::shoebox(Point(1, 1, 1), 3, 0.0);
  try {
    if (box) {
      if (r.contains("extrude_height")) fail(ErrorCode::SceneSchema, "/room/extrude_height", "only valid with corners");
      const auto ext = number_list(r["shoebox"], "/room/shoebox");
      if (ext.size() != 2 && ext.size() != 3) fail(ErrorCode::SceneSchema, "/room/shoebox", "expected 2 or 3 extents");
      for (std::size_t i = 0; i < ext.size(); ++i)
        if (!(ext[i] > 0.0)) fail(ErrorCode::SceneRange, join("/room/shoebox", i), "extent must be positive");
      const Point e(ext[0], ext[1], ext.size() == 3 ? ext[2] : 0.0);
      room = Room::shoebox(e, static_cast<int>(ext.size()), 0.0);
    } else {
      const json& c = r["corners"];
      if (!c.is_array() || c.size() < 3) fail(ErrorCode::SceneSchema, "/room/corners", "expected at least 3 corners");
      std::vector<Point> corners;
      for (std::size_t i = 0; i < c.size(); ++i) corners.push_back(point(c[i], join("/room/corners", i), 2));
      room = from_corners(corners, 0.0);
      if (r.contains("extrude_height")) room = extrude(room, positive(r["extrude_height"], "/room/extrude_height"));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SceneSchema || e.code() == ErrorCode::SceneRange) throw;
    fail(ErrorCode::SceneSchema, "/room", e.what());
  }

  // Re-apply absorption by wall name.
  std::vector<double> alpha(room.num_walls(), uniform.value_or(0.0));
  if (!uniform) {
    std::optional<double> fallback;
    if (abs->contains("default")) fallback = absorption_value((*abs)["default"], "/absorption/default");
    for (auto it = abs->begin(); it != abs->end(); ++it) {
      if (it.key() == "default") continue;
      bool found = false;
      for (const auto& w : room.walls()) found |= w.name() == it.key();
      if (!found) fail(ErrorCode::SceneSchema, join("/absorption", it.key()), "no wall with this name");
    }
    for (std::size_t i = 0; i < room.num_walls(); ++i) {
      const std::string& name = room.wall(i).name();
      if (abs->contains(name)) alpha[i] = absorption_value((*abs)[name], join("/absorption", name));
      else if (fallback) alpha[i] = *fallback;
      else fail(ErrorCode::SceneSchema, "/absorption", "no value for wall '" + name + "' and no 'default'");
    }
  }
  if (room.is_shoebox()) return Room::shoebox(room.extent(), room.dim(), alpha);
  // from_corners names walls "wall<input edge>"; extrude adds floor and ceiling.
  std::vector<Point> corners;
  const json& c = r["corners"];
  for (std::size_t i = 0; i < c.size(); ++i) corners.push_back(point(c[i], "", 2));
  std::vector<double> by_edge(corners.size(), 0.0);
  std::optional<double> floor_alpha, ceiling_alpha;
  for (std::size_t i = 0; i < room.num_walls(); ++i) {
    const std::string& name = room.wall(i).name();
    if (name == "floor") floor_alpha = alpha[i];
    else if (name == "ceiling") ceiling_alpha = alpha[i];
    else by_edge[std::stoul(name.substr(4))] = alpha[i];
  }
  Room out = from_corners(corners, by_edge);
  if (room.dim() == 3) out = extrude(out, positive(r["extrude_height"], "/room/extrude_height"), floor_alpha, ceiling_alpha);
  return out;
}

std::vector<double> make_signal(const json& v, const std::string& path, double fs, std::uint64_t seed,
                                const std::filesystem::path& base, SourceSpec& src,
                                std::vector<std::filesystem::path>& inputs) {
  if (v.is_string() && v.get<std::string>() == "impulse") {
    src.kind = "impulse";
    return {1.0};
  }
  if (!v.is_object() || v.size() != 1)
    fail(ErrorCode::SceneSchema, path, "expected one of {wav}, {tone}, {noise}, {impulse} or \"impulse\"");
  const std::string key = v.begin().key();
  const json& body = v.begin().value();
  const std::string p = join(path, key);
  src.kind = key;
  if (key == "impulse") return {1.0};
  if (key == "wav") {
    const std::filesystem::path file = base / string(body, p);
    if (!std::filesystem::exists(file)) fail(ErrorCode::SceneFile, p, "file not found: " + file.string());
    inputs.push_back(file);
    WavData w = read_wav(file);
    src.signal_fs = w.fs;
    std::vector<double> out(static_cast<std::size_t>(w.samples.cols()));
    for (Eigen::Index t = 0; t < w.samples.cols(); ++t) out[static_cast<std::size_t>(t)] = w.samples(0, t);
    return out;
  }
  if (key == "tone") {
    check_keys(body, p, {"freq", "dur", "amplitude"});
    const double f = positive(require(body, p, "freq"), join(p, "freq"));
    const double dur = positive(require(body, p, "dur"), join(p, "dur"));
    const double amp = body.contains("amplitude") ? number(body["amplitude"], join(p, "amplitude")) : 1.0;
    if (f >= fs / 2.0) fail(ErrorCode::SceneRange, join(p, "freq"), "tone frequency must be below fs / 2");
    std::vector<double> out(static_cast<std::size_t>(std::lround(dur * fs)));
    for (std::size_t n = 0; n < out.size(); ++n)
      out[n] = amp * std::sin(2.0 * std::numbers::pi * f * static_cast<double>(n) / fs);
    return out;
  }
  if (key == "noise") {
    check_keys(body, p, {"dur", "seed", "std"});
    const double dur = positive(require(body, p, "dur"), join(p, "dur"));
    const double sd = body.contains("std") ? positive(body["std"], join(p, "std")) : 1.0;
    const std::uint64_t s =
        body.contains("seed") ? static_cast<std::uint64_t>(integer(body["seed"], join(p, "seed"), 0, INT64_MAX)) : seed;
    std::mt19937_64 rng(s);
    std::normal_distribution<double> dist(0.0, sd);
    std::vector<double> out(static_cast<std::size_t>(std::lround(dur * fs)));
    for (auto& x : out) x = dist(rng);
    return out;
  }
  fail(ErrorCode::SceneSchema, p, "unknown signal type");
}

void check_inside(const Room& room, const Point& p, const std::string& path, bool allow_on_wall) {
  if (!contains(room, p)) fail(ErrorCode::ScenePosition, path, "position lies outside the room");
  if (!allow_on_wall)
    for (const auto& w : room.walls())
      if (w.distance(p) < kEpsGeom) fail(ErrorCode::ScenePosition, path, "position lies on wall '" + w.name() + "'");
}

MicrophoneArray parse_mics(const json& m, const Room& room, double room_fs) {
  const std::string path = "/mic_array";
  check_keys(m, path, {"positions", "circular", "linear", "fs"});
  const double fs = m.contains("fs") ? positive(m["fs"], join(path, "fs")) : room_fs;
  const int kinds = m.contains("positions") + m.contains("circular") + m.contains("linear");
  if (kinds != 1) fail(ErrorCode::SceneSchema, path, "give exactly one of positions, circular, linear");
  const int dim = room.dim();
  std::vector<Point> pos;
  if (m.contains("positions")) {
    const json& v = m["positions"];
    if (!v.is_array() || v.empty()) fail(ErrorCode::SceneSchema, join(path, "positions"), "expected a non-empty array");
    for (std::size_t i = 0; i < v.size(); ++i) pos.push_back(point(v[i], join(join(path, "positions"), i), dim));
  } else if (m.contains("circular")) {
    const std::string p = join(path, "circular");
    const json& c = m["circular"];
    check_keys(c, p, {"center", "radius", "count", "phase_deg"});
    const Point center = point(require(c, p, "center"), join(p, "center"), dim);
    const double radius = positive(require(c, p, "radius"), join(p, "radius"));
    const auto count = static_cast<int>(integer(require(c, p, "count"), join(p, "count"), 1, 4096));
    const double phase = c.contains("phase_deg") ? number(c["phase_deg"], join(p, "phase_deg")) : 0.0;
    const auto arr = MicrophoneArray::circular(center, radius, count, fs, phase * std::numbers::pi / 180.0);
    pos.assign(arr.positions().begin(), arr.positions().end());
  } else {
    const std::string p = join(path, "linear");
    const json& c = m["linear"];
    check_keys(c, p, {"center", "spacing", "count", "angle_deg"});
    const Point center = point(require(c, p, "center"), join(p, "center"), dim);
    const double spacing = positive(require(c, p, "spacing"), join(p, "spacing"));
    const auto count = static_cast<int>(integer(require(c, p, "count"), join(p, "count"), 1, 4096));
    const double angle = c.contains("angle_deg") ? number(c["angle_deg"], join(p, "angle_deg")) : 0.0;
    const auto arr = MicrophoneArray::linear(center, spacing, count, fs, angle * std::numbers::pi / 180.0);
    pos.assign(arr.positions().begin(), arr.positions().end());
  }
  for (std::size_t i = 0; i < pos.size(); ++i) check_inside(room, pos[i], join(join(path, "positions"), i), true);
  try {
    return MicrophoneArray(pos, fs);
  } catch (const Error& e) {
    fail(ErrorCode::SceneSchema, path, e.what());
  }
}

std::size_t size_value(const json& v, const std::string& path, long long lo, long long hi) {
  return static_cast<std::size_t>(integer(v, path, lo, hi));
}

}  // namespace

Scene parse_scene(const std::string& text, const std::filesystem::path& base_dir, std::optional<std::uint64_t> seed) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::SceneSchema, "", std::string("invalid JSON: ") + e.what());
  }
  check_keys(doc, "", {"room", "absorption", "fs", "c", "max_order", "seed", "sources", "mic_array", "doa",
                       "beamform", "adapt"});

  Scene s;
  s.room = parse_room(doc);
  if (doc.contains("fs")) s.fs = positive(doc["fs"], "/fs");
  if (doc.contains("c")) s.c = positive(doc["c"], "/c");
  if (doc.contains("max_order")) s.max_order = static_cast<int>(integer(doc["max_order"], "/max_order", 0, 200));
  if (doc.contains("seed")) s.seed = static_cast<std::uint64_t>(integer(doc["seed"], "/seed", 0, INT64_MAX));
  if (seed) s.seed = *seed;

  if (doc.contains("sources")) {
    const json& v = doc["sources"];
    if (!v.is_array()) fail(ErrorCode::SceneSchema, "/sources", "expected an array");
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string p = join("/sources", i);
      check_keys(v[i], p, {"position", "signal", "delay"});
      SourceSpec src;
      src.position = point(require(v[i], p, "position"), join(p, "position"), s.room.dim());
      check_inside(s.room, src.position, join(p, "position"), false);
      src.signal_fs = s.fs;
      // Noise without its own seed draws from the scene seed, offset per source.
      src.signal = make_signal(require(v[i], p, "signal"), join(p, "signal"), s.fs, s.seed + i, base_dir, src,
                               s.inputs);
      if (v[i].contains("delay")) {
        src.delay = number(v[i]["delay"], join(p, "delay"));
        if (src.delay < 0.0) fail(ErrorCode::SceneRange, join(p, "delay"), "delay must be >= 0");
      }
      s.sources.push_back(std::move(src));
    }
  }
  if (doc.contains("mic_array")) s.mics = parse_mics(doc["mic_array"], s.room, s.fs);

  if (doc.contains("doa")) {
    const json& d = doc["doa"];
    check_keys(d, "/doa", {"method", "num_src", "resolution_deg", "grid", "frame_len", "hop", "fmin", "fmax"});
    if (d.contains("method")) {
      s.doa.method = string(d["method"], "/doa/method");
      if (s.doa.method != "music" && s.doa.method != "srp-phat")
        fail(ErrorCode::Usage, "/doa/method", "expected 'music' or 'srp-phat'");
    }
    if (d.contains("num_src")) s.doa.num_src = size_value(d["num_src"], "/doa/num_src", 1, 64);
    if (d.contains("resolution_deg")) s.doa.resolution_deg = positive(d["resolution_deg"], "/doa/resolution_deg");
    if (d.contains("grid")) {
      const auto g = string(d["grid"], "/doa/grid");
      if (g != "2d" && g != "3d") fail(ErrorCode::SceneSchema, "/doa/grid", "expected '2d' or '3d'");
      s.doa.three_d = g == "3d";
    }
    if (d.contains("frame_len")) s.doa.frame_len = size_value(d["frame_len"], "/doa/frame_len", 2, 1 << 20);
    if (d.contains("hop")) s.doa.hop = size_value(d["hop"], "/doa/hop", 1, 1 << 20);
    if (s.doa.hop > s.doa.frame_len) fail(ErrorCode::SceneRange, "/doa/hop", "hop must not exceed frame_len");
    if (d.contains("fmin")) s.doa.fmin = number(d["fmin"], "/doa/fmin");
    if (d.contains("fmax")) s.doa.fmax = number(d["fmax"], "/doa/fmax");
    if (!(s.doa.fmin >= 0.0 && s.doa.fmin < s.doa.fmax)) fail(ErrorCode::SceneRange, "/doa", "need 0 <= fmin < fmax");
  }

  if (doc.contains("beamform")) {
    const json& b = doc["beamform"];
    check_keys(b, "/beamform", {"type", "target_azimuth_deg", "target_colatitude_deg", "interferer_azimuths_deg",
                                "noise_floor", "freqs", "resolution_deg", "fft_len"});
    if (b.contains("type")) {
      s.beamform.type = string(b["type"], "/beamform/type");
      if (s.beamform.type != "ds" && s.beamform.type != "mvdr")
        fail(ErrorCode::Usage, "/beamform/type", "expected 'ds' or 'mvdr'");
    }
    if (b.contains("target_azimuth_deg"))
      s.beamform.target_azimuth_deg = number(b["target_azimuth_deg"], "/beamform/target_azimuth_deg");
    if (b.contains("target_colatitude_deg"))
      s.beamform.target_colatitude_deg = number(b["target_colatitude_deg"], "/beamform/target_colatitude_deg");
    if (b.contains("interferer_azimuths_deg"))
      s.beamform.interferer_azimuths_deg = number_list(b["interferer_azimuths_deg"], "/beamform/interferer_azimuths_deg");
    if (b.contains("noise_floor")) s.beamform.noise_floor = positive(b["noise_floor"], "/beamform/noise_floor");
    if (b.contains("freqs")) {
      s.beamform.freqs = number_list(b["freqs"], "/beamform/freqs");
      for (std::size_t i = 0; i < s.beamform.freqs.size(); ++i)
        if (!(s.beamform.freqs[i] > 0.0)) fail(ErrorCode::SceneRange, join("/beamform/freqs", i), "must be positive");
    }
    if (b.contains("resolution_deg")) s.beamform.resolution_deg = positive(b["resolution_deg"], "/beamform/resolution_deg");
    if (b.contains("fft_len")) s.beamform.fft_len = size_value(b["fft_len"], "/beamform/fft_len", 2, 1 << 20);
  }

  if (doc.contains("adapt")) {
    const json& a = doc["adapt"];
    check_keys(a, "/adapt", {"method", "taps", "param", "samples", "noise_std"});
    if (a.contains("method")) {
      s.adapt.method = string(a["method"], "/adapt/method");
      if (s.adapt.method != "lms" && s.adapt.method != "nlms" && s.adapt.method != "rls")
        fail(ErrorCode::Usage, "/adapt/method", "expected 'lms', 'nlms' or 'rls'");
    }
    if (a.contains("taps")) s.adapt.taps = size_value(a["taps"], "/adapt/taps", 1, 4096);
    if (a.contains("param")) s.adapt.param = positive(a["param"], "/adapt/param");
    else if (s.adapt.method != "rls") s.adapt.param = 0.5;
    if (s.adapt.method == "rls" && s.adapt.param > 1.0) fail(ErrorCode::SceneRange, "/adapt/param", "RLS lambda must be <= 1");
    if (a.contains("samples")) s.adapt.samples = size_value(a["samples"], "/adapt/samples", 1, 10000000);
    if (a.contains("noise_std")) {
      s.adapt.noise_std = number(a["noise_std"], "/adapt/noise_std");
      if (s.adapt.noise_std < 0.0) fail(ErrorCode::SceneRange, "/adapt/noise_std", "must be >= 0");
    }
  }

  // Resolved echo: the input document plus every default that was applied.
  json echo = doc;
  echo["fs"] = s.fs;
  echo["c"] = s.c;
  echo["max_order"] = s.max_order;
  echo["seed"] = s.seed;
  if (!echo.contains("absorption")) echo["absorption"] = 0.0;
  if (s.mics) echo["mic_array"]["fs"] = s.mics->fs();
  echo["doa"] = {{"method", s.doa.method}, {"num_src", s.doa.num_src}, {"resolution_deg", s.doa.resolution_deg},
                 {"grid", s.doa.three_d ? "3d" : "2d"}, {"frame_len", s.doa.frame_len}, {"hop", s.doa.hop},
                 {"fmin", s.doa.fmin}, {"fmax", s.doa.fmax}};
  echo["beamform"] = {{"type", s.beamform.type},
                      {"target_azimuth_deg", s.beamform.target_azimuth_deg},
                      {"target_colatitude_deg", s.beamform.target_colatitude_deg},
                      {"interferer_azimuths_deg", s.beamform.interferer_azimuths_deg},
                      {"noise_floor", s.beamform.noise_floor},
                      {"freqs", s.beamform.freqs},
                      {"resolution_deg", s.beamform.resolution_deg},
                      {"fft_len", s.beamform.fft_len}};
  echo["adapt"] = {{"method", s.adapt.method}, {"taps", s.adapt.taps}, {"param", s.adapt.param},
                   {"samples", s.adapt.samples}, {"noise_std", s.adapt.noise_std}};
  s.resolved = echo.dump(2);
  return s;
}

Scene load_scene(const std::filesystem::path& path, std::optional<std::uint64_t> seed) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::SceneFile, "", "cannot open scene file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  Scene s = parse_scene(ss.str(), path.parent_path(), seed);
  s.inputs.insert(s.inputs.begin(), path);
  return s;
}

}  // namespace roomsim
