#include "roomsim/wav.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "roomsim/csv.hpp"
#include "roomsim/error.hpp"

namespace roomsim {

static_assert(std::endian::native == std::endian::little, "WAV I/O assumes a little-endian host");

namespace {

template <typename T>
void put(std::string& out, T v) {
  char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  out.append(b, sizeof(T));
}

template <typename T>
T get(const std::vector<char>& data, std::size_t pos) {
  if (pos + sizeof(T) > data.size()) throw Error(ErrorCode::Io, "truncated WAV file");
  T v;
  std::memcpy(&v, data.data() + pos, sizeof(T));
  return v;
}

}  // namespace

void write_wav(const std::filesystem::path& path, const Eigen::Ref<const Eigen::MatrixXd>& samples, double fs) {
  const auto channels = static_cast<std::uint16_t>(samples.rows());
  const auto frames = static_cast<std::uint32_t>(samples.cols());
  if (channels == 0) throw Error(ErrorCode::Io, "cannot write a WAV file without channels");
  const auto rate = static_cast<std::uint32_t>(std::lround(fs));
  const std::uint32_t data_bytes = frames * channels * 4u;

  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  put<std::uint32_t>(out, 36 + data_bytes);
  out += "WAVEfmt ";
  put<std::uint32_t>(out, 16);
  put<std::uint16_t>(out, 3);  // IEEE float
  put<std::uint16_t>(out, channels);
  put<std::uint32_t>(out, rate);
  put<std::uint32_t>(out, rate * channels * 4u);
  put<std::uint16_t>(out, static_cast<std::uint16_t>(channels * 4u));
  put<std::uint16_t>(out, 32);
  out += "data";
  put<std::uint32_t>(out, data_bytes);
  for (std::uint32_t t = 0; t < frames; ++t)
    for (std::uint16_t c = 0; c < channels; ++c) put<float>(out, static_cast<float>(samples(c, t)));
  write_file_atomic(path, out);
}

WavData read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  const std::vector<char> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (data.size() < 12 || std::memcmp(data.data(), "RIFF", 4) != 0 || std::memcmp(data.data() + 8, "WAVE", 4) != 0)
    throw Error(ErrorCode::Io, "'" + path.string() + "' is not a RIFF/WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= data.size()) {
    const std::string id(data.data() + pos, 4);
    const auto size = get<std::uint32_t>(data, pos + 4);
    const std::size_t body = pos + 8;
    if (id == "fmt ") {
      format = get<std::uint16_t>(data, body);
      channels = get<std::uint16_t>(data, body + 2);
      rate = get<std::uint32_t>(data, body + 4);
      bits = get<std::uint16_t>(data, body + 14);
      if (format == 0xFFFE && size >= 26) format = get<std::uint16_t>(data, body + 24);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt || channels == 0) throw Error(ErrorCode::Io, "WAV data chunk before fmt chunk");
      const bool f32 = format == 3 && bits == 32;
      const bool pcm16 = format == 1 && bits == 16;
      if (!f32 && !pcm16) throw Error(ErrorCode::Io, "unsupported WAV encoding (need float32 or PCM16)");
      const std::size_t width = bits / 8;
      const std::size_t avail = std::min<std::size_t>(size, data.size() - body);
      const std::size_t frames = avail / (width * channels);
      WavData w;
      w.fs = rate;
      w.samples.resize(channels, static_cast<Eigen::Index>(frames));
      for (std::size_t t = 0; t < frames; ++t)
        for (std::size_t c = 0; c < channels; ++c) {
          const std::size_t at = body + (t * channels + c) * width;
          w.samples(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(t)) =
              f32 ? static_cast<double>(get<float>(data, at)) : get<std::int16_t>(data, at) / 32768.0;
        }
      return w;
    }
    pos = body + size + (size & 1u);
  }
  throw Error(ErrorCode::Io, "'" + path.string() + "' has no data chunk");
}

}  // namespace roomsim
