#include "roomsim/microphone_array.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "roomsim/error.hpp"

namespace roomsim {

MicrophoneArray::MicrophoneArray(std::vector<Point> positions, double fs)
    : positions_(std::move(positions)), fs_(fs) {
  if (positions_.empty()) throw Error(ErrorCode::Config, "microphone array is empty");
  if (!(fs_ > 0.0) || !std::isfinite(fs_)) throw Error(ErrorCode::Config, "microphone array fs must be positive");
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    if (!positions_[i].allFinite())
      throw Error(ErrorCode::Config, "microphone " + std::to_string(i) + " position is not finite");
    for (std::size_t j = 0; j < i; ++j)
      if ((positions_[i] - positions_[j]).norm() < kEpsGeom)
        throw Error(ErrorCode::Config,
                    "microphones " + std::to_string(j) + " and " + std::to_string(i) + " share a position");
  }
}

MicrophoneArray MicrophoneArray::circular(const Point& center, double radius, int count, double fs, double phase) {
  if (count < 1 || !(radius > 0.0)) throw Error(ErrorCode::Config, "circular array needs count >= 1 and radius > 0");
  std::vector<Point> pos;
  for (int m = 0; m < count; ++m) {
    const double a = phase + 2.0 * std::numbers::pi * m / count;
    pos.push_back(center + radius * Point(std::cos(a), std::sin(a), 0.0));
  }
  return MicrophoneArray(std::move(pos), fs);
}

MicrophoneArray MicrophoneArray::linear(const Point& center, double spacing, int count, double fs, double angle) {
  if (count < 1 || !(spacing > 0.0)) throw Error(ErrorCode::Config, "linear array needs count >= 1 and spacing > 0");
  const Point dir(std::cos(angle), std::sin(angle), 0.0);
  std::vector<Point> pos;
  for (int m = 0; m < count; ++m) pos.push_back(center + (m - 0.5 * (count - 1)) * spacing * dir);
  return MicrophoneArray(std::move(pos), fs);
}

Point MicrophoneArray::centroid() const {
  Point c = Point::Zero();
  for (const auto& p : positions_) c += p;
  return c / static_cast<double>(positions_.size());
}

MicrophoneArray MicrophoneArray::translated(const Point& offset) const {
  std::vector<Point> pos = positions_;
  for (auto& p : pos) p += offset;
  return MicrophoneArray(std::move(pos), fs_);
}

}  // namespace roomsim
