#pragma once

#include <span>
#include <vector>

#include "roomsim/geometry.hpp"

namespace roomsim {

/// Microphone locations together with the rate the array records at.
class MicrophoneArray {
 public:
  MicrophoneArray(std::vector<Point> positions, double fs);

  // count microphones evenly spaced on a circle in the xy plane, the first one
  // at angle `phase` (radians) from the x axis.
  static MicrophoneArray circular(const Point& center, double radius, int count, double fs, double phase = 0.0);
  // count microphones along the direction at angle `angle` in the xy plane.
  static MicrophoneArray linear(const Point& center, double spacing, int count, double fs, double angle = 0.0);

  std::size_t size() const noexcept { return positions_.size(); }
  std::span<const Point> positions() const noexcept { return positions_; }
  const Point& position(std::size_t m) const { return positions_.at(m); }
  double fs() const noexcept { return fs_; }
  Point centroid() const;

  MicrophoneArray translated(const Point& offset) const;

 private:
  std::vector<Point> positions_;
  double fs_;
};

}  // namespace roomsim
