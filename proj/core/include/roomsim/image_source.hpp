#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "roomsim/geometry.hpp"

namespace roomsim {

/// One image source, materialized from an ImageSourceSet.
struct ImageSource {
  Point position = Point::Zero();
  int order = 0;
  std::vector<int> wall_chain;  // most recent reflection last; empty for the real source
  double damping = 1.0;         // product of (1 - alpha) over wall_chain
  int parent = -1;              // index of the preceding image, -1 for the real source
};

/// Image sources stored as flat arrays, parents linked by index.
///
/// Entry 0 is always the real source. Entries are ordered by reflection order
/// (breadth first), and within one order by the construction sequence of the
/// generating algorithm, so two builds of the same scene are identical.
class ImageSourceSet {
 public:
  std::size_t size() const noexcept { return positions_.size(); }
  bool empty() const noexcept { return positions_.empty(); }

  const Point& position(std::size_t i) const { return positions_[i]; }
  int order(std::size_t i) const { return orders_[i]; }
  int parent(std::size_t i) const { return parents_[i]; }
  int generating_wall(std::size_t i) const { return walls_[i]; }
  double damping(std::size_t i) const { return damping_[i]; }
  std::vector<int> wall_chain(std::size_t i) const;

  ImageSource operator[](std::size_t i) const;

  // Subset selection, e.g. the direct path plus first-order images for a rake.
  std::vector<ImageSource> select(std::span<const std::size_t> indices) const;

  std::size_t push(const Point& position, int order, int parent, int wall, double damping);
  void reserve(std::size_t n);

 private:
  std::vector<Point> positions_;
  std::vector<int> orders_;
  std::vector<int> parents_;
  std::vector<int> walls_;
  std::vector<double> damping_;
};

/// Boolean visibility indexed (image, microphone).
class VisibilityTable {
 public:
  VisibilityTable() = default;
  VisibilityTable(std::size_t images, std::size_t mics, bool value = false)
      : images_(images), mics_(mics), bits_(images * mics, value ? 1 : 0) {}

  std::size_t images() const noexcept { return images_; }
  std::size_t mics() const noexcept { return mics_; }
  bool operator()(std::size_t image, std::size_t mic) const { return bits_[image * mics_ + mic] != 0; }
  void set(std::size_t image, std::size_t mic, bool v) { bits_[image * mics_ + mic] = v ? 1 : 0; }

  // Visibility of every image from one microphone.
  std::vector<bool> column(std::size_t mic) const;
  std::size_t count_visible(std::size_t mic) const;

  friend bool operator==(const VisibilityTable&, const VisibilityTable&) = default;

 private:
  std::size_t images_ = 0;
  std::size_t mics_ = 0;
  std::vector<std::uint8_t> bits_;
};

struct Enumeration {
  ImageSourceSet images;
  VisibilityTable visibility;
  std::vector<std::string> warnings;
};

// Allen-Berkley lattice. The room must be a shoebox; src strictly inside.
ImageSourceSet build_shoebox(const Room& room, const Point& src, int max_order);

// Reflection tree for arbitrary rooms. A node is mirrored across every wall
// except its own generating wall, and only when the node lies strictly on the
// interior side of that wall.
ImageSourceSet build_tree(const Room& room, const Point& src, int max_order);

// True iff a wall not listed in exclude properly intersects the open segment
// (a, b). Grazing hits on a wall border or at the segment ends do not count.
bool is_obstructed(const Point& a, const Point& b, const Room& room, std::span<const int> exclude = {});

// Unfolds the reflection path of image i toward mic, checking that every leg
// hits its generating wall and that no leg is obstructed.
bool is_visible(const ImageSourceSet& images, std::size_t i, const Point& mic, const Room& room);

// Batch visibility over all (image, mic) pairs, evaluated in parallel.
VisibilityTable compute_visibility(const ImageSourceSet& images, std::span<const Point> mics, const Room& room);

// Shoebox rooms use the lattice with everything visible; other rooms use the
// reflection tree followed by compute_visibility.
Enumeration enumerate(const Room& room, const Point& src, std::span<const Point> mics, int max_order);

// CSV dump: index,parent,order,x,y,z,damping,visibility (one 0/1 per mic).
void write_images_csv(std::ostream& os, const Enumeration& e);

}  // namespace roomsim
