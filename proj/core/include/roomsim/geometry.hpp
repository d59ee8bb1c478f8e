#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace roomsim {

// Positions are stored as 3-vectors. Points of a 2D room carry z = 0.
using Point = Eigen::Vector3d;

// Absolute tolerance (meters) for coplanarity, side and containment tests.
inline constexpr double kEpsGeom = 1e-9;

/// Planar polygon (3D) or line segment (2D) bounding a room.
///
/// The normal is derived from the corner order: for a 2D segment a->b it is
/// perp(b - a) = (dy, -dx), which points outward for counter-clockwise rooms;
/// in 3D it follows the right-hand rule (Newell's method). Walls are immutable.
class Wall {
 public:
  Wall(std::vector<Point> corners, double absorption, int dim, std::string name = {});

  int dim() const noexcept { return dim_; }
  std::span<const Point> corners() const noexcept { return corners_; }
  const Point& normal() const noexcept { return normal_; }
  // Plane equation is normal . x == offset.
  double offset() const noexcept { return offset_; }
  double absorption() const noexcept { return absorption_; }
  const std::string& name() const noexcept { return name_; }

  // Signed distance of p to the supporting plane (positive on the normal side).
  double signed_distance(const Point& p) const noexcept {
    return normal_.dot(p) - offset_;
  }

  // Distance from p, assumed on the supporting plane, to the wall border.
  double border_distance(const Point& p) const noexcept;
  // Point-in-polygon for p on the supporting plane (border inclusive within eps).
  bool contains_on_plane(const Point& p) const noexcept;
  // Distance from an arbitrary point to the bounded wall.
  double distance(const Point& p) const noexcept;

 private:
  std::vector<Point> corners_;
  Point normal_;
  double offset_ = 0.0;
  double absorption_ = 0.0;
  int dim_ = 3;
  int drop_axis_ = 2;  // axis discarded when projecting a 3D polygon to 2D
  std::string name_;
};

struct IntersectionResult {
  enum class Kind { None, Proper, Boundary, Endpoint };
  Kind kind = Kind::None;
  Point point = Point::Zero();
  double t = 0.0;  // position along a->b in [0, 1]

  bool hit() const noexcept { return kind != Kind::None; }
};

/// Room geometry: a closed set of walls, optionally tagged as an axis-aligned
/// shoebox so the image source engine can use the lattice algorithm.
class Room {
 public:
  // Validates dimension consistency and that the walls bound a closed region.
  static Room from_walls(std::vector<Wall> walls);

  // Wall order: x-low, x-high, y-low, y-high[, z-low, z-high]; absorption is
  // given in the same order, or as a single value broadcast to every wall.
  static Room shoebox(const Point& extent, int dim, std::span<const double> absorption);
  static Room shoebox(const Point& extent, int dim, double absorption);

  int dim() const noexcept { return dim_; }
  std::span<const Wall> walls() const noexcept { return walls_; }
  const Wall& wall(std::size_t i) const { return walls_.at(i); }
  std::size_t num_walls() const noexcept { return walls_.size(); }

  bool is_shoebox() const noexcept { return extent_.has_value(); }
  const Point& extent() const;

  // Counter-clockwise floor polygon for rooms made by from_corners.
  std::span<const Point> polygon() const noexcept { return polygon_; }
  std::optional<double> uniform_absorption() const noexcept { return uniform_absorption_; }

  // Axis-aligned bounding box.
  Point lower() const;
  Point upper() const;

 private:
  friend Room from_corners(std::span<const Point>, std::span<const double>);
  friend Room extrude(const Room&, double, std::optional<double>, std::optional<double>);

  std::vector<Wall> walls_;
  int dim_ = 3;
  std::optional<Point> extent_;
  std::vector<Point> polygon_;
  std::optional<double> uniform_absorption_;
};

// Reflection of p across the infinite plane (or line) supporting w.
Point mirror(const Point& p, const Wall& w);

// Sign of the signed distance of p to w; 0 within kEpsGeom.
int side(const Point& p, const Wall& w);

// Intersection of the segment a->b with the bounded wall. Hits within kEpsGeom
// of a or b are Endpoint; hits within kEpsGeom of the wall border are Boundary.
IntersectionResult intersects(const Point& a, const Point& b, const Wall& w);

// Ray-casting parity test. Points within kEpsGeom of a wall count as inside.
bool contains(const Room& room, const Point& p);

// Builds a 2D room with one wall per polygon edge. Clockwise input is
// re-ordered so that wall normals point outward. Absorption is either a single
// value or one value per edge in input order.
Room from_corners(std::span<const Point> corners, std::span<const double> absorption);
Room from_corners(std::span<const Point> corners, double absorption);

// Lifts a 2D room into 3D with vertical walls, a floor (z = 0) and a ceiling
// (z = height). Floor and ceiling absorption default to the 2D room's uniform
// absorption, or to the mean wall absorption when it varies.
Room extrude(const Room& room2d, double height,
             std::optional<double> floor_absorption = std::nullopt,
             std::optional<double> ceiling_absorption = std::nullopt);

// Same supporting plane and the same corner set, irrespective of corner order.
bool same_wall_geometry(const Wall& a, const Wall& b, double tol = 1e-9);

}  // namespace roomsim
