#include "roomsim/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "roomsim/error.hpp"

namespace roomsim {

namespace {

double point_segment_distance(const Point& p, const Point& a, const Point& b) {
  const Point ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

double cross2(const Point& o, const Point& a, const Point& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

// Closed-segment intersection test in the xy plane.
bool segments_touch_2d(const Point& p1, const Point& p2, const Point& q1, const Point& q2) {
  auto on_segment = [](const Point& a, const Point& b, const Point& p) {
    return std::min(a.x(), b.x()) - kEpsGeom <= p.x() && p.x() <= std::max(a.x(), b.x()) + kEpsGeom &&
           std::min(a.y(), b.y()) - kEpsGeom <= p.y() && p.y() <= std::max(a.y(), b.y()) + kEpsGeom;
  };
  auto sgn = [](double v) { return (v > kEpsGeom) - (v < -kEpsGeom); };
  const int d1 = sgn(cross2(q1, q2, p1));
  const int d2 = sgn(cross2(q1, q2, p2));
  const int d3 = sgn(cross2(p1, p2, q1));
  const int d4 = sgn(cross2(p1, p2, q2));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

bool near(const Point& a, const Point& b, double tol) { return (a - b).norm() <= tol; }

void check_closed(const std::vector<Wall>& walls, int dim) {
  if (dim == 2) {
    for (const auto& w : walls) {
      for (const auto& c : w.corners()) {
        int count = 0;
        for (const auto& other : walls)
          for (const auto& oc : other.corners()) count += near(c, oc, 1e-7);
        if (count != 2)
          throw Error(ErrorCode::InvalidGeometry,
                      "wall endpoints do not form closed loops (wall '" + w.name() + "')");
      }
    }
    return;
  }
  for (const auto& w : walls) {
    const auto cs = w.corners();
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const Point& a = cs[i];
      const Point& b = cs[(i + 1) % cs.size()];
      int count = 0;
      for (const auto& other : walls) {
        const auto os = other.corners();
        for (std::size_t j = 0; j < os.size(); ++j) {
          const Point& c = os[j];
          const Point& d = os[(j + 1) % os.size()];
          if ((near(a, c, 1e-7) && near(b, d, 1e-7)) || (near(a, d, 1e-7) && near(b, c, 1e-7))) ++count;
        }
      }
      if (count != 2)
        throw Error(ErrorCode::InvalidGeometry,
                    "wall edges are not shared by exactly two walls (wall '" + w.name() + "')");
    }
  }
}

}  // namespace

Wall::Wall(std::vector<Point> corners, double absorption, int dim, std::string name)
    : corners_(std::move(corners)), absorption_(absorption), dim_(dim), name_(std::move(name)) {
  if (dim_ != 2 && dim_ != 3) throw Error(ErrorCode::InvalidWall, "wall dimension must be 2 or 3");
  if (!(absorption_ >= 0.0 && absorption_ <= 1.0))
    throw Error(ErrorCode::InvalidWall, "wall absorption must lie in [0, 1]");
  for (const auto& c : corners_)
    if (!c.allFinite()) throw Error(ErrorCode::InvalidWall, "wall corner is not finite");

  if (dim_ == 2) {
    if (corners_.size() != 2) throw Error(ErrorCode::InvalidWall, "a 2D wall has exactly 2 corners");
    for (const auto& c : corners_)
      if (std::abs(c.z()) > kEpsGeom) throw Error(ErrorCode::InvalidWall, "2D wall corner has z != 0");
    const Point d = corners_[1] - corners_[0];
    const double len = d.norm();
    if (len < kEpsGeom) throw Error(ErrorCode::InvalidWall, "degenerate wall (zero length)");
    normal_ = Point(d.y(), -d.x(), 0.0) / len;
  } else {
    if (corners_.size() < 3) throw Error(ErrorCode::InvalidWall, "a 3D wall needs at least 3 corners");
    Point n = Point::Zero();
    for (std::size_t i = 0; i < corners_.size(); ++i) {
      const Point& a = corners_[i];
      const Point& b = corners_[(i + 1) % corners_.size()];
      n.x() += (a.y() - b.y()) * (a.z() + b.z());
      n.y() += (a.z() - b.z()) * (a.x() + b.x());
      n.z() += (a.x() - b.x()) * (a.y() + b.y());
    }
    const double area2 = n.norm();
    if (area2 < kEpsGeom) throw Error(ErrorCode::InvalidWall, "degenerate wall (zero area)");
    normal_ = n / area2;
    n.cwiseAbs().maxCoeff(&drop_axis_);
  }

  Point centroid = Point::Zero();
  for (const auto& c : corners_) centroid += c;
  centroid /= static_cast<double>(corners_.size());
  offset_ = normal_.dot(centroid);

  if (dim_ == 3) {
    for (const auto& c : corners_)
      if (std::abs(signed_distance(c)) > kEpsGeom)
        throw Error(ErrorCode::InvalidWall, "wall corners are not coplanar");
  }
}

double Wall::border_distance(const Point& p) const noexcept {
  if (dim_ == 2) return std::min((p - corners_[0]).norm(), (p - corners_[1]).norm());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < corners_.size(); ++i)
    best = std::min(best, point_segment_distance(p, corners_[i], corners_[(i + 1) % corners_.size()]));
  return best;
}

bool Wall::contains_on_plane(const Point& p) const noexcept {
  if (dim_ == 2) {
    const Point d = corners_[1] - corners_[0];
    const double len = d.norm();
    const double s = (p - corners_[0]).dot(d) / len;
    return s >= -kEpsGeom && s <= len + kEpsGeom;
  }
  if (border_distance(p) < kEpsGeom) return true;
  const int u = drop_axis_ == 0 ? 1 : 0;
  const int v = drop_axis_ == 2 ? 1 : 2;
  bool inside = false;
  for (std::size_t i = 0, j = corners_.size() - 1; i < corners_.size(); j = i++) {
    const Point& a = corners_[i];
    const Point& b = corners_[j];
    if ((a[v] > p[v]) != (b[v] > p[v])) {
      const double x = a[u] + (p[v] - a[v]) * (b[u] - a[u]) / (b[v] - a[v]);
      if (p[u] < x) inside = !inside;
    }
  }
  return inside;
}

double Wall::distance(const Point& p) const noexcept {
  if (dim_ == 2) return point_segment_distance(p, corners_[0], corners_[1]);
  const double sd = signed_distance(p);
  const Point q = p - sd * normal_;
  if (contains_on_plane(q)) return std::abs(sd);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < corners_.size(); ++i)
    best = std::min(best, point_segment_distance(p, corners_[i], corners_[(i + 1) % corners_.size()]));
  return best;
}

Point mirror(const Point& p, const Wall& w) {
  return p - 2.0 * w.signed_distance(p) * w.normal();
}

int side(const Point& p, const Wall& w) {
  const double d = w.signed_distance(p);
  if (std::abs(d) < kEpsGeom) return 0;
  return d > 0.0 ? 1 : -1;
}

IntersectionResult intersects(const Point& a, const Point& b, const Wall& w) {
  IntersectionResult r;
  const Point ab = b - a;
  const double len = ab.norm();
  if (len == 0.0) return r;
  const double da = w.signed_distance(a);
  const double db = w.signed_distance(b);
  const double denom = da - db;
  if (std::abs(denom) < 1e-14 * len) return r;  // parallel to the wall
  double t = da / denom;
  const double tol = kEpsGeom / len;
  if (t < -tol || t > 1.0 + tol) return r;
  t = std::clamp(t, 0.0, 1.0);
  const Point x = a + t * ab;
  if (!w.contains_on_plane(x)) return r;
  r.point = x;
  r.t = t;
  if (t * len < kEpsGeom || (1.0 - t) * len < kEpsGeom)
    r.kind = IntersectionResult::Kind::Endpoint;
  else if (w.border_distance(x) < kEpsGeom)
    r.kind = IntersectionResult::Kind::Boundary;
  else
    r.kind = IntersectionResult::Kind::Proper;
  return r;
}

bool contains(const Room& room, const Point& p) {
  for (const auto& w : room.walls())
    if (w.distance(p) < kEpsGeom) return true;

  const Point lo = room.lower();
  const Point hi = room.upper();
  const double reach = 2.0 * (hi - lo).norm() + (p - lo).norm() + 1.0;

  // Fixed, irrational-looking directions; a ray grazing a wall border is
  // discarded and the next direction is tried.
  static constexpr std::array<std::array<double, 3>, 8> kDirections{{
      {0.8191520442889918, 0.5735764363510461, 0.0871557427476582},
      {-0.3090169943749474, 0.9510565162951535, 0.1391731009600654},
      {0.1736481776669303, -0.9848077530122080, 0.0523359562429438},
      {-0.9396926207859084, -0.3420201433256687, 0.0348994967025010},
      {0.5446390350150271, 0.1218693434051475, 0.8298709802301584},
      {-0.4539904997395468, -0.6613118653236519, -0.5971585917027862},
      {0.7071067811865476, -0.1045284632676535, -0.6993908270190958},
      {-0.0697564737441253, 0.6946583704589973, -0.7159724171474466},
  }};

  bool inside = false;
  for (const auto& raw : kDirections) {
    Point d(raw[0], raw[1], room.dim() == 3 ? raw[2] : 0.0);
    d.normalize();
    const Point end = p + reach * d;
    int crossings = 0;
    bool grazing = false;
    for (const auto& w : room.walls()) {
      const auto hit = intersects(p, end, w);
      if (!hit.hit()) continue;
      if (hit.kind != IntersectionResult::Kind::Proper) {
        grazing = true;
        break;
      }
      ++crossings;
    }
    inside = (crossings % 2) == 1;
    if (!grazing) return inside;
  }
  return inside;
}

Room Room::from_walls(std::vector<Wall> walls) {
  if (walls.empty()) throw Error(ErrorCode::InvalidGeometry, "room has no walls");
  const int dim = walls.front().dim();
  for (const auto& w : walls)
    if (w.dim() != dim) throw Error(ErrorCode::InvalidGeometry, "walls have mixed dimensions");
  if (walls.size() < static_cast<std::size_t>(dim + 1))
    throw Error(ErrorCode::InvalidGeometry, "too few walls to bound a region");
  check_closed(walls, dim);

  Room room;
  room.dim_ = dim;
  room.walls_ = std::move(walls);
  const double a0 = room.walls_.front().absorption();
  if (std::all_of(room.walls_.begin(), room.walls_.end(),
                  [a0](const Wall& w) { return w.absorption() == a0; }))
    room.uniform_absorption_ = a0;
  return room;
}

Room Room::shoebox(const Point& extent, int dim, std::span<const double> absorption) {
  if (dim != 2 && dim != 3) throw Error(ErrorCode::Config, "shoebox dimension must be 2 or 3");
  for (int d = 0; d < dim; ++d)
    if (!(extent[d] > 0.0) || !std::isfinite(extent[d]))
      throw Error(ErrorCode::Config, "shoebox extents must be positive");
  const std::size_t num_walls = 2 * static_cast<std::size_t>(dim);
  if (absorption.size() != 1 && absorption.size() != num_walls)
    throw Error(ErrorCode::Config, "shoebox absorption needs 1 or " + std::to_string(num_walls) + " values");
  auto alpha = [&](std::size_t i) { return absorption.size() == 1 ? absorption[0] : absorption[i]; };

  static const char* kNames[] = {"west", "east", "south", "north", "floor", "ceiling"};
  const double L = extent.x(), W = extent.y();
  std::vector<Wall> walls;
  if (dim == 2) {
    walls.emplace_back(std::vector<Point>{{0, W, 0}, {0, 0, 0}}, alpha(0), 2, kNames[0]);
    walls.emplace_back(std::vector<Point>{{L, 0, 0}, {L, W, 0}}, alpha(1), 2, kNames[1]);
    walls.emplace_back(std::vector<Point>{{0, 0, 0}, {L, 0, 0}}, alpha(2), 2, kNames[2]);
    walls.emplace_back(std::vector<Point>{{L, W, 0}, {0, W, 0}}, alpha(3), 2, kNames[3]);
  } else {
    const double H = extent.z();
    // Each face is listed counter-clockwise when seen from outside.
    walls.emplace_back(std::vector<Point>{{0, 0, 0}, {0, 0, H}, {0, W, H}, {0, W, 0}}, alpha(0), 3, kNames[0]);
    walls.emplace_back(std::vector<Point>{{L, 0, 0}, {L, W, 0}, {L, W, H}, {L, 0, H}}, alpha(1), 3, kNames[1]);
    walls.emplace_back(std::vector<Point>{{0, 0, 0}, {L, 0, 0}, {L, 0, H}, {0, 0, H}}, alpha(2), 3, kNames[2]);
    walls.emplace_back(std::vector<Point>{{0, W, 0}, {0, W, H}, {L, W, H}, {L, W, 0}}, alpha(3), 3, kNames[3]);
    walls.emplace_back(std::vector<Point>{{0, 0, 0}, {0, W, 0}, {L, W, 0}, {L, 0, 0}}, alpha(4), 3, kNames[4]);
    walls.emplace_back(std::vector<Point>{{0, 0, H}, {L, 0, H}, {L, W, H}, {0, W, H}}, alpha(5), 3, kNames[5]);
  }
  Room room = from_walls(std::move(walls));
  Point e = extent;
  if (dim == 2) e.z() = 0.0;
  room.extent_ = e;
  return room;
}

Room Room::shoebox(const Point& extent, int dim, double absorption) {
  const double a[] = {absorption};
  return shoebox(extent, dim, a);
}

const Point& Room::extent() const {
  if (!extent_) throw Error(ErrorCode::Usage, "room is not a shoebox");
  return *extent_;
}

Point Room::lower() const {
  Point lo = Point::Constant(std::numeric_limits<double>::infinity());
  for (const auto& w : walls_)
    for (const auto& c : w.corners()) lo = lo.cwiseMin(c);
  return lo;
}

Point Room::upper() const {
  Point hi = Point::Constant(-std::numeric_limits<double>::infinity());
  for (const auto& w : walls_)
    for (const auto& c : w.corners()) hi = hi.cwiseMax(c);
  return hi;
}

Room from_corners(std::span<const Point> corners, std::span<const double> absorption) {
  const std::size_t n = corners.size();
  if (n < 3) throw Error(ErrorCode::InvalidGeometry, "a polygon needs at least 3 corners");
  if (absorption.size() != 1 && absorption.size() != n)
    throw Error(ErrorCode::Config, "absorption list has " + std::to_string(absorption.size()) +
                                       " entries, expected 1 or " + std::to_string(n));
  for (const auto& c : corners)
    if (!c.allFinite() || std::abs(c.z()) > kEpsGeom)
      throw Error(ErrorCode::InvalidGeometry, "polygon corners must be finite 2D points");

  for (std::size_t i = 0; i < n; ++i) {
    if (near(corners[i], corners[(i + 1) % n], kEpsGeom))
      throw Error(ErrorCode::InvalidGeometry, "polygon has repeated consecutive corners");
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_touch_2d(corners[i], corners[(i + 1) % n], corners[j], corners[(j + 1) % n]))
        throw Error(ErrorCode::InvalidGeometry, "polygon is self-intersecting");
    }
  }

  double area2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& a = corners[i];
    const Point& b = corners[(i + 1) % n];
    area2 += a.x() * b.y() - b.x() * a.y();
  }
  if (std::abs(area2) < kEpsGeom) throw Error(ErrorCode::InvalidGeometry, "polygon has zero area");
  const bool reversed = area2 < 0.0;

  std::vector<Point> ccw(corners.begin(), corners.end());
  // edge_source[k] is the input edge index that becomes wall k.
  std::vector<std::size_t> edge_source(n);
  std::iota(edge_source.begin(), edge_source.end(), 0);
  if (reversed) {
    std::reverse(ccw.begin(), ccw.end());
    for (std::size_t k = 0; k < n; ++k) edge_source[k] = (2 * n - 2 - k) % n;
  }

  std::vector<Wall> walls;
  walls.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t src = edge_source[k];
    const double alpha = absorption.size() == 1 ? absorption[0] : absorption[src];
    walls.emplace_back(std::vector<Point>{ccw[k], ccw[(k + 1) % n]}, alpha, 2,
                       "wall" + std::to_string(src));
  }
  Room room = Room::from_walls(std::move(walls));
  room.polygon_ = std::move(ccw);
  if (absorption.size() == 1) room.uniform_absorption_ = absorption[0];
  return room;
}

Room from_corners(std::span<const Point> corners, double absorption) {
  const double a[] = {absorption};
  return from_corners(corners, a);
}

Room extrude(const Room& room2d, double height, std::optional<double> floor_absorption,
             std::optional<double> ceiling_absorption) {
  if (room2d.dim() != 2) throw Error(ErrorCode::Config, "extrude needs a 2D room");
  if (!(height > 0.0) || !std::isfinite(height))
    throw Error(ErrorCode::Config, "extrusion height must be positive");

  std::vector<Point> poly(room2d.polygon().begin(), room2d.polygon().end());
  if (poly.empty()) {
    // Rooms not built from a polygon (e.g. a 2D shoebox): follow the wall chain.
    std::size_t current = 0;
    for (std::size_t k = 0; k < room2d.num_walls(); ++k) {
      const Wall& w = room2d.wall(current);
      poly.push_back(w.corners()[0]);
      for (std::size_t j = 0; j < room2d.num_walls(); ++j) {
        if (near(room2d.wall(j).corners()[0], w.corners()[1], 1e-7)) {
          current = j;
          break;
        }
      }
    }
  }
  const std::size_t n = poly.size();

  double default_alpha = 0.0;
  if (room2d.uniform_absorption()) {
    default_alpha = *room2d.uniform_absorption();
  } else {
    for (const auto& w : room2d.walls()) default_alpha += w.absorption();
    default_alpha /= static_cast<double>(room2d.num_walls());
  }

  std::vector<Wall> walls;
  walls.reserve(n + 2);
  for (std::size_t i = 0; i < n; ++i) {
    const Wall& w2 = room2d.wall(i);
    const Point a = w2.corners()[0];
    const Point b = w2.corners()[1];
    walls.emplace_back(std::vector<Point>{a, b, b + Point(0, 0, height), a + Point(0, 0, height)},
                       w2.absorption(), 3, w2.name());
  }
  std::vector<Point> floor(poly.rbegin(), poly.rend());
  std::vector<Point> ceiling;
  for (const auto& c : poly) ceiling.push_back(c + Point(0, 0, height));
  walls.emplace_back(std::move(floor), floor_absorption.value_or(default_alpha), 3, "floor");
  walls.emplace_back(std::move(ceiling), ceiling_absorption.value_or(default_alpha), 3, "ceiling");

  Room room = Room::from_walls(std::move(walls));
  room.polygon_ = std::move(poly);
  return room;
}

bool same_wall_geometry(const Wall& a, const Wall& b, double tol) {
  if (a.dim() != b.dim()) return false;
  if ((a.normal() - b.normal()).norm() > tol || std::abs(a.offset() - b.offset()) > tol) return false;
  auto covered = [tol](std::span<const Point> xs, std::span<const Point> ys) {
    return std::all_of(xs.begin(), xs.end(), [&](const Point& x) {
      return std::any_of(ys.begin(), ys.end(), [&](const Point& y) { return near(x, y, tol); });
    });
  };
  return covered(a.corners(), b.corners()) && covered(b.corners(), a.corners());
}

}  // namespace roomsim
