#include "roomsim/image_source.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>

#include "roomsim/error.hpp"
#include "roomsim/parallel.hpp"

namespace roomsim {

std::vector<int> ImageSourceSet::wall_chain(std::size_t i) const {
  std::vector<int> chain(static_cast<std::size_t>(orders_[i]));
  auto k = static_cast<std::ptrdiff_t>(chain.size()) - 1;
  for (int node = static_cast<int>(i); parents_[node] >= 0; node = parents_[node])
    chain[k--] = walls_[node];
  return chain;
}

ImageSource ImageSourceSet::operator[](std::size_t i) const {
  return ImageSource{positions_[i], orders_[i], wall_chain(i), damping_[i], parents_[i]};
}

std::vector<ImageSource> ImageSourceSet::select(std::span<const std::size_t> indices) const {
  std::vector<ImageSource> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back((*this)[i]);
  return out;
}

std::size_t ImageSourceSet::push(const Point& position, int order, int parent, int wall, double damping) {
  positions_.push_back(position);
  orders_.push_back(order);
  parents_.push_back(parent);
  walls_.push_back(wall);
  damping_.push_back(damping);
  return positions_.size() - 1;
}

void ImageSourceSet::reserve(std::size_t n) {
  positions_.reserve(n);
  orders_.reserve(n);
  parents_.reserve(n);
  walls_.reserve(n);
  damping_.reserve(n);
}

std::vector<bool> VisibilityTable::column(std::size_t mic) const {
  std::vector<bool> out(images_);
  for (std::size_t i = 0; i < images_; ++i) out[i] = (*this)(i, mic);
  return out;
}

std::size_t VisibilityTable::count_visible(std::size_t mic) const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < images_; ++i) n += (*this)(i, mic);
  return n;
}

namespace {

void check_source(const Room& room, const Point& src, int max_order) {
  if (max_order < 0) throw Error(ErrorCode::Config, "max_order must be >= 0");
  if (room.dim() == 2 && std::abs(src.z()) > kEpsGeom)
    throw Error(ErrorCode::InvalidScene, "source has z != 0 in a 2D room");
  if (!contains(room, src))
    throw Error(ErrorCode::InvalidScene, "source lies outside the room");
  for (const auto& w : room.walls())
    if (w.distance(src) < kEpsGeom)
      throw Error(ErrorCode::InvalidScene, "source lies on wall '" + w.name() + "'");
}

// One axis of the shoebox lattice: `count` alternating reflections starting at
// the low (x = 0) or high (x = L) wall.
struct AxisState {
  int count = 0;
  bool start_high = false;
};

}  // namespace

ImageSourceSet build_shoebox(const Room& room, const Point& src, int max_order) {
  if (!room.is_shoebox()) throw Error(ErrorCode::Usage, "build_shoebox needs a shoebox room");
  check_source(room, src, max_order);
  const int dim = room.dim();
  const Point& extent = room.extent();

  std::vector<AxisState> states{{0, false}};
  for (int k = 1; k <= max_order; ++k) {
    states.push_back({k, false});
    states.push_back({k, true});
  }

  auto wall_index = [](int axis, bool high) { return 2 * axis + (high ? 1 : 0); };
  auto coordinate = [&](int axis, const AxisState& s) {
    double x = src[axis];
    bool high = s.start_high;
    for (int r = 0; r < s.count; ++r, high = !high) x = high ? 2.0 * extent[axis] - x : -x;
    return x;
  };
  auto axis_damping = [&](int axis, const AxisState& s) {
    const int first = (s.count + 1) / 2;
    const int second = s.count / 2;
    const double a_first = room.wall(wall_index(axis, s.start_high)).absorption();
    const double a_second = room.wall(wall_index(axis, !s.start_high)).absorption();
    return std::pow(1.0 - a_first, first) * std::pow(1.0 - a_second, second);
  };
  auto last_wall = [&](int axis, const AxisState& s) {
    const bool high = (s.count % 2 == 1) ? s.start_high : !s.start_high;
    return wall_index(axis, high);
  };

  struct Candidate {
    std::array<AxisState, 3> axes{};
    int order = 0;
  };
  std::vector<Candidate> candidates;
  const std::size_t nz = dim == 3 ? states.size() : 1;
  for (const auto& sx : states)
    for (const auto& sy : states)
      for (std::size_t iz = 0; iz < nz; ++iz) {
        const AxisState sz = dim == 3 ? states[iz] : AxisState{};
        const int order = sx.count + sy.count + sz.count;
        if (order <= max_order) candidates.push_back({{sx, sy, sz}, order});
      }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.order < b.order; });

  using Key = std::array<int, 6>;
  auto key_of = [](const std::array<AxisState, 3>& axes) {
    Key k{};
    for (int a = 0; a < 3; ++a) {
      k[2 * a] = axes[a].count;
      k[2 * a + 1] = axes[a].count > 0 && axes[a].start_high;
    }
    return k;
  };

  ImageSourceSet set;
  set.reserve(candidates.size());
  std::map<Key, int> index;
  for (const auto& c : candidates) {
    Point p = Point::Zero();
    double damping = 1.0;
    for (int a = 0; a < dim; ++a) {
      p[a] = coordinate(a, c.axes[a]);
      damping *= axis_damping(a, c.axes[a]);
    }
    int parent = -1;
    int wall = -1;
    if (c.order > 0) {
      // Canonical chain: x reflections, then y, then z.
      int last_axis = dim - 1;
      while (c.axes[last_axis].count == 0) --last_axis;
      wall = last_wall(last_axis, c.axes[last_axis]);
      auto parent_axes = c.axes;
      parent_axes[last_axis].count -= 1;
      if (parent_axes[last_axis].count == 0) parent_axes[last_axis].start_high = false;
      parent = index.at(key_of(parent_axes));
    }
    index[key_of(c.axes)] = static_cast<int>(set.push(p, c.order, parent, wall, damping));
  }
  return set;
}

ImageSourceSet build_tree(const Room& room, const Point& src, int max_order) {
  check_source(room, src, max_order);
  const auto walls = room.walls();
  const int num_walls = static_cast<int>(walls.size());

  ImageSourceSet set;
  set.push(src, 0, -1, -1, 1.0);
  std::size_t begin = 0;
  std::size_t end = 1;
  for (int order = 1; order <= max_order; ++order) {
    for (std::size_t i = begin; i < end; ++i) {
      for (int w = 0; w < num_walls; ++w) {
        if (w == set.generating_wall(i)) continue;
        const Wall& wall = walls[w];
        if (side(set.position(i), wall) >= 0) continue;
        set.push(mirror(set.position(i), wall), order, static_cast<int>(i), w,
                 set.damping(i) * (1.0 - wall.absorption()));
      }
    }
    begin = end;
    end = set.size();
    if (begin == end) break;
  }
  return set;
}

bool is_obstructed(const Point& a, const Point& b, const Room& room, std::span<const int> exclude) {
  const auto walls = room.walls();
  for (int w = 0; w < static_cast<int>(walls.size()); ++w) {
    if (std::find(exclude.begin(), exclude.end(), w) != exclude.end()) continue;
    if (intersects(a, b, walls[w]).kind == IntersectionResult::Kind::Proper) return true;
  }
  return false;
}

bool is_visible(const ImageSourceSet& images, std::size_t i, const Point& mic, const Room& room) {
  Point target = mic;
  int on_wall = -1;
  auto node = static_cast<int>(i);
  while (true) {
    if (images.parent(node) < 0) {
      const int exclude[] = {on_wall};
      return !is_obstructed(target, images.position(node), room, exclude);
    }
    const int w = images.generating_wall(node);
    const auto hit = intersects(target, images.position(node), room.wall(w));
    if (!hit.hit()) return false;
    const int exclude[] = {w, on_wall};
    if (is_obstructed(target, hit.point, room, exclude)) return false;
    target = hit.point;
    on_wall = w;
    node = images.parent(node);
  }
}

VisibilityTable compute_visibility(const ImageSourceSet& images, std::span<const Point> mics, const Room& room) {
  VisibilityTable table(images.size(), mics.size());
  const std::size_t num_mics = mics.size();
  parallel_for(images.size() * num_mics, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k)
      table.set(k / num_mics, k % num_mics, is_visible(images, k / num_mics, mics[k % num_mics], room));
  });
  return table;
}

Enumeration enumerate(const Room& room, const Point& src, std::span<const Point> mics, int max_order) {
  Enumeration e;
  for (std::size_t m = 0; m < mics.size(); ++m) {
    if (room.dim() == 2 && std::abs(mics[m].z()) > kEpsGeom)
      throw Error(ErrorCode::InvalidScene, "microphone " + std::to_string(m) + " has z != 0 in a 2D room");
    if (!contains(room, mics[m]))
      throw Error(ErrorCode::InvalidScene, "microphone " + std::to_string(m) + " lies outside the room");
    for (const auto& w : room.walls())
      if (w.distance(mics[m]) < kEpsGeom)
        e.warnings.push_back("microphone " + std::to_string(m) + " lies on wall '" + w.name() + "'");
  }
  if (room.is_shoebox()) {
    e.images = build_shoebox(room, src, max_order);
    e.visibility = VisibilityTable(e.images.size(), mics.size(), true);
  } else {
    e.images = build_tree(room, src, max_order);
    e.visibility = compute_visibility(e.images, mics, room);
  }
  return e;
}

void write_images_csv(std::ostream& os, const Enumeration& e) {
  os << "index,parent,order,x,y,z,damping,visibility\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < e.images.size(); ++i) {
    const Point& p = e.images.position(i);
    os << i << ',' << e.images.parent(i) << ',' << e.images.order(i) << ',' << p.x() << ',' << p.y() << ','
       << p.z() << ',' << e.images.damping(i) << ',';
    for (std::size_t m = 0; m < e.visibility.mics(); ++m) os << (e.visibility(i, m) ? '1' : '0');
    os << '\n';
  }
}

}  // namespace roomsim
