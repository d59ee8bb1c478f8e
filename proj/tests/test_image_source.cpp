#include <algorithm>
#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "roomsim/error.hpp"
#include "roomsim/image_source.hpp"

using namespace roomsim;

namespace {

const std::vector<Point> kL{Point(0, 0, 0), Point(0, 4, 0), Point(8, 4, 0),
                            Point(8, 8, 0), Point(11, 8, 0), Point(11, 0, 0)};

bool has_point(const ImageSourceSet& s, const Point& p) {
  for (std::size_t i = 0; i < s.size(); ++i)
    if ((s.position(i) - p).norm() < 1e-12) return true;
  return false;
}

}  // namespace

TEST(Shoebox, FirstOrderUnitSquare) {
  const Room sq = Room::shoebox(Point(1, 1, 0), 2, 0.0);
  const auto s = build_shoebox(sq, Point(0.3, 0.3, 0), 1);
  ASSERT_EQ(s.size(), 5u);
  for (const Point& p : {Point(0.3, 0.3, 0), Point(-0.3, 0.3, 0), Point(0.3, -0.3, 0), Point(1.7, 0.3, 0),
                         Point(0.3, 1.7, 0)})
    EXPECT_TRUE(has_point(s, p)) << p.transpose();
}

TEST(Shoebox, ExactOrderCounts) {
  const Room box = Room::shoebox(Point(5, 4, 3), 3, 0.0);
  const auto s = build_shoebox(box, Point(1, 1, 1), 5);
  std::vector<int> per(6, 0);
  for (std::size_t i = 0; i < s.size(); ++i) ++per[s.order(i)];
  EXPECT_EQ(per[0], 1);
  for (int n = 1; n <= 5; ++n) EXPECT_EQ(per[n], 4 * n * n + 2) << n;
  for (int n = 0; n <= 5; ++n) EXPECT_EQ(static_cast<long>(build_shoebox(box, Point(1, 1, 1), n).size()), oracle::lattice_count(3, n));
}

TEST(Shoebox, DampingAndChains) {
  const double alpha = 0.2;
  const Room box = Room::shoebox(Point(5, 4, 3), 3, alpha);
  const auto s = build_shoebox(box, Point(1.2, 2.1, 0.7), 4);
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_NEAR(s.damping(i), std::pow(1 - alpha, s.order(i)), 1e-15);
    const auto chain = s.wall_chain(i);
    ASSERT_EQ(static_cast<int>(chain.size()), s.order(i));
    // Replaying the chain reproduces the position.
    Point p(1.2, 2.1, 0.7);
    for (int w : chain) p = mirror(p, box.wall(w));
    EXPECT_LT((p - s.position(i)).norm(), 1e-9);
    if (s.parent(i) >= 0) EXPECT_EQ(s.order(s.parent(i)), s.order(i) - 1);
  }
}

TEST(Shoebox, PerWallDamping) {
  const double a[] = {0.1, 0.2, 0.3, 0.4};
  const Room box = Room::shoebox(Point(3, 2, 0), 2, a);
  const auto s = build_shoebox(box, Point(1, 1, 0), 3);
  for (std::size_t i = 0; i < s.size(); ++i) {
    double d = 1.0;
    for (int w : s.wall_chain(i)) d *= 1 - a[w];
    EXPECT_NEAR(s.damping(i), d, 1e-15);
  }
}

TEST(Shoebox, RejectsOutsideSource) {
  const Room box = Room::shoebox(Point(3, 2, 0), 2, 0.0);
  try {
    build_shoebox(box, Point(4, 1, 0), 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidScene);
  }
}

TEST(Tree, TrivialCases) {
  const Room tri = from_corners(std::vector<Point>{Point(0, 0, 0), Point(4, 0, 0), Point(0, 3, 0)}, 0.0);
  EXPECT_EQ(build_tree(tri, Point(1, 1, 0), 0).size(), 1u);
  EXPECT_EQ(build_tree(tri, Point(1, 1, 0), 1).size(), 4u);
}

TEST(Tree, NodeBound) {
  const Room l = from_corners(kL, 0.1);
  const auto s = build_tree(l, Point(9.5, 6, 0), 4);
  const std::size_t W = 6;
  std::size_t bound = 1;
  for (int n = 1, level = 1; n <= 4; ++n) {
    level = n == 1 ? W : level * (W - 1);
    bound += level;
  }
  EXPECT_LE(s.size(), bound);
  for (std::size_t i = 1; i < s.size(); ++i) {
    const int p = s.parent(i);
    EXPECT_NE(s.generating_wall(i), s.generating_wall(p));
    EXPECT_LT(side(s.position(p), l.wall(s.generating_wall(i))), 0);
  }
}

TEST(Tree, RectangleVisibleSetMatchesLattice) {
  const std::vector<Point> rect{Point(0, 0, 0), Point(5, 0, 0), Point(5, 3, 0), Point(0, 3, 0)};
  const Room generic = from_corners(rect, 0.0);
  const Room box = Room::shoebox(Point(5, 3, 0), 2, 0.0);
  const Point src(1.1, 0.7, 0);
  const Point mics[] = {Point(3.9, 2.2, 0), Point(0.4, 2.8, 0)};
  for (int n = 0; n <= 4; ++n) {
    const auto lattice = build_shoebox(box, src, n);
    const auto tree = build_tree(generic, src, n);
    EXPECT_GE(tree.size(), lattice.size());
    for (std::size_t i = 0; i < lattice.size(); ++i) EXPECT_TRUE(has_point(tree, lattice.position(i)));
    const auto vis = compute_visibility(tree, mics, generic);
    for (std::size_t m = 0; m < 2; ++m) EXPECT_EQ(vis.count_visible(m), lattice.size()) << "N=" << n;
  }
}

TEST(Visibility, LatticeImagesVisibleInRectangle) {
  const std::vector<Point> rect{Point(0, 0, 0), Point(5, 0, 0), Point(5, 3, 0), Point(0, 3, 0)};
  const Room generic = from_corners(rect, 0.0);
  const auto tree = build_tree(generic, Point(1.1, 0.7, 0), 1);
  for (std::size_t i = 0; i < tree.size(); ++i) EXPECT_TRUE(is_visible(tree, i, Point(2.6, 1.9, 0), generic));
}

TEST(Obstruction, Cases) {
  const Room sq = from_corners(std::vector<Point>{Point(0, 0, 0), Point(1, 0, 0), Point(1, 1, 0), Point(0, 1, 0)}, 0.0);
  EXPECT_FALSE(is_obstructed(Point(0.1, 0.1, 0), Point(0.9, 0.8, 0), sq));
  const Room l = from_corners(kL, 0.0);
  EXPECT_TRUE(is_obstructed(Point(2, 2, 0), Point(9.5, 6, 0), l));
  EXPECT_FALSE(is_obstructed(Point(9, 1, 0), Point(9.5, 6, 0), l));
  // Segment ending on a wall is not blocked by that wall.
  EXPECT_FALSE(is_obstructed(Point(9, 1, 0), Point(11, 1, 0), l));
  // Grazing the re-entrant corner does not obstruct.
  EXPECT_FALSE(is_obstructed(Point(6, 2, 0), Point(10, 6, 0), l));
}

TEST(Visibility, MatchesOracleInLRoom) {
  const Room l = from_corners(kL, 0.1);
  const Point src(9.5, 6, 0);
  const auto tree = build_tree(l, src, 3);
  std::vector<oracle::Segment> walls;
  for (const auto& w : l.walls())
    walls.push_back({{w.corners()[0].x(), w.corners()[0].y()}, {w.corners()[1].x(), w.corners()[1].y()}});
  std::vector<Point> probes;
  for (double x = 0.53; x < 11; x += 1.37)
    for (double y = 0.41; y < 8; y += 1.13)
      if (contains(l, Point(x, y, 0))) probes.emplace_back(x, y, 0);
  const auto table = compute_visibility(tree, probes, l);
  for (std::size_t i = 0; i < tree.size(); ++i)
    for (std::size_t m = 0; m < probes.size(); ++m)
      EXPECT_EQ(table(i, m), oracle::visible_2d({src.x(), src.y()}, tree.wall_chain(i),
                                                {probes[m].x(), probes[m].y()}, walls))
          << "image " << i << " probe " << probes[m].transpose();
}

TEST(Visibility, ExtrudedLRoom) {
  const Room l3 = extrude(from_corners(kL, 0.1), 3.0);
  const auto tree = build_tree(l3, Point(9.5, 6, 1.5), 1);
  EXPECT_FALSE(is_visible(tree, 0, Point(2, 2, 1.2), l3));
  EXPECT_TRUE(is_visible(tree, 0, Point(9, 1, 1.2), l3));
}

TEST(Enumerate, DeterministicAndWarns) {
  const Room l = from_corners(kL, 0.1);
  const Point mics[] = {Point(10, 7, 0), Point(11, 3, 0)};
  const auto a = enumerate(l, Point(9.5, 6, 0), mics, 3);
  const auto b = enumerate(l, Point(9.5, 6, 0), mics, 3);
  ASSERT_EQ(a.images.size(), b.images.size());
  for (std::size_t i = 0; i < a.images.size(); ++i) EXPECT_EQ(a.images.position(i), b.images.position(i));
  EXPECT_TRUE(a.visibility == b.visibility);
  EXPECT_EQ(a.warnings.size(), 1u);

  const Point outside[] = {Point(4, 6, 0)};
  EXPECT_THROW(enumerate(l, Point(9.5, 6, 0), outside, 1), Error);

  std::ostringstream os;
  write_images_csv(os, a);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "index,parent,order,x,y,z,damping,visibility");
}

TEST(Enumerate, ShoeboxAllVisible) {
  const Room box = Room::shoebox(Point(6, 4, 3), 3, 0.2);
  const Point mics[] = {Point(1, 1, 1)};
  const auto e = enumerate(box, Point(3, 2, 1.5), mics, 2);
  EXPECT_EQ(e.images.size(), 25u);
  EXPECT_EQ(e.visibility.count_visible(0), 25u);
}
