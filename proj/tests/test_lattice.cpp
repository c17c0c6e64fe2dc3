#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>

#include "doctest.h"

#include "gffpin/lattice.hpp"

using namespace gffpin;

TEST_CASE("box counts and small examples") {
  for (int N : {2, 3, 4, 17, 64}) {
    const BoxGeometry g(N);
    CHECK(g.size() == static_cast<std::size_t>((N + 1) * (N + 1)));
    CHECK(g.boundary_sites().size() == static_cast<std::size_t>(4 * N));
    CHECK(g.interior_sites().size() == static_cast<std::size_t>((N - 1) * (N - 1)));
    CHECK(g.tilde_sites().size() == static_cast<std::size_t>(N * N));
  }
  const BoxGeometry g2(2);
  REQUIRE(g2.interior_sites().size() == 1);
  CHECK(g2.site(g2.interior_sites()[0]) == Site{1, 1});
  CHECK(g2.boundary_sites().size() == 8);
  const BoxGeometry g4(4);
  CHECK(g4.dist_to_boundary(g4.index(2, 2)) == 2);
  CHECK(BoxGeometry(64).interior_sites().size() == 3969);
  CHECK_THROWS_AS(BoxGeometry(1), InvalidGeometry);
  CHECK_THROWS_AS(build_box(0), InvalidGeometry);
}

TEST_CASE("index maps, neighbours and slots are consistent") {
  const BoxGeometry g(7);
  for (int idx = 0; idx < static_cast<int>(g.size()); ++idx) {
    const Site s = g.site(idx);
    REQUIRE(g.index(s) == idx);
    const auto nb = g.neighbors(idx);
    const int d1[4] = {1, -1, 0, 0}, d2[4] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      const int y1 = s.x1 + d1[k], y2 = s.x2 + d2[k];
      CHECK(nb[k] == (g.contains(y1, y2) ? g.index(y1, y2) : -1));
    }
    CHECK(g.is_boundary(idx) != g.is_interior(idx));
    if (g.is_boundary(idx))
      CHECK(g.boundary_sites()[g.boundary_slot(idx)] == idx);
    else
      CHECK(g.interior_sites()[g.interior_slot(idx)] == idx);
    bool touches = false;
    for (int n : nb)
      if (n >= 0 && g.is_boundary(n)) touches = true;
    CHECK(g.is_inner_boundary(idx) == (g.is_interior(idx) && touches));
  }
}

TEST_CASE("distance to the boundary matches a brute-force scan") {
  for (int N : {2, 5, 12, 32}) {
    const BoxGeometry g(N);
    for (int idx = 0; idx < static_cast<int>(g.size()); ++idx) {
      const Site s = g.site(idx);
      int best = 1 << 30;
      for (int b : g.boundary_sites()) {
        const Site t = g.site(b);
        best = std::min(best, std::abs(s.x1 - t.x1) + std::abs(s.x2 - t.x2));
      }
      REQUIRE(g.dist_to_boundary(idx) == best);
    }
  }
}

TEST_CASE("cell tiling examples") {
  const BoxGeometry g(8);
  const CellTiling t = cell_tiling(g, 2);
  CHECK(t.k == 4);
  CHECK(t.cells.size() == 9);
  for (const Cell& c : t.cells) CHECK(c.cell.count() == 4);
  std::size_t total = 0;
  for (const auto& cls : t.parity_classes) total += cls.size();
  CHECK(total == 9);
  CHECK_THROWS_AS(cell_tiling(g, 3), TilingError);
  CHECK_THROWS_AS(cell_tiling(BoxGeometry(10), 4), TilingError);
  CHECK_THROWS_AS(cell_tiling(g, 8), TilingError);
}

TEST_CASE("cells are disjoint, cover the tilde box with the frame, and windows separate by parity") {
  for (auto [N, N1] : {std::pair{8, 2}, std::pair{24, 4}, std::pair{48, 8}, std::pair{64, 16}}) {
    const BoxGeometry g(N);
    const CellTiling t = cell_tiling(g, N1);
    std::vector<int> owner(g.size(), 0);
    for (const Cell& c : t.cells) {
      CHECK(c.cell.count() == static_cast<std::size_t>(N1 * N1));
      for (int idx : c.cell.sites(g)) {
        REQUIRE(g.in_tilde(idx));
        ++owner[idx];
      }
      CHECK(c.window.contains({c.cell.lo1, c.cell.lo2}));
      CHECK(c.window.contains({c.cell.hi1, c.cell.hi2}));
    }
    for (int o : owner) REQUIRE(o <= 1);
    const auto frame = t.frame_sites(g);
    std::size_t covered = 0;
    for (int o : owner) covered += o;
    CHECK(covered + frame.size() == g.tilde_sites().size());
    CHECK(frame.size() <= static_cast<std::size_t>(2 * N * N1));
    // Windows in one parity class overlap at most on their edges.
    for (const auto& cls : t.parity_classes)
      for (std::size_t a = 0; a < cls.size(); ++a)
        for (std::size_t b = a + 1; b < cls.size(); ++b) {
          const SubBox& u = t.cells[cls[a]].window;
          const SubBox& v = t.cells[cls[b]].window;
          const int o1 = std::min(u.hi1, v.hi1) - std::max(u.lo1, v.lo1);
          const int o2 = std::min(u.hi2, v.hi2) - std::max(u.lo2, v.lo2);
          REQUIRE((o1 <= 0 || o2 <= 0));
        }
  }
}

TEST_CASE("scale index values") {
  // ceil(e^{6 pi}) sits just above e^{6 pi}, so the ceiling in the formula is 4.
  const int above = static_cast<int>(std::ceil(std::exp(6.0 * kPi)));
  const int below = static_cast<int>(std::floor(std::exp(6.0 * kPi)));
  CHECK(scale_index_value(10, above) == 6);
  CHECK(scale_index_value(10, below) == 7);
  CHECK(scale_index_value(3, 1) == 3);
  CHECK(scale_index_value(2, 1 << 30) == 0);
  CHECK(scale_index_value(5, 0) == 5);
  CHECK(pair_scale_index(3, 1) == 3);
  CHECK(pair_scale_index(1, 1 << 30) == 0);
  // unit rescales log d / (2 pi) linearly
  CHECK(scale_index_value(4, 100, 0.5) == 4 - static_cast<int>(std::ceil(std::log(100.0) / kPi)));
  CHECK_THROWS_AS(scale_index(BoxGeometry(4), 0), DomainError);
}

TEST_CASE("scale index is non-increasing in the distance and clamped") {
  for (double unit : {1.0, 0.3, 0.05}) {
    int prev = 1 << 30;
    for (int d = 1; d < 5000; ++d) {
      const int j = scale_index_value(6, d, unit);
      REQUIRE(j >= 0);
      REQUIRE(j <= 6);
      REQUIRE(j <= prev);
      prev = j;
    }
  }
  const BoxGeometry g(40);
  const ScaleIndex s = scale_index(g, 4, 0.2);
  for (int b : g.boundary_sites()) CHECK(s(b) == 4);
  for (int idx = 0; idx < static_cast<int>(g.size()); ++idx)
    CHECK(s(idx) == scale_index_value(4, g.dist_to_boundary(idx), 0.2));
}

TEST_CASE("inner boxes round inward") {
  const BoxGeometry g(256);
  CHECK(inner_prime(g).empty());
  CHECK(inner_prime(g).count() == 0);
  const SubBox b = scaled_inner_box(g, 1.0);
  const double L = 1.0 / std::log(256.0);
  CHECK(b.lo1 == static_cast<int>(std::ceil(256 * L)));
  CHECK(b.hi1 == static_cast<int>(std::floor(256 * (1 - L))));
  CHECK(b.sites(g).size() == b.count());
  const SubBox dd = inner_double_prime(g);
  CHECK(dd.lo1 <= b.lo1);
  CHECK(dd.hi1 >= b.hi1);
}
