#include "gffpin/lattice.hpp"

#include <algorithm>
#include <cmath>

namespace gffpin {

BoxGeometry::BoxGeometry(int N) : N_(N) {
  if (N < 2) throw InvalidGeometry("box side N must be >= 2 (N=" + std::to_string(N) + ")");
  const std::size_t n = size();
  kind_.assign(n, 0);
  dist_.assign(n, 0);
  boundary_slot_.assign(n, -1);
  interior_slot_.assign(n, -1);
  for (int x2 = 0; x2 <= N; ++x2) {
    for (int x1 = 0; x1 <= N; ++x1) {
      const int idx = index(x1, x2);
      const int d = std::min({x1, x2, N - x1, N - x2});
      dist_[idx] = d;
      if (d == 0) {
        boundary_slot_[idx] = static_cast<int>(boundary_.size());
        boundary_.push_back(idx);
      } else {
        kind_[idx] = d == 1 ? 2 : 1;
        interior_slot_[idx] = static_cast<int>(interior_.size());
        interior_.push_back(idx);
        if (d == 1) inner_boundary_.push_back(idx);
      }
      if (x1 >= 1 && x2 >= 1) tilde_.push_back(idx);
    }
  }
}

std::array<int, 4> BoxGeometry::neighbors(int idx) const {
  const Site s = site(idx);
  return {s.x1 < N_ ? idx + 1 : -1, s.x1 > 0 ? idx - 1 : -1,
          s.x2 < N_ ? idx + side() : -1, s.x2 > 0 ? idx - side() : -1};
}

BoxGeometry build_box(int N) { return BoxGeometry(N); }

std::vector<int> SubBox::sites(const BoxGeometry& g) const {
  std::vector<int> out;
  if (empty()) return out;
  out.reserve(count());
  for (int x2 = lo2; x2 <= hi2; ++x2)
    for (int x1 = lo1; x1 <= hi1; ++x1) out.push_back(g.index(x1, x2));
  return out;
}

SubBox scaled_inner_box(const BoxGeometry& g, double exponent) {
  const double N = g.N();
  const double logN = std::log(N);
  const double L = std::pow(logN, -exponent);
  SubBox b;
  const int lo = static_cast<int>(std::ceil(N * L - 1e-12));
  const int hi = static_cast<int>(std::floor(N * (1.0 - L) + 1e-12));
  b.lo1 = b.lo2 = std::max(lo, 0);
  b.hi1 = b.hi2 = std::min(hi, g.N());
  return b;
}

SubBox inner_prime(const BoxGeometry& g, double exponent) {
  return scaled_inner_box(g, exponent);
}

SubBox inner_double_prime(const BoxGeometry& g, double exponent) {
  return scaled_inner_box(g, exponent);
}

std::vector<int> CellTiling::frame_sites(const BoxGeometry& g) const {
  std::vector<char> covered(g.size(), 0);
  for (const Cell& c : cells)
    for (int idx : c.cell.sites(g)) covered[idx] = 1;
  std::vector<int> out;
  for (int idx : g.tilde_sites())
    if (!covered[idx]) out.push_back(idx);
  return out;
}

CellTiling cell_tiling(const BoxGeometry& g, int N1) {
  if (N1 < 2 || N1 % 2 != 0) throw TilingError("cell side N1 must be even and >= 2");
  if (g.N() % N1 != 0)
    throw TilingError("N=" + std::to_string(g.N()) + " is not a multiple of N1=" +
                      std::to_string(N1));
  const int k = g.N() / N1;
  if (k < 2) throw TilingError("need N >= 2 N1");
  CellTiling t;
  t.N = g.N();
  t.N1 = N1;
  t.k = k;
  const int half = N1 / 2;
  for (int y2 = 1; y2 <= k - 1; ++y2) {
    for (int y1 = 1; y1 <= k - 1; ++y1) {
      Cell c;
      c.y = {y1, y2};
      c.cell = {N1 * y1 - half + 1, N1 * y1 + half, N1 * y2 - half + 1, N1 * y2 + half};
      c.window = {N1 * (y1 - 1), N1 * (y1 + 1), N1 * (y2 - 1), N1 * (y2 + 1)};
      c.parity = (y1 % 2) + 2 * (y2 % 2);
      t.parity_classes[c.parity].push_back(static_cast<int>(t.cells.size()));
      t.cells.push_back(c);
    }
  }
  return t;
}

int scale_index_value(int k, int d, double unit) {
  if (d <= 0) return k;
  const int c = static_cast<int>(std::ceil(std::log(static_cast<double>(d)) / (2.0 * kPi * unit)));
  return std::clamp(k - c, 0, k);
}

int pair_scale_index(int k, int dist, double unit) {
  if (dist <= 0) return k;
  const double v = std::ceil(k - std::log(static_cast<double>(dist)) / (2.0 * kPi * unit));
  return std::max(0, static_cast<int>(v));
}

ScaleIndex scale_index(const BoxGeometry& g, int k, double unit) {
  if (k < 1) throw DomainError("scale_index: k must be >= 1");
  ScaleIndex s;
  s.k = k;
  s.unit = unit;
  s.j.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    s.j[i] = scale_index_value(k, g.dist_to_boundary(static_cast<int>(i)), unit);
  return s;
}

}  // namespace gffpin
