#pragma once

#include <array>
#include <vector>

#include "gffpin/common.hpp"

namespace gffpin {

// The box {0,...,N}^2. Sites are addressed by a row-major linear index
// idx = x2 * (N+1) + x1.
class BoxGeometry {
 public:
  explicit BoxGeometry(int N);

  int N() const { return N_; }
  int side() const { return N_ + 1; }
  std::size_t size() const { return static_cast<std::size_t>(side()) * side(); }

  int index(int x1, int x2) const { return x2 * side() + x1; }
  int index(Site s) const { return index(s.x1, s.x2); }
  Site site(int idx) const { return {idx % side(), idx / side()}; }
  bool contains(int x1, int x2) const {
    return x1 >= 0 && x2 >= 0 && x1 <= N_ && x2 <= N_;
  }

  bool is_boundary(int idx) const { return kind_[idx] == 0; }
  bool is_interior(int idx) const { return kind_[idx] != 0; }
  // Interior site with at least one boundary neighbour.
  bool is_inner_boundary(int idx) const { return kind_[idx] == 2; }
  // Member of {1,...,N}^2.
  bool in_tilde(int idx) const {
    const Site s = site(idx);
    return s.x1 >= 1 && s.x2 >= 1;
  }

  // l1 distance to the boundary set.
  int dist_to_boundary(int idx) const { return dist_[idx]; }

  // Neighbour indices in the order (+e1, -e1, +e2, -e2); -1 outside the box.
  std::array<int, 4> neighbors(int idx) const;

  const std::vector<int>& boundary_sites() const { return boundary_; }
  const std::vector<int>& interior_sites() const { return interior_; }
  const std::vector<int>& inner_boundary_sites() const { return inner_boundary_; }
  const std::vector<int>& tilde_sites() const { return tilde_; }
  // Position of a boundary site in boundary_sites(), -1 otherwise.
  int boundary_slot(int idx) const { return boundary_slot_[idx]; }
  // Position of an interior site in interior_sites(), -1 otherwise.
  int interior_slot(int idx) const { return interior_slot_[idx]; }

 private:
  int N_;
  std::vector<unsigned char> kind_;  // 0 boundary, 1 interior, 2 inner boundary
  std::vector<int> dist_;
  std::vector<int> boundary_, interior_, inner_boundary_, tilde_;
  std::vector<int> boundary_slot_, interior_slot_;
};

BoxGeometry build_box(int N);

// Closed coordinate rectangle [lo1,hi1] x [lo2,hi2]; empty when lo > hi.
struct SubBox {
  int lo1 = 0, hi1 = -1, lo2 = 0, hi2 = -1;
  bool empty() const { return lo1 > hi1 || lo2 > hi2; }
  bool contains(Site s) const {
    return s.x1 >= lo1 && s.x1 <= hi1 && s.x2 >= lo2 && s.x2 <= hi2;
  }
  std::size_t count() const {
    return empty() ? 0
                   : static_cast<std::size_t>(hi1 - lo1 + 1) * (hi2 - lo2 + 1);
  }
  std::vector<int> sites(const BoxGeometry& g) const;
};

// Z^2 ∩ [N L, N(1-L)]^2 with L = (log N)^{-exponent}, rounded inward.
SubBox scaled_inner_box(const BoxGeometry& g, double exponent);
// Exponent 1/8.
SubBox inner_prime(const BoxGeometry& g, double exponent = 0.125);
// Exponent 2.
SubBox inner_double_prime(const BoxGeometry& g, double exponent = 2.0);

struct Cell {
  Site y;         // coarse index in [1,k-1]^2
  SubBox cell;    // N1 (y - (1/2,1/2)) + {1..N1}^2
  SubBox window;  // N1 (y - (1,1)) + {0..2N1}^2
  int parity;     // (y1 mod 2) + 2 (y2 mod 2)
};

struct CellTiling {
  int N = 0, N1 = 0, k = 0;
  std::vector<Cell> cells;
  std::array<std::vector<int>, 4> parity_classes;  // indices into cells
  // Sites of {1..N}^2 not covered by any cell.
  std::vector<int> frame_sites(const BoxGeometry& g) const;
};

CellTiling cell_tiling(const BoxGeometry& g, int N1);

// j(x) = (k - ceil(log d / (2 pi unit)))_+ . With unit = 1 this is the
// number of unit-variance scales not yet felt at distance d from the boundary.
int scale_index_value(int k, int d, double unit = 1.0);
// j(x,y) = ceil(k - log|x-y| / (2 pi unit))_+ for the l1 distance |x-y| >= 1.
int pair_scale_index(int k, int dist, double unit = 1.0);

struct ScaleIndex {
  int k = 0;
  double unit = 1.0;
  std::vector<int> j;  // per site; k on the boundary
  int operator()(int idx) const { return j[idx]; }
};

ScaleIndex scale_index(const BoxGeometry& g, int k, double unit = 1.0);

}  // namespace gffpin
