#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "qdem/coins.hpp"
#include "qdem/perm.hpp"

namespace qdem {

// Triangle delta = {(S,Y): 1 <= Y < S <= n}. Row S has vertices at
// Y = 1..S-1; the arrow leaving (S,S-1) to the right turns up at the diagonal
// and is recorded as the vertical at column S of row S. Row 1 has no vertex:
// color n enters there and climbs column 1.

// Letter of the staircase word carried by box (S,Y): n + Y - S.
int box_to_letter(int S, int Y, int n);

// Zero-based position of (S,Y) in row-by-row, left-to-right order. It equals
// the position of the box's letter in staircase_word(n).
constexpr std::uint64_t box_index(int S, int Y) {
  return static_cast<std::uint64_t>(S - 2) * static_cast<std::uint64_t>(S - 1) / 2 +
         static_cast<std::uint64_t>(Y - 1);
}

struct TriangleConfig {
  int n = 0;
  // Per box in box_index order; empty unless the sampler retained them.
  std::vector<int> top;
  std::vector<int> right;
  // Colors on the verticals of row n, columns 1..n.
  std::vector<int> top_row;

  bool retained() const { return !top.empty(); }
  // Color on the vertical leaving row S at column Y, 1 <= Y <= S.
  int vertical(int S, int Y) const;
  int bottom_in(int S, int Y) const;
  int left_in(int S, int Y) const;
};

// Same lattice after forgetting colors; entries are 0/1.
struct UncoloredConfig {
  int n = 0;
  int X = 0;  // colors <= X were kept
  std::vector<std::uint8_t> top;
  std::vector<std::uint8_t> right;
  std::vector<std::uint8_t> top_row;
  std::uint8_t row1 = 0;  // occupancy of the row-1 diagonal arrow

  int vertical(int S, int Y) const;
  int bottom_in(int S, int Y) const;
  int left_in(int S, int Y) const;
};

struct TriangleSample {
  TriangleConfig config;
  Permutation sigma;
};

// Colored vertex decision: returns true for the straight (crossing)
// configuration. Distinct colors only; equal colors always go straight.
template <class Coins>
inline bool colored_cross(int bottom, int left, double p, double q, const Coins& coins,
                          std::uint64_t address) {
  if (bottom == left) return true;
  if (!(coins.uniform(address, CoinTag::keep) < p)) return false;
  return bottom > left || coins.uniform(address, CoinTag::qflip) < q;
}

// Row-by-row sampler with a single working array of column colors. After
// each row S the observer receives the verticals of that row as a span over
// columns 1..S (index 0 is column 1).
template <class Coins, class RowObserver>
TriangleConfig sample_colored_triangle_with(int n, double p, double q, const Coins& coins, bool retain,
                                            RowObserver&& observer) {
  if (n < 1) throw std::invalid_argument("n must be positive");
  TriangleConfig cfg;
  cfg.n = n;
  if (retain) {
    const auto boxes = static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
    cfg.top.resize(boxes);
    cfg.right.resize(boxes);
  }
  std::vector<int> col(static_cast<std::size_t>(n), 0);
  col[0] = n;
  observer(1, std::span<const int>(col.data(), 1));
  std::uint64_t t = 0;
  for (int S = 2; S <= n; ++S) {
    int h = n + 1 - S;
    for (int Y = 1; Y <= S - 1; ++Y, ++t) {
      int& b = col[static_cast<std::size_t>(Y - 1)];
      if (!colored_cross(b, h, p, q, coins, t)) std::swap(b, h);
      // Straight: the vertical keeps b, h continues. Turn: they trade edges.
      if (retain) {
        cfg.top[t] = b;
        cfg.right[t] = h;
      }
    }
    col[static_cast<std::size_t>(S - 1)] = h;
    observer(S, std::span<const int>(col.data(), static_cast<std::size_t>(S)));
  }
  cfg.top_row = col;
  return cfg;
}

template <class Coins>
TriangleSample sample_colored_triangle_with(int n, double p, double q, const Coins& coins, bool retain = false) {
  TriangleSample s;
  s.config = sample_colored_triangle_with(n, p, q, coins, retain, [](int, std::span<const int>) {});
  s.sigma = Permutation(s.config.top_row);
  return s;
}

TriangleSample sample_colored_triangle(int n, double p, double q, std::uint64_t seed, bool retain = false);

UncoloredConfig forget_colors(const TriangleConfig& cfg, int X);

// #{Y' >= Y : vertical at (S, Y') has color <= c}. Needs a retained
// configuration unless S = n.
int colored_height(const TriangleConfig& cfg, int c, int S, int Y);

// #{Y' >= Y : vertical at (S, Y') is occupied}.
int uncolored_height_X(const UncoloredConfig& cfg, int S, int Y);

// "S,Y,top_color,right_color", one row per box.
void write_config_csv(std::ostream& out, const TriangleConfig& cfg);

}  // namespace qdem
