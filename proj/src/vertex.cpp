#include "qdem/vertex.hpp"

#include <ostream>
#include <sstream>

namespace qdem {

namespace {

void check_box(int S, int Y, int n) {
  if (!(1 <= Y && Y < S && S <= n)) throw std::out_of_range("box outside the triangle");
}

void check_column(int S, int Y, int n) {
  if (!(1 <= Y && Y <= S && S <= n)) throw std::out_of_range("column outside row");
}

}  // namespace

int box_to_letter(int S, int Y, int n) {
  check_box(S, Y, n);
  return n + Y - S;
}

int TriangleConfig::vertical(int S, int Y) const {
  check_column(S, Y, n);
  if (S == n) return top_row[static_cast<std::size_t>(Y - 1)];
  if (!retained()) throw std::logic_error("configuration rows were not retained");
  if (S == 1) return n;
  if (Y == S) return right[box_index(S, S - 1)];
  return top[box_index(S, Y)];
}

int TriangleConfig::bottom_in(int S, int Y) const {
  check_box(S, Y, n);
  return vertical(S - 1, Y);
}

int TriangleConfig::left_in(int S, int Y) const {
  check_box(S, Y, n);
  if (Y == 1) return n + 1 - S;
  if (!retained()) throw std::logic_error("configuration rows were not retained");
  return right[box_index(S, Y - 1)];
}

int UncoloredConfig::vertical(int S, int Y) const {
  check_column(S, Y, n);
  if (S == n) return top_row[static_cast<std::size_t>(Y - 1)];
  if (S == 1) return row1;
  if (Y == S) return right[box_index(S, S - 1)];
  return top[box_index(S, Y)];
}

int UncoloredConfig::bottom_in(int S, int Y) const {
  check_box(S, Y, n);
  return vertical(S - 1, Y);
}

int UncoloredConfig::left_in(int S, int Y) const {
  check_box(S, Y, n);
  if (Y == 1) return n + 1 - S <= X ? 1 : 0;
  return right[box_index(S, Y - 1)];
}

TriangleSample sample_colored_triangle(int n, double p, double q, std::uint64_t seed, bool retain) {
  return sample_colored_triangle_with(n, p, q, CoinStream(seed), retain);
}

UncoloredConfig forget_colors(const TriangleConfig& cfg, int X) {
  if (X < 0 || X > cfg.n) throw std::invalid_argument("color threshold outside [0, n]");
  UncoloredConfig u;
  u.n = cfg.n;
  u.X = X;
  auto keep = [X](int color) -> std::uint8_t { return color <= X ? 1 : 0; };
  u.top.reserve(cfg.top.size());
  for (int c : cfg.top) u.top.push_back(keep(c));
  u.right.reserve(cfg.right.size());
  for (int c : cfg.right) u.right.push_back(keep(c));
  for (int c : cfg.top_row) u.top_row.push_back(keep(c));
  u.row1 = keep(cfg.n);
  return u;
}

int colored_height(const TriangleConfig& cfg, int c, int S, int Y) {
  if (S < 1 || S > cfg.n) throw std::out_of_range("row outside the triangle");
  int count = 0;
  for (int y = std::max(Y, 1); y <= S; ++y)
    if (cfg.vertical(S, y) <= c) ++count;
  return count;
}

int uncolored_height_X(const UncoloredConfig& cfg, int S, int Y) {
  if (S < 1 || S > cfg.n) throw std::out_of_range("row outside the triangle");
  int count = 0;
  for (int y = std::max(Y, 1); y <= S; ++y) count += cfg.vertical(S, y);
  return count;
}

void write_config_csv(std::ostream& out, const TriangleConfig& cfg) {
  if (!cfg.retained()) throw std::logic_error("configuration rows were not retained");
  std::ostringstream buf;
  buf << "S,Y,top_color,right_color\n";
  for (int S = 2; S <= cfg.n; ++S)
    for (int Y = 1; Y < S; ++Y) {
      const auto t = box_index(S, Y);
      buf << S << ',' << Y << ',' << cfg.top[t] << ',' << cfg.right[t] << '\n';
    }
  out << buf.str();
}

}  // namespace qdem
