#include "qdem/perm.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <locale>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qdem {

Permutation::Permutation(std::vector<int> images) : images_(std::move(images)) {
  const int n = size();
  if (n < 1) throw std::invalid_argument("permutation must have n >= 1");
  std::vector<bool> seen(static_cast<std::size_t>(n) + 1, false);
  for (int v : images_) {
    if (v < 1 || v > n || seen[static_cast<std::size_t>(v)])
      throw std::invalid_argument("images do not form a bijection on {1..n}");
    seen[static_cast<std::size_t>(v)] = true;
  }
}

Permutation Permutation::identity(int n) {
  std::vector<int> img(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) img[static_cast<std::size_t>(i)] = i + 1;
  return Permutation(std::move(img));
}

Permutation Permutation::longest(int n) {
  std::vector<int> img(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) img[static_cast<std::size_t>(i)] = n - i;
  return Permutation(std::move(img));
}

std::int64_t length(const Permutation& sigma) {
  // Fenwick tree over values, scanning right to left.
  const int n = sigma.size();
  std::vector<int> tree(static_cast<std::size_t>(n) + 1, 0);
  std::int64_t inv = 0;
  for (int i = n; i >= 1; --i) {
    const int v = sigma(i);
    for (int j = v - 1; j > 0; j -= j & -j) inv += tree[static_cast<std::size_t>(j)];
    for (int j = v; j <= n; j += j & -j) ++tree[static_cast<std::size_t>(j)];
  }
  return inv;
}

Permutation left_multiply_simple(int k, const Permutation& sigma) {
  const int n = sigma.size();
  if (k < 1 || k > n - 1) throw std::out_of_range("simple transposition index out of range");
  std::vector<int> img(sigma.images().begin(), sigma.images().end());
  for (int& v : img) {
    if (v == k)
      v = k + 1;
    else if (v == k + 1)
      v = k;
  }
  return Permutation(std::move(img));
}

Permutation right_multiply_simple(const Permutation& sigma, int k) {
  const int n = sigma.size();
  if (k < 1 || k > n - 1) throw std::out_of_range("simple transposition index out of range");
  std::vector<int> img(sigma.images().begin(), sigma.images().end());
  std::swap(img[static_cast<std::size_t>(k - 1)], img[static_cast<std::size_t>(k)]);
  return Permutation(std::move(img));
}

Permutation compose(const Permutation& a, const Permutation& b) {
  if (a.size() != b.size()) throw std::invalid_argument("compose: size mismatch");
  std::vector<int> img(static_cast<std::size_t>(a.size()));
  for (int i = 1; i <= a.size(); ++i) img[static_cast<std::size_t>(i - 1)] = a(b(i));
  return Permutation(std::move(img));
}

Permutation inverse(const Permutation& sigma) {
  std::vector<int> img(static_cast<std::size_t>(sigma.size()));
  for (int i = 1; i <= sigma.size(); ++i) img[static_cast<std::size_t>(sigma(i) - 1)] = i;
  return Permutation(std::move(img));
}

int scaled_floor(int n, double x) {
  if (!(x > 0.0)) return 0;
  if (x >= 1.0) return n;
  const double dn = n;
  int k = static_cast<int>(std::floor(dn * x));
  k = std::clamp(k, 0, n);
  while (k < n && static_cast<double>(k + 1) / dn <= x) ++k;
  while (k > 0 && static_cast<double>(k) / dn > x) --k;
  return k;
}

std::int64_t height_count(const Permutation& sigma, int i, int j) {
  i = std::clamp(i, 0, sigma.size());
  std::int64_t count = 0;
  for (int a = 1; a <= i; ++a)
    if (sigma(a) > j) ++count;
  return count;
}

double height_perm(const Permutation& sigma, double x, double y) {
  const int n = sigma.size();
  return static_cast<double>(height_count(sigma, scaled_floor(n, x), scaled_floor(n, y))) / n;
}

std::string to_string(const Permutation& sigma) {
  std::string out;
  for (int i = 1; i <= sigma.size(); ++i) {
    if (i > 1) out += ' ';
    out += std::to_string(sigma(i));
  }
  return out;
}

Permutation parse_permutation(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<int> img;
  std::string token;
  while (in >> token) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(token, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("not an integer: '" + token + "'");
    }
    if (used != token.size()) throw std::invalid_argument("not an integer: '" + token + "'");
    img.push_back(v);
  }
  return Permutation(std::move(img));
}

std::string_view chart_name(Chart chart) {
  switch (chart) {
    case Chart::triangle: return "triangle";
    case Chart::cylinder: return "cylinder";
    case Chart::unit_square: return "unit-square";
  }
  return "unknown";
}

std::vector<double> uniform_axis(int points, double lo, double hi) {
  if (points < 1) throw std::invalid_argument("axis needs at least one point");
  std::vector<double> axis(static_cast<std::size_t>(points));
  if (points == 1) {
    axis[0] = lo;
    return axis;
  }
  for (int k = 0; k < points; ++k)
    axis[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (points - 1);
  return axis;
}

std::vector<double> inset_axis(int points, double inset) {
  return uniform_axis(points, inset, 1.0 - inset);
}

HeightField tabulate(Chart chart, std::vector<double> coord1, std::vector<double> coord2,
                     const std::function<double(double, double)>& fn) {
  HeightField f;
  f.chart = chart;
  f.coord1 = std::move(coord1);
  f.coord2 = std::move(coord2);
  f.values.resize(f.rows() * f.cols());
  for (std::size_t i = 0; i < f.rows(); ++i)
    for (std::size_t j = 0; j < f.cols(); ++j) f.at(i, j) = fn(f.coord1[i], f.coord2[j]);
  return f;
}

HeightField permutation_field(const Permutation& sigma, int resolution) {
  auto axis = uniform_axis(resolution, 0.0, 1.0);
  auto f = tabulate(Chart::unit_square, axis, axis,
                    [&](double x, double y) { return height_perm(sigma, x, y); });
  f.meta["n"] = sigma.size();
  return f;
}

void validate(const HeightField& field) {
  if (field.values.size() != field.rows() * field.cols())
    throw std::invalid_argument("height field: grid size does not match axes");
  if (!field.std_errors.empty() && field.std_errors.size() != field.values.size())
    throw std::invalid_argument("height field: standard errors do not match grid");
  for (double v : field.values)
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("height field: value outside [0,1]");
}

double sup_distance(const HeightField& a, const HeightField& b) {
  if (a.chart != b.chart) throw std::invalid_argument("sup_distance: chart mismatch");
  if (a.coord1 != b.coord1 || a.coord2 != b.coord2 || a.values.size() != b.values.size())
    throw std::invalid_argument("sup_distance: resolution mismatch");
  double sup = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k)
    sup = std::max(sup, std::abs(a.values[k] - b.values[k]));
  return sup;
}

void write_csv(std::ostream& out, const HeightField& field) {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  buf << std::setprecision(12);
  buf << "coord1,coord2,value\n";
  for (std::size_t i = 0; i < field.rows(); ++i)
    for (std::size_t j = 0; j < field.cols(); ++j)
      buf << field.coord1[i] << ',' << field.coord2[j] << ',' << field.at(i, j) << '\n';
  out << buf.str();
}

}  // namespace qdem
