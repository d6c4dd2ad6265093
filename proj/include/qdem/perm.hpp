#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qdem {

// A bijection on {1..n}. images()[i-1] holds sigma(i); all public indices
// are one-based.
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<int> images);

  static Permutation identity(int n);
  static Permutation longest(int n);

  int size() const { return static_cast<int>(images_.size()); }
  int operator()(int i) const { return images_[static_cast<std::size_t>(i - 1)]; }
  std::span<const int> images() const { return images_; }

  friend bool operator==(const Permutation&, const Permutation&) = default;
  friend auto operator<=>(const Permutation&, const Permutation&) = default;

 private:
  std::vector<int> images_;
};

// Number of inversions #{(a,b): a<b, sigma(a)>sigma(b)}.
std::int64_t length(const Permutation& sigma);

// s_k o sigma: the values k and k+1 trade places in the image list.
Permutation left_multiply_simple(int k, const Permutation& sigma);

// sigma o s_k: the entries at positions k and k+1 trade places. This is the
// action realized by the staircase samplers (see hecke.hpp).
Permutation right_multiply_simple(const Permutation& sigma, int k);

// (a o b)(i) = a(b(i)).
Permutation compose(const Permutation& a, const Permutation& b);
Permutation inverse(const Permutation& sigma);

// Largest k in {0..n} with k/n <= x when evaluated in double precision, so
// that grid abscissae built as k/n floor back to k exactly.
int scaled_floor(int n, double x);

// #{i' <= i : sigma(i') > j}, integer version of the height function.
std::int64_t height_count(const Permutation& sigma, int i, int j);

// (1/n) #{i <= floor(n x) : sigma(i) > floor(n y)}.
double height_perm(const Permutation& sigma, double x, double y);

std::string to_string(const Permutation& sigma);
Permutation parse_permutation(std::string_view text);

enum class Chart { triangle, cylinder, unit_square };

std::string_view chart_name(Chart chart);

// Values on a rectangular grid: values[i * coord2.size() + j] sits at
// (coord1[i], coord2[j]).
struct HeightField {
  Chart chart = Chart::unit_square;
  std::vector<double> coord1;
  std::vector<double> coord2;
  std::vector<double> values;
  std::vector<double> std_errors;  // empty, or one entry per value
  std::map<std::string, double> meta;

  std::size_t rows() const { return coord1.size(); }
  std::size_t cols() const { return coord2.size(); }
  double at(std::size_t i, std::size_t j) const { return values[i * cols() + j]; }
  double& at(std::size_t i, std::size_t j) { return values[i * cols() + j]; }
};

std::vector<double> uniform_axis(int points, double lo, double hi);

// Default permuton grid: `points` nodes over [inset, 1 - inset].
std::vector<double> inset_axis(int points = 101, double inset = 0.01);

HeightField tabulate(Chart chart, std::vector<double> coord1, std::vector<double> coord2,
                     const std::function<double(double, double)>& fn);

// H_sigma tabulated on a uniform resolution x resolution grid over [0,1]^2.
HeightField permutation_field(const Permutation& sigma, int resolution = 200);

// Throws std::invalid_argument if values fall outside [0,1] or the grid
// dimensions disagree with the axes.
void validate(const HeightField& field);

// max |A - B| over the grid; charts and axes must agree.
double sup_distance(const HeightField& a, const HeightField& b);

// "coord1,coord2,value" with 12 significant digits.
void write_csv(std::ostream& out, const HeightField& field);

}  // namespace qdem
