#include "qdem/svg.hpp"

#include <algorithm>
#include <cmath>
#include <locale>
#include <ostream>
#include <sstream>

namespace qdem {

namespace {

constexpr double kSize = 480.0;
constexpr double kMargin = 40.0;

// Cell edges halfway between neighbouring nodes.
std::vector<double> edges(const std::vector<double>& axis) {
  std::vector<double> e(axis.size() + 1);
  if (axis.size() == 1) return {axis[0] - 0.5, axis[0] + 0.5};
  for (std::size_t i = 1; i < axis.size(); ++i) e[i] = 0.5 * (axis[i - 1] + axis[i]);
  e.front() = axis.front() - (e[1] - axis.front());
  e.back() = axis.back() + (axis.back() - e[axis.size() - 1]);
  return e;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

void write_heatmap_svg(std::ostream& out, const HeightField& field, const std::vector<Polyline>& curves,
                       const std::string& title) {
  const auto e1 = edges(field.coord1), e2 = edges(field.coord2);
  const double lo1 = e1.front(), hi1 = e1.back(), lo2 = e2.front(), hi2 = e2.back();
  auto px = [&](double c2) { return kMargin + (c2 - lo2) / (hi2 - lo2) * kSize; };
  auto py = [&](double c1) { return kMargin + kSize - (c1 - lo1) / (hi1 - lo1) * kSize; };

  double top = 0.0;
  for (double v : field.values) top = std::max(top, v);
  if (top <= 0.0) top = 1.0;

  std::ostringstream s;
  s.imbue(std::locale::classic());
  s.precision(6);
  const double W = kSize + 2 * kMargin;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << W << "\">\n";
  s << "<title>" << escape(title) << "</title>\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < field.rows(); ++i)
    for (std::size_t j = 0; j < field.cols(); ++j) {
      const int shade = static_cast<int>(std::lround(255.0 * (1.0 - std::clamp(field.at(i, j) / top, 0.0, 1.0))));
      s << "<rect x=\"" << px(e2[j]) << "\" y=\"" << py(e1[i + 1]) << "\" width=\"" << px(e2[j + 1]) - px(e2[j])
        << "\" height=\"" << py(e1[i]) - py(e1[i + 1]) << "\" fill=\"rgb(" << shade << ',' << shade << ',' << shade
        << ")\"/>\n";
    }
  static const char* colors[] = {"#d62728", "#1f77b4", "#2ca02c", "#ff7f0e"};
  std::size_t k = 0;
  for (const auto& curve : curves) {
    s << "<polyline fill=\"none\" stroke-width=\"2\" stroke=\"" << colors[k++ % 4] << "\" points=\"";
    for (const auto& [c1, c2] : curve.points) {
      if (c1 < lo1 || c1 > hi1 || c2 < lo2 || c2 > hi2) continue;
      s << px(c2) << ',' << py(c1) << ' ';
    }
    s << "\"><title>" << escape(curve.label) << "</title></polyline>\n";
  }
  s << "<text x=\"" << kMargin << "\" y=\"" << kMargin * 0.6 << "\" font-size=\"14\">" << escape(title)
    << "</text>\n</svg>\n";
  out << s.str();
}

}  // namespace qdem
