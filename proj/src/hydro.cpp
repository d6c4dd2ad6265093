#include "qdem/hydro.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qdem {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::domain_error(what);
}

void check_kappa(double kappa) {
  if (!(kappa > 1.0 + 1e-9) || !std::isfinite(kappa)) throw std::invalid_argument("kappa must exceed 1");
}

void check_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda <= 0.5)) throw std::invalid_argument("lambda must lie in (0, 1/2]");
}

double sq(double a) { return a * a; }

}  // namespace

double kappa(double p, double q) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("p must lie in (0,1)");
  if (!(q >= 0.0 && q < 1.0)) throw std::invalid_argument("q must lie in [0,1)");
  const double k = (1.0 - q * p) / (1.0 - p);
  check_kappa(k);
  return k;
}

double p_prime(double p, double q) {
  if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0) || !(q * p < 1.0))
    throw std::invalid_argument("p' needs p, q in [0,1] with qp < 1");
  return p * (1.0 - q) / (1.0 - q * p);
}

double flux(double z, double kappa) {
  require(z >= 0.0 && z <= 1.0, "flux: density outside [0,1]");
  return kappa * z / ((kappa - 1.0) * z + 1.0);
}

double v_rp(double lambda, double kappa) {
  check_lambda(lambda);
  check_kappa(kappa);
  return (1.0 - 2.0 * lambda) / (kappa - 1.0);
}

double shock_curve(double v, double lambda, double kappa) {
  require(v >= 0.0 && v <= lambda, "shock curve: v outside [0, lambda]");
  if (v <= v_rp(lambda, kappa)) return v + 1.0 - 2.0 * lambda;
  return sq(std::sqrt(v / kappa) + std::sqrt((1.0 - 2.0 * lambda) * (kappa - 1.0) / kappa));
}

double g_bcg(double u, double v, double kappa) {
  require(u >= 0.0 && u <= 1.0 && v >= 0.0, "g_bcg: outside domain");
  check_kappa(kappa);
  if (u <= v / kappa) return 1.0;
  if (u <= v * kappa) return (std::sqrt(v * kappa / u) - 1.0) / (kappa - 1.0);
  return 0.0;
}

double h_bcg(double u, double v, double kappa) {
  require(u >= 0.0 && u <= 1.0 && v >= 0.0, "h_bcg: outside domain");
  check_kappa(kappa);
  if (u <= v / kappa) return v - u;
  if (u <= v * kappa) return sq(std::sqrt(v * kappa) - std::sqrt(u)) / (kappa - 1.0);
  return 0.0;
}

double g_shock(double u, double v, double lambda, double kappa) {
  require(u >= 0.0 && u <= 1.0, "g_shock: u outside [0,1]");
  if (u <= shock_curve(v, lambda, kappa)) return g_bcg(u, v, kappa);
  return 1.0;
}

double h_dstep(double u, double v, double lambda, double kappa) {
  require(u >= 0.0 && u <= 1.0, "h_dstep: u outside [0,1]");
  if (u <= shock_curve(v, lambda, kappa)) return h_bcg(u, v, kappa) + 2.0 * lambda - v;
  return 1.0 - u;
}

double h_active(double u, double v, double lambda, double kappa) {
  const double edge = v + 1.0 - 2.0 * lambda;
  require(u >= 0.0 && u <= edge, "h_active: u outside the active region");
  if (u <= shock_curve(v, lambda, kappa)) return h_bcg(u, v, kappa);
  return edge - u;
}

double limit_height_triangle_kappa(double s, double y, double x, double kappa) {
  require(x > 0.0 && x < 1.0, "triangle limit: x outside (0,1)");
  require(s >= 1.0 - x && s <= 1.0, "triangle limit: s outside [1-x, 1]");
  require(y >= 0.0 && y <= s, "triangle limit: y outside [0, s]");
  const double lambda = x / (1.0 + x);
  // Clamp rounding so that v <= lambda and u stays inside the active region.
  const double v = std::min((s - (1.0 - x)) / (1.0 + x), lambda);
  const double u = std::min(y / (1.0 + x), v + 1.0 - 2.0 * lambda);
  return (1.0 + x) * h_active(u, v, lambda, kappa);
}

double limit_height_triangle(double s, double y, double x, double p, double q) {
  return limit_height_triangle_kappa(s, y, x, kappa(p, q));
}

double limit_fan_top(double x, double kappa) {
  require(x > 0.0 && x < 1.0, "fan top: x outside (0,1)");
  check_kappa(kappa);
  if (x <= 1.0 / kappa) return x * kappa;
  return sq(std::sqrt(x) + std::sqrt((1.0 - x) * (kappa - 1.0))) / kappa;
}

double limit_H_sigma(double y, double x, double kappa) {
  require(x > 0.0 && x < 1.0, "limit H_sigma: x outside (0,1)");
  require(y >= 0.0 && y <= 1.0, "limit H_sigma: y outside [0,1]");
  check_kappa(kappa);
  if (y <= x / kappa) return 0.0;
  const double fan = sq(std::sqrt(kappa * y) - std::sqrt(x)) / (kappa - 1.0);
  if (x <= 1.0 / kappa) return y <= x * kappa ? fan : y - x;
  return y <= limit_fan_top(x, kappa) ? fan : 1.0 - x;
}

PDEGrid double_step_profile(int cells, double lambda) {
  check_lambda(lambda);
  if (cells < 1) throw std::invalid_argument("cells must be positive");
  PDEGrid g;
  g.cells = cells;
  g.values.assign(static_cast<std::size_t>(cells), 0.0);
  const double edge = 1.0 - 2.0 * lambda;
  for (int i = 0; i < cells; ++i) {
    const double a = static_cast<double>(i) / cells, b = static_cast<double>(i + 1) / cells;
    g.values[static_cast<std::size_t>(i)] = std::clamp((b - std::max(a, edge)) * cells, 0.0, 1.0);
  }
  return g;
}

std::vector<double> exact_cell_averages(int cells, double v, double lambda, double kappa) {
  std::vector<double> out(static_cast<std::size_t>(cells));
  double left = h_dstep(0.0, v, lambda, kappa);
  for (int i = 0; i < cells; ++i) {
    const double right = h_dstep(static_cast<double>(i + 1) / cells, v, lambda, kappa);
    out[static_cast<std::size_t>(i)] = (left - right) * cells;
    left = right;
  }
  return out;
}

namespace {

double default_dv(const PDEGrid& g, double kappa) { return 0.9 / (static_cast<double>(g.cells) * kappa); }

void check_grid(const PDEGrid& g, double kappa) {
  check_kappa(kappa);
  if (g.cells < 1 || g.values.size() != static_cast<std::size_t>(g.cells))
    throw std::invalid_argument("PDE grid: cell count does not match values");
  if (g.dv > 1.0 / (static_cast<double>(g.cells) * kappa))
    throw std::domain_error("PDE grid: time step violates the CFL bound du / kappa");
}

void upwind_step(std::vector<double>& G, std::vector<double>& F, double ratio, double kappa) {
  const std::size_t c = G.size();
  for (std::size_t i = 0; i < c; ++i) F[i] = kappa * G[i] / ((kappa - 1.0) * G[i] + 1.0);
  for (std::size_t i = 0; i < c; ++i) G[i] -= ratio * (F[i] - F[i == 0 ? c - 1 : i - 1]);
}

}  // namespace

PDEGrid godunov_solve(PDEGrid grid, double kappa, double v_end) {
  check_grid(grid, kappa);
  if (v_end < grid.v) throw std::invalid_argument("PDE: end time precedes start time");
  const double dv = grid.dv > 0.0 ? grid.dv : default_dv(grid, kappa);
  std::vector<double> F(grid.values.size());
  while (grid.v < v_end) {
    const double step = std::min(dv, v_end - grid.v);
    upwind_step(grid.values, F, step * grid.cells, kappa);
    grid.v = (step == v_end - grid.v) ? v_end : grid.v + step;
  }
  return grid;
}

std::vector<std::vector<double>> godunov_time_integrals(PDEGrid grid, double kappa,
                                                        const std::vector<double>& v_marks) {
  check_grid(grid, kappa);
  const double dv = grid.dv > 0.0 ? grid.dv : default_dv(grid, kappa);
  std::vector<double> acc(grid.values.size(), 0.0), F(grid.values.size()), prev;
  std::vector<std::vector<double>> out;
  out.reserve(v_marks.size());
  for (double mark : v_marks) {
    if (mark < grid.v) throw std::invalid_argument("PDE: time marks must be non-decreasing");
    while (grid.v < mark) {
      const double step = std::min(dv, mark - grid.v);
      prev = grid.values;
      upwind_step(grid.values, F, step * grid.cells, kappa);
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += 0.5 * step * (prev[i] + grid.values[i]);
      grid.v = (step == mark - grid.v) ? mark : grid.v + step;
    }
    out.push_back(acc);
  }
  return out;
}

double l1_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) throw std::invalid_argument("l1: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

}  // namespace qdem
