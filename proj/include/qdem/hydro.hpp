#pragma once

#include <vector>

namespace qdem {

// Closed forms of the hydrodynamic limit. Coordinates: u in [0,1] along the
// circle, v >= 0 is time (level / M). lambda in (0, 1/2] is half the arrow
// density of the double-step start; x in (0,1) is the color threshold with
// lambda = x / (1 + x). Piecewise definitions put ties on the smaller-u side.

// (1 - qp) / (1 - p). Throws std::invalid_argument unless p in (0,1),
// q in [0,1) and the result exceeds 1 + 1e-9.
double kappa(double p, double q);

// p(1 - q) / (1 - qp); kappa(p', 0) == kappa(p, q).
double p_prime(double p, double q);

// kappa z / ((kappa - 1) z + 1).
double flux(double z, double kappa);

double v_rp(double lambda, double kappa);

// Shock position: v + 1 - 2 lambda up to v_rp, then
// (sqrt(v / kappa) + sqrt((1 - 2 lambda)(kappa - 1) / kappa))^2.
double shock_curve(double v, double lambda, double kappa);

// Rarefaction fan from a 1 -> 0 step at u = 0.
double g_bcg(double u, double v, double kappa);
double h_bcg(double u, double v, double kappa);

// Density of the double-step system on the whole circle u in [0,1]: the fan
// left of the shock (value on the shock included), fully packed right of it.
double g_shock(double u, double v, double lambda, double kappa);

// Height (arrows at positions >= u) of the double-step system.
double h_dstep(double u, double v, double lambda, double kappa);

// Height of the active arrows, u in [0, v + 1 - 2 lambda]. Throws
// std::domain_error outside.
double h_active(double u, double v, double lambda, double kappa);

// (1 + x) h_active(y / (1 + x), (s - (1 - x)) / (1 + x)) with lambda = x/(1+x),
// for 1 - x <= s <= 1 and 0 <= y <= s.
double limit_height_triangle(double s, double y, double x, double p, double q);
double limit_height_triangle_kappa(double s, double y, double x, double kappa);

// Limit of H_sigma(y, x) = (1/n) #{i <= ny : sigma(i) > nx}.
double limit_H_sigma(double y, double x, double kappa);

// Upper edge y of the fan in the limit permuton height at threshold x:
// x kappa when x <= 1/kappa, (1 + x) shock_curve(lambda) beyond.
double limit_fan_top(double x, double kappa);

// Periodic cell densities. Cell i covers [i/cells, (i+1)/cells).
struct PDEGrid {
  int cells = 0;
  double dv = 0.0;  // 0 picks 0.9 / (cells kappa)
  double v = 0.0;
  std::vector<double> values;
};

// Exact cell averages of the double-step start: 1 on [1 - 2 lambda, 1).
PDEGrid double_step_profile(int cells, double lambda);

// Exact cell averages of g_shock(., v) from differences of h_dstep.
std::vector<double> exact_cell_averages(int cells, double v, double lambda, double kappa);

// Upwind update G_i -= (dv/du)(flux(G_i) - flux(G_{i-1})) until v_end.
// Throws std::domain_error when dv > du / kappa.
PDEGrid godunov_solve(PDEGrid grid, double kappa, double v_end);

// For each time in v_marks (non-decreasing, starting at or after grid.v),
// the per-cell time integrals of the density from grid.v to that time,
// trapezoidal in time.
std::vector<std::vector<double>> godunov_time_integrals(PDEGrid grid, double kappa,
                                                        const std::vector<double>& v_marks);

// (1/cells) sum |a_i - b_i|.
double l1_distance(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace qdem
