#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qdem/cylinder.hpp"
#include "qdem/perm.hpp"

namespace qdem {

enum class ExperimentKind { triangle_limit, cylinder_hydro, quadrant_hydro, pprime_equivalence, coupling_order };

// triangleLimit, cylinderHydro, quadrantHydro, pprimeEquivalence, couplingOrder.
std::string_view kind_name(ExperimentKind kind);
ExperimentKind parse_kind(std::string_view name);

struct ExperimentParams {
  ExperimentKind kind = ExperimentKind::triangle_limit;
  int n = 0;  // triangle size, or circumference M for the cylinder kinds
  double p = 0.5;
  double q = 0.5;
  std::vector<double> x{0.5};  // color thresholds X/n
  double lambda = 0.25;        // cylinder kinds
  int samples = 1;
  std::uint64_t seed = 0;
  int grid = 101;
  int threads = 0;
  // triangleLimit: unit_square gives the H_sigma field, triangle gives
  // (1/n) H_X over rows of the trapezoid (uses x[0]).
  Chart chart = Chart::unit_square;
  int u_blocks = 100;  // cylinderHydro block grid
  int v_blocks = 50;
  bool godunov = true;  // cylinderHydro: also compare with the PDE solver

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

// Mean normalized height field with per-point standard errors.
//   triangleLimit, unit_square: coord1 = y (position), coord2 = x, value H_sigma(y, x).
//   triangleLimit, triangle: coord1 = s, coord2 = y, value (1/n) H_X(sn, yn), 0 for y > s.
//   cylinderHydro / quadrantHydro: coord1 = v, coord2 = u, value (1/M) H(vM, uM).
// Every sample is checked against the word sampler on 1% of samples.
HeightField estimate_height_field(const ExperimentParams& params);

// The closed-form counterpart on the axes of `like`.
HeightField limit_field(const ExperimentParams& params, const HeightField& like);

struct ErrorSummary {
  double sup_interior = 0.0;
  double sup_near = 0.0;
  double l1 = 0.0;  // mean absolute error over all points
  int points_interior = 0;
  int points_near = 0;
  nlohmann::json to_json() const;
};

// near(c1, c2) marks points within the margin of a fan edge or shock.
ErrorSummary compare_to_limit(const HeightField& field, const HeightField& limit,
                              const std::function<bool(double, double)>& near);

// Near-curve predicate with margin 0.05 for the chart of `params`.
std::function<bool(double, double)> near_curves(const ExperimentParams& params, double margin = 0.05);

struct PPrimeReport {
  double p_prime = 0.0;
  HeightField original;  // (p, q)
  HeightField adjusted;  // (p', 0)
  double sup_difference = 0.0;
  double noise = 0.0;  // max over points of 2 sqrt(se_a^2 + se_b^2)
  nlohmann::json to_json() const;
};

// Independent seeds for the two parameter sets.
PPrimeReport pprime_equivalence(const ExperimentParams& params);

struct HydroReport {
  int M = 0;
  int X = 0;
  int samples = 0;
  std::vector<int> u_breaks;  // site indices
  std::vector<int> v_breaks;  // level indices
  std::vector<double> per_sample;  // block statistic of each sample
  double max_discrepancy = 0.0;    // over samples
  double mean_field_discrepancy = 0.0;
  double godunov_vs_closed = -1.0;     // -1 when not computed
  double empirical_vs_godunov = -1.0;  // over samples
  int wraps = 0;
  int resamples = 0;
  nlohmann::json to_json() const;
};

// Block statistic max |(1/M^2) sum_{V1<=j<V2} sum_{U1<=i<U2} occ_j(i) -
// int int g_shock| over all block pairs on the break grid.
HydroReport cylinder_hydro_check(const ExperimentParams& params);

// Same statistic for arbitrary cumulative tables C[b_u][b_v] (see
// cylinder_hydro_check): max over block pairs of the rectangle differences.
double block_statistic(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b);

// Thresholds used by the CLI in strict mode.
struct StrictThresholds {
  double sup_interior = 0.015;
  double sup_near = 0.05;
  double pprime_sup = 0.02;
  double hydro_block = 0.01;
  double quadrant_sup = 0.02;
};

}  // namespace qdem
