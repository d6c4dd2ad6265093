#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qdem/coins.hpp"

namespace qdem {

// Uncolored stochastic six-vertex dynamics, one level per row. Positions on
// the circle T_M are 0..M-1 and the circle is cut between M-1 and 0. A
// vertex sees (bottom, left) occupations and emits (top, right):
//   (0,1): right with prob p, up otherwise
//   (1,0): up with prob qp, right otherwise
//   (1,1) -> (1,1), (0,0) -> (0,0).
// Coins follow the colored model: (0,1) goes right iff keep < p, (1,0) stays
// up iff keep < p and qflip < q.

enum class Boundary { double_step, reflective, quadrant };

struct VertexOut {
  bool top;
  bool right;
};

template <class Coins>
inline VertexOut uncolored_vertex(bool bottom, bool left, double p, double q, const Coins& coins,
                                  std::uint64_t address) {
  if (bottom == left) return {bottom, left};
  if (left) {
    const bool straight = coins.uniform(address, CoinTag::keep) < p;
    return {!straight, straight};
  }
  const bool stay = coins.uniform(address, CoinTag::keep) < p && coins.uniform(address, CoinTag::qflip) < q;
  return {stay, !stay};
}

// Maps lattice sites to coin addresses. With a triangle embedding (n, X), the
// stochastic vertices of the trapezoid use the address of the box they
// represent, so a reflective run consumes exactly the coins of the colored
// triangle sampled with the same seed.
struct SiteAddressing {
  int n = 0;
  int X = 0;
  bool triangle = false;

  static SiteAddressing plain() { return {}; }
  static SiteAddressing embedded(int n, int X) { return {n, X, true}; }

  // Address of the vertex at `position` in the row that produces `level`.
  std::uint64_t operator()(int level, int position) const;
};

struct CylinderState {
  Boundary kind = Boundary::double_step;
  int M = 0;  // circumference; for the quadrant, the current window width
  int V = 0;
  int X = 0;  // double-step and reflective states carry 2X arrows
  std::vector<std::uint8_t> occupancy;

  int arrows() const;
  // First frozen position of a reflective state: M - 2X + V.
  int frozen_start() const { return M - 2 * X + V; }
};

struct StepDiagnostics {
  int wraps = 0;      // horizontal arrows carried across the cut
  int resamples = 0;  // rows redrawn after an arrow survived a full wrap
};

// Occupied iff i >= M - 2X with X = floor(lambda M); exactly 2X arrows
// right-aligned at the cut.
CylinderState init_double_step(int M, double lambda);

// Level 0 of the trapezoid embedded in T_{n+X}: the frozen block of 2X sites.
CylinderState init_reflective(int n, int X);

// Empty half-line; one arrow enters at position 0 per level.
CylinderState init_quadrant(int width = 1);

CylinderState step_row(const CylinderState& state, double p, double q, const CoinStream& coins,
                       const SiteAddressing& addressing = SiteAddressing::plain(),
                       StepDiagnostics* diagnostics = nullptr);

// heights(V, U) for V = 0..levels-1 and U = 0..width-1.
struct HeightTable {
  int levels = 0;
  int width = 0;
  std::vector<std::int32_t> data;

  HeightTable() = default;
  HeightTable(int levels, int width)
      : levels(levels), width(width), data(static_cast<std::size_t>(levels) * static_cast<std::size_t>(width), 0) {}
  std::int32_t operator()(int V, int U) const {
    return data[static_cast<std::size_t>(V) * static_cast<std::size_t>(width) + static_cast<std::size_t>(U)];
  }
  std::int32_t& operator()(int V, int U) {
    return data[static_cast<std::size_t>(V) * static_cast<std::size_t>(width) + static_cast<std::size_t>(U)];
  }
};

// Writes suffix counts of occupancy[U..] for U < width into `row`.
void suffix_heights(std::span<const std::uint8_t> occupancy, std::span<std::int32_t> row);

struct ReflectiveRun {
  int n = 0;
  int X = 0;
  int M = 0;
  HeightTable refl;    // all arrows at positions >= U
  HeightTable act;     // active arrows at positions >= U
  HeightTable frozen;  // F_V(U)
  std::vector<std::vector<std::uint8_t>> occupancy;  // per level
};

// Trapezoid rows S = n-X+V (V = 0..V_max) of the color-forgotten triangle,
// embedded in T_{n+X} with the frozen block completing each level.
ReflectiveRun run_reflective(int n, int X, double p, double q, std::uint64_t seed, int V_max = -1);

// Default quadrant window: V_max * ceil(kappa) + 10.
int quadrant_window(int V_max, double p, double q);

// Step-initial system on the half-line. Heights count every arrow at
// positions >= U; the window only fixes which U are reported. The
// simulation itself grows as far as the arrows travel.
HeightTable run_quadrant(int V_max, double p, double q, std::uint64_t seed, int width = -1,
                         const SiteAddressing& addressing = SiteAddressing::plain());

// Double-step system on T_M with 2X arrows, levels 0..levels-1. The
// observer, when given, sees every level's occupancy.
HeightTable run_double_step(int M, int X, double p, double q, std::uint64_t seed, int levels,
                            const SiteAddressing& addressing = SiteAddressing::plain(),
                            const std::function<void(int, std::span<const std::uint8_t>)>& observer = {},
                            StepDiagnostics* diagnostics = nullptr);

struct ComparisonReport {
  int n = 0;
  int X = 0;
  int M = 0;
  int samples = 0;
  int levels = 0;  // X + 1
  // levels x M, row-major by V.
  std::vector<double> mean_refl, mean_act, mean_dstep, mean_quad;
  // Paired differences refl - dstep ("lower") and quad - act ("upper").
  std::vector<double> mean_lower, se_lower, mean_upper, se_upper;
  std::int64_t violations_lower = 0;  // pathwise H^refl < H^dstep events
  std::int64_t violations_upper = 0;  // pathwise H^act > H^quad events
  int wraps = 0;
  int resamples = 0;

  std::size_t index(int V, int U) const {
    return static_cast<std::size_t>(V) * static_cast<std::size_t>(M) + static_cast<std::size_t>(U);
  }
  // Points where a mean ordering fails by more than `sigmas` standard errors.
  int mean_order_failures_lower(double sigmas = 3.0) const;
  int mean_order_failures_upper(double sigmas = 3.0) const;

  nlohmann::json to_json() const;
};

// The reflective, double-step and quadrant systems driven by one coin stream
// per sample with shared site addresses.
ComparisonReport coupled_run(int n, int X, double p, double q, std::uint64_t seed, int samples, int threads = 0);

}  // namespace qdem
