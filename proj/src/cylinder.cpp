#include "qdem/cylinder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "qdem/parallel.hpp"
#include "qdem/vertex.hpp"

namespace qdem {

namespace {

constexpr int kMaxResampleAttempts = 15;

struct ResampleCoins {
  const CoinStream& coins;
  int attempt;
  int level;
  double uniform(std::uint64_t position, CoinTag tag) const {
    return coins.uniform(address::resample(static_cast<std::uint64_t>(attempt), static_cast<std::uint64_t>(level),
                                           position),
                         tag);
  }
};

// Site-addressed view used by the sweeps: uniform(position, tag).
struct LevelCoins {
  const CoinStream& coins;
  const SiteAddressing& addressing;
  int level;
  double uniform(std::uint64_t position, CoinTag tag) const {
    return coins.uniform(addressing(level, static_cast<int>(position)), tag);
  }
};

template <class Coins>
bool sweep_cylinder(const std::vector<std::uint8_t>& below, std::vector<std::uint8_t>& above, double p, double q,
                    const Coins& coins, StepDiagnostics* diag) {
  const int M = static_cast<int>(below.size());
  std::vector<std::uint8_t> incoming(below.size(), 0);
  bool h = false;
  for (int i = 0; i < M; ++i) {
    incoming[static_cast<std::size_t>(i)] = h;
    const auto out = uncolored_vertex(below[static_cast<std::size_t>(i)] != 0, h, p, q, coins,
                                      static_cast<std::uint64_t>(i));
    above[static_cast<std::size_t>(i)] = out.top;
    h = out.right;
  }
  if (!h) return true;
  if (diag) ++diag->wraps;
  // The arrow leaving M-1 re-enters at 0. It only ever reaches sites whose
  // first-pass horizontal input was empty, so the re-resolution is the
  // (b,0) -> (b,1) upgrade of an already sampled vertex.
  for (int i = 0; i < M; ++i) {
    const auto s = static_cast<std::size_t>(i);
    if (incoming[s]) throw std::logic_error("wrap pass met an occupied horizontal edge");
    if (below[s] == 0) {
      // (0,0) used no coin in the first pass.
      if (coins.uniform(static_cast<std::uint64_t>(i), CoinTag::keep) < p) continue;
      above[s] = 1;
      return true;
    }
    if (above[s]) continue;  // occupant stayed: (1,1) passes the arrow on
    above[s] = 1;            // occupant had left: the arrow takes its place
    return true;
  }
  return false;
}

CylinderState step_double_step(const CylinderState& s, double p, double q, const CoinStream& coins,
                               const SiteAddressing& addressing, StepDiagnostics* diag) {
  CylinderState next = s;
  next.V = s.V + 1;
  if (sweep_cylinder(s.occupancy, next.occupancy, p, q, LevelCoins{coins, addressing, next.V}, diag)) return next;
  for (int attempt = 1; attempt <= kMaxResampleAttempts; ++attempt) {
    if (diag) ++diag->resamples;
    if (sweep_cylinder(s.occupancy, next.occupancy, p, q, ResampleCoins{coins, attempt, next.V}, diag)) return next;
  }
  throw std::runtime_error("cylinder row: horizontal arrow circulated through every resample attempt");
}

CylinderState step_reflective(const CylinderState& s, double p, double q, const CoinStream& coins,
                              const SiteAddressing& addressing) {
  const int r = s.frozen_start();
  if (s.V >= 2 * s.X || r < 0 || r >= s.M) throw std::logic_error("reflective state has no frozen site left");
  CylinderState next = s;
  next.V = s.V + 1;
  const LevelCoins lc{coins, addressing, next.V};
  bool h = true;  // the arrow closing the frozen block enters at position 0
  for (int i = 0; i < r; ++i) {
    const auto out = uncolored_vertex(s.occupancy[static_cast<std::size_t>(i)] != 0, h, p, q, lc,
                                      static_cast<std::uint64_t>(i));
    next.occupancy[static_cast<std::size_t>(i)] = out.top;
    h = out.right;
  }
  // Reflecting vertex: an arriving arrow turns up, otherwise the frozen
  // arrow turns right. Either way one arrow runs through the frozen block.
  for (int i = r; i < s.M; ++i)
    if (!s.occupancy[static_cast<std::size_t>(i)]) throw std::logic_error("frozen block lost an arrow");
  next.occupancy[static_cast<std::size_t>(r)] = h;
  for (int i = r + 1; i < s.M; ++i) next.occupancy[static_cast<std::size_t>(i)] = 1;
  return next;
}

CylinderState step_quadrant(const CylinderState& s, double p, double q, const CoinStream& coins,
                            const SiteAddressing& addressing) {
  CylinderState next = s;
  next.V = s.V + 1;
  const LevelCoins lc{coins, addressing, next.V};
  bool h = true;
  int i = 0;
  for (; i < s.M; ++i) {
    const auto out = uncolored_vertex(s.occupancy[static_cast<std::size_t>(i)] != 0, h, p, q, lc,
                                      static_cast<std::uint64_t>(i));
    next.occupancy[static_cast<std::size_t>(i)] = out.top;
    h = out.right;
  }
  while (h) {
    const auto out = uncolored_vertex(false, true, p, q, lc, static_cast<std::uint64_t>(i));
    next.occupancy.push_back(out.top);
    h = out.right;
    ++i;
  }
  next.M = static_cast<int>(next.occupancy.size());
  return next;
}

void record_suffix(const std::vector<std::uint8_t>& occ, HeightTable& table, int V) {
  std::span<std::int32_t> row(&table(V, 0), static_cast<std::size_t>(table.width));
  suffix_heights(occ, row);
}

}  // namespace

std::uint64_t SiteAddressing::operator()(int level, int position) const {
  if (triangle) {
    const int S = level + n - X;
    if (S >= 2 && S <= n && position >= 0 && position <= S - 2) return box_index(S, position + 1);
  }
  return address::site(static_cast<std::uint64_t>(level), static_cast<std::uint64_t>(position));
}

int CylinderState::arrows() const { return std::accumulate(occupancy.begin(), occupancy.end(), 0); }

CylinderState init_double_step(int M, double lambda) {
  if (!(lambda > 0.0 && lambda <= 0.5)) throw std::invalid_argument("lambda must lie in (0, 1/2]");
  if (M < 1) throw std::invalid_argument("M must be positive");
  CylinderState s;
  s.kind = Boundary::double_step;
  s.M = M;
  s.X = static_cast<int>(std::floor(lambda * M + 1e-9));
  s.occupancy.assign(static_cast<std::size_t>(M), 0);
  for (int i = M - 2 * s.X; i < M; ++i) s.occupancy[static_cast<std::size_t>(i)] = 1;
  return s;
}

CylinderState init_reflective(int n, int X) {
  if (n < 1 || X < 0 || X > n) throw std::invalid_argument("reflective system needs 0 <= X <= n");
  CylinderState s;
  s.kind = Boundary::reflective;
  s.M = n + X;
  s.X = X;
  s.occupancy.assign(static_cast<std::size_t>(s.M), 0);
  for (int i = n - X; i < s.M; ++i) s.occupancy[static_cast<std::size_t>(i)] = 1;
  return s;
}

CylinderState init_quadrant(int width) {
  CylinderState s;
  s.kind = Boundary::quadrant;
  s.M = std::max(width, 1);
  s.occupancy.assign(static_cast<std::size_t>(s.M), 0);
  return s;
}

CylinderState step_row(const CylinderState& state, double p, double q, const CoinStream& coins,
                       const SiteAddressing& addressing, StepDiagnostics* diagnostics) {
  switch (state.kind) {
    case Boundary::double_step: return step_double_step(state, p, q, coins, addressing, diagnostics);
    case Boundary::reflective: return step_reflective(state, p, q, coins, addressing);
    case Boundary::quadrant: return step_quadrant(state, p, q, coins, addressing);
  }
  throw std::logic_error("unknown boundary kind");
}

void suffix_heights(std::span<const std::uint8_t> occupancy, std::span<std::int32_t> row) {
  std::int32_t running = 0;
  const auto width = row.size();
  for (std::size_t i = occupancy.size(); i-- > 0;) {
    running += occupancy[i];
    if (i < width) row[i] = running;
  }
  for (std::size_t i = occupancy.size(); i < width; ++i) row[i] = 0;
}

ReflectiveRun run_reflective(int n, int X, double p, double q, std::uint64_t seed, int V_max) {
  if (V_max < 0) V_max = X;
  if (V_max > X) throw std::invalid_argument("reflective run: V_max exceeds X");
  ReflectiveRun run;
  run.n = n;
  run.X = X;
  run.M = n + X;
  run.refl = HeightTable(V_max + 1, run.M);
  run.act = HeightTable(V_max + 1, run.M);
  run.frozen = HeightTable(V_max + 1, run.M);
  const CoinStream coins(seed);
  const auto addressing = SiteAddressing::embedded(n, X);
  CylinderState s = init_reflective(n, X);
  for (int V = 0;; ++V) {
    const int first_frozen = s.frozen_start();
    std::vector<std::uint8_t> active(s.occupancy);
    for (int i = first_frozen; i < s.M; ++i) active[static_cast<std::size_t>(i)] = 0;
    record_suffix(s.occupancy, run.refl, V);
    record_suffix(active, run.act, V);
    for (int U = 0; U < s.M; ++U) run.frozen(V, U) = s.M - std::max(U, first_frozen);
    run.occupancy.push_back(s.occupancy);
    if (s.arrows() != 2 * X) throw std::logic_error("reflective level lost arrows");
    if (V == V_max) break;
    s = step_row(s, p, q, coins, addressing);
  }
  return run;
}

int quadrant_window(int V_max, double p, double q) {
  const double kappa = (1.0 - q * p) / (1.0 - p);
  if (!std::isfinite(kappa)) throw std::invalid_argument("quadrant window needs p < 1");
  return V_max * static_cast<int>(std::ceil(kappa)) + 10;
}

HeightTable run_quadrant(int V_max, double p, double q, std::uint64_t seed, int width,
                         const SiteAddressing& addressing) {
  if (V_max < 0) throw std::invalid_argument("V_max must be nonnegative");
  if (width < 0) width = quadrant_window(V_max, p, q);
  HeightTable table(V_max + 1, width);
  const CoinStream coins(seed);
  CylinderState s = init_quadrant(width);
  for (int V = 0;; ++V) {
    if (s.arrows() != V) throw std::logic_error("quadrant level has the wrong arrow count");
    record_suffix(s.occupancy, table, V);
    if (V == V_max) break;
    s = step_row(s, p, q, coins, addressing);
  }
  return table;
}

HeightTable run_double_step(int M, int X, double p, double q, std::uint64_t seed, int levels,
                            const SiteAddressing& addressing,
                            const std::function<void(int, std::span<const std::uint8_t>)>& observer,
                            StepDiagnostics* diagnostics) {
  if (2 * X > M || X < 0) throw std::invalid_argument("double-step needs 0 <= 2X <= M");
  HeightTable table(levels, M);
  const CoinStream coins(seed);
  CylinderState s;
  s.kind = Boundary::double_step;
  s.M = M;
  s.X = X;
  s.occupancy.assign(static_cast<std::size_t>(M), 0);
  for (int i = M - 2 * X; i < M; ++i) s.occupancy[static_cast<std::size_t>(i)] = 1;
  for (int V = 0; V < levels; ++V) {
    if (s.arrows() != 2 * X) throw std::logic_error("double-step level lost arrows");
    record_suffix(s.occupancy, table, V);
    if (observer) observer(V, s.occupancy);
    if (V + 1 < levels) s = step_row(s, p, q, coins, addressing, diagnostics);
  }
  return table;
}

int ComparisonReport::mean_order_failures_lower(double sigmas) const {
  int bad = 0;
  for (std::size_t k = 0; k < mean_lower.size(); ++k)
    if (mean_lower[k] < -sigmas * se_lower[k]) ++bad;
  return bad;
}

int ComparisonReport::mean_order_failures_upper(double sigmas) const {
  int bad = 0;
  for (std::size_t k = 0; k < mean_upper.size(); ++k)
    if (mean_upper[k] < -sigmas * se_upper[k]) ++bad;
  return bad;
}

nlohmann::json ComparisonReport::to_json() const {
  nlohmann::json points = nlohmann::json::array();
  for (int V = 0; V < levels; ++V)
    for (int U = 0; U < M; ++U) {
      const auto k = index(V, U);
      points.push_back({{"V", V},
                        {"U", U},
                        {"refl", mean_refl[k]},
                        {"act", mean_act[k]},
                        {"dstep", mean_dstep[k]},
                        {"quad", mean_quad[k]},
                        {"ci", 3.0 * std::max(se_lower[k], se_upper[k])},
                        {"ci_lower", 3.0 * se_lower[k]},
                        {"ci_upper", 3.0 * se_upper[k]}});
    }
  return {{"n", n},
          {"X", X},
          {"M", M},
          {"samples", samples},
          {"points", std::move(points)},
          {"violations_lower", violations_lower},
          {"violations_upper", violations_upper},
          {"mean_failures_lower", mean_order_failures_lower()},
          {"mean_failures_upper", mean_order_failures_upper()},
          {"wraps", wraps},
          {"resamples", resamples}};
}

ComparisonReport coupled_run(int n, int X, double p, double q, std::uint64_t seed, int samples, int threads) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  if (X < 1 || X > n) throw std::invalid_argument("coupled run needs 1 <= X <= n");
  ComparisonReport rep;
  rep.n = n;
  rep.X = X;
  rep.M = n + X;
  rep.samples = samples;
  rep.levels = X + 1;
  const std::size_t points = static_cast<std::size_t>(rep.levels) * static_cast<std::size_t>(rep.M);

  struct Sums {
    std::vector<std::int64_t> refl, act, dstep, quad, lower, lower_sq, upper, upper_sq;
    std::int64_t viol_lower = 0, viol_upper = 0;
    int wraps = 0, resamples = 0;
    explicit Sums(std::size_t k)
        : refl(k), act(k), dstep(k), quad(k), lower(k), lower_sq(k), upper(k), upper_sq(k) {}
  };
  const int workers = static_cast<int>(std::min<std::int64_t>(resolve_threads(threads), samples));
  std::vector<Sums> partial(static_cast<std::size_t>(workers), Sums(points));
  const auto addressing = SiteAddressing::embedded(n, X);

  parallel_chunks(samples, workers, [&](int w, std::int64_t begin, std::int64_t end) {
    Sums& acc = partial[static_cast<std::size_t>(w)];
    for (std::int64_t s = begin; s < end; ++s) {
      const auto sd = sample_seed(seed, static_cast<std::uint64_t>(s));
      const auto refl = run_reflective(n, X, p, q, sd);
      StepDiagnostics diag;
      const auto dstep = run_double_step(rep.M, X, p, q, sd, rep.levels, addressing, {}, &diag);
      const auto quad = run_quadrant(X, p, q, sd, rep.M, addressing);
      acc.wraps += diag.wraps;
      acc.resamples += diag.resamples;
      for (std::size_t k = 0; k < points; ++k) {
        const std::int64_t r = refl.refl.data[k], a = refl.act.data[k], d = dstep.data[k], u = quad.data[k];
        acc.refl[k] += r;
        acc.act[k] += a;
        acc.dstep[k] += d;
        acc.quad[k] += u;
        acc.lower[k] += r - d;
        acc.lower_sq[k] += (r - d) * (r - d);
        acc.upper[k] += u - a;
        acc.upper_sq[k] += (u - a) * (u - a);
        if (r < d) ++acc.viol_lower;
        if (a > u) ++acc.viol_upper;
      }
    }
  });

  Sums total(points);
  for (const auto& part : partial) {
    for (std::size_t k = 0; k < points; ++k) {
      total.refl[k] += part.refl[k];
      total.act[k] += part.act[k];
      total.dstep[k] += part.dstep[k];
      total.quad[k] += part.quad[k];
      total.lower[k] += part.lower[k];
      total.lower_sq[k] += part.lower_sq[k];
      total.upper[k] += part.upper[k];
      total.upper_sq[k] += part.upper_sq[k];
    }
    total.viol_lower += part.viol_lower;
    total.viol_upper += part.viol_upper;
    total.wraps += part.wraps;
    total.resamples += part.resamples;
  }

  const double N = samples;
  auto mean_of = [&](const std::vector<std::int64_t>& v) {
    std::vector<double> m(points);
    for (std::size_t k = 0; k < points; ++k) m[k] = static_cast<double>(v[k]) / N;
    return m;
  };
  auto se_of = [&](const std::vector<std::int64_t>& sum, const std::vector<std::int64_t>& sq) {
    std::vector<double> se(points, 0.0);
    if (samples < 2) return se;
    for (std::size_t k = 0; k < points; ++k) {
      const double mean = static_cast<double>(sum[k]) / N;
      const double var = std::max(0.0, (static_cast<double>(sq[k]) - N * mean * mean) / (N - 1.0));
      se[k] = std::sqrt(var / N);
    }
    return se;
  };
  rep.mean_refl = mean_of(total.refl);
  rep.mean_act = mean_of(total.act);
  rep.mean_dstep = mean_of(total.dstep);
  rep.mean_quad = mean_of(total.quad);
  rep.mean_lower = mean_of(total.lower);
  rep.mean_upper = mean_of(total.upper);
  rep.se_lower = se_of(total.lower, total.lower_sq);
  rep.se_upper = se_of(total.upper, total.upper_sq);
  rep.violations_lower = total.viol_lower;
  rep.violations_upper = total.viol_upper;
  rep.wraps = total.wraps;
  rep.resamples = total.resamples;
  return rep;
}

}  // namespace qdem
