#include "qdem/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "qdem/hecke.hpp"
#include "qdem/hydro.hpp"
#include "qdem/parallel.hpp"
#include "qdem/vertex.hpp"

namespace qdem {

namespace {

constexpr std::array<std::pair<ExperimentKind, std::string_view>, 5> kKindNames{{
    {ExperimentKind::triangle_limit, "triangleLimit"},
    {ExperimentKind::cylinder_hydro, "cylinderHydro"},
    {ExperimentKind::quadrant_hydro, "quadrantHydro"},
    {ExperimentKind::pprime_equivalence, "pprimeEquivalence"},
    {ExperimentKind::coupling_order, "couplingOrder"},
}};

void fail(const std::string& key, const std::string& why) { throw std::invalid_argument(key + ": " + why); }

int level_count(const ExperimentParams& P) { return static_cast<int>(std::floor(P.lambda * P.n + 1e-9)); }

// Integer sums per grid point, merged across workers.
struct Accumulator {
  std::vector<std::int64_t> sum, sum_sq;
  explicit Accumulator(std::size_t k = 0) : sum(k, 0), sum_sq(k, 0) {}
  void add(std::size_t k, std::int64_t value) {
    sum[k] += value;
    sum_sq[k] += value * value;
  }
  void merge(const Accumulator& o) {
    for (std::size_t k = 0; k < sum.size(); ++k) {
      sum[k] += o.sum[k];
      sum_sq[k] += o.sum_sq[k];
    }
  }
};

void finish_field(HeightField& f, const Accumulator& acc, int samples, double scale) {
  const double N = samples;
  f.values.assign(acc.sum.size(), 0.0);
  f.std_errors.assign(acc.sum.size(), 0.0);
  for (std::size_t k = 0; k < acc.sum.size(); ++k) {
    const double mean = static_cast<double>(acc.sum[k]) / N;
    f.values[k] = mean / scale;
    if (samples > 1) {
      const double var = std::max(0.0, (static_cast<double>(acc.sum_sq[k]) - N * mean * mean) / (N - 1.0));
      f.std_errors[k] = std::sqrt(var / N) / scale;
    }
  }
  f.meta["samples"] = samples;
}

template <class PerSample>
Accumulator accumulate(const ExperimentParams& P, std::size_t points, PerSample&& per_sample) {
  const int workers = static_cast<int>(std::min<std::int64_t>(resolve_threads(P.threads), P.samples));
  std::vector<Accumulator> partial(static_cast<std::size_t>(workers), Accumulator(points));
  parallel_chunks(P.samples, workers, [&](int w, std::int64_t begin, std::int64_t end) {
    for (std::int64_t s = begin; s < end; ++s) per_sample(s, partial[static_cast<std::size_t>(w)]);
  });
  Accumulator total(points);
  for (const auto& part : partial) total.merge(part);
  return total;
}

// Checks the sampled top row against the word sampler on the same coins and
// the colored-height identity at the requested thresholds.
void spot_check(const TriangleConfig& cfg, const CoinStream& coins, double p, double q,
                const std::vector<int>& thresholds) {
  const int n = cfg.n;
  const Permutation sigma(cfg.top_row);
  if (sample_sigma_with(n, p, q, coins) != sigma)
    throw std::logic_error("word and vertex samplers disagree on shared coins");
  const int step = std::max(1, n / 20);
  for (int c : thresholds)
    for (int Y = 1; Y <= n; Y += step)
      if (colored_height(cfg, c, n, Y) != c - Y + 1 + height_count(sigma, Y - 1, c))
        throw std::logic_error("colored height disagrees with the permutation height");
}

HeightField triangle_unit_square(const ExperimentParams& P) {
  HeightField f;
  f.chart = Chart::unit_square;
  f.coord1 = inset_axis(P.grid, 0.01);
  f.coord2 = P.x;
  const int n = P.n;
  std::vector<int> ys, cs;
  for (double y : f.coord1) ys.push_back(scaled_floor(n, y));
  for (double x : f.coord2) cs.push_back(scaled_floor(n, x));
  const std::size_t cols = cs.size();
  auto acc = accumulate(P, f.coord1.size() * cols, [&](std::int64_t s, Accumulator& a) {
    const CoinStream coins(sample_seed(P.seed, static_cast<std::uint64_t>(s)));
    const auto sample = sample_colored_triangle_with(n, P.p, P.q, coins);
    if (s % 100 == 0) spot_check(sample.config, coins, P.p, P.q, cs);
    const auto& row = sample.config.top_row;
    for (std::size_t j = 0; j < cols; ++j) {
      std::int64_t count = 0;
      int i = 0;  // positions consumed
      for (std::size_t r = 0; r < ys.size(); ++r) {
        for (; i < ys[r]; ++i)
          if (row[static_cast<std::size_t>(i)] > cs[j]) ++count;
        a.add(r * cols + j, count);
      }
    }
  });
  finish_field(f, acc, P.samples, n);
  f.meta["n"] = n;
  return f;
}

HeightField triangle_rows(const ExperimentParams& P) {
  HeightField f;
  f.chart = Chart::triangle;
  const double x = P.x.front();
  const int n = P.n;
  const int X = scaled_floor(n, x);
  f.coord1 = uniform_axis(P.grid, 1.0 - x, 1.0);
  f.coord2 = uniform_axis(P.grid, 0.0, 1.0);
  std::vector<int> rows_S, ys;
  for (double s : f.coord1) rows_S.push_back(std::max(1, scaled_floor(n, s)));
  for (double y : f.coord2) ys.push_back(scaled_floor(n, y));
  const std::size_t cols = ys.size();
  auto acc = accumulate(P, f.coord1.size() * cols, [&](std::int64_t s, Accumulator& a) {
    const CoinStream coins(sample_seed(P.seed, static_cast<std::uint64_t>(s)));
    std::vector<std::int32_t> suffix(static_cast<std::size_t>(n) + 1);
    sample_colored_triangle_with(n, P.p, P.q, coins, false, [&](int S, std::span<const int> verticals) {
      if (!std::binary_search(rows_S.begin(), rows_S.end(), S)) return;
      suffix[static_cast<std::size_t>(S)] = 0;
      for (int c = S; c-- > 0;)
        suffix[static_cast<std::size_t>(c)] =
            suffix[static_cast<std::size_t>(c) + 1] + (verticals[static_cast<std::size_t>(c)] <= X ? 1 : 0);
      for (std::size_t r = 0; r < rows_S.size(); ++r) {
        if (rows_S[r] != S) continue;
        for (std::size_t j = 0; j < cols; ++j) {
          const int start = ys[j];  // columns with zero-based index >= floor(yn)
          a.add(r * cols + j, start >= S ? 0 : suffix[static_cast<std::size_t>(start)]);
        }
      }
    });
  });
  finish_field(f, acc, P.samples, n);
  f.meta["n"] = n;
  f.meta["X"] = X;
  return f;
}

HeightField cylinder_field(const ExperimentParams& P) {
  HeightField f;
  f.chart = Chart::cylinder;
  const int M = P.n;
  const int X = level_count(P);
  f.coord1 = uniform_axis(P.grid, 0.0, P.lambda);
  f.coord2 = uniform_axis(P.grid, 0.0, 1.0);
  std::vector<int> Vs, Us;
  for (double v : f.coord1) Vs.push_back(std::min(X, scaled_floor(M, v)));
  for (double u : f.coord2) Us.push_back(scaled_floor(M, u));
  const std::size_t cols = Us.size();
  const bool quadrant = P.kind == ExperimentKind::quadrant_hydro;
  auto acc = accumulate(P, f.coord1.size() * cols, [&](std::int64_t s, Accumulator& a) {
    const auto seed = sample_seed(P.seed, static_cast<std::uint64_t>(s));
    const HeightTable table = quadrant ? run_quadrant(X, P.p, P.q, seed, M + 1)
                                       : run_double_step(M, X, P.p, P.q, seed, X + 1);
    for (std::size_t r = 0; r < Vs.size(); ++r)
      for (std::size_t j = 0; j < cols; ++j) a.add(r * cols + j, Us[j] >= table.width ? 0 : table(Vs[r], Us[j]));
  });
  finish_field(f, acc, P.samples, M);
  f.meta["M"] = M;
  f.meta["X"] = X;
  return f;
}

}  // namespace

std::string_view kind_name(ExperimentKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  throw std::logic_error("unknown experiment kind");
}

ExperimentKind parse_kind(std::string_view name) {
  for (const auto& [k, label] : kKindNames)
    if (label == name) return k;
  fail("kind", "unknown experiment kind '" + std::string(name) + "'");
  return ExperimentKind::triangle_limit;
}

void ExperimentParams::validate() const {
  if (samples < 1) fail("samples", "must be >= 1");
  if (grid < 2) fail("grid", "must be >= 2");
  if (threads < 0) fail("threads", "must be >= 0");
  if (!(p >= 0.0 && p <= 1.0)) fail("p", "must lie in [0,1]");
  if (!(q >= 0.0 && q <= 1.0)) fail("q", "must lie in [0,1]");
  if (x.empty()) fail("x", "needs at least one value");
  for (double v : x)
    if (!(v > 0.0 && v < 1.0)) fail("x", "values must lie in (0,1)");
  switch (kind) {
    case ExperimentKind::triangle_limit:
    case ExperimentKind::pprime_equivalence:
      if (n < 2) fail("n", "must be >= 2");
      if (kind == ExperimentKind::pprime_equivalence && !(p > 0.0 && p < 1.0 && q < 1.0))
        fail("p", "p must lie in (0,1) and q in [0,1)");
      break;
    case ExperimentKind::cylinder_hydro:
    case ExperimentKind::quadrant_hydro:
      if (n < 2) fail("n", "circumference must be >= 2");
      if (!(lambda > 0.0 && lambda <= 0.5)) fail("lambda", "must lie in (0, 1/2]");
      if (level_count(*this) < 1) fail("lambda", "lambda * n must be at least 1");
      if (!(p > 0.0 && p < 1.0)) fail("p", "must lie in (0,1)");
      if (!(q < 1.0)) fail("q", "must lie in [0,1)");
      if (u_blocks < 1 || u_blocks > n) fail("u_blocks", "must lie in [1, n]");
      if (v_blocks < 1) fail("v_blocks", "must be >= 1");
      break;
    case ExperimentKind::coupling_order:
      if (n < 2) fail("n", "must be >= 2");
      if (scaled_floor(n, x.front()) < 1) fail("x", "x * n must be at least 1");
      break;
  }
}

HeightField estimate_height_field(const ExperimentParams& params) {
  params.validate();
  switch (params.kind) {
    case ExperimentKind::triangle_limit:
    case ExperimentKind::pprime_equivalence:
      return params.chart == Chart::triangle ? triangle_rows(params) : triangle_unit_square(params);
    case ExperimentKind::cylinder_hydro:
    case ExperimentKind::quadrant_hydro: return cylinder_field(params);
    case ExperimentKind::coupling_order: break;
  }
  throw std::invalid_argument("kind: couplingOrder has no single height field");
}

HeightField limit_field(const ExperimentParams& P, const HeightField& like) {
  const double k = kappa(P.p, P.q);
  std::function<double(double, double)> fn;
  if (like.chart == Chart::unit_square) {
    fn = [k](double y, double x) { return limit_H_sigma(y, x, k); };
  } else if (like.chart == Chart::triangle) {
    const double x = P.x.front();
    fn = [k, x](double s, double y) { return y > s ? 0.0 : limit_height_triangle_kappa(s, y, x, k); };
  } else if (P.kind == ExperimentKind::quadrant_hydro) {
    fn = [k](double v, double u) { return h_bcg(u, v, k); };
  } else {
    const double lambda = P.lambda;
    fn = [k, lambda](double v, double u) { return h_dstep(u, v, lambda, k); };
  }
  HeightField f = tabulate(like.chart, like.coord1, like.coord2, fn);
  f.meta["kappa"] = k;
  return f;
}

nlohmann::json ErrorSummary::to_json() const {
  return {{"sup_interior", sup_interior},
          {"sup_near", sup_near},
          {"l1", l1},
          {"points_interior", points_interior},
          {"points_near", points_near}};
}

ErrorSummary compare_to_limit(const HeightField& field, const HeightField& limit,
                              const std::function<bool(double, double)>& near) {
  sup_distance(field, limit);  // validates charts and axes
  ErrorSummary e;
  double total = 0.0;
  for (std::size_t i = 0; i < field.rows(); ++i)
    for (std::size_t j = 0; j < field.cols(); ++j) {
      const double d = std::abs(field.at(i, j) - limit.at(i, j));
      total += d;
      if (near && near(field.coord1[i], field.coord2[j])) {
        e.sup_near = std::max(e.sup_near, d);
        ++e.points_near;
      } else {
        e.sup_interior = std::max(e.sup_interior, d);
        ++e.points_interior;
      }
    }
  e.l1 = total / static_cast<double>(field.values.size());
  return e;
}

std::function<bool(double, double)> near_curves(const ExperimentParams& P, double margin) {
  const double k = kappa(P.p, P.q);
  auto close = [margin](double a, double b) { return std::abs(a - b) < margin; };
  switch (P.kind) {
    case ExperimentKind::triangle_limit:
    case ExperimentKind::pprime_equivalence:
      if (P.chart == Chart::triangle) {
        const double x = P.x.front();
        const double lambda = x / (1.0 + x);
        return [=](double s, double y) {
          const double v = std::clamp((s - (1.0 - x)) / (1.0 + x), 0.0, lambda);
          const double sc = (1.0 + x);
          return close(y, sc * v / k) || close(y, sc * v * k) || close(y, sc * shock_curve(v, lambda, k));
        };
      }
      return [=](double y, double x) {
        const double lambda = x / (1.0 + x);
        return close(y, x / k) || close(y, x * k) || close(y, (1.0 + x) * shock_curve(lambda, lambda, k));
      };
    case ExperimentKind::cylinder_hydro: {
      const double lambda = P.lambda;
      return [=](double v, double u) {
        return close(u, v / k) || close(u, v * k) || close(u, shock_curve(std::min(v, lambda), lambda, k));
      };
    }
    case ExperimentKind::quadrant_hydro:
      return [=](double v, double u) { return close(u, v / k) || close(u, v * k); };
    case ExperimentKind::coupling_order: break;
  }
  return {};
}

nlohmann::json PPrimeReport::to_json() const {
  return {{"p_prime", p_prime}, {"sup_difference", sup_difference}, {"noise", noise}};
}

PPrimeReport pprime_equivalence(const ExperimentParams& params) {
  ExperimentParams a = params;
  a.kind = ExperimentKind::triangle_limit;
  a.validate();
  ExperimentParams b = a;
  b.p = p_prime(a.p, a.q);
  b.q = 0.0;
  b.seed = mix64(a.seed ^ 0x6a09e667f3bcc909ULL);
  PPrimeReport r;
  r.p_prime = b.p;
  r.original = estimate_height_field(a);
  r.adjusted = estimate_height_field(b);
  r.sup_difference = sup_distance(r.original, r.adjusted);
  for (std::size_t k = 0; k < r.original.values.size(); ++k)
    r.noise = std::max(r.noise, 2.0 * std::hypot(r.original.std_errors[k], r.adjusted.std_errors[k]));
  return r;
}

double block_statistic(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
  if (a.size() != b.size() || a.empty()) throw std::invalid_argument("block statistic: shape mismatch");
  const std::size_t nu = a.size(), nv = a.front().size();
  std::vector<std::vector<double>> D(nu, std::vector<double>(nv));
  for (std::size_t i = 0; i < nu; ++i) {
    if (a[i].size() != nv || b[i].size() != nv) throw std::invalid_argument("block statistic: shape mismatch");
    for (std::size_t j = 0; j < nv; ++j) D[i][j] = a[i][j] - b[i][j];
  }
  double best = 0.0;
  for (std::size_t v1 = 0; v1 < nv; ++v1)
    for (std::size_t v2 = v1 + 1; v2 < nv; ++v2) {
      double lo = D[0][v2] - D[0][v1], hi = lo;
      for (std::size_t i = 1; i < nu; ++i) {
        const double d = D[i][v2] - D[i][v1];
        lo = std::min(lo, d);
        hi = std::max(hi, d);
      }
      best = std::max(best, hi - lo);
    }
  return best;
}

nlohmann::json HydroReport::to_json() const {
  nlohmann::json j{{"M", M},
                   {"X", X},
                   {"samples", samples},
                   {"u_blocks", static_cast<int>(u_breaks.size()) - 1},
                   {"v_blocks", static_cast<int>(v_breaks.size()) - 1},
                   {"per_sample", per_sample},
                   {"max_discrepancy", max_discrepancy},
                   {"mean_field_discrepancy", mean_field_discrepancy},
                   {"wraps", wraps},
                   {"resamples", resamples}};
  if (godunov_vs_closed >= 0.0) {
    j["godunov_vs_closed"] = godunov_vs_closed;
    j["empirical_vs_godunov"] = empirical_vs_godunov;
  }
  return j;
}

HydroReport cylinder_hydro_check(const ExperimentParams& params) {
  ExperimentParams P = params;
  P.kind = ExperimentKind::cylinder_hydro;
  P.validate();
  const int M = P.n;
  const int X = level_count(P);
  const double k = kappa(P.p, P.q);
  HydroReport rep;
  rep.M = M;
  rep.X = X;
  rep.samples = P.samples;
  for (int b = 0; b <= P.u_blocks; ++b)
    rep.u_breaks.push_back(static_cast<int>(static_cast<std::int64_t>(b) * M / P.u_blocks));
  const int vb = std::min(P.v_blocks, X);
  for (int b = 0; b <= vb; ++b) rep.v_breaks.push_back(static_cast<int>(static_cast<std::int64_t>(b) * X / vb));
  const std::size_t nu = rep.u_breaks.size(), nv = rep.v_breaks.size();
  const double M2 = static_cast<double>(M) * M;

  // Closed form: C[b_u][b_v] = int_0^{V/M} h_dstep(U/M, v) dv, five-point
  // Gauss-Legendre on every level interval.
  static constexpr std::array<double, 5> gl_x{-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                              0.9061798459386640};
  static constexpr std::array<double, 5> gl_w{0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                              0.4786286704993665, 0.2369268850561891};
  std::vector<std::vector<double>> closed(nu, std::vector<double>(nv, 0.0));
  for (std::size_t i = 0; i < nu; ++i) {
    const double u = static_cast<double>(rep.u_breaks[i]) / M;
    double running = 0.0;
    std::size_t next = 1;
    for (int j = 0; j < X && next < nv; ++j) {
      const double mid = (j + 0.5) / M, half = 0.5 / M;
      double part = 0.0;
      for (std::size_t g = 0; g < 5; ++g) part += gl_w[g] * h_dstep(u, mid + half * gl_x[g], P.lambda, k);
      running += part * half;
      while (next < nv && rep.v_breaks[next] == j + 1) closed[i][next++] = running;
    }
  }

  struct Partial {
    std::vector<std::vector<std::int64_t>> sum;
    int wraps = 0, resamples = 0;
  };
  const int workers = static_cast<int>(std::min<std::int64_t>(resolve_threads(P.threads), P.samples));
  std::vector<Partial> partial(static_cast<std::size_t>(workers),
                               Partial{std::vector<std::vector<std::int64_t>>(nu, std::vector<std::int64_t>(nv, 0))});
  std::vector<std::vector<std::vector<std::int64_t>>> per_sample_sums(static_cast<std::size_t>(P.samples));

  parallel_chunks(P.samples, workers, [&](int w, std::int64_t begin, std::int64_t end) {
    auto& mine = partial[static_cast<std::size_t>(w)];
    for (std::int64_t s = begin; s < end; ++s) {
      std::vector<std::vector<std::int64_t>> cum(nu, std::vector<std::int64_t>(nv, 0));
      std::vector<std::int64_t> running(nu, 0);
      std::size_t next = 1;
      StepDiagnostics diag;
      run_double_step(
          M, X, P.p, P.q, sample_seed(P.seed, static_cast<std::uint64_t>(s)), X, SiteAddressing::plain(),
          [&](int V, std::span<const std::uint8_t> occ) {
            // Suffix counts at the u breaks, right to left.
            std::int64_t h = 0;
            int pos = M;
            for (std::size_t i = nu; i-- > 0;) {
              for (; pos > rep.u_breaks[i]; --pos) h += occ[static_cast<std::size_t>(pos - 1)];
              running[i] += h;
            }
            while (next < nv && rep.v_breaks[next] == V + 1) {
              for (std::size_t i = 0; i < nu; ++i) cum[i][next] = running[i];
              ++next;
            }
          },
          &diag);
      mine.wraps += diag.wraps;
      mine.resamples += diag.resamples;
      for (std::size_t i = 0; i < nu; ++i)
        for (std::size_t j = 0; j < nv; ++j) mine.sum[i][j] += cum[i][j];
      per_sample_sums[static_cast<std::size_t>(s)] = std::move(cum);
    }
  });

  auto scaled = [&](const std::vector<std::vector<std::int64_t>>& c, double div) {
    std::vector<std::vector<double>> out(nu, std::vector<double>(nv));
    for (std::size_t i = 0; i < nu; ++i)
      for (std::size_t j = 0; j < nv; ++j) out[i][j] = static_cast<double>(c[i][j]) / div;
    return out;
  };

  std::vector<std::vector<double>> godunov;
  if (P.godunov) {
    std::vector<double> marks;
    for (int V : rep.v_breaks) marks.push_back(static_cast<double>(V) / M);
    const auto integrals = godunov_time_integrals(double_step_profile(M, P.lambda), k, marks);
    godunov.assign(nu, std::vector<double>(nv, 0.0));
    for (std::size_t j = 0; j < nv; ++j) {
      double h = 0.0;
      int pos = M;
      for (std::size_t i = nu; i-- > 0;) {
        for (; pos > rep.u_breaks[i]; --pos) h += integrals[j][static_cast<std::size_t>(pos - 1)];
        godunov[i][j] = h / M;
      }
    }
    rep.godunov_vs_closed = block_statistic(godunov, closed);
    rep.empirical_vs_godunov = 0.0;
  }

  for (const auto& c : per_sample_sums) {
    const auto emp = scaled(c, M2);
    rep.per_sample.push_back(block_statistic(emp, closed));
    rep.max_discrepancy = std::max(rep.max_discrepancy, rep.per_sample.back());
    if (P.godunov) rep.empirical_vs_godunov = std::max(rep.empirical_vs_godunov, block_statistic(emp, godunov));
  }
  std::vector<std::vector<std::int64_t>> total(nu, std::vector<std::int64_t>(nv, 0));
  for (const auto& part : partial) {
    for (std::size_t i = 0; i < nu; ++i)
      for (std::size_t j = 0; j < nv; ++j) total[i][j] += part.sum[i][j];
    rep.wraps += part.wraps;
    rep.resamples += part.resamples;
  }
  rep.mean_field_discrepancy = block_statistic(scaled(total, M2 * P.samples), closed);
  return rep;
}

}  // namespace qdem
