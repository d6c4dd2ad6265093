#include "qdem/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <locale>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "qdem/analysis.hpp"
#include "qdem/cylinder.hpp"
#include "qdem/hecke.hpp"
#include "qdem/hydro.hpp"
#include "qdem/svg.hpp"

namespace qdem {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Raised for failed strict-mode thresholds.
struct StrictFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ostringstream csv_stream() {
  std::ostringstream s;
  s.imbue(std::locale::classic());
  s << std::setprecision(12);
  return s;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
}

// Writes to --out when given, otherwise to the console stream.
void emit(const std::string& out_path, std::ostream& out, const std::string& text) {
  if (out_path.empty())
    out << text;
  else
    write_file(out_path, text);
}

std::set<std::string> parse_formats(const std::string& spec, const std::set<std::string>& allowed) {
  std::set<std::string> formats;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (!allowed.count(item)) throw std::invalid_argument("--format: unsupported format '" + item + "'");
    formats.insert(item);
  }
  if (formats.empty()) throw std::invalid_argument("--format: no format given");
  return formats;
}

// ---- experiment specs ----

const std::set<std::string> kSpecKeys{"kind",  "n",       "p",        "q",        "x",       "lambda", "samples",
                                      "seed",  "grid",    "chart",    "u_blocks", "v_blocks", "godunov",
                                      "threads"};

int int_field(const json& j, const char* key, int lo) {
  const auto& v = j.at(key);
  if (!v.is_number_integer()) throw std::invalid_argument(std::string(key) + ": expected an integer");
  const auto value = v.get<std::int64_t>();
  if (value < lo || value > std::numeric_limits<int>::max())
    throw std::invalid_argument(std::string(key) + ": out of range");
  return static_cast<int>(value);
}

double real_field(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number()) throw std::invalid_argument(std::string(key) + ": expected a number");
  return v.get<double>();
}

ExperimentParams parse_spec(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("spec: expected a JSON object");
  for (const auto& [key, value] : j.items())
    if (!kSpecKeys.count(key)) throw std::invalid_argument(key + ": unknown key");
  for (const char* key : {"kind", "n", "seed"})
    if (!j.contains(key)) throw std::invalid_argument(std::string(key) + ": missing");
  ExperimentParams P;
  if (!j["kind"].is_string()) throw std::invalid_argument("kind: expected a string");
  P.kind = parse_kind(j["kind"].get<std::string>());
  P.n = int_field(j, "n", 1);
  if (!j["seed"].is_number_unsigned()) throw std::invalid_argument("seed: expected a non-negative integer");
  P.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("p")) P.p = real_field(j, "p");
  if (j.contains("q")) P.q = real_field(j, "q");
  if (j.contains("lambda")) P.lambda = real_field(j, "lambda");
  if (j.contains("x")) {
    const auto& x = j["x"];
    if (x.is_number()) {
      P.x = {x.get<double>()};
    } else if (x.is_array()) {
      P.x.clear();
      for (const auto& e : x) {
        if (!e.is_number()) throw std::invalid_argument("x: expected numbers");
        P.x.push_back(e.get<double>());
      }
    } else {
      throw std::invalid_argument("x: expected a number or an array of numbers");
    }
  }
  if (j.contains("samples")) P.samples = int_field(j, "samples", 1);
  if (j.contains("grid")) P.grid = int_field(j, "grid", 2);
  if (j.contains("threads")) P.threads = int_field(j, "threads", 0);
  if (j.contains("u_blocks")) P.u_blocks = int_field(j, "u_blocks", 1);
  if (j.contains("v_blocks")) P.v_blocks = int_field(j, "v_blocks", 1);
  if (j.contains("godunov")) {
    if (!j["godunov"].is_boolean()) throw std::invalid_argument("godunov: expected true or false");
    P.godunov = j["godunov"].get<bool>();
  }
  if (j.contains("chart")) {
    const auto& c = j["chart"];
    if (!c.is_string()) throw std::invalid_argument("chart: expected a string");
    const auto name = c.get<std::string>();
    if (name == "unit-square")
      P.chart = Chart::unit_square;
    else if (name == "triangle")
      P.chart = Chart::triangle;
    else
      throw std::invalid_argument("chart: expected 'unit-square' or 'triangle'");
  }
  P.validate();
  return P;
}

std::vector<Polyline> overlay_curves(const ExperimentParams& P, const HeightField& f) {
  const double k = kappa(P.p, P.q);
  std::vector<Polyline> curves;
  const int steps = 200;
  if (f.chart == Chart::unit_square) {
    Polyline lo{"y = x / kappa", {}}, hi{"y = x kappa", {}}, top{"fan top", {}};
    for (int i = 1; i < steps; ++i) {
      const double x = static_cast<double>(i) / steps;
      lo.points.emplace_back(x / k, x);
      hi.points.emplace_back(x * k, x);
      top.points.emplace_back(limit_fan_top(x, k), x);
    }
    curves = {lo, hi, top};
  } else if (f.chart == Chart::triangle) {
    const double x = P.x.front(), lambda = x / (1.0 + x);
    Polyline lo{"fan left edge", {}}, hi{"fan right edge", {}}, sh{"shock", {}};
    for (int i = 0; i <= steps; ++i) {
      const double v = lambda * i / steps, s = (1.0 + x) * v + 1.0 - x;
      lo.points.emplace_back(s, (1.0 + x) * v / k);
      hi.points.emplace_back(s, (1.0 + x) * v * k);
      sh.points.emplace_back(s, (1.0 + x) * shock_curve(v, lambda, k));
    }
    curves = {lo, hi, sh};
  } else {
    Polyline lo{"u = v / kappa", {}}, hi{"u = v kappa", {}}, sh{"shock", {}};
    for (int i = 0; i <= steps; ++i) {
      const double v = P.lambda * i / steps;
      lo.points.emplace_back(v, v / k);
      hi.points.emplace_back(v, v * k);
      if (P.kind == ExperimentKind::cylinder_hydro) sh.points.emplace_back(v, shock_curve(v, P.lambda, k));
    }
    curves = {lo, hi};
    if (!sh.points.empty()) curves.push_back(sh);
  }
  return curves;
}

std::string field_csv(const HeightField& f) {
  auto s = csv_stream();
  write_csv(s, f);
  return s.str();
}

struct ExperimentOutput {
  json summary;
  std::map<std::string, std::string> files;  // name -> contents
  bool strict_ok = true;
  std::string strict_reason;
};

ExperimentOutput run_experiment(const ExperimentParams& P, const std::set<std::string>& formats) {
  const StrictThresholds T;
  ExperimentOutput o;
  o.summary["kind"] = std::string(kind_name(P.kind));
  auto add_field = [&](const std::string& stem, const HeightField& f, const char* title) {
    if (formats.count("csv")) o.files[stem + ".csv"] = field_csv(f);
    if (formats.count("svg")) {
      std::ostringstream svg;
      write_heatmap_svg(svg, f, overlay_curves(P, f), title);
      o.files[stem + ".svg"] = svg.str();
    }
  };
  auto field_check = [&](double sup_interior_limit, bool use_near) {
    const HeightField f = estimate_height_field(P);
    const HeightField L = limit_field(P, f);
    const ErrorSummary e = compare_to_limit(f, L, near_curves(P));
    o.summary.update(e.to_json());
    o.summary["per_point_csv"] = "field.csv";
    add_field("field", f, "empirical height field");
    add_field("limit", L, "limit height field");
    if (e.sup_interior > sup_interior_limit || (use_near && e.sup_near > T.sup_near)) {
      o.strict_ok = false;
      o.strict_reason = "height field deviates from the limit beyond the threshold";
    }
  };
  switch (P.kind) {
    case ExperimentKind::triangle_limit: field_check(T.sup_interior, true); break;
    case ExperimentKind::quadrant_hydro: field_check(T.quadrant_sup, false); break;
    case ExperimentKind::cylinder_hydro: {
      const HydroReport r = cylinder_hydro_check(P);
      o.summary.update(r.to_json());
      field_check(1.0, false);
      if (r.max_discrepancy > T.hydro_block) {
        o.strict_ok = false;
        o.strict_reason = "block discrepancy exceeds the threshold";
      }
      break;
    }
    case ExperimentKind::pprime_equivalence: {
      const PPrimeReport r = pprime_equivalence(P);
      o.summary.update(r.to_json());
      o.summary["per_point_csv"] = "original.csv";
      add_field("original", r.original, "height field at (p, q)");
      add_field("adjusted", r.adjusted, "height field at (p', 0)");
      if (r.sup_difference > T.pprime_sup) {
        o.strict_ok = false;
        o.strict_reason = "mean fields differ beyond the threshold";
      }
      break;
    }
    case ExperimentKind::coupling_order: {
      const int X = scaled_floor(P.n, P.x.front());
      const ComparisonReport r = coupled_run(P.n, X, P.p, P.q, P.seed, P.samples, P.threads);
      json j = r.to_json();
      if (formats.count("csv")) {
        auto s = csv_stream();
        s << "V,U,refl,act,dstep,quad\n";
        for (const auto& pt : j["points"])
          s << pt["V"].get<int>() << ',' << pt["U"].get<int>() << ',' << pt["refl"].get<double>() << ','
            << pt["act"].get<double>() << ',' << pt["dstep"].get<double>() << ',' << pt["quad"].get<double>()
            << '\n';
        o.files["coupling.csv"] = s.str();
        o.summary["per_point_csv"] = "coupling.csv";
      }
      o.summary.update(j);
      if (r.mean_order_failures_lower() + r.mean_order_failures_upper() > 0) {
        o.strict_ok = false;
        o.strict_reason = "mean ordering fails by more than three standard errors";
      }
      break;
    }
  }
  return o;
}

// ---- hydro profiles ----

std::string hydro_csv(const std::string& kind, double p, double q, double lambda, double x, double v_opt,
                      int grid) {
  const double k = kappa(p, q);
  const double v = v_opt >= 0.0 ? v_opt : lambda;
  auto s = csv_stream();
  auto axis = [&](double lo, double hi) { return uniform_axis(grid, lo, hi); };
  if (kind == "flux") {
    s << "z,value\n";
    for (double z : axis(0.0, 1.0)) s << z << ',' << flux(z, k) << '\n';
  } else if (kind == "shock-curve") {
    s << "v,value\n";
    for (double t : axis(0.0, lambda)) s << t << ',' << shock_curve(t, lambda, k) << '\n';
  } else if (kind == "gbcg" || kind == "hbcg") {
    s << "u,value\n";
    for (double u : axis(0.0, 1.0)) s << u << ',' << (kind == "gbcg" ? g_bcg(u, v, k) : h_bcg(u, v, k)) << '\n';
  } else if (kind == "gshock") {
    s << "u,value\n";
    for (double u : axis(0.0, 1.0)) s << u << ',' << g_shock(u, v, lambda, k) << '\n';
  } else if (kind == "hactive") {
    s << "u,value\n";
    for (double u : axis(0.0, v + 1.0 - 2.0 * lambda)) s << u << ',' << h_active(u, v, lambda, k) << '\n';
  } else {
    s << "y,value\n";
    for (double y : axis(0.0, 1.0)) s << y << ',' << limit_H_sigma(y, x, k) << '\n';
  }
  return s.str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Random permutations from q-deformed Demazure products and their vertex-model limits"};
  app.name("qdem");
  app.require_subcommand(1);

  int n = 0, samples = 1, grid = 101, cells = 4000, threads = 0;
  double p = 0.5, q = 0.5, x = 0.5, lambda = 0.25, v = -1.0;
  std::uint64_t seed = 0;
  std::string out_path, format, hydro_kind, spec_path;
  bool strict = false;

  auto* sample = app.add_subcommand("sample", "Draw permutations from the staircase q-Demazure product");
  sample->add_option("--n", n, "Permutation size")->required()->check(CLI::Range(1, 1 << 20));
  sample->add_option("--p", p, "Keep probability")->check(CLI::Range(0.0, 1.0));
  sample->add_option("--q", q, "Reducing-step probability")->check(CLI::Range(0.0, 1.0));
  sample->add_option("--seed", seed, "Random seed")->required();
  sample->add_option("--samples", samples, "Number of permutations")->check(CLI::Range(1, 1 << 30));
  sample->add_option("--out", out_path, "Output file (default: standard output)");

  auto* exact = app.add_subcommand("exact", "Exact distribution as JSON");
  exact->add_option("--n", n, "Permutation size")->required()->check(CLI::Range(1, 1 << 20));
  exact->add_option("--p", p, "Keep probability")->check(CLI::Range(0.0, 1.0));
  exact->add_option("--q", q, "Reducing-step probability")->check(CLI::Range(0.0, 1.0));
  exact->add_option("--out", out_path, "Output file (default: standard output)");

  auto* hydro = app.add_subcommand("hydro", "Evaluate a closed-form limit profile as CSV");
  hydro->add_option("kind", hydro_kind, "Profile")
      ->required()
      ->check(CLI::IsMember({"flux", "shock-curve", "gbcg", "hbcg", "gshock", "hactive", "limit-Hsigma"}));
  hydro->add_option("--p", p, "Keep probability");
  hydro->add_option("--q", q, "Reducing-step probability");
  hydro->add_option("--lambda", lambda, "Half density of the double-step start");
  hydro->add_option("--x", x, "Color threshold for limit-Hsigma");
  hydro->add_option("--v", v, "Time for the u-profiles (default: lambda)");
  hydro->add_option("--grid", grid, "Number of grid points")->check(CLI::Range(2, 1 << 24));
  hydro->add_option("--out", out_path, "Output file (default: standard output)");

  auto* pde = app.add_subcommand("pde", "Godunov solution from the double-step start");
  pde->add_option("--p", p, "Keep probability");
  pde->add_option("--q", q, "Reducing-step probability");
  pde->add_option("--lambda", lambda, "Half density of the double-step start");
  pde->add_option("--v", v, "End time (default: lambda)");
  pde->add_option("--cells", cells, "Number of cells")->check(CLI::Range(1, 1 << 26));
  pde->add_option("--format", format, "csv (cell densities) or json (error summary)")
      ->check(CLI::IsMember({"csv", "json"}));
  pde->add_option("--out", out_path, "Output file (default: standard output)");

  auto* experiment = app.add_subcommand("experiment", "Run a Monte Carlo experiment from a JSON spec");
  experiment->add_option("spec", spec_path, "Experiment spec file")->required();
  experiment->add_option("--out", out_path, "Output directory (default: current directory)");
  experiment->add_option("--format", format, "Comma-separated subset of csv,json,svg (default: csv,json)");
  experiment->add_flag("--strict", strict, "Exit with code 3 when an acceptance threshold is breached");
  experiment->add_option("--threads", threads, "Worker threads (0: all available)")->check(CLI::Range(0, 4096));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (sample->parsed()) {
      std::ostringstream s;
      for (int i = 0; i < samples; ++i)
        s << to_string(sample_sigma(n, p, q, sample_seed(seed, static_cast<std::uint64_t>(i)))) << '\n';
      emit(out_path, out, s.str());
    } else if (exact->parsed()) {
      const HeckeVector dist = hecke_exact_distribution(n, p, q);
      if (std::abs(dist.total_mass() - 1.0) > 1e-12) throw std::logic_error("exact distribution lost mass");
      emit(out_path, out, to_json(dist).dump(2) + "\n");
    } else if (hydro->parsed()) {
      emit(out_path, out, hydro_csv(hydro_kind, p, q, lambda, x, v, grid));
    } else if (pde->parsed()) {
      const double k = kappa(p, q);
      const double v_end = v >= 0.0 ? v : lambda;
      if (v_end > lambda) throw std::invalid_argument("--v: must not exceed lambda");
      const PDEGrid g = godunov_solve(double_step_profile(cells, lambda), k, v_end);
      if (format == "json") {
        const json j{{"cells", cells},
                     {"v", v_end},
                     {"kappa", k},
                     {"l1_to_closed_form", l1_distance(g.values, exact_cell_averages(cells, v_end, lambda, k))}};
        emit(out_path, out, j.dump(2) + "\n");
      } else {
        auto s = csv_stream();
        s << "u,value\n";
        for (int i = 0; i < cells; ++i)
          s << (i + 0.5) / cells << ',' << g.values[static_cast<std::size_t>(i)] << '\n';
        emit(out_path, out, s.str());
      }
    } else if (experiment->parsed()) {
      const auto formats = parse_formats(format.empty() ? "csv,json" : format, {"csv", "json", "svg"});
      std::ifstream in(spec_path);
      if (!in) throw std::invalid_argument("spec: cannot read " + spec_path);
      json j;
      try {
        j = json::parse(in);
      } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("spec: malformed JSON: ") + e.what());
      }
      ExperimentParams P = parse_spec(j);
      if (experiment->count("--threads")) P.threads = threads;
      const ExperimentOutput o = run_experiment(P, formats);
      const fs::path dir = out_path.empty() ? fs::path(".") : fs::path(out_path);
      fs::create_directories(dir);
      for (const auto& [name, text] : o.files) write_file(dir / name, text);
      if (formats.count("json")) write_file(dir / "summary.json", o.summary.dump(2) + "\n");
      json brief = o.summary;
      brief.erase("points");
      brief.erase("per_sample");
      out << brief.dump() << "\n";
      if (strict && !o.strict_ok) throw StrictFailure(o.strict_reason);
    }
  } catch (const StrictFailure& e) {
    err << "strict: " << e.what() << "\n";
    return kExitStrict;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}

}  // namespace qdem
