#include "lassodiag/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "lassodiag/asymptotic_curve.hpp"
#include "lassodiag/boundaries.hpp"
#include "lassodiag/output.hpp"
#include "lassodiag/region.hpp"
#include "lassodiag/simulate.hpp"

namespace lassodiag {
namespace {

using nlohmann::json;

struct OutputSpec {
  std::string path;  // empty: the out stream
  std::string format = "csv";
};

void add_output_options(CLI::App* cmd, OutputSpec& spec, const std::string& default_format) {
  spec.format = default_format;
  cmd->add_option("--out", spec.path, "Output file (default: standard output)");
  cmd->add_option("--format", spec.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
}

void emit(const OutputSpec& spec, const std::string& text, std::ostream& out) {
  if (spec.path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(spec.path, std::ios::binary);
  if (!f) throw DomainError("cannot open output file " + spec.path);
  f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DomainError("cannot open config file " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw DomainError("config " + path + ": " + e.what());
  }
}

json sigma_to_json(const NoiseLevel& s) { return s.is_infinite() ? json("inf") : json(s.sigma()); }

NoiseLevel sigma_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return NoiseLevel::infinite();
    throw DomainError("sigma must be a number or \"inf\"");
  }
  return NoiseLevel(j.get<double>());
}

json prior_to_json(const DiscretePrior& prior) {
  json atoms = json::array();
  for (const Atom& a : prior.atoms()) atoms.push_back({{"value", a.value}, {"weight", a.weight}});
  return {{"zero_mass", prior.zero_mass()}, {"atoms", atoms}};
}

DiscretePrior prior_from_json(const json& j, double epsilon) {
  if (j.contains("heterogeneous")) {
    const json& h = j.at("heterogeneous");
    HeterogeneousFamily f;
    f.m = h.value("m", f.m);
    f.base = h.value("base", f.base);
    f.ratio = h.value("ratio", f.ratio);
    return f.prior(epsilon);
  }
  std::vector<Atom> atoms;
  for (const json& a : j.at("atoms")) atoms.push_back({a.at("value").get<double>(), a.at("weight").get<double>()});
  return DiscretePrior::from_conditional(std::move(atoms), epsilon);
}

// ---- boundary ----

int cmd_boundary(double delta, double epsilon, int samples, const OutputSpec& spec, std::ostream& out) {
  const ProblemShape shape(delta, epsilon);
  const BoundaryCurve curve = sample_lower_boundary(shape, samples);
  const double l1 = l1_value(shape);
  if (spec.format == "csv") {
    std::vector<std::vector<double>> rows;
    for (const BoundarySample& s : curve.samples) rows.push_back({s.u, s.q, l1, l2_value(s.u, shape)});
    emit(spec, csv_table({"u", "q", "l1", "l2"}, rows), out);
  } else {
    json rows = json::array();
    for (const BoundarySample& s : curve.samples) {
      rows.push_back({{"u", s.u}, {"q", s.q}, {"l1", l1}, {"l2", l2_value(s.u, shape)}});
    }
    emit(spec, dump({{"schema_version", kSchemaVersion}, {"delta", delta}, {"epsilon", epsilon},
                     {"u_star", u_star(shape)}, {"samples", rows}}),
         out);
  }
  return kExitOk;
}

// ---- dt ----

int cmd_dt(double delta, std::optional<double> epsilon, const OutputSpec& spec, std::ostream& out) {
  if (!(delta > 0.0)) throw DomainError("dt: delta must be positive");
  json j{{"schema_version", kSchemaVersion}, {"delta", delta}};
  if (delta >= 1.0) {
    j["always_below_transition"] = true;
    j["message"] = "delta >= 1: always below the transition (u_star = 1)";
  } else {
    const DtTransition dt = epsilon_star(delta);
    // Residuals not tied to epsilon come from any epsilon above the transition.
    const double eps = epsilon.value_or(0.5 * (dt.epsilon_star + 1.0));
    const DtIdentityResiduals r = dt_identity_residuals(delta, dt, eps);
    j["always_below_transition"] = false;
    j["epsilon_star"] = dt.epsilon_star;
    j["t_star"] = dt.t_star;
    j["residuals"] = {{"transition_equation", r.transition_equation},
                      {"density_ratio", r.density_ratio},
                      {"tail_mass", r.tail_mass},
                      {"lower_boundary_root", r.lower_boundary_root},
                      {"lower_boundary_epsilon", eps}};
  }
  if (spec.format == "csv") {
    if (delta >= 1.0) {
      emit(spec, csv_table({"delta", "always_below_transition"}, {{delta, 1.0}}), out);
    } else {
      const json& r = j["residuals"];
      emit(spec,
           csv_table({"delta", "epsilon_star", "t_star", "transition_equation", "density_ratio", "tail_mass",
                      "lower_boundary_root"},
                     {{delta, j["epsilon_star"].get<double>(), j["t_star"].get<double>(),
                       r["transition_equation"].get<double>(), r["density_ratio"].get<double>(),
                       r["tail_mass"].get<double>(), r["lower_boundary_root"].get<double>()}}),
           out);
    }
  } else {
    emit(spec, dump(j), out);
  }
  return kExitOk;
}

// ---- region ----

int cmd_region(double delta, double epsilon, int samples, const OutputSpec& spec, std::ostream& out) {
  const ProblemShape shape(delta, epsilon);
  const RegionSpec region = region_polygon(shape, samples);
  const std::vector<TradeoffPoint> vertices = region.vertices();
  if (spec.format == "csv") {
    std::vector<std::vector<double>> rows;
    for (const TradeoffPoint& v : vertices) rows.push_back({v.tpp, v.fdp});
    emit(spec, csv_table({"u", "q"}, rows), out);
    return kExitOk;
  }
  const CaseClassification cls = classify_case(shape);
  json verts = json::array();
  for (const TradeoffPoint& v : vertices) verts.push_back({v.tpp, v.fdp});
  json upper = json::array();
  for (const TradeoffPoint& v : region.upper_polyline) upper.push_back({v.tpp, v.fdp});
  json j{{"schema_version", kSchemaVersion},
         {"delta", delta},
         {"epsilon", epsilon},
         {"case", std::string(to_string(region.case_label))},
         {"active",
          {{"l1", cls.l1_active}, {"l2", cls.l2_active}, {"full_power_edge", cls.full_power_edge},
           {"power_ceiling", cls.power_ceiling}}},
         {"u_star", u_star(shape)},
         {"area", signed_area(vertices)},
         {"vertices", verts},
         {"upper_polyline", upper}};
  if (region.dt) j["dt"] = {{"epsilon_star", region.dt->epsilon_star}, {"t_star", region.dt->t_star}};
  emit(spec, dump(j), out);
  return kExitOk;
}

// ---- asymptotic ----

int cmd_asymptotic(const std::string& config_path, const OutputSpec& spec, std::ostream& out) {
  const json cfg = read_json_file(config_path);
  AsymptoticPath result = [&] {
    try {
      const ProblemShape shape(cfg.at("delta").get<double>(), cfg.at("epsilon").get<double>());
      const DiscretePrior prior = prior_from_json(cfg.at("prior"), shape.epsilon());
      const NoiseLevel sigma = sigma_from_json(cfg.at("sigma"));
      LambdaGrid grid;
      if (cfg.contains("lambda_grid")) {
        const json& g = cfg.at("lambda_grid");
        grid.lambda_min = g.value("min", grid.lambda_min);
        grid.lambda_max = g.value("max", grid.lambda_max);
        grid.n = g.value("n", grid.n);
        grid.log_spaced = g.value("log_spaced", grid.log_spaced);
      }
      return path(shape, prior, sigma, grid);
    } catch (const json::exception& e) {
      throw DomainError(std::string("asymptotic config: ") + e.what());
    }
  }();

  const double nan = std::nan("");
  if (spec.format == "csv") {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < result.grid.size(); ++i) {
      const bool ok = result.ok(i);
      rows.push_back({result.grid[i], ok ? result.se_points[i].alpha : nan, ok ? result.se_points[i].tau : nan,
                      ok ? result.points[i].tpp : nan, ok ? result.points[i].fdp : nan});
    }
    emit(spec, csv_table({"lambda", "alpha", "tau", "tpp", "fdp"}, rows), out);
  } else {
    json pts = json::array();
    for (std::size_t i = 0; i < result.grid.size(); ++i) {
      json p{{"lambda", result.grid[i]}, {"ok", result.ok(i)}};
      if (result.ok(i)) {
        p["alpha"] = result.se_points[i].alpha;
        p["tau"] = std::isinf(result.se_points[i].tau) ? json("inf") : json(result.se_points[i].tau);
        p["tpp"] = result.points[i].tpp;
        p["fdp"] = result.points[i].fdp;
      } else {
        p["error"] = result.errors[i];
      }
      pts.push_back(p);
    }
    json j{{"schema_version", kSchemaVersion},
           {"delta", result.shape.delta()},
           {"epsilon", result.shape.epsilon()},
           {"sigma", sigma_to_json(result.sigma)},
           {"prior", prior_to_json(result.prior)},
           {"failed_points", result.failed_count()},
           {"points", pts}};
    if (result.endpoints) {
      const EndpointLimits& e = *result.endpoints;
      j["endpoints"] = {{"lambda_to_0",
                         {{"tpp", e.lambda_to_0.point.tpp},
                          {"fdp", e.lambda_to_0.point.fdp},
                          {"alpha", e.lambda_to_0.se.alpha},
                          {"branch", std::string(to_string(e.branch))},
                          {"branch_residual", e.branch_residual}}},
                        {"lambda_to_inf",
                         {{"tpp", e.lambda_to_inf.point.tpp},
                          {"fdp", e.lambda_to_inf.point.fdp},
                          {"alpha", e.lambda_to_inf.se.alpha}}}};
    }
    emit(spec, dump(j), out);
  }
  return result.failed_count() == 0 ? kExitOk : kExitSolver;
}

// ---- simulate ----

int cmd_simulate(const std::string& config_path, const std::string& out_dir, double slack,
                 std::optional<int> threads, std::ostream& out) {
  std::vector<SimulationConfig> configs = simulation_configs_from_json(read_json_file(config_path));
  std::filesystem::create_directories(out_dir);
  json runs = json::array();
  for (SimulationConfig& c : configs) {
    if (threads) c.threads = *threads;
    const EmpiricalPath p = run(c);
    const std::string stem = "sim_n" + std::to_string(c.n) + "_sigma" + format_double(c.sigma);
    const std::filesystem::path dir(out_dir);
    emit({(dir / (stem + ".csv")).string(), "csv"}, to_csv(p), out);
    emit({(dir / (stem + ".json")).string(), "json"}, dump(to_json(p)), out);
    const ContainmentReport report = containment_report(p, c.shape(), slack);
    json r = to_json(report);
    r["file"] = stem + ".csv";
    r["n"] = c.n;
    r["sigma"] = c.sigma;
    r["failed_trials"] = p.failed_trials;
    r["failures"] = p.failures;
    runs.push_back(r);
    out << stem << ": fraction passing " << format_double(report.fraction_passing()) << ", failed trials "
        << p.failed_trials << "\n";
  }
  emit({(std::filesystem::path(out_dir) / "containment.json").string(), "json"},
       dump({{"schema_version", kSchemaVersion}, {"slack", slack}, {"runs", runs}}), out);
  return kExitOk;
}

// ---- achieve ----

int cmd_achieve(double delta, double epsilon, double tpp, double fdp, double tol, std::ostream& out) {
  const ProblemShape shape(delta, epsilon);
  const TradeoffPoint target{tpp, fdp};
  const AchievedParameters r = achieve_point(target, shape, tol);
  const TradeoffPoint check = tpp_fdp_infinity(shape, r.prior, NoiseLevel(r.sigma), r.lambda);
  out << dump({{"schema_version", kSchemaVersion},
               {"delta", delta},
               {"epsilon", epsilon},
               {"target", {{"tpp", tpp}, {"fdp", fdp}}},
               {"tol", tol},
               {"prior", prior_to_json(r.prior)},
               {"sigma", r.sigma},
               {"lambda", r.lambda},
               {"alpha", r.alpha},
               {"achieved", {{"tpp", check.tpp}, {"fdp", check.fdp}}},
               {"distance", std::hypot(check.tpp - tpp, check.fdp - fdp)}});
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lasso TPP-FDP tradeoff diagrams"};
  app.require_subcommand(1);

  double delta = 0.0, epsilon = 0.0, tpp = 0.0, fdp = 0.0, tol = 0.02, slack = 0.05;
  std::optional<double> dt_epsilon;
  int boundary_samples = 200;
  int region_samples = 128;
  std::optional<int> threads;
  std::string config, out_dir;

  auto* boundary = app.add_subcommand("boundary", "Lower boundary q* with l1 and l2 columns");
  boundary->add_option("--delta", delta, "n/p")->required();
  boundary->add_option("--epsilon", epsilon, "k/p")->required();
  boundary->add_option("--samples", boundary_samples, "Number of samples on [0, u*]")->check(CLI::Range(2, 1000000));
  OutputSpec boundary_spec;
  add_output_options(boundary, boundary_spec, "csv");

  auto* region = app.add_subcommand("region", "Feasible region polygon and case label");
  region->add_option("--delta", delta, "n/p")->required();
  region->add_option("--epsilon", epsilon, "k/p")->required();
  region->add_option("--samples", region_samples, "Samples on q*")->check(CLI::Range(16, 1000000));
  OutputSpec region_spec;
  add_output_options(region, region_spec, "json");

  auto* dt = app.add_subcommand("dt", "Transition epsilon* with identity residuals");
  dt->add_option("--delta", delta, "n/p")->required();
  dt->add_option("--epsilon", dt_epsilon, "Sparsity used for the lower-boundary residual");
  OutputSpec dt_spec;
  add_output_options(dt, dt_spec, "json");

  auto* asym = app.add_subcommand("asymptotic", "Limiting tradeoff curve over a lambda grid");
  asym->add_option("--config", config, "JSON config")->required()->check(CLI::ExistingFile);
  OutputSpec asym_spec;
  add_output_options(asym, asym_spec, "csv");

  auto* sim = app.add_subcommand("simulate", "Monte Carlo Lasso paths with a containment report");
  sim->add_option("--config", config, "JSON config")->required()->check(CLI::ExistingFile);
  sim->add_option("--out-dir", out_dir, "Directory for CSV/JSON outputs")->required();
  sim->add_option("--slack", slack, "Containment slack")->check(CLI::PositiveNumber);
  sim->add_option("--threads", threads, "Worker threads (0: hardware concurrency)")->check(CLI::NonNegativeNumber);

  auto* achieve = app.add_subcommand("achieve", "Find noise and penalty reaching a target point");
  achieve->add_option("--delta", delta, "n/p")->required();
  achieve->add_option("--epsilon", epsilon, "k/p")->required();
  achieve->add_option("--tpp", tpp, "Target tpp")->required();
  achieve->add_option("--fdp", fdp, "Target fdp")->required();
  achieve->add_option("--tol", tol, "Distance tolerance")->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (boundary->parsed()) return cmd_boundary(delta, epsilon, boundary_samples, boundary_spec, out);
    if (region->parsed()) return cmd_region(delta, epsilon, region_samples, region_spec, out);
    if (dt->parsed()) return cmd_dt(delta, dt_epsilon, dt_spec, out);
    if (asym->parsed()) return cmd_asymptotic(config, asym_spec, out);
    if (sim->parsed()) return cmd_simulate(config, out_dir, slack, threads, out);
    if (achieve->parsed()) return cmd_achieve(delta, epsilon, tpp, fdp, tol, out);
  } catch (const InfeasibleTarget& e) {
    err << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const SearchExhausted& e) {
    err << "solver error: " << e.what() << " (closest tpp " << format_double(e.closest().tpp) << ", fdp "
        << format_double(e.closest().fdp) << ")\n";
    return kExitSolver;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace lassodiag
