#include "cmalab/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "cmalab/comparison.hpp"
#include "cmalab/degiorgi.hpp"
#include "cmalab/field_io.hpp"
#include "cmalab/functionals.hpp"
#include "cmalab/green.hpp"
#include "cmalab/solver_cma.hpp"
#include "cmalab/stability.hpp"
#include "cmalab/symplectic.hpp"

namespace cmalab {

using nlohmann::json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw Error(ErrorKind::Config, "field '" + field + "': " + what);
}

// Platform-independent uniform double in [0, 1) from the raw engine output.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

json default_params(const std::string& experiment, int n) {
  if (experiment == "linfty") return {{"s", 0.0}, {"ell", 64}, {"a", 1.0}, {"delta0", 0.25}};
  if (experiment == "entropy_energy") return {{"p", 0.5 * n}, {"alpha", 0.1}, {"delta0", 0.25}};
  if (experiment == "stability") return {{"p", n + 1.0}, {"K", 100.0}, {"levels", 9}, {"perturbation_seed", -1}};
  if (experiment == "green") return {{"source", 0}, {"q", default_green_q(n)}, {"s", default_green_s(n)}};
  if (experiment == "diameter") return json::object();
  if (experiment == "symplectic") return {{"eps_J", 0.2}, {"r0", 0.2}};
  if (experiment == "degiorgi_suite") return {{"count", 1000}};
  return json::object();
}

template <class T>
T get(const json& obj, const std::string& key, const std::string& path, T fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) field_error(path + key, "expected a string");
    return v.get<std::string>();
  } else if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) field_error(path + key, "expected true or false");
    return v.get<bool>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) field_error(path + key, "expected an integer");
    return v.get<T>();
  } else {
    if (!v.is_number()) field_error(path + key, "expected a number");
    return v.get<T>();
  }
}

void reject_unknown(const json& obj, std::initializer_list<const char*> known, const std::string& path) {
  if (!obj.is_object()) field_error(path.empty() ? "<root>" : path.substr(0, path.size() - 1), "expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; }))
      field_error(path + key, "unknown key");
  }
}

OperatorSpec make_spec(const ExperimentConfig& c) {
  if (c.operator_kind == "monge_ampere") return OperatorSpec::monge_ampere(c.n);
  if (c.operator_kind == "hessian") return OperatorSpec::hessian(c.n, c.operator_order);
  if (c.operator_kind == "pma") return OperatorSpec::pma(c.n, c.operator_order);
  field_error("operator.kind", "unknown operator '" + c.operator_kind + "'");
}

SolverOptions solver_options(const ExperimentConfig& c) {
  SolverOptions o;
  o.tol = c.solver_tol;
  return o;
}

json solve_json(const SolveReport& r) {
  return {{"iterations", r.iterations},
          {"final_residual", r.final_residual},
          {"positivity_margin", r.positivity_margin},
          {"rescale", r.rescale},
          {"linear_iterations", r.linear_iterations}};
}

json phi_json(const PhiReport& r) {
  return {{"max", r.max_value}, {"slack_scale", r.slack_scale}, {"tol", r.tol}, {"pass", r.pass}};
}

void add_profile(ExperimentOutcome& out, const SublevelProfile& p) {
  out.profile_header = {"s", "phi", "A"};
  for (std::size_t j = 0; j < p.s.size(); ++j) out.profile_rows.push_back({p.s[j], p.phi[j], p.A[j]});
}

double param(const ExperimentConfig& c, const char* key) { return c.params.at(key).get<double>(); }
int iparam(const ExperimentConfig& c, const char* key) { return c.params.at(key).get<int>(); }

struct Solved {
  TorusGrid grid;
  DensitySpec density;
  CmaSolution solution;
};

Solved solve_configured(const ExperimentConfig& c) {
  TorusGrid g(c.n, c.N);
  auto density = normalize_density(make_density(g, c.density), c.n);
  auto k = density.normalized.map([](double x) { return std::exp(x); });
  auto sol = solve_cma(g, make_spec(c), k, solver_options(c));
  return {g, std::move(density), std::move(sol)};
}

ExperimentOutcome run_linfty(const ExperimentConfig& c) {
  auto [g, density, sol] = solve_configured(c);
  const auto spec = make_spec(c);
  ExperimentOutcome out;
  const auto inst = run_comparison(spec, sol, param(c, "s"), iparam(c, "ell"), param(c, "a"),
                                   ComparisonVariant::Kahler, c.phi_tol, solver_options(c));
  const int n = c.n;
  const auto kn = sol.k_effective.map([n](double k) { return std::pow(k, n); });
  const auto prof = build_profile(sol.phi, kn, default_s_grid(sol.phi));
  const double delta0 = param(c, "delta0");
  LinftyReport chain;
  if (sol.phi.min() < 0.0) {
    const auto cert = verify_growth(prof.s, prof.phi, GrowthVariant::Decreasing, INFINITY, delta0);
    chain = linfty_from_profile(prof, cert.minimal_constant, delta0, sol.phi.min());
  } else {
    chain.delta0 = delta0;
    chain.pass = true;  // phi = 0: every sublevel set is empty and S0 = 0
  }
  const auto& k = inst.constants;
  out.report = {{"b", k.b},
                {"epsilon", k.epsilon},
                {"Lambda", k.Lambda},
                {"A", k.A},
                {"gamma", k.gamma},
                {"S0", chain.S0},
                {"B0", chain.B0},
                {"delta0", chain.delta0},
                {"sup_abs_phi", -sol.phi.min()},
                {"chain_pass", chain.pass},
                {"c_omega", density.c_omega},
                {"phi", phi_json(inst.phi_report)},
                {"halved", phi_json(inst.halved_report)},
                {"solve", solve_json(sol.report)},
                {"auxiliary_solve", solve_json(inst.aux_report)}};
  out.pass = inst.phi_report.pass && chain.pass;
  add_profile(out, prof);
  out.fields = {{"phi", sol.phi}, {"psi", inst.psi}};
  return out;
}

ExperimentOutcome run_entropy_energy(const ExperimentConfig& c) {
  auto [g, density, sol] = solve_configured(c);
  ExperimentOutcome out;
  const double p = param(c, "p");
  const double alpha = param(c, "alpha");
  const double delta0 = param(c, "delta0");
  const auto ent = entropy_report(density.normalized, p, c.n, density.c_omega, sol.phi);
  const double q = trudinger_exponent(c.n, p);
  const auto tr = trudinger_energy_check(sol.phi, density.normalized, p, q, alpha);
  const auto young = young_split(sol.phi.map([](double x) { return -x; }), density.normalized, p, c.n);
  const int n = c.n;
  const auto kn = sol.k_effective.map([n](double k) { return std::pow(k, n); });
  const auto prof = build_profile(sol.phi, kn, default_s_grid(sol.phi));
  double b0 = 0.0;
  for (std::size_t j = 0; j < prof.s.size(); ++j)
    if (prof.phi[j] > 0.0) b0 = std::max(b0, prof.A[j] / std::pow(prof.phi[j], 1.0 + delta0));
  out.report = {{"ent_p", ent.ent_p},
                {"nash_p", ent.nash_p},
                {"energy", ent.energy},
                {"c_omega", ent.c_omega},
                {"q", q},
                {"exponential_integral", tr.exponential},
                {"moment", tr.moment},
                {"young_constant", young.c_p},
                {"young_worst_ratio", young.worst_ratio},
                {"young_pass", young.pass},
                {"B0_empirical", b0},
                {"sup_abs_phi", -sol.phi.min()},
                {"solve", solve_json(sol.report)}};
  out.pass = young.pass && std::isfinite(tr.exponential) && std::isfinite(tr.moment) && std::isfinite(b0);
  add_profile(out, prof);
  out.fields = {{"phi", sol.phi}};
  return out;
}

ExperimentOutcome run_stability_experiment(const ExperimentConfig& c) {
  TorusGrid g(c.n, c.N);
  DensityRecipe other = c.density;
  const auto pseed = c.params.at("perturbation_seed").get<std::int64_t>();
  other.seed = pseed < 0 ? c.density.seed + 1 : static_cast<std::uint64_t>(pseed);
  const auto f = make_density(g, c.density);
  const auto ft = make_density(g, other);
  const auto sw = stability_sweep(f, ft, param(c, "p"), param(c, "K"), iparam(c, "levels"), solver_options(c));
  ExperimentOutcome out;
  json rows = json::array();
  out.profile_header = {"t", "distance", "gap", "ratio", "C"};
  for (const auto& r : sw.rows) {
    rows.push_back({{"t", r.t}, {"distance", r.distance}, {"gap", r.gap}, {"ratio", r.ratio}});
    out.profile_rows.push_back({r.t, r.distance, r.gap, r.ratio, sw.C});
  }
  const bool slope_ok = sw.slope >= sw.beta_ref - 0.05;
  out.report = {{"beta_ref", sw.beta_ref}, {"C", sw.C},           {"slope", sw.slope},
                {"worst_excess", sw.worst_excess}, {"monotone", sw.monotone}, {"slope_pass", slope_ok},
                {"rows", rows}};
  out.pass = sw.pass && slope_ok;
  return out;
}

ExperimentOutcome run_green(const ExperimentConfig& c) {
  TorusGrid g(c.n, c.N);
  const auto metric = MetricField::conformal(make_density(g, c.density));
  const auto source = static_cast<std::size_t>(iparam(c, "source"));
  if (source >= g.size()) field_error("params.source", "node index outside the grid");
  const auto slice = green_slice(metric, source);
  const auto norms = green_norms(metric, slice, param(c, "q"), param(c, "s"));
  const auto inf = green_lower_bound(slice);
  ExperimentOutcome out;
  out.report = {{"source", source},
                {"residual", slice.residual},
                {"weighted_mean", slice.weighted_mean},
                {"iterations", slice.iterations},
                {"lq", norms.lq},
                {"grad_ls", norms.grad_ls},
                {"infimum", inf.value},
                {"infimum_node", inf.node},
                {"volume", metric.volume()}};
  out.pass = slice.residual <= 1e-6 && std::abs(slice.weighted_mean) <= 1e-10;
  out.profile_header = {"node", "G"};
  for (std::size_t i = 0; i < g.size(); ++i) out.profile_rows.push_back({static_cast<double>(i), slice.values[i]});
  out.fields = {{"green", ScalarField(g, slice.values)}};
  return out;
}

ExperimentOutcome run_diameter(const ExperimentConfig& c) {
  TorusGrid g(c.n, c.N);
  const auto metric = MetricField::conformal(make_density(g, c.density));
  const auto d = diameter_bound(metric);
  ExperimentOutcome out;
  out.report = {{"diameter", d.true_diameter}, {"x0", d.x0}, {"y0", d.y0}, {"grad_x0", d.grad_x0},
                {"grad_y0", d.grad_y0},        {"bound", d.bound}, {"volume", metric.volume()}};
  out.pass = d.pass;
  const auto dist = graph_distances(metric, d.x0);
  out.profile_header = {"node", "distance_from_x0"};
  for (std::size_t i = 0; i < g.size(); ++i) out.profile_rows.push_back({static_cast<double>(i), dist[i]});
  return out;
}

ExperimentOutcome run_symplectic(const ExperimentConfig& c) {
  TorusGrid g(c.n, c.N);
  const auto fam = surface_family(g, param(c, "eps_J"), make_density(g, c.density));
  MainnewOptions opt;
  opt.r0 = param(c, "r0");
  opt.tol = c.phi_tol;
  const auto r = run_mainnew(fam.data, fam.F, opt);
  json comps = json::array();
  for (const auto& m : r.comparisons)
    comps.push_back({{"s", m.s},
                     {"ell", m.ell},
                     {"A", m.A},
                     {"b", m.constants.b},
                     {"epsilon", m.constants.epsilon},
                     {"Lambda", m.constants.Lambda},
                     {"abp_pass", m.abp.pass},
                     {"gradient_pass", m.gradient.pass},
                     {"phi", phi_json(m.phi_report)},
                     {"halved", phi_json(m.halved_report)},
                     {"chain_ratio", m.chain_ratio},
                     {"interior_ratio", m.interior_ratio},
                     {"rma_iterations", m.rma_iterations},
                     {"rma_residual", m.rma_residual}});
  json stages = json::object();
  for (const auto& [name, ok] : r.stages) stages[name] = ok;
  const auto& v = r.validation;
  ExperimentOutcome out;
  out.report = {{"eta", r.eta},
                {"r0", r.r0},
                {"s0", r.s0},
                {"K", r.K},
                {"C_J", r.cj.C_J},
                {"C2", r.C2},
                {"C_ng", r.C_ng},
                {"C1", r.C1},
                {"Lambda_bar", r.Lambda_bar},
                {"C3", r.C3},
                {"C4", r.C4},
                {"c0", r.c0},
                {"C5", r.C5},
                {"C6", r.C6},
                {"C7", r.C7},
                {"C8", r.C8},
                {"phi_s0", r.phi_s0},
                {"A_s0", r.A_s0},
                {"additional_ratio", r.additional_ratio},
                {"growth_minimal_constant", r.growth.minimal_constant},
                {"sup_abs_phi", r.sup_abs_phi},
                {"l1_phi", r.l1_phi},
                {"final_bound", r.final_bound},
                {"phi_residual", r.phi_residual},
                {"containment_defect", r.containment_defect},
                {"validation",
                 {{"j_square", v.j_square},
                  {"taming", v.taming},
                  {"omega_closed", v.omega_closed},
                  {"compatibility", v.compatibility},
                  {"antisymmetry", v.antisymmetry},
                  {"tilde_closed", v.tilde_closed}}},
                {"comparisons", comps},
                {"stages", stages}};
  out.pass = r.pass;
  out.profile_header = {"s", "phi", "A"};
  for (std::size_t j = 0; j < r.profile_s.size(); ++j)
    out.profile_rows.push_back({r.profile_s[j], r.profile_phi[j], r.profile_A[j]});
  out.fields = {{"F", fam.F}};
  return out;
}

ExperimentOutcome run_degiorgi_suite(const ExperimentConfig& c) {
  std::mt19937_64 rng(c.density.seed);
  const int count = iparam(c, "count");
  ExperimentOutcome out;
  out.profile_header = {"trial", "increasing", "delta", "constant", "bound", "value"};
  int dec_violations = 0, inc_violations = 0;
  for (int trial = 0; trial < count; ++trial) {
    // decreasing: geometric random decay to zero, S0 must lie beyond the support
    const int K = 2 + static_cast<int>(unit(rng) * 40);
    std::vector<double> s(K), phi(K);
    double x = 0.0, f = 0.1 + 2.0 * unit(rng);
    for (int i = 0; i < K; ++i) {
      s[i] = x;
      phi[i] = f;
      x += 0.01 + unit(rng);
      f *= unit(rng);
    }
    phi.back() = 0.0;
    double delta = 0.05 + 2.0 * unit(rng);
    double B = verify_growth(s, phi, GrowthVariant::Decreasing, INFINITY, delta).minimal_constant *
               (1.0 + 3.0 * unit(rng));
    const double S0 = vanishing_bound(B, delta, phi.front());
    const double at = step_value(s, phi, GrowthVariant::Decreasing, S0);
    if (at != 0.0) ++dec_violations;
    out.profile_rows.push_back({static_cast<double>(trial), 0.0, delta, B, S0, at});

    // increasing: phi(s_last) must stay above c0
    const int L = 1 + static_cast<int>(unit(rng) * 40);
    std::vector<double> t(L), psi(L);
    double y = 0.0, h = 1e-3 * (0.01 + unit(rng));
    for (int i = 0; i < L; ++i) {
      y += 0.01 + unit(rng);
      h *= 1.0 + 4.0 * unit(rng);
      t[i] = y;
      psi[i] = h;
    }
    delta = 0.05 + 2.0 * unit(rng);
    B = verify_growth(t, psi, GrowthVariant::Increasing, INFINITY, delta).minimal_constant * (1.0 + 3.0 * unit(rng));
    const double c0 = lower_bound(B, delta, t.back());
    if (psi.back() < c0) ++inc_violations;
    out.profile_rows.push_back({static_cast<double>(trial), 1.0, delta, B, c0, psi.back()});
  }
  out.report = {{"count", count}, {"decreasing_violations", dec_violations}, {"increasing_violations", inc_violations}};
  out.pass = dec_violations == 0 && inc_violations == 0;
  return out;
}

void write_csv_number(std::ostream& os, double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  os.write(buf, end - buf);
}

}  // namespace

json ExperimentConfig::to_json() const {
  return {{"experiment", experiment},
          {"grid", {{"n", n}, {"N", N}}},
          {"operator", {{"kind", operator_kind}, {"order", operator_order}}},
          {"density", {{"kind", density.kind}, {"amplitude", density.amplitude}, {"modes", density.modes},
                       {"seed", density.seed}}},
          {"tolerances", {{"solver", solver_tol}, {"phi", phi_tol}}},
          {"output", {{"dir", out_dir}, {"dump_fields", dump_fields}}},
          {"params", params}};
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"linfty",   "entropy_energy", "stability",     "green",
                                              "diameter", "symplectic",     "degiorgi_suite"};
  return names;
}

ExperimentConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const auto before = text.substr(0, upto);
    const auto line = 1 + std::count(before.begin(), before.end(), '\n');
    const auto last_nl = before.rfind('\n');
    const auto column = upto - (last_nl == std::string_view::npos ? 0 : last_nl + 1) + 1;
    std::ostringstream os;
    os << "line " << line << ", column " << column << ": syntax error";
    throw Error(ErrorKind::Config, os.str());
  }
  reject_unknown(root, {"experiment", "grid", "operator", "density", "tolerances", "output", "params"}, "");
  ExperimentConfig c;
  if (!root.contains("experiment")) field_error("experiment", "missing");
  c.experiment = get<std::string>(root, "experiment", "", "");
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), c.experiment) == names.end())
    field_error("experiment", "unknown experiment '" + c.experiment + "'");

  const json empty = json::object();
  const json& grid = root.contains("grid") ? root.at("grid") : empty;
  reject_unknown(grid, {"n", "N"}, "grid.");
  c.n = get<int>(grid, "n", "grid.", c.n);
  c.N = get<int>(grid, "N", "grid.", c.N);
  if (c.n < 1 || c.n > kMaxRealDim / 2) field_error("grid.n", "complex dimension must be 1..4");
  if (c.N < 4 || c.N % 2 != 0) field_error("grid.N", "nodes per axis must be even and at least 4");

  const json& op = root.contains("operator") ? root.at("operator") : empty;
  reject_unknown(op, {"kind", "order"}, "operator.");
  c.operator_kind = get<std::string>(op, "kind", "operator.", c.operator_kind);
  c.operator_order = get<int>(op, "order", "operator.", c.operator_order);
  try {
    make_spec(c);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    field_error("operator", e.what());
  }

  const json& dens = root.contains("density") ? root.at("density") : empty;
  reject_unknown(dens, {"kind", "amplitude", "modes", "seed"}, "density.");
  c.density.kind = get<std::string>(dens, "kind", "density.", c.density.kind);
  c.density.amplitude = get<double>(dens, "amplitude", "density.", c.density.amplitude);
  c.density.modes = get<int>(dens, "modes", "density.", c.density.modes);
  if (dens.contains("seed")) {
    if (!dens.at("seed").is_number_unsigned()) field_error("density.seed", "expected a nonnegative integer");
    c.density.seed = dens.at("seed").get<std::uint64_t>();
  }
  if (c.density.kind != "constant" && c.density.kind != "cosine" && c.density.kind != "random_modes")
    field_error("density.kind", "expected constant, cosine or random_modes");
  if (c.density.modes < 1) field_error("density.modes", "must be positive");
  if (!std::isfinite(c.density.amplitude)) field_error("density.amplitude", "must be finite");

  const json& tol = root.contains("tolerances") ? root.at("tolerances") : empty;
  reject_unknown(tol, {"solver", "phi"}, "tolerances.");
  c.solver_tol = get<double>(tol, "solver", "tolerances.", c.solver_tol);
  c.phi_tol = get<double>(tol, "phi", "tolerances.", c.phi_tol);
  if (!(c.solver_tol > 0.0)) field_error("tolerances.solver", "must be positive");
  if (!(c.phi_tol > 0.0)) field_error("tolerances.phi", "must be positive");

  const json& output = root.contains("output") ? root.at("output") : empty;
  reject_unknown(output, {"dir", "dump_fields"}, "output.");
  c.out_dir = get<std::string>(output, "dir", "output.", c.out_dir);
  c.dump_fields = get<bool>(output, "dump_fields", "output.", c.dump_fields);

  c.params = default_params(c.experiment, c.n);
  if (root.contains("params")) {
    const json& p = root.at("params");
    if (!p.is_object()) field_error("params", "expected an object");
    for (const auto& [key, value] : p.items()) {
      if (!c.params.contains(key)) field_error("params." + key, "unknown parameter for " + c.experiment);
      if (c.params[key].is_number_integer() && !value.is_number_integer())
        field_error("params." + key, "expected an integer");
      if (!value.is_number()) field_error("params." + key, "expected a number");
      c.params[key] = value;
    }
  }
  if (c.experiment == "symplectic" && c.n != 1) field_error("grid.n", "symplectic runs on surfaces (n = 1)");
  if (c.experiment == "diameter" && TorusGrid(c.n, c.N).size() > 16384)
    field_error("grid.N", "diameter needs at most 16384 nodes");
  if (c.experiment == "entropy_energy" && !(param(c, "p") > 0.0 && param(c, "p") < c.n))
    field_error("params.p", "Trudinger exponent needs 0 < p < n");
  if (c.experiment == "stability" && !(param(c, "p") > c.n)) field_error("params.p", "stability needs p > n");
  if (c.experiment == "degiorgi_suite" && iparam(c, "count") < 1) field_error("params.count", "must be positive");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::Config, "cannot open config " + path.string());
  std::ostringstream text;
  text << is.rdbuf();
  return parse_config(text.str());
}

ScalarField make_density(const TorusGrid& grid, const DensityRecipe& recipe) {
  if (recipe.kind == "constant") return ScalarField::constant(grid, recipe.amplitude);
  if (recipe.kind == "cosine")
    return ScalarField::from_function(grid, [&](const Point& x) {
      return recipe.amplitude * std::cos(kTwoPi * x[0]) * std::cos(kTwoPi * x[1]);
    });
  require(recipe.kind == "random_modes", ErrorKind::Argument, "unknown density recipe '" + recipe.kind + "'");
  const int m = grid.real_dim();
  std::mt19937_64 rng(recipe.seed);
  struct Mode {
    std::array<int, kMaxRealDim> k{};
    double weight = 0.0, phase = 0.0;
  };
  std::vector<Mode> modes(recipe.modes);
  double total = 0.0;
  for (auto& mode : modes) {
    bool zero = true;
    while (zero) {
      for (int a = 0; a < m; ++a) {
        mode.k[a] = static_cast<int>(rng() % 5) - 2;
        zero = zero && mode.k[a] == 0;
      }
    }
    mode.weight = 2.0 * unit(rng) - 1.0;
    mode.phase = kTwoPi * unit(rng);
    total += std::abs(mode.weight);
  }
  const double scale = total > 0.0 ? recipe.amplitude / total : 0.0;
  return ScalarField::from_function(grid, [&](const Point& x) {
    double acc = 0.0;
    for (const auto& mode : modes) {
      double arg = mode.phase;
      for (int a = 0; a < m; ++a) arg += kTwoPi * mode.k[a] * x[a];
      acc += mode.weight * std::cos(arg);
    }
    return scale * acc;
  });
}

ExperimentOutcome run_experiment(const ExperimentConfig& config) {
  static const std::map<std::string, ExperimentOutcome (*)(const ExperimentConfig&)> runners{
      {"linfty", run_linfty},         {"entropy_energy", run_entropy_energy},
      {"stability", run_stability_experiment}, {"green", run_green},
      {"diameter", run_diameter},     {"symplectic", run_symplectic},
      {"degiorgi_suite", run_degiorgi_suite}};
  const auto it = runners.find(config.experiment);
  require(it != runners.end(), ErrorKind::Config, "unknown experiment '" + config.experiment + "'");
  ExperimentOutcome out = it->second(config);
  out.report = {{"experiment", config.experiment}, {"pass", out.pass}, {"config", config.to_json()},
                {"results", out.report}};
  return out;
}

void write_outputs(const ExperimentOutcome& outcome, const std::filesystem::path& dir, bool dump_fields) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create output directory " + dir.string() + ": " + ec.message());
  {
    std::ofstream os(dir / "report.json");
    if (!os) throw Error(ErrorKind::Io, "cannot write report.json");
    os << outcome.report.dump(2) << '\n';
  }
  {
    std::ofstream os(dir / "profile.csv");
    if (!os) throw Error(ErrorKind::Io, "cannot write profile.csv");
    for (std::size_t j = 0; j < outcome.profile_header.size(); ++j)
      os << (j ? "," : "") << outcome.profile_header[j];
    os << '\n';
    for (const auto& row : outcome.profile_rows) {
      for (std::size_t j = 0; j < row.size(); ++j) {
        if (j) os << ',';
        write_csv_number(os, row[j]);
      }
      os << '\n';
    }
  }
  if (dump_fields)
    for (const auto& [name, field] : outcome.fields) write_field(dir / (name + ".field"), field, FieldEncoding::Binary);
}

}  // namespace cmalab
