// Command-line driver: convergence sweeps, single runs, algorithm comparison,
// the wellbore sweep and mesh statistics.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>

#include "tpns/config.hpp"
#include "tpns/error.hpp"
#include "tpns/output.hpp"

using namespace tpns;

namespace {

struct Options {
  std::string config;
  std::string algorithm;
  int workers = 0; // 0: from the config
};

RunConfig load(const Options& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (o.workers > 0) c.workers = o.workers;
  if (o.algorithm == "traditional") c.algorithm = Algorithm::Traditional;
  else if (o.algorithm == "local-parallel") c.algorithm = Algorithm::LocalParallel;
  c.validate();
  return c;
}

std::string out_path(const RunConfig& c, const std::string& name) {
  std::filesystem::create_directories(c.output_dir);
  return (std::filesystem::path(c.output_dir) / name).string();
}

void log(const std::string& msg) { std::cerr << "[tpns] " << msg << "\n"; }

/// Unit-square benchmark meshes for one (h, H) pair.
struct MmsMeshes {
  Mesh coarse, fine;
};
MmsMeshes mms_meshes(const RunConfig& c) {
  Mesh coarse = build_rect_mesh(example1_domain(), c.H);
  Mesh fine = nested_fine_mesh(coarse, c.H, c.h);
  return {std::move(coarse), std::move(fine)};
}

void print_row(const ErrorRow& r) {
  std::printf("h=%g H=%g dt=%g  uc_h1=%.6g pF_h1=%.6g pf_l2=%.6g pf_h1=%.6g pm_l2=%.6g pm_h1=%.6g  (%.2fs)\n", r.h, r.H,
              r.dt, r.uc_h1, r.pF_h1, r.pf_l2, r.pf_h1, r.pm_l2, r.pm_h1, r.cpu_s);
}

int cmd_converge(const Options& o) {
  const RunConfig c = load(o);
  if (c.problem != ProblemKind::MmsExample1) throw InvariantViolation("converge needs problem kind mms_example1");
  SweepSettings s{c.model, c.step_config(), c.T};
  log(std::string("convergence sweep, ") + to_string(c.algorithm));
  const ErrorTable t = convergence_sweep(c.sweep_cases(), c.algorithm, s);
  const std::string path = out_path(c, std::string("converge-") + to_string(c.algorithm) + ".csv");
  write_csv(t, path);
  std::cout << error_table_csv(t);
  log("wrote " + path);
  return 0;
}

int cmd_run(const Options& o) {
  const RunConfig c = load(o);
  const std::string vtk = out_path(c, std::string("run-") + to_string(c.algorithm) + ".vtk");
  if (c.problem == ProblemKind::Wellbore) {
    const WellboreConfig wc = c.wellbore_config();
    const WellboreProblem w = build_wellbore_problem(wc);
    StepConfig step = w.step;
    step.workers = c.workers;
    if (c.algorithm == Algorithm::Traditional) {
      const auto run = run_traditional(w.fine, w.params, step, w.data, w.steps);
      std::printf("Q=%.9g  (%.2fs)\n", production_rate(run.state.u_c, run.disc->mesh()), run.stats.wall_s);
      write_vtk(run.state, run.disc->mesh(), vtk);
    } else {
      const auto run = run_local_parallel(w.coarse, w.fine, wc.layout, w.params, step, w.data, w.steps);
      std::printf("Q=%.9g  (%.2fs)\n",
                  production_rate(run.composite.vertex_field(CompositeSolution::Field::uc), run.fine->mesh()),
                  run.stats.wall_s);
      write_vtk(run.composite, vtk);
    }
  } else {
    const ManufacturedCase mc = example1_case(c.model);
    const ProblemData data = mc.data();
    const int steps = step_count(c.T, c.dt);
    const auto m = mms_meshes(c);
    ErrorRow row;
    if (c.algorithm == Algorithm::Traditional) {
      const auto run = run_traditional(m.fine, c.model, c.step_config(), data, steps);
      row = error_row(run, mc);
      write_vtk(run.state, run.disc->mesh(), vtk);
    } else {
      const auto run = run_local_parallel(m.coarse, m.fine, c.layout, c.model, c.step_config(), data, steps);
      row = error_row(run, mc);
      write_vtk(run.composite, vtk);
    }
    row.dt = c.dt;
    print_row(row);
  }
  log("wrote " + vtk);
  return 0;
}

int cmd_compare(const Options& o) {
  const RunConfig c = load(o);
  State a, b;
  double ta = 0.0, tb = 0.0;
  std::unique_ptr<Discretization> keep_a;
  LocalParallelRun lp;
  if (c.problem == ProblemKind::Wellbore) {
    const WellboreConfig wc = c.wellbore_config();
    const WellboreProblem w = build_wellbore_problem(wc);
    StepConfig step = w.step;
    step.workers = c.workers;
    auto tr = run_traditional(w.fine, w.params, step, w.data, w.steps);
    lp = run_local_parallel(w.coarse, w.fine, wc.layout, w.params, step, w.data, w.steps);
    a = tr.state;
    ta = tr.stats.wall_s;
    keep_a = std::move(tr.disc);
  } else {
    const ProblemData data = example1_case(c.model).data();
    const int steps = step_count(c.T, c.dt);
    const auto m = mms_meshes(c);
    auto tr = run_traditional(m.fine, c.model, c.step_config(), data, steps);
    lp = run_local_parallel(m.coarse, m.fine, c.layout, c.model, c.step_config(), data, steps);
    a = tr.state;
    ta = tr.stats.wall_s;
    keep_a = std::move(tr.disc);
  }
  b = lp.composite.vertex_state();
  tb = lp.stats.wall_s;
  const Mesh& mesh = keep_a->mesh();
  const std::pair<const char*, double> diffs[] = {
      {"p_F", relative_l2_difference(b.p_F, a.p_F, mesh)}, {"p_f", relative_l2_difference(b.p_f, a.p_f, mesh)},
      {"p_m", relative_l2_difference(b.p_m, a.p_m, mesh)}, {"u_c", relative_l2_difference(b.u_c, a.u_c, mesh)},
      {"p", relative_l2_difference(b.p, a.p, mesh)}};
  double worst = 0.0;
  for (const auto& [name, d] : diffs) {
    std::printf("%-4s relative L2 difference %.3e\n", name, d);
    worst = std::max(worst, d);
  }
  std::printf("max field difference %.3e\n", worst);
  std::printf("wall: traditional %.3fs, local-parallel %.3fs, ratio %.2f\n", ta, tb, tb > 0.0 ? ta / tb : 0.0);
  return 0;
}

int cmd_wellbore(const Options& o) {
  RunConfig c = load(o);
  const WellboreConfig wc = c.wellbore_config();
  const WellboreGeometry g = wellbore_geometry(wc);
  if (g.snapped)
    log("geometry snapped to conduit [" + std::to_string(g.conduit.x0) + ", " + std::to_string(g.conduit.x1) + "] x [" +
        std::to_string(g.conduit.y0) + ", " + std::to_string(g.conduit.y1) + "], outlet y in [" +
        std::to_string(g.outlet_y0) + ", " + std::to_string(g.outlet_y1) + "]");
  RateCurve all;
  std::map<double, std::pair<double, double>> q; // k_F -> (traditional, local-parallel)
  for (const Algorithm alg : {Algorithm::Traditional, Algorithm::LocalParallel}) {
    const RateCurve curve = sweep_kF(wc, c.k_F_values, alg, c.workers);
    for (const auto& p : curve.points) {
      all.points.push_back(p);
      (alg == Algorithm::Traditional ? q[p.k_F].first : q[p.k_F].second) = p.Q;
    }
  }
  const std::string path = out_path(c, "wellbore-rates.csv");
  write_csv(all, path);
  std::cout << rate_curve_csv(all);
  double prev = -1e300, worst = 0.0;
  bool increasing = true;
  for (const auto& [k, pair] : q) {
    increasing = increasing && pair.first > prev;
    prev = pair.first;
    worst = std::max(worst, std::abs(pair.second - pair.first) / std::abs(pair.first));
  }
  std::printf("Q strictly increasing: %s; max relative disagreement %.3e\n", increasing ? "yes" : "no", worst);
  log("wrote " + path);
  return 0;
}

void describe(const char* name, const Mesh& m) {
  std::map<EdgeTag, int> tags;
  for (const auto& e : m.edges) ++tags[e.tag];
  std::printf("%s mesh: h=%g vertices=%d cells=%d (porous %zu, conduit %zu)\n", name, m.h, m.n_vertices(), m.n_cells(),
              m.cells_in(Region::Porous).size(), m.cells_in(Region::Conduit).size());
  for (const auto& [tag, n] : tags) std::printf("  %s edges: %d\n", to_string(tag), n);
  const Discretization d(m, ModelParams{});
  std::printf("  dofs: porous %d (dirichlet %zu), velocity %d (dirichlet %zu), pressure %d\n", d.porous().n_dofs(),
              d.porous().dirichlet_set().size(), d.velocity().n_dofs(), d.velocity().dirichlet_set().size(),
              d.pressure().n_dofs());
}

int cmd_mesh_info(const Options& o) {
  const RunConfig c = load(o);
  Mesh coarse, fine;
  SubdomainLayout layout = c.layout;
  if (c.problem == ProblemKind::Wellbore) {
    WellboreProblem w = build_wellbore_problem(c.wellbore_config());
    coarse = std::move(w.coarse);
    fine = std::move(w.fine);
    layout = c.wellbore.layout;
  } else {
    auto m = mms_meshes(c);
    coarse = std::move(m.coarse);
    fine = std::move(m.fine);
  }
  describe("coarse", coarse);
  describe("fine", fine);
  const Decomposition dec = partition_subdomains(fine, layout);
  for (std::size_t j = 0; j < dec.subdomains.size(); ++j) {
    const auto& s = dec.subdomains[j];
    std::printf("  subdomain %zu (%s): core [%g,%g]x[%g,%g], extended [%g,%g]x[%g,%g], cells %zu, owned %zu, interface edges %zu\n",
                j, to_string(s.region), s.disjoint.x0, s.disjoint.x1, s.disjoint.y0, s.disjoint.y1, s.extended.x0,
                s.extended.x1, s.extended.y0, s.extended.y1, s.cells.size(), s.owned_cells.size(),
                s.interface_edges.size());
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Triple-porosity / Navier-Stokes solver with a local-parallel two-grid scheme"};
  Options o;
  bool print_defaults = false;
  app.add_flag("--print-defaults", print_defaults, "Print the default configuration and exit");
  app.add_option("--workers", o.workers, "Worker threads for subdomain solves and sweeps")->check(CLI::PositiveNumber);

  const auto with_config = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Configuration file")->required();
  };
  auto* converge = app.add_subcommand("converge", "Convergence sweep over the configured (h, H) rows");
  with_config(converge);
  converge->add_option("--algorithm", o.algorithm, "traditional or local-parallel")
      ->check(CLI::IsMember({"traditional", "local-parallel"}));
  auto* run = app.add_subcommand("run", "One run with the configured algorithm; writes VTK");
  with_config(run);
  auto* compare = app.add_subcommand("compare", "Run both algorithms and report field differences");
  with_config(compare);
  auto* wellbore = app.add_subcommand("wellbore", "Production rate sweep over k_F with both algorithms");
  with_config(wellbore);
  auto* mesh_info = app.add_subcommand("mesh-info", "Mesh, dof and subdomain statistics");
  with_config(mesh_info);
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (print_defaults) {
      std::cout << serialize_config(RunConfig{});
      return 0;
    }
    if (*converge) return cmd_converge(o);
    if (*run) return cmd_run(o);
    if (*compare) return cmd_compare(o);
    if (*wellbore) return cmd_wellbore(o);
    if (*mesh_info) return cmd_mesh_info(o);
    std::cerr << "usage error: a subcommand is required (see --help)\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
