// anisocap: command-line front end for the anisotropic capillary toolkit.
//
// Exit codes: 0 success, 2 validation error, 3 numerical-acceptance failure,
// 64 unknown subcommand, 66 unreadable config file.

#include "anisocap/bernstein.hpp"
#include "anisocap/flow.hpp"
#include "anisocap/generators.hpp"
#include "anisocap/stability.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <string>

using namespace anisocap;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitUnknownCommand = 64;
constexpr int kExitBadConfig = 66;

int verbosity() {
  const char* env = std::getenv("ANISOCAP_VERBOSE");
  return env ? std::atoi(env) : 0;
}

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Experiment configuration
// ---------------------------------------------------------------------------

struct Options {
  std::string config_path;
  std::string aniso = "iso";
  std::vector<double> Qvals;
  double eps = 0.1;
  double omega0 = 0.0;
  std::size_t sphere_samples = 20000;
  unsigned seed = 0;

  std::string mesh_path;
  int res = 0;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config_path,
                  "JSON experiment config; command-line flags override its fields");
  cmd->add_option("--aniso", o.aniso,
                  "iso | ell | perturbed, an inline JSON object, or a path to one");
  cmd->add_option("--Q", o.Qvals, "ellipsoidal matrix: 3 diagonal or 9 row-major entries")
      ->expected(3, 9);
  cmd->add_option("--eps", o.eps, "perturbed-sphere amplitude");
  cmd->add_option("--omega0", o.omega0, "contact parameter");
  cmd->add_option("--samples", o.sphere_samples, "sphere-lattice samples for the gauge bounds");
  cmd->add_option("--seed", o.seed, "seed for every random generator in the run");
}

void add_mesh_source(CLI::App* cmd, Options& o) {
  cmd->add_option("--mesh", o.mesh_path, "input mesh (OFF or OBJ)");
  cmd->add_option("--res", o.res, "generate a Wulff cap at this ring resolution instead");
}

// Validates the experiment config against the structure published in
// docs/config.schema.json: known keys only, correctly typed.
void apply_config_file(Options& o, const std::set<std::string>& cli_given) {
  if (o.config_path.empty()) return;
  std::ifstream in(o.config_path);
  if (!in) throw ConfigError("cannot open config file: " + o.config_path);
  json cfg;
  try {
    in >> cfg;
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!cfg.is_object()) throw std::invalid_argument("config root must be a JSON object");
  static const std::set<std::string> allowed = {"anisotropy", "omega0", "seed",
                                               "sphere_samples", "mesh", "resolution"};
  for (const auto& [key, value] : cfg.items()) {
    (void)value;
    if (!allowed.count(key)) throw std::invalid_argument("unknown config key: " + key);
  }
  auto overridden = [&](const std::string& flag) { return cli_given.count(flag) != 0; };
  if (cfg.contains("anisotropy")) {
    if (!cfg["anisotropy"].is_object())
      throw std::invalid_argument("config field 'anisotropy' must be an object");
    if (!overridden("--aniso")) o.aniso = cfg["anisotropy"].dump();
  }
  if (cfg.contains("omega0")) {
    if (!cfg["omega0"].is_number()) throw std::invalid_argument("config field 'omega0' must be a number");
    if (!overridden("--omega0")) o.omega0 = cfg["omega0"].get<double>();
  }
  if (cfg.contains("seed")) {
    if (!cfg["seed"].is_number_unsigned())
      throw std::invalid_argument("config field 'seed' must be a non-negative integer");
    if (!overridden("--seed")) o.seed = cfg["seed"].get<unsigned>();
  }
  if (cfg.contains("sphere_samples")) {
    if (!cfg["sphere_samples"].is_number_unsigned())
      throw std::invalid_argument("config field 'sphere_samples' must be a non-negative integer");
    if (!overridden("--samples")) o.sphere_samples = cfg["sphere_samples"].get<std::size_t>();
  }
  if (cfg.contains("mesh")) {
    if (!cfg["mesh"].is_string()) throw std::invalid_argument("config field 'mesh' must be a string");
    if (!overridden("--mesh")) o.mesh_path = cfg["mesh"].get<std::string>();
  }
  if (cfg.contains("resolution")) {
    if (!cfg["resolution"].is_number_integer())
      throw std::invalid_argument("config field 'resolution' must be an integer");
    if (!overridden("--res")) o.res = cfg["resolution"].get<int>();
  }
}

Anisotropy make_anisotropy(const Options& o) {
  if (o.aniso == "iso" || o.aniso == "isotropic") return Anisotropy::isotropic();
  if (o.aniso == "ell" || o.aniso == "ellipsoidal") {
    Mat3 Q = Vec3(4.0, 1.0, 1.0).asDiagonal();
    if (o.Qvals.size() == 3)
      Q = Vec3(o.Qvals[0], o.Qvals[1], o.Qvals[2]).asDiagonal();
    else if (o.Qvals.size() == 9)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) Q(i, j) = o.Qvals[3 * i + j];
    else if (!o.Qvals.empty())
      throw std::invalid_argument("--Q takes 3 or 9 values");
    return Anisotropy::ellipsoidal(Q);
  }
  if (o.aniso == "perturbed" || o.aniso == "perturbed-sphere")
    return Anisotropy::perturbed_sphere(o.eps);
  if (!o.aniso.empty() && o.aniso.front() == '{') return Anisotropy::from_json(o.aniso);
  std::ifstream in(o.aniso);
  if (!in) throw ConfigError("cannot open anisotropy file: " + o.aniso);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return Anisotropy::from_json(text);
}

CapillaryMesh load_or_generate(const Options& o, const Anisotropy& aniso,
                               const HalfSpaceConfig& config) {
  if (!o.mesh_path.empty() && o.res > 0)
    throw std::invalid_argument("give either --mesh or --res, not both");
  if (!o.mesh_path.empty()) return read_mesh(o.mesh_path);
  if (o.res > 0) return build_truncated_wulff(aniso, config, o.res);
  throw std::invalid_argument("a surface source is required: --mesh or --res");
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write: " + path);
  out << text;
}

double two_grid_slope(double coarse, double fine, double ratio) {
  if (fine == 0.0 || coarse == 0.0) return std::numeric_limits<double>::infinity();
  return std::log(std::abs(coarse / fine)) / std::log(ratio);
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int run_wulff_gen(const Options& o, int res, const std::string& out_path) {
  const Anisotropy aniso = make_anisotropy(o);
  const HalfSpaceConfig config = make_config(aniso, o.omega0, o.sphere_samples);
  const CapillaryMesh mesh = build_truncated_wulff(aniso, config, res);
  if (!out_path.empty()) write_mesh(mesh, out_path);
  std::printf("vertices %d faces %d\n", mesh.vertex_count(), mesh.face_count());
  std::printf("capillary residual %.6e\n", wulff_capillary_residual(mesh, aniso, config));
  std::printf("stationarity residual %.6e\n", wulff_stationarity_residual(mesh, aniso, config));
  return kExitOk;
}

int run_state(const Options& o, const std::string& out_path) {
  const Anisotropy aniso = make_anisotropy(o);
  const HalfSpaceConfig config = make_config(aniso, o.omega0, o.sphere_samples);
  const CapillaryMesh mesh = load_or_generate(o, aniso, config);
  const GeometricState st = compute_state(mesh, aniso, config);

  double mean_HF = 0.0, area = st.total_area();
  for (std::size_t v = 0; v < st.HF.size(); ++v) mean_HF += st.vertex_area[v] * st.HF[v];
  mean_HF /= area;
  double dev = 0.0;
  for (double h : st.HF) dev = std::max(dev, std::abs(h - mean_HF));
  std::printf("area %.12f volume %.12f wetted %.12f\n", area, enclosed_volume(mesh),
              wetted_area(mesh));
  std::printf("mean H_F %.8f  sup deviation %.3e  qF discrepancy %.3e\n", mean_HF, dev,
              st.qF_discrepancy);

  if (!out_path.empty()) {
    json j;
    auto dump_scalar = [&](const char* name, const std::vector<double>& f) { j[name] = f; };
    auto dump_vec = [&](const char* name, const std::vector<Vec3>& f) {
      auto& arr = j[name] = json::array();
      for (const auto& x : f) arr.push_back({x.x(), x.y(), x.z()});
    };
    dump_vec("normal", st.normal);
    dump_scalar("H", st.mean_curvature);
    dump_scalar("HF", st.HF);
    dump_scalar("tr_hF2", st.tr_hF2);
    dump_scalar("tr_AF_h2", st.tr_AF_h2);
    dump_scalar("F_nu", st.F_nu);
    dump_scalar("vertex_area", st.vertex_area);
    dump_vec("conormal", st.conormal);
    dump_scalar("qF", st.qF);
    write_text(out_path, j.dump(1));
  }
  return kExitOk;
}

int run_energy(const Options& o, int ladder, const std::string& csv_path) {
  const Anisotropy aniso = make_anisotropy(o);
  const HalfSpaceConfig config = make_config(aniso, o.omega0, o.sphere_samples);
  CapillaryMesh mesh = load_or_generate(o, aniso, config);
  std::string csv = "level,faces,area_term,wetting_term,total,volume,gradient_norm\n";
  double prev_total = 0.0;
  for (int level = 0; level <= ladder; ++level) {
    if (level > 0) {
      if (o.res > 0)
        mesh = build_truncated_wulff(aniso, config, o.res << level);
      else
        mesh = refine_uniform(mesh);
    }
    const EnergyBreakdown e = energy(mesh, aniso, config);
    const GeometricState st = compute_state(mesh, aniso, config);
    const VariationField var = first_variation(mesh, aniso, config, st);
    double gnorm = 0.0;
    for (const auto& g : var.gradient) gnorm += g.squaredNorm();
    gnorm = std::sqrt(gnorm);
    std::printf("level %d  faces %d  E = %.10f  (area %.10f + wetting %.10f)  V = %.10f  |dE| = %.3e\n",
                level, mesh.face_count(), e.total, e.area_term, e.wetting_term, e.volume, gnorm);
    char row[256];
    std::snprintf(row, sizeof row, "%d,%d,%.12e,%.12e,%.12e,%.12e,%.12e\n", level,
                  mesh.face_count(), e.area_term, e.wetting_term, e.total, e.volume, gnorm);
    csv += row;
    if (level > 0 && prev_total != 0.0)
      std::printf("  energy increment %.3e\n", e.total - prev_total);
    prev_total = e.total;
  }
  if (!csv_path.empty()) write_text(csv_path, csv);
  return kExitOk;
}

int run_minkowski(const Options& o, int ladder, double expect) {
  const Anisotropy aniso = make_anisotropy(o);
  const HalfSpaceConfig config = make_config(aniso, o.omega0, o.sphere_samples);
  CapillaryMesh mesh = load_or_generate(o, aniso, config);
  double prev = 0.0, last = 0.0;
  for (int level = 0; level <= ladder; ++level) {
    if (level > 0) {
      if (o.res > 0)
        mesh = build_truncated_wulff(aniso, config, o.res << level);
      else
        mesh = refine_uniform(mesh);
    }
    const GeometricState st = compute_state(mesh, aniso, config);
    const MinkowskiReport rep = minkowski_residual(st, mesh, aniso, config);
    std::printf("level %d  faces %d  normalized residual %.6e  (capillary residual %.2e%s)\n",
                level, mesh.face_count(), rep.normalized, rep.capillary_residual,
                rep.guaranteed ? "" : ", identity not guaranteed");
    if (level > 0)
      std::printf("  refinement slope %.2f\n", two_grid_slope(prev, rep.normalized, 2.0));
    prev = rep.normalized;
    last = rep.normalized;
  }
  if (expect > 0.0 && std::abs(last) > expect) {
    std::fprintf(stderr, "minkowski residual %.3e exceeds --expect %.3e\n", last, expect);
    return kExitNumerical;
  }
  return kExitOk;
}

int run_spectrum(const Options& o, int k, const std::string& mode_name, double band,
                 bool expect_stable, const std::string& out_path,
                 const std::string& matrix_prefix) {
  const Anisotropy aniso = make_anisotropy(o);
  const HalfSpaceConfig config = make_config(aniso, o.omega0, o.sphere_samples);
  const CapillaryMesh mesh = load_or_generate(o, aniso, config);
  const GeometricState st = compute_state(mesh, aniso, config);
  const StabilityForm form = assemble(mesh, st, aniso, config);
  const ConstraintMode mode =
      mode_name == "strong" ? ConstraintMode::Unconstrained : ConstraintMode::MeanZero;
  const StabilityReport rep = spectrum(form, k, mode, band);

  std::printf("mode %s  dofs %zu\n", mode_name.c_str(), form.dof_to_vertex.size());
  for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i)
    std::printf("lambda_%zu = %+.8f   residual %.2e\n", i, rep.eigenvalues[i], rep.residuals[i]);
  std::printf("verdict: %s (band %.3f)\n", rep.stable ? "stable" : "unstable", band);

  const TestFunctionReport tf = minkowski_test_function(st, mesh, config);
  const double area = st.total_area();
  std::printf("Q(phi,phi)/Area = %+.6e   int phi / Area = %+.6e   rigidity gap/Area = %+.6e\n",
              form.apply(tf.phi) / area, tf.integral_normalized,
              rigidity_gap(st, mesh, config) / area);

  if (!out_path.empty()) {
    json j;
    j["mode"] = mode_name;
    j["band"] = band;
    j["eigenvalues"] = rep.eigenvalues;
    j["residuals"] = rep.residuals;
    j["stable"] = rep.stable;
    j["test_function_form"] = form.apply(tf.phi) / area;
    j["test_function_integral"] = tf.integral_normalized;
    j["rigidity_gap"] = rigidity_gap(st, mesh, config) / area;
    write_text(out_path, j.dump(1));
  }
  if (!matrix_prefix.empty()) {
    std::string q_txt, m_txt;
    const int n = static_cast<int>(form.Q.rows());
    char row[128];
    for (int i = 0; i < n; ++i) {
      std::snprintf(row, sizeof row, "%d %d %.17g\n", i, i, form.M(i));
      m_txt += row;
      for (int jcol = 0; jcol < n; ++jcol) {
        if (form.Q(i, jcol) == 0.0) continue;
        std::snprintf(row, sizeof row, "%d %d %.17g\n", i, jcol, form.Q(i, jcol));
        q_txt += row;
      }
    }
    write_text(matrix_prefix + "_Q.txt", q_txt);
    write_text(matrix_prefix + "_M.txt", m_txt);
  }
  if (expect_stable && !rep.stable) {
    std::fprintf(stderr, "spectrum verdict unstable where stability was expected\n");
    return kExitNumerical;
  }
  return kExitOk;
}

int run_verify_identities(const Options& o, const std::string& patch_name, int order, int grid,
                          double bump_amp, int bump_mode, double tol) {
  const Anisotropy aniso = make_anisotropy(o);
  const HalfSpaceConfig config = make_config(aniso, o.omega0, o.sphere_samples);
  ParametricPatch patch;
  if (patch_name == "sphere")
    patch = sphere_cap_patch(config.omega0);
  else if (patch_name == "wulff")
    patch = wulff_cap_patch(aniso, config);
  else if (patch_name == "wulff-bump")
    patch = wulff_cap_patch(aniso, config, bump_amp, bump_mode);
  else
    throw std::invalid_argument("unknown patch: " + patch_name);

  double prev_j = 0.0, prev_b = 0.0;
  for (int g : {grid / 2, grid}) {
    const JacobiResiduals jr = jacobi_identity_residuals(patch, aniso, config, order, g);
    const BoundaryResiduals br = boundary_identity_residuals(patch, aniso, config, order, g);
    std::printf("grid %d^2  jacobi residuals: F %.3e  EF %.3e  x %.3e   boundary: x %.3e  psi %.3e\n",
                g, jr.r_F, jr.r_EF, jr.r_x, br.r_x, br.r_psi);
    if (g == grid) {
      std::printf("observed interior order %.2f  boundary order %.2f  (stencil order %d)\n",
                  two_grid_slope(prev_j, jr.max(), 2.0), two_grid_slope(prev_b, br.max(), 2.0),
                  order);
      if (tol > 0.0 && std::max(jr.max(), br.max()) > tol) {
        std::fprintf(stderr, "identity residual %.3e exceeds --tol %.3e\n",
                     std::max(jr.max(), br.max()), tol);
        return kExitNumerical;
      }
    }
    prev_j = jr.max();
    prev_b = br.max();
  }
  return kExitOk;
}

int run_second_variation(const Options& o, double radius, int rings, bool boundary_field) {
  const Anisotropy aniso = make_anisotropy(o);
  const HalfSpaceConfig config = make_config(aniso, o.omega0, o.sphere_samples);
  const CapillaryMesh mesh = build_flat_capillary_patch(aniso, config, radius, rings);

  // Gaussian bump centered on the patch; either interior-supported or shifted
  // to touch the contact line.
  Vec3 center = Vec3::Zero();
  for (int v = 0; v < mesh.vertex_count(); ++v) center += mesh.vertices[v];
  center /= mesh.vertex_count();
  const double width = boundary_field ? 0.45 * radius : 0.25 * radius;
  std::vector<double> f(mesh.vertex_count(), 0.0);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    const Vec3 d = mesh.vertices[v] - (boundary_field ? Vec3::Zero() : center);
    f[v] = std::exp(-d.squaredNorm() / (2.0 * width * width));
    if (mesh.is_boundary[v] && !mesh.is_contact[v]) f[v] = 0.0;
    if (mesh.is_contact[v] && !boundary_field) f[v] = 0.0;
  }
  const std::vector<double> steps = {4e-3, 2e-3, 1e-3, 5e-4};
  const SecondVariationCheck chk = second_variation_fd_check(mesh, aniso, config, f, steps);
  std::printf("Q(f,f) = %.10e\nFD      = %.10e\nrelative discrepancy %.3e\n", chk.quadratic_form,
              chk.fd_value, chk.relative_discrepancy);
  return chk.relative_discrepancy <= 1e-3 ? kExitOk : kExitNumerical;
}

int run_flow(const Options& o, double perturb, const FlowConfig& fc, const std::string& trace_path,
             const std::string& final_path, bool expect_converged) {
  const Anisotropy aniso = make_anisotropy(o);
  const HalfSpaceConfig config = make_config(aniso, o.omega0, o.sphere_samples);
  CapillaryMesh mesh = load_or_generate(o, aniso, config);
  if (perturb > 0.0) mesh = perturb_normals(mesh, perturb, o.seed);

  const FlowTrace trace = run_flow(mesh, aniso, config, fc);
  const FlowStepRecord& last = trace.records.back();
  std::printf("%s after %d steps: camc %.3e  energy %.8f  volume drift %.3e\n",
              trace.converged ? "converged" : "stopped", last.step, trace.final_camc, last.energy,
              std::abs(last.volume - trace.records.front().volume) /
                  std::abs(trace.records.front().volume));
  std::printf("fit: center (%.6f, %.6f, %.6f)  scale %.6f  relative hausdorff %.3e\n",
              trace.fit.center.x(), trace.fit.center.y(), trace.fit.center.z(), trace.fit.scale,
              trace.final_hausdorff);

  if (!trace_path.empty()) {
    std::string csv = "step,energy,volume,camc,boundary_residual,step_size,hausdorff\n";
    char row[256];
    for (const auto& r : trace.records) {
      std::snprintf(row, sizeof row, "%d,%.12e,%.12e,%.6e,%.6e,%.6e,%.6e\n", r.step, r.energy,
                    r.volume, r.camc, r.boundary_residual, r.step_size, r.hausdorff);
      csv += row;
    }
    write_text(trace_path, csv);
  }
  if (!final_path.empty()) write_mesh(trace.final_mesh, final_path);
  if (expect_converged && !trace.converged) {
    std::fprintf(stderr, "flow did not reach the CAMC target\n");
    return kExitNumerical;
  }
  return kExitOk;
}

int run_bernstein(const Options& o, double r1, double r2, std::vector<double> radii,
                  double max_edge, const std::string& out_path) {
  const Anisotropy aniso = make_anisotropy(o);
  const HalfSpaceConfig config = make_config(aniso, o.omega0, o.sphere_samples);
  if (radii.empty())
    for (double r = r1; r <= r2 * (1 + 1e-12); r *= std::sqrt(2.0)) radii.push_back(r);

  // ring ladder: probe and cutoff radii all ring-aligned
  std::vector<double> rings = radii;
  rings.push_back(r1);
  rings.push_back(r2);
  std::sort(rings.begin(), rings.end());
  rings.erase(std::unique(rings.begin(), rings.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-12 * b; }),
              rings.end());
  std::vector<double> all;
  double prev = 0.0;
  for (double r : rings) {
    const int sub = std::max(1, static_cast<int>(std::ceil((r - prev) / max_edge)));
    for (int i = 1; i <= sub; ++i) all.push_back(prev + (r - prev) * i / sub);
    prev = r;
  }
  const CapillaryMesh mesh = build_half_plane_sample(aniso, config, all, max_edge);
  const GrowthReport rep = probe(mesh, aniso, config, radii, r1, r2);

  std::printf("half-plane sample: %d vertices, extent %.3f\n", mesh.vertex_count(), all.back());
  for (std::size_t i = 0; i < radii.size(); ++i)
    std::printf("r %8.3f  area/r^2 = %.8f\n", radii[i], rep.growth_ratio[i]);
  std::printf("growth constant C = %.8f (pi/2 = %.8f)\n", rep.C, std::numbers::pi / 2);
  std::printf("flatness integral %.3e\n", rep.flatness_integral);
  std::printf("dirichlet %.8f  (pi/ln(r2/r1) = %.8f)\n", rep.dirichlet,
              std::numbers::pi / std::log(r2 / r1));
  std::printf("stability bound rhs %.8f\n", rep.rhs_bound);

  if (!out_path.empty()) {
    json j;
    j["radii"] = rep.radii;
    j["growth_ratio"] = rep.growth_ratio;
    j["C"] = rep.C;
    j["flatness_integral"] = rep.flatness_integral;
    j["dirichlet"] = rep.dirichlet;
    j["rhs_bound"] = rep.rhs_bound;
    j["r1"] = rep.r1;
    j["r2"] = rep.r2;
    write_text(out_path, j.dump(1));
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anisotropic capillary surface toolkit"};
  app.require_subcommand(1);

  Options o;
  // wulff-gen
  auto* cmd_gen = app.add_subcommand("wulff-gen", "sample a truncated Wulff shape");
  int gen_res = 6;
  std::string gen_out;
  add_common(cmd_gen, o);
  cmd_gen->add_option("--res", gen_res, "ring resolution (6*res^2 faces)");
  cmd_gen->add_option("--out", gen_out, "output OFF/OBJ path");

  // state
  auto* cmd_state = app.add_subcommand("state", "discrete geometric state of a mesh");
  std::string state_out;
  add_common(cmd_state, o);
  add_mesh_source(cmd_state, o);
  cmd_state->add_option("--out", state_out, "JSON dump of per-vertex fields");

  // energy
  auto* cmd_energy = app.add_subcommand("energy", "capillary energy and its exact gradient");
  int energy_ladder = 0;
  std::string energy_csv;
  add_common(cmd_energy, o);
  add_mesh_source(cmd_energy, o);
  cmd_energy->add_option("--ladder", energy_ladder, "number of refinement levels");
  cmd_energy->add_option("--csv", energy_csv, "CSV report path");

  // minkowski
  auto* cmd_mink = app.add_subcommand("minkowski", "anisotropic Minkowski-type residual");
  int mink_ladder = 0;
  double mink_expect = 0.0;
  add_common(cmd_mink, o);
  add_mesh_source(cmd_mink, o);
  cmd_mink->add_option("--ladder", mink_ladder, "number of refinement levels");
  cmd_mink->add_option("--expect", mink_expect, "fail (exit 3) when the final residual exceeds this");

  // spectrum
  auto* cmd_spec = app.add_subcommand("spectrum", "stability quadratic form eigenvalues");
  int spec_k = 6;
  std::string spec_mode = "weak", spec_out, spec_matrices;
  double spec_band = 0.05;
  bool expect_stable = false;
  add_common(cmd_spec, o);
  add_mesh_source(cmd_spec, o);
  cmd_spec->add_option("--k", spec_k, "number of lowest eigenpairs");
  cmd_spec->add_option("--mode", spec_mode, "weak (volume-preserving) | strong (unconstrained)")
      ->check(CLI::IsMember({"weak", "strong"}));
  cmd_spec->add_option("--band", spec_band, "stability tolerance band");
  cmd_spec->add_flag("--expect-stable", expect_stable, "exit 3 when the verdict is unstable");
  cmd_spec->add_option("--out", spec_out, "JSON report path");
  cmd_spec->add_option("--export-matrices", spec_matrices,
                       "write <prefix>_Q.txt / <prefix>_M.txt in coordinate format");

  // verify-identities
  auto* cmd_ver = app.add_subcommand("verify-identities",
                                     "pointwise Jacobi and boundary identities on a patch");
  std::string ver_patch = "sphere";
  int ver_order = 4, ver_grid = 300, ver_bump_mode = 3;
  double ver_bump_amp = 0.0, ver_tol = 0.0;
  add_common(cmd_ver, o);
  cmd_ver->add_option("--patch", ver_patch, "sphere | wulff | wulff-bump")
      ->check(CLI::IsMember({"sphere", "wulff", "wulff-bump"}));
  cmd_ver->add_option("--order", ver_order, "stencil order")->check(CLI::IsMember({2, 4, 6}));
  cmd_ver->add_option("--grid", ver_grid, "fine-grid resolution per direction");
  cmd_ver->add_option("--bump-amp", ver_bump_amp, "radial bump amplitude (wulff-bump)");
  cmd_ver->add_option("--bump-mode", ver_bump_mode, "angular bump mode (wulff-bump)");
  cmd_ver->add_option("--tol", ver_tol, "fail (exit 3) when any residual exceeds this");

  // second-variation-check
  auto* cmd_sv = app.add_subcommand("second-variation-check",
                                    "finite-difference check of the second variation");
  double sv_radius = 1.0;
  int sv_rings = 24;
  bool sv_boundary = false;
  add_common(cmd_sv, o);
  cmd_sv->add_option("--radius", sv_radius, "flat-patch radius");
  cmd_sv->add_option("--rings", sv_rings, "flat-patch ring count");
  cmd_sv->add_flag("--boundary-field", sv_boundary, "let the test field touch the contact line");

  // flow
  auto* cmd_flow = app.add_subcommand("flow", "volume-preserving capillary gradient flow");
  double flow_perturb = 0.0;
  FlowConfig fc;
  std::string flow_trace, flow_final;
  bool expect_converged = false;
  add_common(cmd_flow, o);
  add_mesh_source(cmd_flow, o);
  cmd_flow->add_option("--perturb", flow_perturb, "relative normal perturbation before flowing");
  cmd_flow->add_option("--step", fc.step, "initial time step");
  cmd_flow->add_option("--max-steps", fc.max_steps, "step budget");
  cmd_flow->add_option("--camc", fc.camc_target, "CAMC residual stopping target");
  cmd_flow->add_option("--smoothing", fc.smoothing, "tangential smoothing weight");
  cmd_flow->add_option("--fit-every", fc.fit_every, "Wulff-fit cadence in the trace");
  cmd_flow->add_option("--trace", flow_trace, "CSV trace path");
  cmd_flow->add_option("--final-mesh", flow_final, "OFF/OBJ path for the final mesh");
  cmd_flow->add_flag("--expect-converged", expect_converged, "exit 3 unless the target is reached");

  // bernstein-probe
  auto* cmd_bp = app.add_subcommand("bernstein-probe",
                                    "area growth and flatness probe on a half-plane sample");
  double bp_r1 = 1.0, bp_r2 = std::exp(4.0), bp_max_edge = 0.7;
  std::vector<double> bp_radii;
  std::string bp_out;
  add_common(cmd_bp, o);
  cmd_bp->add_option("--r1", bp_r1, "cutoff inner radius");
  cmd_bp->add_option("--r2", bp_r2, "cutoff outer radius");
  cmd_bp->add_option("--radii", bp_radii, "probe radii (default: sqrt(2) ladder r1..r2)");
  cmd_bp->add_option("--max-edge", bp_max_edge, "edge-length bound of the sample");
  cmd_bp->add_option("--out", bp_out, "JSON report path");

  if (argc > 1 && argv[1][0] != '-') {
    static const std::set<std::string> known = {
        "wulff-gen", "state",  "energy", "minkowski",         "spectrum",
        "verify-identities",   "second-variation-check",      "flow",
        "bernstein-probe"};
    if (!known.count(argv[1])) {
      std::fprintf(stderr, "unknown subcommand: %s\n", argv[1]);
      return kExitUnknownCommand;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitValidation;
  }

  try {
    std::set<std::string> given;
    for (auto* sub : app.get_subcommands())
      for (const auto* opt : sub->get_options())
        if (opt->count() > 0) given.insert(opt->get_name());
    apply_config_file(o, given);

    if (verbosity() > 0) std::fprintf(stderr, "anisotropy: %s  omega0: %g\n", o.aniso.c_str(), o.omega0);

    if (cmd_gen->parsed()) return run_wulff_gen(o, gen_res, gen_out);
    if (cmd_state->parsed()) return run_state(o, state_out);
    if (cmd_energy->parsed()) return run_energy(o, energy_ladder, energy_csv);
    if (cmd_mink->parsed()) return run_minkowski(o, mink_ladder, mink_expect);
    if (cmd_spec->parsed())
      return run_spectrum(o, spec_k, spec_mode, spec_band, expect_stable, spec_out, spec_matrices);
    if (cmd_ver->parsed())
      return run_verify_identities(o, ver_patch, ver_order, ver_grid, ver_bump_amp, ver_bump_mode,
                                   ver_tol);
    if (cmd_sv->parsed()) return run_second_variation(o, sv_radius, sv_rings, sv_boundary);
    if (cmd_flow->parsed())
      return run_flow(o, flow_perturb, fc, flow_trace, flow_final, expect_converged);
    if (cmd_bp->parsed()) return run_bernstein(o, bp_r1, bp_r2, bp_radii, bp_max_edge, bp_out);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitBadConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  }
  return kExitValidation;
}
