// Command-line front end: one subcommand per experiment, records to JSON or CSV.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "twisted_dirac/cli/commands.hpp"

namespace td = twisted_dirac;
namespace tc = twisted_dirac::cli;

namespace {

enum Exit { ok = 0, selftest_failed = 1, config_error = 2, not_converged = 3, invariant_violated = 4 };

struct Overrides {
  std::string config;
  std::string out;
  std::string format;
  int workers = 0;
  double tol = 0.0;
  int cutoff = 0;
  bool no_timing = false;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "JSON run configuration");
  sub->add_option("--out", o.out, "output file (default: stdout)");
  sub->add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--workers", o.workers, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--tol", o.tol, "target error for the heat-kernel engine")->check(CLI::PositiveNumber);
  sub->add_option("--cutoff", o.cutoff, "spectral cutoff (lw: Fourier box half-width)")->check(CLI::PositiveNumber);
  sub->add_flag("--no-timing", o.no_timing, "write wall_time as 0");
}

tc::RunConfig resolve(const std::string& command, const Overrides& o) {
  if (o.config.empty()) throw tc::ConfigError("--config", "a run configuration is required for '" + command + "'");
  tc::RunConfig c = tc::load_config(o.config);
  if (!o.out.empty()) c.out = o.out;
  if (!o.format.empty()) c.format = o.format;
  if (o.workers > 0) c.workers = o.workers;
  if (o.tol > 0.0) c.tol = o.tol;
  if (o.cutoff > 0) (command == "lw" ? c.torus_cutoff : c.cutoff) = o.cutoff;
  return c;
}

void emit(const tc::RunConfig& c, const std::vector<tc::ResultRecord>& records) {
  auto write = [&](std::ostream& os) {
    if (c.format == "csv") tc::write_csv(os, records);
    else tc::write_json(os, records);
  };
  if (c.out.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream f(c.out);
  if (!f) throw tc::ConfigError("output.path", "cannot open '" + c.out + "' for writing");
  write(f);
}

struct Check {
  const char* name;
  double residual;
  double tol;
};

// Fast internal consistency checks against closed forms.
int selftest() {
  std::vector<Check> checks;
  double clifford = 0.0;
  for (int n : {1, 3, 5, 7}) clifford = std::max(clifford, td::GammaRep(n).clifford_residual());
  checks.push_back({"clifford relations n<=7", clifford, 1e-12});

  double circle = 0.0;
  for (double a : {0.1, 0.25, 0.7})
    circle = std::max(circle, std::abs(td::compute_eta({td::Circle{1.0}, td::CircleHolonomy{a}, 0.0}, {}).eta - (1.0 - 2.0 * a)));
  checks.push_back({"circle eta = 1 - 2a", circle, 1e-12});

  double sphere = 0.0;
  for (double t : {-0.4, 0.1, 0.3})
    sphere = std::max(sphere, std::abs(td::compute_eta({td::Sphere3{1.0}, td::TrivialBundle{1}, t}, {}).eta -
                                       (t / 2.0 - 2.0 * t * t * t / 3.0)));
  checks.push_back({"sphere eta closed form", sphere, 1e-12});

  const td::SpectralModel lens{td::Lens{3, 1.0}, td::LensCharacter{3, 1}, 0.0};
  checks.push_back({"lens(3) rho = -1/3", std::abs(td::rho(lens, {}).rho + 1.0 / 3.0), 1e-12});

  const td::AffinePath path = td::affine_path_from_model({td::Sphere3{1.0}, td::TrivialBundle{1}, 2.0});
  checks.push_back({"sf reversal antisymmetry",
                    static_cast<double>(std::abs(td::sf_affine(path).flow + td::sf_affine(path.reversed()).flow)), 0.0});

  const td::GammaRep rep(5);
  checks.push_back({"algebraic Weitzenbock n=5",
                    td::lw_check_general(rep, td::FluxForm({td::FormComponent::random(5, 3, 9)})), 1e-12});

  checks.push_back({"conformal spectrum scaling",
                    td::spectrum_scaling_deviation(lens.with_flux(0.2), td::ConformalScale(0.5), 40), 1e-10});

  bool all = true;
  for (const auto& c : checks) {
    const bool pass = c.residual <= c.tol;
    all = all && pass;
    std::printf("%-4s %-30s residual %.3g (tol %.3g)\n", pass ? "ok" : "FAIL", c.name, c.residual, c.tol);
  }
  return all ? ok : selftest_failed;
}

int run(const std::string& command, const Overrides& o) {
  const tc::RunConfig c = resolve(command, o);
  const auto records = tc::run_command(command, c, tc::RunOptions{!o.no_timing});
  emit(c, records);
  for (const auto& r : records)
    if (!r.converged) return not_converged;
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Eta, rho and spectral-flow experiments for flux-twisted Dirac operators"};
  app.set_version_flag("--version", std::string(tc::kVersion));
  app.require_subcommand(1);

  Overrides o;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"eta", "eta and xi invariants over a flux sweep"},
      {"rho", "rho invariant, optionally with a truncation-stability table"},
      {"specflow", "spectral flow against the eta difference"},
      {"lw", "Weitzenbock identity residuals"},
      {"psc", "stability of rho below the curvature threshold"},
      {"conformal", "spectrum scaling and rho under constant rescaling"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    if (name == "conformal") sub->alias("conformal-check");
    add_common(sub, o);
  }
  app.add_subcommand("selftest", "fast consistency checks against closed forms");

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    if (command == "selftest") return selftest();
    return run(command, o);
  } catch (const tc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const td::InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return config_error;
  } catch (const td::Unsupported& e) {
    std::cerr << "unsupported: " << e.what() << '\n';
    return config_error;
  } catch (const td::ResolutionFailure& e) {
    std::cerr << "not resolved: " << e.what() << '\n';
    return not_converged;
  } catch (const td::InvariantViolation& e) {
    std::cerr << "invariant violated: " << e.what() << '\n';
    return invariant_violated;
  }
}
