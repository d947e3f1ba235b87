#pragma once

// Subcommand implementations. Each sweep point is an independent task; a
// pool of workers evaluates them and the records are numbered afterwards in
// sweep order, so output never depends on completion order.

#include <atomic>
#include <chrono>
#include <exception>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "twisted_dirac/cli/config.hpp"
#include "twisted_dirac/cli/records.hpp"
#include "twisted_dirac/twisted_dirac.hpp"

namespace twisted_dirac::cli {

struct RunOptions {
  bool timing = true;  // false: wall_time is written as 0 for bit-stable output
};

namespace detail {

using Task = std::function<std::vector<ResultRecord>()>;

inline std::vector<ResultRecord> run_pool(const std::vector<Task>& tasks, int workers, const RunOptions& opt) {
  const std::size_t n = tasks.size();
  std::vector<std::vector<ResultRecord>> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        const auto t0 = std::chrono::steady_clock::now();
        out[i] = tasks[i]();
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (auto& r : out[i]) r.wall_time = opt.timing ? dt : 0.0;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const std::size_t extra = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(workers, 1))) - (n > 0 ? 1 : 0);
    for (std::size_t k = 0; k < extra; ++k) pool.emplace_back(work);
    work();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<ResultRecord> flat;
  for (auto& v : out)
    for (auto& r : v) flat.push_back(std::move(r));
  for (std::size_t i = 0; i < flat.size(); ++i) flat[i].index = i;
  return flat;
}

class RecordFactory {
 public:
  RecordFactory(std::string command, const RunConfig& c) : command_(std::move(command)), hash_(config_hash(c)) {}

  ResultRecord make(std::string quantity, double value, double error_bound, std::string method, bool converged,
                    const SpectralModel& model, std::vector<std::pair<std::string, double>> params = {}) const {
    ResultRecord r;
    r.command = command_;
    r.quantity = std::move(quantity);
    r.value = value;
    r.error_bound = error_bound;
    r.method = std::move(method);
    r.converged = converged;
    r.config_hash = hash_;
    r.input = model_to_json(model);
    r.params = std::move(params);
    return r;
  }

 private:
  std::string command_;
  std::string hash_;
};

inline double param(const ResultRecord& r, const std::string& name) {
  for (const auto& [k, v] : r.params)
    if (k == name) return v;
  throw std::out_of_range("record has no parameter '" + name + "'");
}

inline std::vector<double> flux_points(const RunConfig& c) {
  return c.flux_sweep.empty() ? std::vector<double>{c.model.flux_shift} : c.flux_sweep;
}

}  // namespace detail

inline std::vector<ResultRecord> cmd_eta(const RunConfig& c, const RunOptions& opt = {}) {
  const detail::RecordFactory f("eta", c);
  const EngineOptions eng = c.engine();
  std::vector<detail::Task> tasks;
  for (double t : detail::flux_points(c)) {
    tasks.push_back([=, &f] {
      const SpectralModel m = c.model.with_flux(t);
      const EtaValue e = compute_eta(m, eng);
      const std::vector<std::pair<std::string, double>> params{
          {"flux", t}, {"kernel_dim", static_cast<double>(e.kernel_dim)}, {"pole_residue", e.pole_residue}};
      return std::vector<ResultRecord>{
          f.make("eta", e.eta, e.error_bound, to_string(e.method), e.converged, m, params),
          f.make("xi", e.xi, 0.5 * e.error_bound, to_string(e.method), e.converged, m, params)};
    });
  }
  return detail::run_pool(tasks, c.workers, opt);
}

inline std::vector<ResultRecord> cmd_rho(const RunConfig& c, const RunOptions& opt = {}) {
  const detail::RecordFactory f("rho", c);
  const EngineOptions eng = c.engine();
  std::vector<detail::Task> tasks;
  for (double t : detail::flux_points(c)) {
    tasks.push_back([=, &f] {
      const SpectralModel m = c.model.with_flux(t);
      const RhoValue r = rho(m, eng);
      return std::vector<ResultRecord>{f.make("rho", r.rho, r.error_bound(), to_string(eng.method), r.converged(), m,
                                              {{"flux", t},
                                               {"xi_twisted", r.xi_twisted.xi},
                                               {"xi_trivial", r.xi_trivial.xi},
                                               {"rank", static_cast<double>(r.rank)}})};
    });
  }
  if (!c.cutoffs.empty()) {
    tasks.push_back([=, &f] {
      const auto rows = rho_difference_stability(c.model, c.cutoffs, eng);
      const bool mono = deltas_monotone(rows);
      std::vector<ResultRecord> out;
      for (const auto& row : rows)
        out.push_back(f.make("rho_stability", row.rho, row.error_bound, to_string(eng.method), mono, c.model,
                             {{"cutoff", static_cast<double>(row.cutoff)}, {"delta", row.delta}}));
      return out;
    });
  }
  return detail::run_pool(tasks, c.workers, opt);
}

inline std::vector<ResultRecord> cmd_specflow(const RunConfig& c, const RunOptions& opt = {}) {
  const detail::RecordFactory f("specflow", c);
  const EngineOptions eng = c.engine();
  const bool reduced = std::holds_alternative<Sphere3>(c.model.geometry) || std::holds_alternative<Torus3>(c.model.geometry);
  std::vector<detail::Task> tasks;
  for (double t : detail::flux_points(c)) {
    tasks.push_back([=, &f] {
      const SpectralModel m = c.model.with_flux(t);
      const Cor33Report r = check_cor33(m, eng);
      std::vector<ResultRecord> out{f.make("cor33_residual", r.residual, r.error_bound, to_string(eng.method),
                                           r.converged, m,
                                           {{"flux", t},
                                            {"eta", r.eta_twisted},
                                            {"eta_untwisted", r.eta_untwisted},
                                            {"sf", static_cast<double>(r.sf)},
                                            {"h", r.h},
                                            {"predicted", r.predicted}})};
      if (reduced) {
        const Prop31Report p = check_prop31_reduced(m, eng);
        out.push_back(f.make("prop31_residual", p.residual, p.error_bound, to_string(eng.method), r.converged, m,
                             {{"flux", t},
                              {"sf", static_cast<double>(p.sf)},
                              {"integral_term", p.integral_term},
                              {"calibrated_constant", p.calibrated_constant}}));
      }
      return out;
    });
  }
  return detail::run_pool(tasks, c.workers, opt);
}

inline std::vector<ResultRecord> cmd_lw(const RunConfig& c, const RunOptions& opt = {}) {
  const detail::RecordFactory f("lw", c);
  std::vector<detail::Task> tasks;
  if (std::holds_alternative<Torus3>(c.model.geometry)) {
    tasks.push_back([=, &f] {
      const LwReport r = lw_check_deg3(c.model, c.torus_flux(), c.torus_cutoff);
      const std::vector<std::pair<std::string, double>> params{{"cutoff", static_cast<double>(r.cutoff)},
                                                               {"bandwidth", static_cast<double>(r.bandwidth)},
                                                               {"modes_compared", static_cast<double>(r.modes_compared)},
                                                               {"operator_scale", r.operator_scale}};
      return std::vector<ResultRecord>{f.make("lw_residual_deg3", r.residual_deg3, 0.0, "matrix", true, c.model, params),
                                       f.make("lw_residual_general", r.residual_general, 0.0, "matrix", true, c.model, params)};
    });
  }
  for (int n : {3, 5, 7}) {
    tasks.push_back([=, &f] {
      const GammaRep rep(n);
      const FluxForm h({FormComponent::random(n, 1, 1000 + n), FormComponent::random(n, 3, 2000 + n)});
      return std::vector<ResultRecord>{f.make("lw_algebraic_residual", lw_check_general(rep, h), 0.0, "algebraic", true,
                                              c.model, {{"dimension", static_cast<double>(n)}})};
    });
  }
  return detail::run_pool(tasks, c.workers, opt);
}

inline std::vector<ResultRecord> cmd_psc(const RunConfig& c, const RunOptions& opt = {}) {
  const detail::RecordFactory f("psc", c);
  const EngineOptions eng = c.engine();
  if (!(c.model.scalar_curvature() > 0.0))
    throw InvalidInput("psc: model must have positive scalar curvature (sphere3 or lens)");
  const PscThreshold th = psc_threshold(c.model.scalar_curvature(), c.h_norm);
  std::vector<double> grid = c.u_sweep;
  if (grid.empty())
    for (double frac : {0.0, 0.25, 0.5, 0.75, 0.95}) grid.push_back(frac * th.u0);
  std::vector<detail::Task> tasks;
  tasks.push_back([=, &f] {
    const PscReport r = psc_stability_sweep(c.model, c.h_norm, {0.0}, eng);
    std::vector<ResultRecord> out{
        f.make("psc_u0", th.u0, 0.0, "closed_form", true, c.model, {{"r_min", th.r_min}, {"h_norm", th.h_norm}})};
    if (r.first_kernel_u)
      out.push_back(f.make("psc_first_kernel_u", *r.first_kernel_u, 0.0, "exact", true, c.model, {{"h_norm", th.h_norm}}));
    return out;
  });
  for (double u : grid) {
    tasks.push_back([=, &f] {
      const PscReport r = psc_stability_sweep(c.model, c.h_norm, {u}, eng);
      const PscRow& row = r.rows.front();
      return std::vector<ResultRecord>{f.make("psc_min_abs_eigenvalue", row.min_abs_eigenvalue, 0.0, "exact", true,
                                              c.model.with_flux(u * c.h_norm),
                                              {{"u", u},
                                               {"kernel_dim", static_cast<double>(row.kernel_dim)},
                                               {"sf", static_cast<double>(row.sf)},
                                               {"rho", row.rho},
                                               {"rho_error_bound", row.rho_error_bound}})};
    });
  }
  auto records = detail::run_pool(tasks, c.workers, opt);
  double deviation = 0.0, first = 0.0, bound = 0.0;
  bool seen = false;
  for (const auto& r : records) {
    if (r.quantity != "psc_min_abs_eigenvalue") continue;
    const double rho_u = detail::param(r, "rho");
    if (!seen) first = rho_u;
    seen = true;
    deviation = std::max(deviation, std::abs(rho_u - first));
    bound = std::max(bound, detail::param(r, "rho_error_bound"));
  }
  ResultRecord dev = f.make("psc_rho_deviation", deviation, 2.0 * bound, to_string(eng.method), true, c.model);
  dev.index = records.size();
  records.push_back(dev);
  return records;
}

inline std::vector<ResultRecord> cmd_conformal(const RunConfig& c, const RunOptions& opt = {}) {
  const detail::RecordFactory f("conformal", c);
  const EngineOptions eng = c.engine();
  const std::vector<double> grid = c.u_sweep.empty() ? std::vector<double>{-1.0, -0.5, 0.5, 1.0} : c.u_sweep;
  const int shell = std::min(c.cutoff, 60);
  std::vector<detail::Task> tasks;
  for (double u : grid) {
    tasks.push_back([=, &f] {
      const ConformalScale s(u);
      const SpectralModel scaled = transform_spectrum(c.model, s);
      const double single[] = {u};
      const ConformalReport r = check_rho_conformal(c.model, single, eng);
      return std::vector<ResultRecord>{
          f.make("spectrum_scaling_deviation", spectrum_scaling_deviation(c.model, s, shell), 0.0, "enumeration", true,
                 scaled, {{"u", u}, {"shell", static_cast<double>(shell)}}),
          f.make("rho_conformal_deviation", r.max_deviation, r.rows.front().error_bound, to_string(eng.method), true,
                 scaled, {{"u", u}, {"rho", r.rows.front().rho}, {"rho_reference", r.rho_reference}})};
    });
  }
  return detail::run_pool(tasks, c.workers, opt);
}

inline std::vector<ResultRecord> run_command(const std::string& name, const RunConfig& c, const RunOptions& opt = {}) {
  if (name == "eta") return cmd_eta(c, opt);
  if (name == "rho") return cmd_rho(c, opt);
  if (name == "specflow") return cmd_specflow(c, opt);
  if (name == "lw") return cmd_lw(c, opt);
  if (name == "psc") return cmd_psc(c, opt);
  if (name == "conformal" || name == "conformal-check") return cmd_conformal(c, opt);
  throw InvalidInput("unknown command '" + name + "'");
}

}  // namespace twisted_dirac::cli
