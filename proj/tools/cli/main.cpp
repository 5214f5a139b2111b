#include <httplib.h>
#include <signal.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "fiseis/config.hpp"
#include "fiseis/error.hpp"
#include "fiseis/json_io.hpp"
#include "fiseis/likelihood.hpp"
#include "fiseis/session.hpp"
#include "fiseis/simulator.hpp"
#include "fiseis/validation.hpp"
#include "service.hpp"

namespace fs = std::filesystem;
using namespace fiseis;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitFit = 3;

struct Common {
  std::string config;
  std::optional<std::size_t> grid;
  std::optional<double> h_hours;
  std::optional<double> t_end;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "run configuration (JSON)");
  cmd->add_option("--grid", c.grid, "posterior nodes per axis")->check(CLI::Range(16, 512));
  cmd->add_option("--h-hours", c.h_hours, "forecast window in hours")->check(CLI::PositiveNumber);
  cmd->add_option("--t-end", c.t_end, "observation window end in days");
}

RunConfig resolve(const Common& c) {
  RunConfig cfg = c.config.empty() ? RunConfig{} : load_run_config(c.config);
  if (c.grid) cfg.grid_nodes = *c.grid;
  if (c.h_hours) cfg.h_days = *c.h_hours / 24.0;
  if (c.t_end) cfg.t_end = *c.t_end;
  return cfg;
}

SeismicCatalog load_catalog(const std::string& path, const RunConfig& cfg) {
  return parse_catalog(read_text_file(path), cfg.m0, cfg.t_end);
}

InjectionProfile load_injection(const std::string& path) {
  return parse_injection(read_text_file(path));
}

void write_json(const fs::path& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

PosteriorSummary polished_summary(const PosteriorGrid& grid, const LikelihoodContext& ctx,
                                  const JointPrior& prior) {
  return summarize(grid, [&](const RateParams& theta) {
    return log_prior(theta, prior) + log_likelihood(theta, ctx);
  });
}

MleResult fit_mle(const LikelihoodContext& ctx, const PosteriorSummary& summary,
                  const JointPrior& prior) {
  const auto bounds = ParamBounds::from_prior(prior);
  auto init = summary.mean;
  init.tau = std::clamp(init.tau, bounds.lo.tau, bounds.hi.tau);
  return mle_fit(ctx, init, bounds);
}

Json mle_to_json(const MleResult& r, LikelihoodMode mode) {
  return Json{{"theta", params_to_json(r.theta)},
              {"log_likelihood", r.log_likelihood},
              {"at_bound", r.at_bound},
              {"tau_identified", r.tau_identified},
              {"likelihood_mode", to_string(mode)},
              {"evaluations", r.evaluations}};
}

// ---- fit ----

struct FitArgs {
  Common common;
  std::string catalog, injection, out = ".", plugin;
};

int run_fit(const FitArgs& a) {
  const auto cfg = resolve(a.common);
  const auto ctx = LikelihoodContext::for_window(load_catalog(a.catalog, cfg),
                                                 load_injection(a.injection), cfg.mu);
  GridSpec spec;
  spec.nodes_per_axis = cfg.grid_nodes;
  const auto grid = compute_posterior(ctx, cfg.prior, spec);
  auto summary = polished_summary(grid, ctx, cfg.prior);
  const auto mle = fit_mle(ctx, summary, cfg.prior);
  summary.mle = mle.theta;

  const fs::path out(a.out);
  write_json(out / "mle.json", mle_to_json(mle, ctx.mode()));
  write_json(out / "posterior.json", posterior_to_json(grid, summary));
  write_json(out / "summary.json", summary_to_json(summary));

  const double t = ctx.horizon();
  const auto& process = ctx.process();
  const auto counts = forecast_counts(grid, process, t, cfg.h_days);
  const auto mesh = default_magnitude_mesh(cfg.m0, cfg.mu, cfg.mesh_step);
  const auto maxmag = forecast_max_magnitude(grid, process, t, cfg.h_days, mesh);
  ForecastFlags flags;
  flags.post_shut_in = ctx.mode() == LikelihoodMode::complete;
  write_json(out / "forecast.json", forecast_to_json(counts, &maxmag, flags));

  if (!a.plugin.empty()) {
    const RateParams point = a.plugin == "map" ? summary.map : a.plugin == "mle" ? mle.theta : summary.mean;
    ForecastFlags pf = flags;
    pf.plugin = true;
    pf.plugin_point = a.plugin;
    const auto pc = forecast_counts_plugin(point, process, t, cfg.h_days);
    write_json(out / "plugin_forecast.json", forecast_to_json(pc, nullptr, pf));
  }

  std::printf("%zu events, %s likelihood, log evidence %.6f\n", ctx.catalog().size(),
              to_string(ctx.mode()), grid.log_evidence());
  std::printf("MLE   a_fb=%.4f b=%.4f tau=%.4f\n", mle.theta.a_fb, mle.theta.b, mle.theta.tau);
  std::printf("mean  a_fb=%.4f b=%.4f tau=%.4f\n", summary.mean.a_fb, summary.mean.b,
              summary.mean.tau);
  return 0;
}

// ---- validate ----

struct ValidateArgs {
  Common common;
  std::string catalog, injection, posterior, out = "validation.json";
};

int run_validate(const ValidateArgs& a) {
  const auto cfg = resolve(a.common);
  const auto ctx = LikelihoodContext::for_window(load_catalog(a.catalog, cfg),
                                                 load_injection(a.injection), cfg.mu);
  auto loaded = posterior_from_json(Json::parse(read_text_file(a.posterior)));
  if (!loaded.summary.mle) loaded.summary.mle = fit_mle(ctx, loaded.summary, cfg.prior).theta;
  const auto checks = validate_model_suite(ctx.catalog(), ctx.process(), loaded.grid, loaded.summary);
  write_json(a.out, validation_to_json(checks));
  for (const auto& c : checks) {
    std::printf("%-14s D_n=%.4f  95%%:%s  99%%:%s  berman 95%%:%s\n", c.name.c_str(), c.ks.d_n,
                c.ks.pass_95 ? "pass" : "FAIL", c.ks.pass_99 ? "pass" : "FAIL",
                c.berman.ks.pass_95 ? "pass" : "FAIL");
  }
  return 0;
}

// ---- replay ----

struct ReplayArgs {
  Common common;
  std::string catalog, injection, out = "snapshots.jsonl";
  std::optional<double> cadence;
};

int run_replay(const ReplayArgs& a) {
  auto cfg = resolve(a.common);
  if (a.cadence) cfg.cadence_days = *a.cadence;
  const auto catalog = load_catalog(a.catalog, cfg);
  const auto session_cfg = cfg.session(load_injection(a.injection));
  if (const fs::path parent = fs::path(a.out).parent_path(); !parent.empty()) {
    fs::create_directories(parent);
  }
  std::ofstream out(a.out);
  if (!out) throw ParseError("cannot write " + a.out);
  ReplayOptions opts;
  opts.cadence = cfg.cadence_days;
  std::size_t ticks = 0;
  replay(catalog, session_cfg, opts, [&](const Session&, const Snapshot& s) {
    out << snapshot_to_json(s).dump() << '\n';
    ++ticks;
  });
  std::printf("%zu snapshots written to %s\n", ticks, a.out.c_str());
  return 0;
}

// ---- simulate ----

struct SimulateArgs {
  Common common;
  std::string injection, out = "catalog.csv";
  RateParams theta{-0.5, 1.2, 2.0};
  std::uint64_t seed = 1;
};

int run_simulate(const SimulateArgs& a) {
  const auto cfg = resolve(a.common);
  if (!cfg.t_end) throw ParseError("simulate needs --t-end (or t_end in the config)");
  SimulationSpec spec;
  spec.theta = a.theta;
  spec.profile = load_injection(a.injection);
  spec.mag = MagnitudeModel{a.theta.b, cfg.m0, cfg.mu};
  spec.t_end = *cfg.t_end;
  spec.seed = a.seed;
  const auto catalog = simulate(spec);
  write_text_file(a.out, write_catalog_csv(catalog));
  std::printf("%zu events written to %s\n", catalog.size(), a.out.c_str());
  return 0;
}

// ---- serve ----

struct ServeArgs {
  Common common;
  std::string data_dir, injection;
};

int run_serve(const ServeArgs& a) {
  const auto cfg = resolve(a.common);
  std::optional<InjectionProfile> schedule;
  if (!a.injection.empty()) schedule = load_injection(a.injection);
  std::optional<fs::path> dir;
  if (!a.data_dir.empty()) dir = a.data_dir;

  const char* host_env = std::getenv("FISEIS_HOST");
  const char* port_env = std::getenv("FISEIS_PORT");
  const std::string host = host_env ? host_env : "127.0.0.1";
  int port = 8080;
  if (port_env) {
    try {
      port = std::stoi(port_env);
    } catch (const std::exception&) {
      throw ParseError(std::string("FISEIS_PORT is not a port number: ") + port_env);
    }
  }

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  service::SessionService svc(cfg, dir, schedule);
  httplib::Server server;
  server.new_task_queue = [] { return new httplib::ThreadPool(32); };
  service::install_routes(server, svc);

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    svc.shutdown();
    server.stop();
  });

  if (!server.bind_to_port(host, port)) {
    std::fprintf(stderr, "error: cannot bind %s:%d\n", host.c_str(), port);
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    return kExitUsage;
  }
  std::printf("listening on %s:%d (%zu recovered sessions)\n", host.c_str(), port, svc.size());
  std::fflush(stdout);
  server.listen_after_bind();
  waiter.join();
  return 0;
}

template <class F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const FitFailure& e) {
    std::fprintf(stderr, "fit failure: %s\n", e.what());
    return kExitFit;
  } catch (const EvidenceUnderflow& e) {
    std::fprintf(stderr, "fit failure: %s\n", e.what());
    return kExitFit;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kExitUsage;
  } catch (const Json::exception& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kExitUsage;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Injection-induced seismicity: fitting, validation, online forecasting"};
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "posterior, MLE and forecast for a catalog");
  add_common(fit_cmd, fit.common);
  fit_cmd->add_option("--catalog", fit.catalog, "events CSV")->required();
  fit_cmd->add_option("--injection", fit.injection, "injection CSV")->required();
  fit_cmd->add_option("--out", fit.out, "output directory");
  fit_cmd->add_option("--plugin", fit.plugin, "also write a plug-in forecast")
      ->check(CLI::IsMember({"map", "mean", "mle"}));

  ValidateArgs val;
  auto* val_cmd = app.add_subcommand("validate", "residual checks for four fitted models");
  add_common(val_cmd, val.common);
  val_cmd->add_option("--catalog", val.catalog)->required();
  val_cmd->add_option("--injection", val.injection)->required();
  val_cmd->add_option("--posterior", val.posterior, "posterior.json from fit")->required();
  val_cmd->add_option("--out", val.out, "report file");

  ReplayArgs rep;
  auto* rep_cmd = app.add_subcommand("replay", "online updating over a recorded catalog");
  add_common(rep_cmd, rep.common);
  rep_cmd->add_option("--catalog", rep.catalog)->required();
  rep_cmd->add_option("--injection", rep.injection)->required();
  rep_cmd->add_option("--cadence", rep.cadence, "snapshot spacing in days")->check(CLI::PositiveNumber);
  rep_cmd->add_option("--out", rep.out, "snapshot log (JSON lines)");

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "synthetic catalog from the rate model");
  add_common(sim_cmd, sim.common);
  sim_cmd->add_option("--injection", sim.injection)->required();
  sim_cmd->add_option("--a-fb", sim.theta.a_fb);
  sim_cmd->add_option("--b", sim.theta.b)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--tau", sim.theta.tau)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", sim.seed);
  sim_cmd->add_option("--out", sim.out, "events CSV");

  ServeArgs srv;
  auto* srv_cmd = app.add_subcommand("serve", "HTTP session service (port from FISEIS_PORT)");
  add_common(srv_cmd, srv.common);
  srv_cmd->add_option("--data-dir", srv.data_dir, "session logs for crash recovery");
  srv_cmd->add_option("--injection", srv.injection, "schedule for sessions created without one");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (*fit_cmd) return guarded([&] { return run_fit(fit); });
  if (*val_cmd) return guarded([&] { return run_validate(val); });
  if (*rep_cmd) return guarded([&] { return run_replay(rep); });
  if (*sim_cmd) return guarded([&] { return run_simulate(sim); });
  return guarded([&] { return run_serve(srv); });
}
