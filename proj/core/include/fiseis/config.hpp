#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

#include "fiseis/forecast.hpp"
#include "fiseis/prior.hpp"
#include "fiseis/session.hpp"

namespace fiseis {

/**
 * Run configuration shared by the CLI subcommands. JSON keys:
 *   prior (object) or prior_file (path, relative to the config file),
 *   m0, mu, grid (nodes per axis), h_hours, cadence_days, t_end, mesh_step.
 * Missing keys keep their defaults.
 */
struct RunConfig {
  JointPrior prior = default_prior();
  double m0 = 0.8;
  double mu = kDefaultUpperMagnitude;
  std::size_t grid_nodes = 64;
  double h_days = kDefaultWindowDays;
  double cadence_days = kDefaultCadenceDays;
  std::optional<double> t_end;
  double mesh_step = 0.05;

  SessionConfig session(const InjectionProfile& schedule) const;
};

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);  // throws ParseError
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace fiseis
