#include "fiseis/config.hpp"

#include <fstream>
#include <sstream>

#include "fiseis/error.hpp"
#include "fiseis/json_io.hpp"

namespace fiseis {

SessionConfig RunConfig::session(const InjectionProfile& schedule) const {
  SessionConfig c;
  c.prior = prior;
  c.schedule = schedule;
  c.m0 = m0;
  c.mu = mu;
  c.grid.nodes_per_axis = grid_nodes;
  c.h_days = h_days;
  c.mesh_step = mesh_step;
  return c;
}

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("config must be a JSON object");
  RunConfig c;
  const auto num = [&](const char* key, double& out) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_number()) throw ParseError(std::string("config: '") + key + "' not a number");
    out = j.at(key).get<double>();
  };
  if (j.contains("prior")) {
    c.prior = prior_from_json(j.at("prior"));
  } else if (j.contains("prior_file")) {
    const auto path = base_dir / j.at("prior_file").get<std::string>();
    try {
      c.prior = prior_from_json(Json::parse(read_text_file(path)));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("prior file: " + std::string(e.what()));
    }
  }
  num("m0", c.m0);
  num("mu", c.mu);
  num("cadence_days", c.cadence_days);
  num("mesh_step", c.mesh_step);
  if (j.contains("grid")) {
    if (!j.at("grid").is_number_unsigned()) throw ParseError("config: 'grid' must be a count");
    c.grid_nodes = j.at("grid").get<std::size_t>();
  }
  if (j.contains("h_hours")) {
    double hours = 0.0;
    num("h_hours", hours);
    c.h_days = hours / 24.0;
  }
  if (j.contains("t_end")) {
    double t = 0.0;
    num("t_end", t);
    c.t_end = t;
  }
  if (!(c.h_days > 0.0) || !(c.cadence_days > 0.0) || !(c.m0 < c.mu) || !(c.mesh_step > 0.0)) {
    throw ParseError("config: need h_hours > 0, cadence_days > 0, mesh_step > 0, m0 < mu");
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_text_file(path), path.parent_path());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace fiseis
