#include "service.hpp"

#include <httplib.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "fiseis/error.hpp"

namespace fiseis::service {

struct SessionService::Entry {
  explicit Entry(SessionConfig config, Json create_record)
      : session(std::move(config)), record(std::move(create_record)) {}

  mutable std::shared_mutex rw;  // one writer, many readers
  Session session;
  Json record;  // effective create body, as logged

  mutable std::mutex pub_mutex;
  mutable std::condition_variable pub_cv;
  std::shared_ptr<const Published> published;
};

namespace {

std::string new_id() {
  static std::mutex m;
  static std::random_device rd;
  static std::mt19937_64 gen((std::uint64_t(rd()) << 32) ^ rd());
  std::lock_guard lock(m);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(gen()));
  return buf;
}

double finite_number(const Json& j, const char* key) {
  if (!j.is_number()) throw ParseError(std::string("'") + key + "' must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(std::string("'") + key + "' must be finite");
  return v;
}

std::vector<SeismicEvent> parse_events(const Json& body) {
  if (!body.is_object() || !body.contains("events") || !body["events"].is_array()) {
    throw ParseError("body needs an 'events' array");
  }
  std::vector<SeismicEvent> out;
  for (const auto& e : body["events"]) {
    if (e.is_array() && e.size() == 2) {
      out.push_back({finite_number(e[0], "t"), finite_number(e[1], "m")});
    } else if (e.is_object() && e.contains("t") && e.contains("m")) {
      out.push_back({finite_number(e["t"], "t"), finite_number(e["m"], "m")});
    } else {
      throw ParseError("event must be {\"t\":..,\"m\":..} or [t, m]");
    }
  }
  return out;
}

double positive_hours(double hours) {
  if (!std::isfinite(hours) || hours <= 0.0) throw ParseError("h_hours must be positive");
  return hours / 24.0;
}

}  // namespace

SessionService::SessionService(RunConfig defaults, std::optional<std::filesystem::path> data_dir,
                               std::optional<InjectionProfile> default_schedule)
    : defaults_(std::move(defaults)),
      data_dir_(std::move(data_dir)),
      default_schedule_(std::move(default_schedule)) {
  if (data_dir_) {
    std::filesystem::create_directories(*data_dir_);
    recover();
  }
}

SessionService::~SessionService() { shutdown(); }

std::shared_ptr<SessionService::Entry> SessionService::build(const Json& body) const {
  if (!body.is_object()) throw ParseError("body must be a JSON object");
  InjectionProfile schedule;
  if (body.contains("schedule")) {
    schedule = profile_from_json(body["schedule"]);
  } else if (default_schedule_) {
    schedule = *default_schedule_;
  } else {
    throw ParseError("body needs a 'schedule'");
  }
  auto cfg = defaults_.session(schedule);
  if (body.contains("prior")) cfg.prior = prior_from_json(body["prior"]);
  if (body.contains("m0")) cfg.m0 = finite_number(body["m0"], "m0");
  if (body.contains("mu")) cfg.mu = finite_number(body["mu"], "mu");
  if (body.contains("grid")) {
    if (!body["grid"].is_number_unsigned()) throw ParseError("'grid' must be a positive integer");
    cfg.grid.nodes_per_axis = body["grid"].get<std::size_t>();
  }
  if (body.contains("h_hours")) cfg.h_days = positive_hours(finite_number(body["h_hours"], "h_hours"));
  if (body.contains("mesh_step")) {
    cfg.mesh_step = finite_number(body["mesh_step"], "mesh_step");
    if (cfg.mesh_step <= 0.0) throw ParseError("mesh_step must be positive");
  }
  if (body.contains("fit_mle")) {
    if (!body["fit_mle"].is_boolean()) throw ParseError("'fit_mle' must be a boolean");
    cfg.fit_mle = body["fit_mle"].get<bool>();
  }
  if (!(cfg.m0 < cfg.mu)) throw ParseError("m0 must be below mu");

  Json record{{"schedule", profile_to_json(cfg.schedule)},
              {"prior", prior_to_json(cfg.prior)},
              {"m0", cfg.m0},
              {"mu", cfg.mu},
              {"grid", cfg.grid.nodes_per_axis},
              {"h_hours", cfg.h_days * 24.0},
              {"mesh_step", cfg.mesh_step},
              {"fit_mle", cfg.fit_mle}};
  return std::make_shared<Entry>(std::move(cfg), std::move(record));
}

std::string SessionService::create(const Json& body) {
  if (stopping_) throw RequestError(503, "service is shutting down");
  auto entry = build(body);
  publish(*entry);
  std::string id;
  {
    std::lock_guard lock(registry_mutex_);
    do id = new_id();
    while (sessions_.count(id));
    sessions_.emplace(id, entry);
  }
  append_log(id, Json{{"op", "create"}, {"id", id}, {"body", entry->record}});
  return id;
}

std::shared_ptr<SessionService::Entry> SessionService::find(const std::string& id) const {
  std::lock_guard lock(registry_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw RequestError(404, "unknown session " + id);
  return it->second;
}

void SessionService::apply_events(Entry& e, const Json& body) {
  const auto events = parse_events(body);
  std::optional<double> t_now;
  if (body.contains("t_now") && !body["t_now"].is_null()) t_now = finite_number(body["t_now"], "t_now");
  e.session.add_events(events, t_now);
}

void SessionService::apply_shut_in(Entry& e, const Json& body) {
  if (!body.is_object() || !body.contains("t")) throw ParseError("body needs 't'");
  e.session.declare_shut_in(finite_number(body["t"], "t"));
}

Json SessionService::add_events(const std::string& id, const Json& body) {
  auto e = find(id);
  std::unique_lock lock(e->rw);
  apply_events(*e, body);
  append_log(id, Json{{"op", "events"}, {"id", id}, {"body", body}});
  publish(*e);
  return Json{{"accepted", body["events"].size()},
              {"n_events", e->session.events().size()},
              {"t_now", e->session.now()},
              {"sequence", e->session.version()},
              {"likelihood_mode", to_string(e->session.mode())}};
}

Json SessionService::declare_shut_in(const std::string& id, const Json& body) {
  auto e = find(id);
  std::unique_lock lock(e->rw);
  apply_shut_in(*e, body);
  append_log(id, Json{{"op", "shutin"}, {"id", id}, {"body", body}});
  publish(*e);
  return Json{{"shut_in", *e->session.shut_in()},
              {"t_now", e->session.now()},
              {"sequence", e->session.version()},
              {"likelihood_mode", to_string(e->session.mode())}};
}

void SessionService::publish(Entry& e) {
  auto p = std::make_shared<Published>();
  p->snapshot = e.session.snapshot();
  p->sequence = p->snapshot.sequence;
  p->json = snapshot_to_json(p->snapshot).dump();
  {
    std::lock_guard lock(e.pub_mutex);
    e.published = std::move(p);
  }
  e.pub_cv.notify_all();
}

Json SessionService::posterior(const std::string& id, bool full) const {
  auto e = find(id);
  if (!full) {
    const auto p = latest(id);
    const auto& s = p->snapshot;
    return Json{{"sequence", s.sequence},
                {"t_now", s.t_now},
                {"likelihood_mode", to_string(s.likelihood_mode)},
                {"n_events", s.n_events},
                {"summary", summary_to_json(s.summary)}};
  }
  std::shared_lock lock(e->rw);
  std::shared_ptr<const Published> p;
  {
    std::lock_guard plock(e->pub_mutex);
    p = e->published;
  }
  auto j = posterior_to_json(e->session.posterior(), p->snapshot.summary);
  j["sequence"] = p->sequence;
  j["t_now"] = e->session.now();
  j["likelihood_mode"] = to_string(e->session.mode());
  return j;
}

Json SessionService::forecast(const std::string& id, std::optional<double> h_hours) const {
  auto e = find(id);
  std::shared_lock lock(e->rw);
  const double h = h_hours ? positive_hours(*h_hours) : e->session.config().h_days;
  const auto counts = e->session.forecast_counts(h);
  const auto maxmag = e->session.forecast_max_magnitude(h);
  ForecastFlags flags;
  flags.post_shut_in = e->session.shut_in().has_value();
  auto j = forecast_to_json(counts, &maxmag, flags);
  j["sequence"] = e->session.version();
  j["likelihood_mode"] = to_string(e->session.mode());
  return j;
}

Json SessionService::what_if(const std::string& id, double shut_in_at,
                             std::optional<double> h_hours) const {
  auto e = find(id);
  std::shared_lock lock(e->rw);
  std::optional<double> h;
  if (h_hours) h = positive_hours(*h_hours);
  auto j = what_if_to_json(e->session.what_if(shut_in_at, h));
  j["sequence"] = e->session.version();
  return j;
}

std::shared_ptr<const Published> SessionService::latest(const std::string& id) const {
  auto e = find(id);
  std::lock_guard lock(e->pub_mutex);
  return e->published;
}

std::shared_ptr<const Published> SessionService::wait_newer(const std::string& id,
                                                            std::uint64_t after,
                                                            std::chrono::milliseconds timeout) const {
  auto e = find(id);
  std::unique_lock lock(e->pub_mutex);
  e->pub_cv.wait_for(lock, timeout, [&] {
    return stopping_ || (e->published && e->published->sequence > after);
  });
  return e->published;
}

std::size_t SessionService::size() const {
  std::lock_guard lock(registry_mutex_);
  return sessions_.size();
}

void SessionService::shutdown() {
  stopping_ = true;
  std::vector<std::shared_ptr<Entry>> all;
  {
    std::lock_guard lock(registry_mutex_);
    for (auto& [id, e] : sessions_) all.push_back(e);
  }
  for (auto& e : all) {
    std::lock_guard lock(e->pub_mutex);
    e->pub_cv.notify_all();
  }
}

void SessionService::append_log(const std::string& id, const Json& record) {
  if (!data_dir_) return;
  std::ofstream out(*data_dir_ / (id + ".jsonl"), std::ios::app);
  out << record.dump() << '\n';
  out.flush();
  if (!out) throw Error("cannot append to session log for " + id);
}

void SessionService::recover() {
  for (const auto& file : std::filesystem::directory_iterator(*data_dir_)) {
    if (file.path().extension() != ".jsonl") continue;
    const std::string id = file.path().stem().string();
    std::ifstream in(file.path());
    std::shared_ptr<Entry> entry;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      Json rec;
      try {
        rec = Json::parse(line);
      } catch (const Json::exception&) {
        break;  // torn write at the tail
      }
      const std::string op = rec.value("op", "");
      const Json& body = rec["body"];
      if (op == "create" && !entry) {
        entry = build(body);
      } else if (entry && op == "events") {
        apply_events(*entry, body);
      } else if (entry && op == "shutin") {
        apply_shut_in(*entry, body);
      }
    }
    if (!entry) continue;
    publish(*entry);
    std::lock_guard lock(registry_mutex_);
    sessions_.emplace(id, std::move(entry));
  }
}

namespace {

void send_json(httplib::Response& res, int status, const Json& j) {
  res.status = status;
  res.set_content(j.dump(), "application/json");
}

template <class F>
void guarded(httplib::Response& res, F&& f) {
  try {
    f();
  } catch (const RequestError& e) {
    send_json(res, e.status(), Json{{"error", e.what()}});
  } catch (const ConflictError& e) {
    send_json(res, 409, Json{{"error", e.what()}});
  } catch (const ParseError& e) {
    send_json(res, 400, Json{{"error", e.what()}});
  } catch (const InvalidArgument& e) {
    send_json(res, 400, Json{{"error", e.what()}});
  } catch (const Json::exception& e) {
    send_json(res, 400, Json{{"error", e.what()}});
  } catch (const EvidenceUnderflow& e) {
    send_json(res, 422, Json{{"error", e.what()}});
  } catch (const std::exception& e) {
    send_json(res, 500, Json{{"error", e.what()}});
  }
}

Json parse_body(const httplib::Request& req) {
  try {
    return Json::parse(req.body);
  } catch (const Json::exception& e) {
    throw RequestError(400, std::string("malformed JSON body: ") + e.what());
  }
}

std::optional<double> query_number(const httplib::Request& req, const char* key) {
  if (!req.has_param(key)) return std::nullopt;
  const auto text = req.get_param_value(key);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(v)) {
    throw RequestError(400, std::string("query parameter '") + key + "' is not a number");
  }
  return v;
}

std::string sse_message(const Published& p) {
  std::string out = "id: " + std::to_string(p.sequence) + "\nevent: snapshot\ndata: ";
  out += p.json;
  out += "\n\n";
  return out;
}

}  // namespace

void install_routes(httplib::Server& server, SessionService& service) {
  const std::string sid = "/v1/sessions/([0-9a-f]+)";

  server.Post("/v1/sessions", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const Json body = req.body.empty() ? Json::object() : parse_body(req);
      const auto id = service.create(body);
      send_json(res, 201, Json{{"id", id}});
    });
  });

  server.Post(sid + "/events", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, service.add_events(req.matches[1], parse_body(req))); });
  });

  server.Post(sid + "/shutin", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, service.declare_shut_in(req.matches[1], parse_body(req))); });
  });

  server.Get(sid + "/posterior", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const bool full = req.has_param("full") && req.get_param_value("full") != "0" &&
                        req.get_param_value("full") != "false";
      send_json(res, 200, service.posterior(req.matches[1], full));
    });
  });

  server.Get(sid + "/forecast", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      send_json(res, 200, service.forecast(req.matches[1], query_number(req, "h_hours")));
    });
  });

  server.Get(sid + "/whatif", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto at = query_number(req, "shutin_at");
      if (!at) throw RequestError(400, "query parameter 'shutin_at' is required");
      send_json(res, 200, service.what_if(req.matches[1], *at, query_number(req, "h_hours")));
    });
  });

  server.Get(sid + "/stream", [&](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string id = req.matches[1];
      service.latest(id);  // 404 before committing to a stream
      auto last = std::make_shared<std::optional<std::uint64_t>>();
      if (req.has_header("Last-Event-ID")) {
        try {
          *last = std::stoull(req.get_header_value("Last-Event-ID"));
        } catch (const std::exception&) {
        }
      }
      res.set_header("Cache-Control", "no-cache");
      res.set_chunked_content_provider(
          "text/event-stream", [&service, id, last](std::size_t, httplib::DataSink& sink) {
            if (service.stopping()) {
              sink.done();
              return false;
            }
            std::shared_ptr<const Published> p;
            if (!*last) {
              p = service.latest(id);
            } else {
              p = service.wait_newer(id, **last, std::chrono::seconds(1));
              if (p && p->sequence <= **last) p.reset();
            }
            const std::string msg = p ? sse_message(*p) : std::string(": keep-alive\n\n");
            if (!sink.write(msg.data(), msg.size())) return false;
            if (p) *last = p->sequence;
            return true;
          });
    });
  });
}

}  // namespace fiseis::service
