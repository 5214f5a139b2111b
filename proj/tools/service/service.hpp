#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

#include "fiseis/config.hpp"
#include "fiseis/error.hpp"
#include "fiseis/json_io.hpp"
#include "fiseis/session.hpp"

namespace httplib {
class Server;
}

namespace fiseis::service {

/// A request the service refuses; carries the HTTP status to answer with.
class RequestError : public Error {
 public:
  RequestError(int status, const std::string& what) : Error(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

/// Serialized snapshot shared with any number of readers.
struct Published {
  std::uint64_t sequence = 0;
  Snapshot snapshot;
  std::string json;
};

/**
 * Registry of online sessions. Each session has one writer at a time
 * (event ingestion, shut-in) and any number of readers (posterior,
 * forecast, what-if, stream). After every accepted write the snapshot is
 * rebuilt and published as an immutable string.
 *
 * With a data directory every accepted write is appended to
 * <dir>/<id>.jsonl before the call returns, and the constructor replays
 * those logs to recover sessions after a crash.
 */
class SessionService {
 public:
  // `default_schedule` is used when a create request carries no schedule.
  explicit SessionService(RunConfig defaults, std::optional<std::filesystem::path> data_dir = {},
                          std::optional<InjectionProfile> default_schedule = {});
  ~SessionService();

  // Body: {optional schedule, prior, m0, mu, grid, h_hours, mesh_step, fit_mle}.
  std::string create(const Json& body);
  // Body: {"events": [{"t":..,"m":..}, ...] or [[t, m], ...], optional "t_now"}.
  Json add_events(const std::string& id, const Json& body);
  // Body: {"t": t_s}.
  Json declare_shut_in(const std::string& id, const Json& body);

  // Latest summary; `full` adds the axes and the weight tensor.
  Json posterior(const std::string& id, bool full = false) const;
  Json forecast(const std::string& id, std::optional<double> h_hours) const;
  Json what_if(const std::string& id, double shut_in_at, std::optional<double> h_hours) const;

  // Latest published snapshot.
  std::shared_ptr<const Published> latest(const std::string& id) const;
  // Blocks until a snapshot newer than `after` is published, the timeout
  // passes or the service shuts down; returns the newest snapshot if any.
  std::shared_ptr<const Published> wait_newer(const std::string& id, std::uint64_t after,
                                              std::chrono::milliseconds timeout) const;

  std::size_t size() const;
  void shutdown();
  bool stopping() const noexcept { return stopping_; }

 private:
  struct Entry;
  std::shared_ptr<Entry> find(const std::string& id) const;
  std::shared_ptr<Entry> build(const Json& body) const;
  void apply_events(Entry& e, const Json& body);
  void apply_shut_in(Entry& e, const Json& body);
  void publish(Entry& e);
  void append_log(const std::string& id, const Json& record);
  void recover();

  RunConfig defaults_;
  std::optional<std::filesystem::path> data_dir_;
  std::optional<InjectionProfile> default_schedule_;
  mutable std::mutex registry_mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::atomic<bool> stopping_{false};
};

// Registers the /v1 routes on `server`.
void install_routes(httplib::Server& server, SessionService& service);

}  // namespace fiseis::service
