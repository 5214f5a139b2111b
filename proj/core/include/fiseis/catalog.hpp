#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fiseis {

struct SeismicEvent {
  double t;  // days since injection start
  double m;  // moment magnitude
  bool operator==(const SeismicEvent&) const = default;
};

/**
 * Events above the completeness magnitude m0 inside the observation window
 * [0, t_end]. Event times are strictly increasing: the time-rescaling tests
 * need distinct times, so ties are rejected at construction.
 */
class SeismicCatalog {
 public:
  SeismicCatalog() = default;

  // Validates ordering, completeness and the window. Throws InvalidArgument.
  static SeismicCatalog make(std::vector<SeismicEvent> events, double m0, double t_end,
                             std::string label = {});

  std::span<const SeismicEvent> events() const noexcept { return events_; }
  std::size_t size() const noexcept { return events_.size(); }
  bool empty() const noexcept { return events_.empty(); }
  double m0() const noexcept { return m0_; }
  double t_end() const noexcept { return t_end_; }
  const std::string& label() const noexcept { return label_; }

  // Events with t <= t_cut, window end moved to max(t_cut, last kept event).
  SeismicCatalog truncated(double t_cut) const;
  // Same events, new window end (must cover the last event).
  SeismicCatalog with_t_end(double t_end) const;

  std::vector<double> times() const;
  std::vector<double> magnitudes() const;

  bool operator==(const SeismicCatalog&) const = default;

 private:
  std::vector<SeismicEvent> events_;
  double m0_ = 0.0;
  double t_end_ = 0.0;
  std::string label_;
};

enum class DuplicatePolicy {
  reject,      // any repeated timestamp is a ParseError
  keep_first,  // later rows sharing a timestamp are dropped and reported
};

struct CatalogParseOptions {
  std::optional<double> t_end;  // defaults to the last kept event time
  DuplicatePolicy duplicates = DuplicatePolicy::reject;
  std::string label;
};

struct CatalogParseResult {
  SeismicCatalog catalog;
  std::vector<std::size_t> dropped_duplicate_lines;  // keep_first mode only
  std::size_t below_completeness = 0;
};

// Events CSV: header `t_days,magnitude`, LF or CRLF line endings.
CatalogParseResult parse_catalog_detailed(std::string_view text, double m0,
                                          const CatalogParseOptions& options = {});
SeismicCatalog parse_catalog(std::string_view text, double m0,
                             std::optional<double> t_end = std::nullopt);
std::string write_catalog_csv(const SeismicCatalog& catalog);

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace fiseis
