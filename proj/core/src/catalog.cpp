#include "fiseis/catalog.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>

#include "csv.hpp"
#include "fiseis/error.hpp"

namespace fiseis {

SeismicCatalog SeismicCatalog::make(std::vector<SeismicEvent> events, double m0, double t_end,
                                    std::string label) {
  if (!std::isfinite(m0)) throw InvalidArgument("catalog: m0 must be finite");
  if (!std::isfinite(t_end) || t_end < 0.0) {
    throw InvalidArgument("catalog: t_end must be finite and >= 0");
  }
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    if (!std::isfinite(e.t) || !std::isfinite(e.m)) {
      throw InvalidArgument("catalog: event " + std::to_string(i) + " is not finite");
    }
    if (e.t < 0.0) throw InvalidArgument("catalog: event " + std::to_string(i) + " before t = 0");
    if (e.m < m0) {
      throw InvalidArgument("catalog: event " + std::to_string(i) + " below completeness m0");
    }
    if (e.t > t_end) {
      throw InvalidArgument("catalog: event " + std::to_string(i) + " after window end");
    }
    if (i > 0 && !(events[i - 1].t < e.t)) {
      throw InvalidArgument("catalog: event times must be strictly increasing (event " +
                            std::to_string(i) + ")");
    }
  }
  SeismicCatalog c;
  c.events_ = std::move(events);
  c.m0_ = m0;
  c.t_end_ = t_end;
  c.label_ = std::move(label);
  return c;
}

SeismicCatalog SeismicCatalog::truncated(double t_cut) const {
  std::vector<SeismicEvent> kept;
  for (const auto& e : events_) {
    if (e.t > t_cut) break;
    kept.push_back(e);
  }
  return make(std::move(kept), m0_, std::max(t_cut, 0.0), label_);
}

SeismicCatalog SeismicCatalog::with_t_end(double t_end) const {
  return make(events_, m0_, t_end, label_);
}

std::vector<double> SeismicCatalog::times() const {
  std::vector<double> out;
  out.reserve(events_.size());
  for (const auto& e : events_) out.push_back(e.t);
  return out;
}

std::vector<double> SeismicCatalog::magnitudes() const {
  std::vector<double> out;
  out.reserve(events_.size());
  for (const auto& e : events_) out.push_back(e.m);
  return out;
}

CatalogParseResult parse_catalog_detailed(std::string_view text, double m0,
                                          const CatalogParseOptions& options) {
  const auto lines = detail::split_csv(text);
  detail::expect_header(lines, {"t_days", "magnitude"});

  struct Row {
    SeismicEvent event;
    std::size_t line;
  };
  std::vector<Row> rows;
  CatalogParseResult result;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& line = lines[i];
    if (line.fields.size() != 2) {
      throw ParseError("expected 2 fields, got " + std::to_string(line.fields.size()), line.number);
    }
    const double t = detail::parse_finite(line.fields[0], line.number, "time");
    const double m = detail::parse_finite(line.fields[1], line.number, "magnitude");
    if (t < 0.0) throw ParseError("negative event time", line.number);
    if (m < m0) {
      ++result.below_completeness;
      continue;
    }
    rows.push_back({{t, m}, line.number});
  }

  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& a, const Row& b) { return a.event.t < b.event.t; });

  std::vector<SeismicEvent> events;
  events.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!events.empty() && rows[i].event.t == events.back().t) {
      if (options.duplicates == DuplicatePolicy::reject) {
        throw ParseError("duplicate event time " + format_double(rows[i].event.t), rows[i].line);
      }
      result.dropped_duplicate_lines.push_back(rows[i].line);
      continue;
    }
    events.push_back(rows[i].event);
  }

  double t_end = events.empty() ? 0.0 : events.back().t;
  if (options.t_end) {
    if (*options.t_end < t_end) throw ParseError("event after the requested window end");
    t_end = *options.t_end;
  }
  result.catalog = SeismicCatalog::make(std::move(events), m0, t_end, options.label);
  return result;
}

SeismicCatalog parse_catalog(std::string_view text, double m0, std::optional<double> t_end) {
  CatalogParseOptions options;
  options.t_end = t_end;
  return parse_catalog_detailed(text, m0, options).catalog;
}

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

std::string write_catalog_csv(const SeismicCatalog& catalog) {
  std::string out = "t_days,magnitude\n";
  for (const auto& e : catalog.events()) {
    out += format_double(e.t);
    out += ',';
    out += format_double(e.m);
    out += '\n';
  }
  return out;
}

}  // namespace fiseis
