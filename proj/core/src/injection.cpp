#include "fiseis/injection.hpp"

#include <algorithm>
#include <cmath>

#include "csv.hpp"
#include "fiseis/catalog.hpp"
#include "fiseis/error.hpp"

namespace fiseis {

InjectionProfile InjectionProfile::make(std::vector<Breakpoint> breakpoints,
                                        std::optional<double> shut_in) {
  if (breakpoints.empty()) throw InvalidArgument("injection: no breakpoints");
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    const auto& bp = breakpoints[i];
    if (!std::isfinite(bp.t) || !std::isfinite(bp.rate)) {
      throw InvalidArgument("injection: breakpoint " + std::to_string(i) + " is not finite");
    }
    if (bp.t < 0.0) throw InvalidArgument("injection: breakpoint before t = 0");
    if (bp.rate < 0.0) throw InvalidArgument("injection: negative rate");
    if (i > 0 && !(breakpoints[i - 1].t < bp.t)) {
      throw InvalidArgument("injection: breakpoint times must be strictly increasing");
    }
  }
  if (shut_in) {
    const auto& last = breakpoints.back();
    if (last.t != *shut_in || last.rate != 0.0) {
      throw InvalidArgument("injection: shut-in must be the last breakpoint with zero rate");
    }
    if (breakpoints.size() < 2 || breakpoints[breakpoints.size() - 2].rate <= 0.0) {
      throw InvalidArgument("injection: rate just before shut-in must be positive");
    }
  }

  InjectionProfile p;
  p.cumulative_.resize(breakpoints.size());
  p.cumulative_[0] = 0.0;
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    p.cumulative_[i] =
        p.cumulative_[i - 1] + breakpoints[i - 1].rate * (breakpoints[i].t - breakpoints[i - 1].t);
  }
  p.breakpoints_ = std::move(breakpoints);
  p.shut_in_ = shut_in;
  return p;
}

InjectionProfile InjectionProfile::constant(double rate, std::optional<double> shut_in) {
  std::vector<Breakpoint> bps{{0.0, rate}};
  if (shut_in) bps.push_back({*shut_in, 0.0});
  return make(std::move(bps), shut_in);
}

// Index of the last breakpoint with t_i <= t, or npos when t precedes all.
std::size_t InjectionProfile::segment_index(double t) const {
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t,
                                   [](double v, const Breakpoint& bp) { return v < bp.t; });
  if (it == breakpoints_.begin()) return static_cast<std::size_t>(-1);
  return static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
}

double InjectionProfile::rate(double t) const {
  const auto i = segment_index(t);
  return i == static_cast<std::size_t>(-1) ? 0.0 : breakpoints_[i].rate;
}

double InjectionProfile::rate_before(double t) const {
  const auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), t,
                                   [](const Breakpoint& bp, double v) { return bp.t < v; });
  if (it == breakpoints_.begin()) return 0.0;
  return std::prev(it)->rate;
}

double InjectionProfile::shut_in_rate() const {
  if (!shut_in_) return 0.0;
  return breakpoints_[breakpoints_.size() - 2].rate;
}

double InjectionProfile::volume(double t) const {
  const auto i = segment_index(t);
  if (i == static_cast<std::size_t>(-1)) return 0.0;
  return cumulative_[i] + breakpoints_[i].rate * (t - breakpoints_[i].t);
}

double InjectionProfile::max_rate() const {
  double r = 0.0;
  for (const auto& bp : breakpoints_) r = std::max(r, bp.rate);
  return r;
}

double InjectionProfile::final_rate() const {
  return breakpoints_.empty() ? 0.0 : breakpoints_.back().rate;
}

InjectionProfile InjectionProfile::with_shut_in(double t_s) const {
  if (!std::isfinite(t_s) || t_s <= 0.0) throw InvalidArgument("shut-in time must be positive");
  std::vector<Breakpoint> kept;
  for (const auto& bp : breakpoints_) {
    if (bp.t >= t_s) break;
    kept.push_back(bp);
  }
  if (kept.empty() || kept.back().rate <= 0.0) {
    throw InvalidArgument("injection rate just before shut-in at t=" + format_double(t_s) +
                          " is not positive");
  }
  kept.push_back({t_s, 0.0});
  return make(std::move(kept), t_s);
}

InjectionProfile InjectionProfile::scaled(double k) const {
  if (!(k >= 0.0) || !std::isfinite(k)) throw InvalidArgument("scale factor must be >= 0");
  auto bps = breakpoints_;
  for (auto& bp : bps) bp.rate *= k;
  if (shut_in_ && k == 0.0) return make(std::move(bps));
  return make(std::move(bps), shut_in_);
}

InjectionProfile parse_injection(std::string_view text) {
  const auto lines = detail::split_csv(text);
  detail::expect_header(lines, {"t_days", "rate_m3_per_day", "shutin"});
  if (lines.size() < 2) throw ParseError("injection file has no rows");

  std::vector<InjectionProfile::Breakpoint> bps;
  std::optional<double> shut_in;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& line = lines[i];
    if (line.fields.size() != 3) {
      throw ParseError("expected 3 fields, got " + std::to_string(line.fields.size()), line.number);
    }
    const double t = detail::parse_finite(line.fields[0], line.number, "time");
    const double rate = detail::parse_finite(line.fields[1], line.number, "rate");
    const auto flag = line.fields[2];
    if (flag != "0" && flag != "1") throw ParseError("shutin must be 0 or 1", line.number);
    if (t < 0.0) throw ParseError("negative time", line.number);
    if (rate < 0.0) throw ParseError("negative rate", line.number);
    if (!bps.empty() && !(bps.back().t < t)) {
      throw ParseError("times must be strictly increasing", line.number);
    }
    if (shut_in) throw ParseError("rows after the shut-in row", line.number);
    if (flag == "1") {
      if (rate != 0.0) throw ParseError("shut-in row must have zero rate", line.number);
      if (bps.empty() || bps.back().rate <= 0.0) {
        throw ParseError("rate before shut-in must be positive", line.number);
      }
      shut_in = t;
    }
    bps.push_back({t, rate});
  }
  return InjectionProfile::make(std::move(bps), shut_in);
}

std::string write_injection_csv(const InjectionProfile& profile) {
  std::string out = "t_days,rate_m3_per_day,shutin\n";
  const auto& bps = profile.breakpoints();
  for (std::size_t i = 0; i < bps.size(); ++i) {
    const bool is_shut_in = profile.shut_in() && i + 1 == bps.size();
    out += format_double(bps[i].t);
    out += ',';
    out += format_double(bps[i].rate);
    out += is_shut_in ? ",1\n" : ",0\n";
  }
  return out;
}

}  // namespace fiseis
