#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fiseis {

/**
 * Right-continuous step function of injection flow rate V'(t), in m^3/day,
 * with an optional permanent shut-in time t_s.
 *
 * Before the first breakpoint the rate is zero. When a shut-in is set the
 * last breakpoint sits at t_s with rate zero and the rate just before it,
 * V'(t_s-), is strictly positive. Fitted activation-feedback values depend
 * on the flow-rate unit, so keep inputs in m^3/day.
 */
class InjectionProfile {
 public:
  struct Breakpoint {
    double t;
    double rate;
    bool operator==(const Breakpoint&) const = default;
  };

  InjectionProfile() = default;

  // Validates and builds a profile. Throws InvalidArgument.
  static InjectionProfile make(std::vector<Breakpoint> breakpoints,
                               std::optional<double> shut_in = std::nullopt);

  // Constant rate from t = 0, optionally shut in at `shut_in`.
  static InjectionProfile constant(double rate,
                                   std::optional<double> shut_in = std::nullopt);

  const std::vector<Breakpoint>& breakpoints() const noexcept { return breakpoints_; }
  std::optional<double> shut_in() const noexcept { return shut_in_; }

  // V'(t), right-continuous.
  double rate(double t) const;
  // V'(t-), the left limit.
  double rate_before(double t) const;
  // V'(t_s-); zero when no shut-in is set.
  double shut_in_rate() const;
  // Exact integral of the step function over [0, t]; 0 for t <= 0.
  double volume(double t) const;
  // Largest rate of any step.
  double max_rate() const;
  // Rate of the last step (what the schedule keeps doing forever).
  double final_rate() const;

  // Copy of this schedule stopped permanently at t_s. Breakpoints at or after
  // t_s are dropped. Throws InvalidArgument if V'(t_s-) is not positive.
  InjectionProfile with_shut_in(double t_s) const;

  // Every rate multiplied by k >= 0.
  InjectionProfile scaled(double k) const;

  bool operator==(const InjectionProfile& other) const {
    return breakpoints_ == other.breakpoints_ && shut_in_ == other.shut_in_;
  }

 private:
  std::size_t segment_index(double t) const;

  std::vector<Breakpoint> breakpoints_;
  std::vector<double> cumulative_;  // V at each breakpoint
  std::optional<double> shut_in_;
};

// V(t) for the profile.
inline double cumulative_volume(const InjectionProfile& profile, double t) {
  return profile.volume(t);
}

// Injection CSV: header `t_days,rate_m3_per_day,shutin`. Only the last row may
// carry shutin=1 and its rate must be zero.
InjectionProfile parse_injection(std::string_view text);
std::string write_injection_csv(const InjectionProfile& profile);

}  // namespace fiseis
