#pragma once

#include <string_view>

namespace openuas {

// How the anchor loss is weighted against the data loss during training.
//   None        - anchors carry no weight (p = 0)
//   Mixed       - anchors are concatenated with the data as ordinary areas
//   Constant    - p = alpha for every epoch
//   Exponential - p decays from beta at the first epoch to alpha at the last
enum class ScheduleKind { None, Mixed, Constant, Exponential };

std::string_view to_string(ScheduleKind kind);
ScheduleKind parse_schedule_kind(std::string_view text);

struct AnchorSchedule {
  ScheduleKind kind = ScheduleKind::None;
  double alpha = 0.3;
  double beta = 1.0;

  // Throws ConfigError on parameters outside (0, 1] or alpha > beta for Exponential.
  void validate() const;
};

// Anchoring power at epoch `t` of `total` (0 <= t <= total):
//   p = exp((t / total) * (ln alpha - ln beta) + ln beta)
// Mixed has no weighting and returns NaN; callers must not use p for it.
double anchoring_power(int t, int total, const AnchorSchedule& schedule);

}  // namespace openuas
