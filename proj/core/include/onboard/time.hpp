#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace onboard {

/// UTC instant with millisecond resolution.
struct Timestamp {
  std::int64_t epoch_ms = 0;

  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

/// Calendar month in UTC, encoded as year * 12 + (month - 1) so that
/// consecutive months differ by exactly one.
struct MonthKey {
  std::int32_t value = 0;

  friend auto operator<=>(const MonthKey&, const MonthKey&) = default;
};

/// Accepts "YYYY-MM-DDTHH:MM:SS[.fff...](Z|+HH:MM|-HH:MM)"; a space may
/// replace the 'T'. Fractional digits beyond milliseconds are truncated.
std::optional<Timestamp> parse_rfc3339(std::string_view text);

/// Always emits UTC with a 'Z' suffix; milliseconds only when nonzero.
std::string format_rfc3339(Timestamp ts);

MonthKey month_of(Timestamp ts);
std::string format_month(MonthKey m);

inline double days_between(Timestamp from, Timestamp to) {
  return static_cast<double>(to.epoch_ms - from.epoch_ms) / 86'400'000.0;
}

}  // namespace onboard
