#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>

namespace openuas {

inline constexpr int kArrivalBins = 12;
inline constexpr int kDurationBins = 7;
inline constexpr int kDayTypes = 2;
inline constexpr int kStayClasses = kDayTypes * kArrivalBins * kDurationBins;  // 168

// Lower edges (minutes) of duration bins 1..6; bins are half-open [lo, hi).
inline constexpr std::array<int, kDurationBins - 1> kDurationEdges{30, 60, 120, 240, 360, 720};

enum class DayType : std::uint8_t { Weekday = 0, WeekendOrHoliday = 1 };

// Local wall-clock time at minute precision. No time zone is attached.
struct LocalDateTime {
  std::chrono::year_month_day date{};
  int minute_of_day = 0;  // 0..1439

  // Parses `YYYY-MM-DDTHH:MM`. Throws ParseError.
  static LocalDateTime parse(std::string_view text);
  std::string to_string() const;

  // 0 = Monday .. 6 = Sunday.
  int iso_weekday_index() const;
  // Minutes since Monday 00:00 of the same week, 0..10079.
  int minute_of_week() const { return iso_weekday_index() * 1440 + minute_of_day; }

  friend bool operator==(const LocalDateTime&, const LocalDateTime&) = default;
};

struct StayRecord {
  std::string user_id;
  double latitude = 0.0;
  double longitude = 0.0;
  LocalDateTime arrival;
  std::int64_t duration_minutes = 0;

  // Throws DataError when coordinates or duration are out of range.
  void validate() const;

  friend bool operator==(const StayRecord&, const StayRecord&) = default;
};

struct StayClass {
  DayType day_type = DayType::Weekday;
  int arrival_bin = 0;   // 0..11, two-hour bins
  int duration_bin = 0;  // 0..6

  int index() const {
    return static_cast<int>(day_type) * (kArrivalBins * kDurationBins) +
           arrival_bin * kDurationBins + duration_bin;
  }

  friend bool operator==(const StayClass&, const StayClass&) = default;
};

class HolidayCalendar {
 public:
  HolidayCalendar() = default;
  explicit HolidayCalendar(std::set<std::chrono::year_month_day> dates)
      : dates_(std::move(dates)) {}

  // One `YYYY-MM-DD` per line; blank lines and `#` comments are ignored.
  static HolidayCalendar parse(std::string_view text);
  static HolidayCalendar load(const std::string& path);

  void add(std::chrono::year_month_day date) { dates_.insert(date); }
  bool is_holiday(std::chrono::year_month_day date) const { return dates_.count(date) != 0; }
  bool empty() const { return dates_.empty(); }
  const std::set<std::chrono::year_month_day>& dates() const { return dates_; }

 private:
  std::set<std::chrono::year_month_day> dates_;
};

int duration_bin(std::int64_t duration_minutes);

DayType day_type_of(const LocalDateTime& t, const HolidayCalendar& cal);

// Classifies a stay by its arrival (start) time only.
StayClass discretize(const StayRecord& stay, const HolidayCalendar& cal);

// Classification for week-position records (minutes since Monday 00:00), as used
// by anchor data. Saturday and Sunday positions are WeekendOrHoliday.
StayClass discretize_week_position(int minute_of_week, std::int64_t duration_minutes);

// Inverse of StayClass::index(). Throws std::out_of_range outside 0..167.
StayClass class_label(int index);

std::chrono::year_month_day parse_date(std::string_view text);

}  // namespace openuas
