#include "openuas/stay_features.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "openuas/error.hpp"

namespace openuas {

namespace {

int parse_fixed_int(std::string_view text, std::size_t pos, std::size_t len, std::string_view whole) {
  int value = 0;
  const char* first = text.data() + pos;
  auto [ptr, ec] = std::from_chars(first, first + len, value);
  if (ec != std::errc{} || ptr != first + len) {
    throw ParseError("malformed date/time '" + std::string(whole) + "'");
  }
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::chrono::year_month_day parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw ParseError("malformed date '" + std::string(text) + "', expected YYYY-MM-DD");
  }
  const int y = parse_fixed_int(text, 0, 4, text);
  const int m = parse_fixed_int(text, 5, 2, text);
  const int d = parse_fixed_int(text, 8, 2, text);
  std::chrono::year_month_day date{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                   std::chrono::day{static_cast<unsigned>(d)}};
  if (!date.ok()) throw ParseError("invalid calendar date '" + std::string(text) + "'");
  return date;
}

LocalDateTime LocalDateTime::parse(std::string_view text) {
  if (text.size() != 16 || text[10] != 'T' || text[13] != ':') {
    throw ParseError("malformed timestamp '" + std::string(text) + "', expected YYYY-MM-DDTHH:MM");
  }
  LocalDateTime t;
  t.date = parse_date(text.substr(0, 10));
  const int hh = parse_fixed_int(text, 11, 2, text);
  const int mm = parse_fixed_int(text, 14, 2, text);
  if (hh > 23 || mm > 59) throw ParseError("invalid time of day in '" + std::string(text) + "'");
  t.minute_of_day = hh * 60 + mm;
  return t;
}

std::string LocalDateTime::to_string() const {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()),
                minute_of_day / 60, minute_of_day % 60);
  return buf;
}

int LocalDateTime::iso_weekday_index() const {
  return static_cast<int>(std::chrono::weekday{std::chrono::sys_days{date}}.iso_encoding()) - 1;
}

void StayRecord::validate() const {
  if (!(latitude >= -90.0 && latitude <= 90.0)) {
    throw DataError("latitude out of range: " + std::to_string(latitude));
  }
  if (!(longitude >= -180.0 && longitude <= 180.0)) {
    throw DataError("longitude out of range: " + std::to_string(longitude));
  }
  if (duration_minutes < 0) throw DataError("negative stay duration");
  if (arrival.minute_of_day < 0 || arrival.minute_of_day >= 1440 || !arrival.date.ok()) {
    throw DataError("invalid arrival time");
  }
}

HolidayCalendar HolidayCalendar::parse(std::string_view text) {
  HolidayCalendar cal;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    try {
      cal.add(parse_date(line));
    } catch (const ParseError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return cal;
}

HolidayCalendar HolidayCalendar::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open holiday calendar '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

int duration_bin(std::int64_t duration_minutes) {
  int bin = 0;
  for (int edge : kDurationEdges) {
    if (duration_minutes >= edge) ++bin;
  }
  return bin;
}

DayType day_type_of(const LocalDateTime& t, const HolidayCalendar& cal) {
  const int wd = t.iso_weekday_index();
  if (wd >= 5 || cal.is_holiday(t.date)) return DayType::WeekendOrHoliday;
  return DayType::Weekday;
}

StayClass discretize(const StayRecord& stay, const HolidayCalendar& cal) {
  return StayClass{day_type_of(stay.arrival, cal), stay.arrival.minute_of_day / 120,
                   duration_bin(stay.duration_minutes)};
}

StayClass discretize_week_position(int minute_of_week, std::int64_t duration_minutes) {
  const int day = minute_of_week / 1440;
  const int minute_of_day = minute_of_week % 1440;
  return StayClass{day >= 5 ? DayType::WeekendOrHoliday : DayType::Weekday, minute_of_day / 120,
                   duration_bin(duration_minutes)};
}

StayClass class_label(int index) {
  if (index < 0 || index >= kStayClasses) {
    throw std::out_of_range("stay class index " + std::to_string(index) + " outside 0..167");
  }
  constexpr int per_day = kArrivalBins * kDurationBins;
  return StayClass{static_cast<DayType>(index / per_day), (index % per_day) / kDurationBins,
                   index % kDurationBins};
}

}  // namespace openuas
