#include <random>

#include "common.hpp"
#include "doctest.h"
#include "openuas/error.hpp"
#include "openuas/stay_features.hpp"

using namespace openuas;
using testutil::stay;

namespace {

// Bin from a linear scan of the edge list.
int oracle_duration_bin(std::int64_t d) {
  const int edges[] = {30, 60, 120, 240, 360, 720};
  int bin = 0;
  for (int e : edges) bin += d >= e ? 1 : 0;
  return bin;
}

}  // namespace

TEST_CASE("discretize: documented examples") {
  const HolidayCalendar none;
  // 2023-04-08 is a Saturday.
  auto sat = discretize(stay("u", 35, 139, 5, 10 * 60 + 30, 20), none);
  CHECK(sat.day_type == DayType::WeekendOrHoliday);
  CHECK(sat.arrival_bin == 5);
  CHECK(sat.duration_bin == 0);

  auto tue = discretize(stay("u", 35, 139, 1, 8 * 60 + 13, 45), none);
  CHECK(tue.index() == 29);

  auto mon = discretize(stay("u", 35, 139, 0, 0, 720), none);
  CHECK(mon.duration_bin == 6);
  CHECK(mon.day_type == DayType::Weekday);
}

TEST_CASE("duration bins tile [0, inf) at the half-open edges") {
  for (std::int64_t d = 0; d <= 2000; ++d) CHECK(duration_bin(d) == oracle_duration_bin(d));
  CHECK(duration_bin(29) == 0);
  CHECK(duration_bin(30) == 1);
  CHECK(duration_bin(359) == 4);
  CHECK(duration_bin(360) == 5);
  CHECK(duration_bin(719) == 5);
  CHECK(duration_bin(100000) == 6);
}

TEST_CASE("class_label inverts the index layout") {
  CHECK(class_label(0) == StayClass{DayType::Weekday, 0, 0});
  CHECK(class_label(167) == StayClass{DayType::WeekendOrHoliday, 11, 6});
  CHECK(class_label(29) == StayClass{DayType::Weekday, 4, 1});
  for (int i = 0; i < kStayClasses; ++i) CHECK(class_label(i).index() == i);
  CHECK_THROWS_AS(class_label(168), std::out_of_range);
  CHECK_THROWS_AS(class_label(-1), std::out_of_range);
}

TEST_CASE("partition: every random stay maps to exactly one in-range class") {
  std::mt19937_64 rng(7);
  const HolidayCalendar none;
  for (int i = 0; i < 20000; ++i) {
    const int day = static_cast<int>(rng() % 28);
    const int minute = static_cast<int>(rng() % 1440);
    const auto dur = static_cast<std::int64_t>(rng() % 3000);
    const StayClass c = discretize(stay("u", 35, 139, day, minute, dur), none);
    REQUIRE(c.index() >= 0);
    REQUIRE(c.index() < kStayClasses);
    CHECK(c.arrival_bin == minute / 120);
    CHECK(c.duration_bin == oracle_duration_bin(dur));
    CHECK(c.day_type == (day % 7 >= 5 ? DayType::WeekendOrHoliday : DayType::Weekday));
  }
}

TEST_CASE("calendar effect: holidays change only day_type") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    const auto s = stay("u", 35, 139, static_cast<int>(rng() % 28), static_cast<int>(rng() % 1440),
                        static_cast<std::int64_t>(rng() % 1000));
    HolidayCalendar cal;
    cal.add(s.arrival.date);
    const StayClass plain = discretize(s, HolidayCalendar{});
    const StayClass holiday = discretize(s, cal);
    CHECK(holiday.day_type == DayType::WeekendOrHoliday);
    CHECK(plain.arrival_bin == holiday.arrival_bin);
    CHECK(plain.duration_bin == holiday.duration_bin);
  }
}

TEST_CASE("week positions agree with calendar discretization without holidays") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 2000; ++i) {
    const auto s = stay("u", 35, 139, static_cast<int>(rng() % 28), static_cast<int>(rng() % 1440),
                        static_cast<std::int64_t>(rng() % 1000));
    CHECK(discretize_week_position(s.arrival.minute_of_week(), s.duration_minutes) ==
          discretize(s, HolidayCalendar{}));
  }
}

TEST_CASE("timestamps and holiday files parse strictly") {
  const auto t = LocalDateTime::parse("2023-04-05T23:59");
  CHECK(t.minute_of_day == 23 * 60 + 59);
  CHECK(t.iso_weekday_index() == 2);
  CHECK(t.to_string() == "2023-04-05T23:59");
  CHECK_THROWS_AS(LocalDateTime::parse("2023-02-30T10:00"), ParseError);
  CHECK_THROWS_AS(LocalDateTime::parse("2023-04-05 10:00"), ParseError);
  CHECK_THROWS_AS(LocalDateTime::parse("2023-04-05T24:00"), ParseError);

  const auto cal = HolidayCalendar::parse("# golden week\n2023-05-03\n\n2023-05-04  # comment\n");
  CHECK(cal.dates().size() == 2);
  CHECK(cal.is_holiday(parse_date("2023-05-04")));
  CHECK_THROWS_AS(HolidayCalendar::parse("2023-13-01\n"), ParseError);
}

TEST_CASE("stay validation") {
  auto s = stay("u", 35, 139, 0, 0, 10);
  CHECK_NOTHROW(s.validate());
  s.duration_minutes = -1;
  CHECK_THROWS_AS(s.validate(), DataError);
  s = stay("u", 95, 139, 0, 0, 10);
  CHECK_THROWS_AS(s.validate(), DataError);
}
