#pragma once

#include <chrono>
#include <random>
#include <string>

#include "openuas/stay_features.hpp"

namespace testutil {

using namespace std::chrono;

// Monday 2023-04-03 plus `day` days.
inline year_month_day day_from_monday(int day) {
  return year_month_day{sys_days{year{2023} / April / 3} + days{day}};
}

inline openuas::StayRecord stay(std::string user, double lat, double lon, int day, int minute, std::int64_t dur) {
  openuas::StayRecord s;
  s.user_id = std::move(user);
  s.latitude = lat;
  s.longitude = lon;
  s.arrival.date = day_from_monday(day);
  s.arrival.minute_of_day = minute;
  s.duration_minutes = dur;
  return s;
}

}  // namespace testutil
