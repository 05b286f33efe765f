#pragma once

#include <cstdint>

namespace fxnet::calendar {

struct CivilDate {
  int year;
  unsigned month;  // 1..12
  unsigned day;    // 1..31
};

// Proleptic Gregorian conversions (H. Hinnant's days_from_civil / civil_from_days).
constexpr std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

constexpr CivilDate civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return {static_cast<int>(y + (m <= 2)), m, d};
}

constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  return a / b - ((a % b != 0) && ((a < 0) != (b < 0)));
}

constexpr CivilDate date_of_hour(std::int64_t epoch_hour) {
  return civil_from_days(floor_div(epoch_hour, 24));
}

constexpr int hour_of_day(std::int64_t epoch_hour) {
  return static_cast<int>(epoch_hour - floor_div(epoch_hour, 24) * 24);
}

// 0 = Sunday ... 6 = Saturday.
constexpr int weekday(std::int64_t epoch_day) {
  return static_cast<int>(epoch_day >= -4 ? (epoch_day + 4) % 7 : (epoch_day + 5) % 7 + 6);
}

constexpr bool is_weekend_hour(std::int64_t epoch_hour) {
  const int wd = weekday(floor_div(epoch_hour, 24));
  return wd == 0 || wd == 6;
}

constexpr int quarter_of(unsigned month) { return static_cast<int>((month - 1) / 3 + 1); }

}  // namespace fxnet::calendar
