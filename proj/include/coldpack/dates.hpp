#pragma once

#include <compare>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace coldpack {

// Calendar date stored as days since 1970-01-01 (proleptic Gregorian).
// The conversion routines follow the classic civil-days algorithms.
struct Date {
    std::int32_t days = 0;

    auto operator<=>(const Date&) const = default;

    Date plus_days(int n) const { return Date{days + n}; }
    int operator-(const Date& o) const { return days - o.days; }
};

struct CivilDate {
    int year;
    int month;  // 1..12
    int day;    // 1..31
};

inline std::int32_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int>(doe) - 719468;
}

inline CivilDate civil_from_days(std::int32_t z) {
    z += 719468;
    const int era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int y = static_cast<int>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return CivilDate{y + (m <= 2), static_cast<int>(m), static_cast<int>(d)};
}

inline Date make_date(int y, int m, int d) { return Date{days_from_civil(y, m, d)}; }

inline CivilDate to_civil(Date d) { return civil_from_days(d.days); }

inline int month_of(Date d) { return to_civil(d).month; }

inline int year_of(Date d) { return to_civil(d).year; }

// ISO weekday: 1 = Monday .. 7 = Sunday.
inline int weekday_iso(Date d) {
    // 1970-01-01 was a Thursday (ISO 4).
    int w = (d.days % 7 + 7) % 7;  // 0 == Thursday
    return (w + 3) % 7 + 1;
}

inline bool is_weekend(Date d) {
    int w = weekday_iso(d);
    return w == 6 || w == 7;
}

inline int days_in_month(int y, int m) {
    static const int n[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2) {
        bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
        return leap ? 29 : 28;
    }
    return n[m - 1];
}

// First day of the month `n` months after d's month.
inline Date add_months_first_day(Date d, int n) {
    CivilDate c = to_civil(d);
    int idx = (c.year * 12 + (c.month - 1)) + n;
    int y = idx / 12, m = idx % 12;
    if (m < 0) { m += 12; y -= 1; }
    return make_date(y, m + 1, 1);
}

// Circular distance between two months, in 0..6.
inline int month_circular_distance(int a, int b) {
    int d = a - b;
    if (d < 0) d = -d;
    return d > 6 ? 12 - d : d;
}

inline std::string to_iso(Date d) {
    CivilDate c = to_civil(d);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", c.year, c.month, c.day);
    return buf;
}

inline Date parse_iso_date(const std::string& s) {
    int y, m, d;
    if (std::sscanf(s.c_str(), "%d-%d-%d", &y, &m, &d) != 3 || m < 1 || m > 12 ||
        d < 1 || d > days_in_month(y, m)) {
        throw std::invalid_argument("bad ISO date: " + s);
    }
    return make_date(y, m, d);
}

}  // namespace coldpack
