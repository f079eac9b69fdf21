#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <cstdint>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "coldpack/dates.hpp"

namespace coldpack {

// Money is stored in integer minor currency units throughout.
using Money = std::int64_t;

using Id = std::string;

struct Course {
    Id id;
    double rating = 0.0;  // [1.0, 5.0]
    Id region;            // generator-only grouping
};

// Binary option flags plus the small integer attributes of a package.
struct OptionVector {
    int lunch = 0;
    int caddie = 0;
    int competition = 0;
    int holiday = 0;
    int pair_party = 0;
    int min_party_size = 1;
    int min_num_parties = 1;
    int num_laps = 1;

    bool operator==(const OptionVector&) const = default;
};

// The flag subset O over which the option similarity sums, in fixed order.
inline constexpr int kNumOptionFlags = 5;
inline constexpr const char* kOptionFlagNames[kNumOptionFlags] = {
    "lunch", "caddie", "competition", "holiday", "pair_party"};

struct Package {
    Id id;
    Id course_id;
    Date active_from;
    Date active_to;
    int play_month = 1;  // 1..12
    int play_dow = 1;    // ISO: 1=Mon .. 7=Sun
    OptionVector options;
    Money price = 0;
    std::string promotion_type = "none";
    int shortness = 0;  // active_to - active_from, days
};

struct Booking {
    Id user_id;
    Id course_id;
    Id package_id;
    Date booked_at;
    Date play_date;
    Money price_paid = 0;
    OptionVector options;  // snapshot of the package at booking time
    int party_size = 1;
    int num_parties = 1;
};

struct Dataset {
    std::vector<Course> courses;
    std::vector<Package> packages;
    std::vector<Booking> bookings;  // kept sorted ascending by booked_at
    std::set<Date> holiday_calendar;
};

// Ordered flag vector over O: (lunch, caddie, competition, holiday, pair_party).
inline std::array<int, kNumOptionFlags> option_flags(const OptionVector& o) {
    return {o.lunch, o.caddie, o.competition, o.holiday, o.pair_party};
}

inline std::array<int, kNumOptionFlags> option_flags(const Package& p) {
    return option_flags(p.options);
}

struct Violation {
    std::string entity_id;
    std::string rule;
};

using ValidationReport = std::vector<Violation>;

inline void check_option_vector(const OptionVector& o, const std::string& id,
                                ValidationReport& report) {
    for (int f : option_flags(o)) {
        if (f != 0 && f != 1) {
            report.push_back({id, "option flag outside {0,1}"});
            break;
        }
    }
    if (o.min_party_size < 1) report.push_back({id, "min_party_size < 1"});
    if (o.min_num_parties < 1) report.push_back({id, "min_num_parties < 1"});
    if (o.num_laps < 1) report.push_back({id, "num_laps < 1"});
}

// Empty report iff every domain invariant holds. Entries carry the id of the
// offending entity and the violated rule.
inline ValidationReport validate_dataset(const Dataset& d) {
    ValidationReport report;

    std::unordered_map<Id, const Course*> courses;
    for (const auto& c : d.courses) {
        if (!courses.emplace(c.id, &c).second)
            report.push_back({c.id, "duplicate course id"});
        if (c.rating < 1.0 || c.rating > 5.0)
            report.push_back({c.id, "rating outside [1.0, 5.0]"});
    }

    std::unordered_map<Id, const Package*> packages;
    for (const auto& p : d.packages) {
        if (!packages.emplace(p.id, &p).second)
            report.push_back({p.id, "duplicate package id"});
        if (!courses.count(p.course_id))
            report.push_back({p.id, "package references missing course"});
        if (p.active_to < p.active_from)
            report.push_back({p.id, "active_to earlier than active_from"});
        if (p.shortness != p.active_to - p.active_from)
            report.push_back({p.id, "shortness != active_to - active_from"});
        if (p.price < 0) report.push_back({p.id, "negative price"});
        if (p.play_month < 1 || p.play_month > 12)
            report.push_back({p.id, "play_month outside 1..12"});
        if (p.play_dow < 1 || p.play_dow > 7)
            report.push_back({p.id, "play_dow outside 1..7"});
        check_option_vector(p.options, p.id, report);
    }

    const Booking* prev = nullptr;
    for (const auto& b : d.bookings) {
        std::string bid = b.user_id + "/" + b.package_id;
        if (!courses.count(b.course_id))
            report.push_back({bid, "booking references missing course"});
        auto pit = packages.find(b.package_id);
        if (pit == packages.end()) {
            report.push_back({bid, "booking references missing package"});
        } else {
            const Package& p = *pit->second;
            if (b.play_date < p.active_from || b.play_date > p.active_to)
                report.push_back({bid, "play_date outside package active window"});
            if (p.course_id != b.course_id)
                report.push_back({bid, "booking course differs from package course"});
        }
        if (b.price_paid < 0) report.push_back({bid, "negative price_paid"});
        if (b.party_size < 1) report.push_back({bid, "party_size < 1"});
        if (b.num_parties < 1) report.push_back({bid, "num_parties < 1"});
        check_option_vector(b.options, bid, report);
        if (prev && prev->booked_at > b.booked_at)
            report.push_back({bid, "bookings not sorted by booked_at"});
        prev = &b;
    }
    return report;
}

// Bookings per user; for a dataset in canonical order each user's bookings
// come out sorted ascending by booked_at.
inline std::map<Id, std::vector<Booking>> group_bookings_by_user(
    const std::vector<Booking>& bookings) {
    std::map<Id, std::vector<Booking>> out;
    for (const auto& b : bookings) out[b.user_id].push_back(b);
    return out;
}

// Canonical ordering used by the writers and restored on load.
inline void sort_dataset(Dataset& d) {
    std::sort(d.courses.begin(), d.courses.end(),
              [](const Course& a, const Course& b) { return a.id < b.id; });
    std::sort(d.packages.begin(), d.packages.end(),
              [](const Package& a, const Package& b) { return a.id < b.id; });
    std::sort(d.bookings.begin(), d.bookings.end(), [](const Booking& a, const Booking& b) {
        if (a.booked_at != b.booked_at) return a.booked_at < b.booked_at;
        if (a.user_id != b.user_id) return a.user_id < b.user_id;
        return a.package_id < b.package_id;
    });
}

}  // namespace coldpack
