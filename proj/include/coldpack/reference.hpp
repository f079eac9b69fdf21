#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "coldpack/dates.hpp"
#include "coldpack/domain.hpp"

namespace coldpack {

// Smooth circular month kernel: 1 at distance 0, 0 at distance 6.
inline double month_kernel(int circular_distance) {
    return (1.0 + std::cos(3.14159265358979323846 * circular_distance / 6.0)) / 2.0;
}

// Seasonal affinity of a course for a target month: every booking on the
// course contributes the kernel of its play month's distance to the target.
inline double seasonal_course_score(const std::vector<Booking>& bookings_on_course,
                                    int target_month) {
    double s = 0;
    for (const auto& b : bookings_on_course)
        s += month_kernel(month_circular_distance(month_of(b.play_date), target_month));
    return s;
}

struct ReferenceSelection {
    Id course_id;
    Id package_id;
    double score = 0;
    Date selected_at;
};

// Reference course = seasonal-score argmax over the user's booked courses
// (ties: course of the most recent booking, then lowest id). The reference
// package is the last one booked on that course (ties: lowest package id).
inline ReferenceSelection select_reference(const std::vector<Booking>& history,
                                           Date target_date) {
    if (history.empty()) throw std::invalid_argument("select_reference: empty history");
    int target_month = month_of(target_date);

    std::map<Id, std::vector<Booking>> by_course;
    for (const auto& b : history) by_course[b.course_id].push_back(b);

    Id best_course;
    double best_score = -1;
    Date best_recency{INT32_MIN};
    for (const auto& [course, bookings] : by_course) {
        double score = seasonal_course_score(bookings, target_month);
        Date recency{INT32_MIN};
        for (const auto& b : bookings) recency = std::max(recency, b.booked_at);
        bool better = score > best_score ||
                      (score == best_score &&
                       (recency > best_recency ||
                        (recency == best_recency && course < best_course)));
        if (best_course.empty() || better) {
            best_course = course;
            best_score = score;
            best_recency = recency;
        }
    }

    const Booking* ref = nullptr;
    for (const auto& b : by_course[best_course]) {
        if (!ref || b.booked_at > ref->booked_at ||
            (b.booked_at == ref->booked_at && b.package_id < ref->package_id)) {
            ref = &b;
        }
    }
    return ReferenceSelection{best_course, ref->package_id, best_score, target_date};
}

}  // namespace coldpack
