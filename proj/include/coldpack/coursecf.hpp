#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "coldpack/domain.hpp"

namespace coldpack {

// Symmetric course/course co-occurrence counts. Entry (i,j) is the number of
// distinct users who booked both courses; the diagonal counts distinct users
// per course.
struct CooccurrenceMatrix {
    std::vector<Id> course_ids;  // sorted; defines the matrix index
    std::unordered_map<Id, int> index;
    std::vector<std::vector<std::uint32_t>> counts;

    int index_of(const Id& id) const {
        auto it = index.find(id);
        return it == index.end() ? -1 : it->second;
    }

    std::uint32_t at(const Id& i, const Id& j) const {
        int a = index_of(i), b = index_of(j);
        if (a < 0 || b < 0) return 0;
        return counts[a][b];
    }
};

// Builds the matrix over an explicit course universe. Multiple bookings of
// the same pair by one user count once.
inline CooccurrenceMatrix build_cooccurrence(const std::vector<Booking>& bookings,
                                             const std::vector<Id>& course_universe) {
    CooccurrenceMatrix m;
    m.course_ids = course_universe;
    std::sort(m.course_ids.begin(), m.course_ids.end());
    m.course_ids.erase(std::unique(m.course_ids.begin(), m.course_ids.end()),
                       m.course_ids.end());
    for (std::size_t i = 0; i < m.course_ids.size(); ++i)
        m.index[m.course_ids[i]] = static_cast<int>(i);
    m.counts.assign(m.course_ids.size(),
                    std::vector<std::uint32_t>(m.course_ids.size(), 0));

    std::map<Id, std::set<int>> user_courses;
    for (const auto& b : bookings) {
        int ci = m.index_of(b.course_id);
        if (ci < 0) throw std::runtime_error("build_cooccurrence: course not in universe: " +
                                             b.course_id);
        user_courses[b.user_id].insert(ci);
    }
    for (const auto& [user, courses] : user_courses) {
        for (auto it = courses.begin(); it != courses.end(); ++it) {
            ++m.counts[*it][*it];
            for (auto jt = std::next(it); jt != courses.end(); ++jt) {
                ++m.counts[*it][*jt];
                ++m.counts[*jt][*it];
            }
        }
    }
    return m;
}

inline CooccurrenceMatrix build_cooccurrence(const std::vector<Booking>& bookings) {
    std::vector<Id> universe;
    for (const auto& b : bookings) universe.push_back(b.course_id);
    return build_cooccurrence(bookings, universe);
}

// Cosine similarity over raw co-counts; 0 whenever either diagonal is empty.
inline double cooccurrence_cosine(const CooccurrenceMatrix& m, int i, int j) {
    double di = m.counts[i][i], dj = m.counts[j][j];
    if (di == 0 || dj == 0) return 0.0;
    return m.counts[i][j] / std::sqrt(di * dj);
}

// Per-candidate course score: mean cosine between the candidate and each of
// the user's distinct booked courses. The user's own courses stay eligible.
inline std::map<Id, double> course_scores(const std::vector<Booking>& history,
                                          const CooccurrenceMatrix& m) {
    std::map<Id, double> out;
    std::set<int> booked;
    for (const auto& b : history) {
        int i = m.index_of(b.course_id);
        if (i >= 0) booked.insert(i);
    }
    if (booked.empty()) return out;
    for (std::size_t j = 0; j < m.course_ids.size(); ++j) {
        double s = 0;
        for (int i : booked) s += cooccurrence_cosine(m, i, static_cast<int>(j));
        out[m.course_ids[j]] = s / static_cast<double>(booked.size());
    }
    return out;
}

// Top-m courses by score (ties: lower id). The reference course is appended
// when it did not make the cut, so downstream price anchoring never loses it.
inline std::vector<Id> filter_courses(const std::map<Id, double>& scores, int top_m,
                                      const std::optional<Id>& reference_course = std::nullopt) {
    if (top_m < 1) throw std::invalid_argument("filter_courses: top_m must be >= 1");
    std::vector<std::pair<Id, double>> ranked(scores.begin(), scores.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    std::vector<Id> out;
    for (std::size_t i = 0; i < ranked.size() && i < static_cast<std::size_t>(top_m); ++i)
        out.push_back(ranked[i].first);
    if (reference_course &&
        std::find(out.begin(), out.end(), *reference_course) == out.end())
        out.push_back(*reference_course);
    return out;
}

}  // namespace coldpack
