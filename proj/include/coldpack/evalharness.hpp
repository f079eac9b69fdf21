#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "coldpack/dates.hpp"
#include "coldpack/domain.hpp"

namespace coldpack {

// ---------------------------------------------------------------------------
// Expected minimum precision.
// ---------------------------------------------------------------------------

// Mean over users of |top-n recommendations ∩ truth| / |truth|. Users with
// empty truth are excluded; with no countable user the metric is undefined
// and reported as absent.
inline std::optional<double> emp_at_n(
    const std::map<Id, std::vector<Id>>& recommendations,
    const std::map<Id, std::set<Id>>& truth, int n) {
    if (n < 1) throw std::invalid_argument("emp_at_n: n must be >= 1");
    double sum = 0;
    int counted = 0;
    for (const auto& [user, truth_set] : truth) {
        if (truth_set.empty()) continue;
        int hits = 0;
        auto rit = recommendations.find(user);
        if (rit != recommendations.end()) {
            const auto& recs = rit->second;
            for (std::size_t i = 0; i < recs.size() && i < static_cast<std::size_t>(n); ++i)
                if (truth_set.count(recs[i])) ++hits;
        }
        sum += static_cast<double>(hits) / static_cast<double>(truth_set.size());
        ++counted;
    }
    if (counted == 0) return std::nullopt;
    return sum / static_cast<double>(counted);
}

// ---------------------------------------------------------------------------
// Jaccard baseline.
// ---------------------------------------------------------------------------

// Attribute set of a package: the set flags of O plus name=value tokens for
// the remaining attributes. Price is not part of the set.
inline std::set<std::string> attribute_tokens(const Package& p) {
    std::set<std::string> s;
    auto flags = option_flags(p);
    for (int k = 0; k < kNumOptionFlags; ++k)
        if (flags[k]) s.insert(kOptionFlagNames[k]);
    s.insert("min_party_size=" + std::to_string(p.options.min_party_size));
    s.insert("min_num_parties=" + std::to_string(p.options.min_num_parties));
    s.insert("num_laps=" + std::to_string(p.options.num_laps));
    s.insert("promotion_type=" + p.promotion_type);
    return s;
}

// |A ∩ B| / |A ∪ B|; two empty sets count as identical.
inline double jaccard_tokens(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    std::size_t inter = 0;
    for (const auto& t : a) inter += b.count(t);
    std::size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

inline double jaccard_similarity(const Package& p, const Package& p_ref) {
    return jaccard_tokens(attribute_tokens(p), attribute_tokens(p_ref));
}

// ---------------------------------------------------------------------------
// Temporal split.
// ---------------------------------------------------------------------------

struct TemporalSplit {
    std::vector<Booking> train;  // booked_at <= cutoff
    std::vector<Booking> test;   // cutoff < booked_at <= cutoff + horizon
    std::map<Id, std::set<Id>> truth;  // per-user package ids booked in the test window
    Date cutoff;
    int horizon_days = 15;
};

inline TemporalSplit temporal_split(const Dataset& d, Date cutoff, int horizon_days = 15) {
    if (horizon_days < 1) throw std::invalid_argument("temporal_split: horizon must be >= 1");
    TemporalSplit s;
    s.cutoff = cutoff;
    s.horizon_days = horizon_days;
    Date test_end = cutoff.plus_days(horizon_days);
    for (const auto& b : d.bookings) {
        if (b.booked_at <= cutoff) {
            s.train.push_back(b);
        } else if (b.booked_at <= test_end) {
            s.test.push_back(b);
            s.truth[b.user_id].insert(b.package_id);
        }
    }
    if (s.train.empty())
        throw std::runtime_error("temporal_split: no bookings on the train side of " +
                                 to_iso(cutoff));
    if (s.test.empty())
        throw std::runtime_error("temporal_split: no bookings in (" + to_iso(cutoff) + ", " +
                                 to_iso(test_end) + "]");
    return s;
}

// Restriction of a dataset to what is knowable at the cutoff: bookings made
// by then, plus packages whose active window has started or that some kept
// booking references (booked ahead of an upcoming window). Trained artifacts
// must derive from this slice only.
inline Dataset train_slice(const Dataset& d, Date cutoff) {
    Dataset out;
    out.courses = d.courses;
    out.holiday_calendar = d.holiday_calendar;
    std::set<Id> referenced;
    for (const auto& b : d.bookings)
        if (b.booked_at <= cutoff) {
            out.bookings.push_back(b);
            referenced.insert(b.package_id);
        }
    for (const auto& p : d.packages)
        if (p.active_from <= cutoff || referenced.count(p.id)) out.packages.push_back(p);
    return out;
}

}  // namespace coldpack
