#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "coldpack/domain.hpp"
#include "coldpack/rng.hpp"

namespace coldpack {

// Per-user behavioral aggregate. The dimension order below is fixed: it is
// the coordinate system of the logistic coefficient vectors.
inline constexpr int kUserVectorDim = 11;
inline constexpr const char* kUserVectorDimNames[kUserVectorDim] = {
    "lunch_rate",      "competition_rate", "holiday_rate",      "caddie_rate",
    "avg_spending",    "std_spending",     "avg_course_rating", "std_course_rating",
    "avg_num_parties", "std_num_parties",  "avg_party_size"};

struct UserVector {
    double lunch_rate = 0, competition_rate = 0, holiday_rate = 0, caddie_rate = 0;
    double avg_spending = 0, std_spending = 0;
    double avg_course_rating = 0, std_course_rating = 0;
    double avg_num_parties = 0, std_num_parties = 0;
    double avg_party_size = 0;
    int n_bookings = 0;

    std::vector<double> to_vector() const {
        return {lunch_rate,      competition_rate, holiday_rate,      caddie_rate,
                avg_spending,    std_spending,     avg_course_rating, std_course_rating,
                avg_num_parties, std_num_parties,  avg_party_size};
    }
};

struct MeanSd {
    double mean = 0, sd = 0;
};

inline MeanSd population_stats(const std::vector<double>& xs) {
    MeanSd r;
    if (xs.empty()) return r;
    r.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    double ss = 0;
    for (double x : xs) ss += (x - r.mean) * (x - r.mean);
    r.sd = std::sqrt(ss / xs.size());
    return r;
}

// Builds the behavior vector from one user's bookings. Rates are fractions of
// bookings carrying the flag; all deviations are population (divide-by-n), so
// a single-booking user gets zeroed sd fields.
inline UserVector build_user_vector(const std::vector<Booking>& bookings,
                                    const std::unordered_map<Id, double>& rating_by_course) {
    if (bookings.empty()) throw std::invalid_argument("build_user_vector: empty history");
    UserVector v;
    v.n_bookings = static_cast<int>(bookings.size());
    std::vector<double> prices, ratings, parties, sizes;
    prices.reserve(bookings.size());
    for (const auto& b : bookings) {
        v.lunch_rate += b.options.lunch;
        v.competition_rate += b.options.competition;
        v.holiday_rate += b.options.holiday;
        v.caddie_rate += b.options.caddie;
        prices.push_back(static_cast<double>(b.price_paid));
        auto it = rating_by_course.find(b.course_id);
        if (it == rating_by_course.end())
            throw std::runtime_error("build_user_vector: unknown course " + b.course_id);
        ratings.push_back(it->second);
        parties.push_back(b.num_parties);
        sizes.push_back(b.party_size);
    }
    double n = static_cast<double>(bookings.size());
    v.lunch_rate /= n;
    v.competition_rate /= n;
    v.holiday_rate /= n;
    v.caddie_rate /= n;
    MeanSd sp = population_stats(prices);
    v.avg_spending = sp.mean;
    v.std_spending = sp.sd;
    MeanSd ra = population_stats(ratings);
    v.avg_course_rating = ra.mean;
    v.std_course_rating = ra.sd;
    MeanSd pa = population_stats(parties);
    v.avg_num_parties = pa.mean;
    v.std_num_parties = pa.sd;
    v.avg_party_size = population_stats(sizes).mean;
    return v;
}

// Z-transform fitted on a set of vectors. Constant dimensions store sd 1 so
// they standardize to 0 instead of dividing by zero.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> sd;

    std::vector<double> apply(const std::vector<double>& v) const {
        if (v.size() != mean.size())
            throw std::invalid_argument("standardizer: dimension mismatch");
        std::vector<double> out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - mean[i]) / sd[i];
        return out;
    }
};

inline Standardizer fit_standardizer(const std::vector<std::vector<double>>& vectors) {
    if (vectors.size() < 2)
        throw std::invalid_argument("fit_standardizer: need at least 2 vectors");
    std::size_t dim = vectors[0].size();
    Standardizer s;
    s.mean.assign(dim, 0.0);
    s.sd.assign(dim, 0.0);
    for (const auto& v : vectors) {
        if (v.size() != dim) throw std::invalid_argument("fit_standardizer: ragged input");
        for (std::size_t i = 0; i < dim; ++i) s.mean[i] += v[i];
    }
    for (double& m : s.mean) m /= static_cast<double>(vectors.size());
    for (const auto& v : vectors)
        for (std::size_t i = 0; i < dim; ++i) s.sd[i] += (v[i] - s.mean[i]) * (v[i] - s.mean[i]);
    for (double& x : s.sd) {
        x = std::sqrt(x / static_cast<double>(vectors.size()));
        if (x == 0.0) x = 1.0;
    }
    return s;
}

inline double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

struct Clustering {
    int k = 0;
    std::vector<std::vector<double>> centroids;  // in standardized space
    std::vector<int> assignment;                 // per input vector
    double inertia = 0;
    int iterations = 0;
    std::vector<double> inertia_trace;           // per Lloyd iteration
};

// Nearest centroid; ties go to the lowest cluster id.
inline int assign_cluster(const std::vector<double>& v, const Clustering& c) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int j = 0; j < c.k; ++j) {
        double d = squared_distance(v, c.centroids[j]);
        if (d < best_d) {
            best_d = d;
            best = j;
        }
    }
    return best;
}

namespace detail {

// Canonical ordering makes the seeded k-means++ draws independent of the
// input permutation: the RNG indexes into a lexicographically sorted view.
inline std::vector<std::size_t> canonical_order(const std::vector<std::vector<double>>& pts) {
    std::vector<std::size_t> order(pts.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return pts[a] < pts[b];
    });
    return order;
}

inline std::vector<std::vector<double>> kmeanspp_seed(
    const std::vector<std::vector<double>>& pts, const std::vector<std::size_t>& order,
    int k, Rng& rng) {
    std::vector<std::vector<double>> centers;
    centers.reserve(k);
    centers.push_back(pts[order[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(pts.size()) - 1))]]);
    std::vector<double> d2(pts.size());
    while (static_cast<int>(centers.size()) < k) {
        double total = 0;
        for (std::size_t oi = 0; oi < order.size(); ++oi) {
            const auto& p = pts[order[oi]];
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : centers) best = std::min(best, squared_distance(p, c));
            d2[oi] = best;
            total += best;
        }
        std::size_t pick;
        if (total <= 0) {
            pick = static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<std::int64_t>(order.size()) - 1));
        } else {
            double x = rng.uniform() * total;
            pick = order.size() - 1;
            for (std::size_t oi = 0; oi < order.size(); ++oi) {
                x -= d2[oi];
                if (x < 0) {
                    pick = oi;
                    break;
                }
            }
        }
        centers.push_back(pts[order[pick]]);
    }
    return centers;
}

}  // namespace detail

// Lloyd iterations from k-means++ seeding. The objective is non-increasing;
// iteration stops at max_iter or when the relative inertia change drops
// below tol. Deterministic given the seed, regardless of input order.
inline Clustering kmeans(const std::vector<std::vector<double>>& points, int k,
                         std::uint64_t seed, int max_iter = 100, double tol = 1e-6) {
    if (k < 1) throw std::invalid_argument("kmeans: k must be >= 1");
    if (points.size() < static_cast<std::size_t>(k))
        throw std::invalid_argument("kmeans: more clusters than points");

    auto order = detail::canonical_order(points);
    Rng rng(seed);
    Clustering c;
    c.k = k;
    c.centroids = detail::kmeanspp_seed(points, order, k, rng);
    c.assignment.assign(points.size(), 0);

    double prev_inertia = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < max_iter; ++iter) {
        c.iterations = iter + 1;
        bool changed = false;
        c.inertia = 0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            int a = assign_cluster(points[i], c);
            if (a != c.assignment[i]) changed = true;
            c.assignment[i] = a;
            c.inertia += squared_distance(points[i], c.centroids[a]);
        }
        c.inertia_trace.push_back(c.inertia);

        // Recompute centroids; an emptied cluster is reseeded at the point
        // currently farthest from its assigned centroid.
        std::vector<std::vector<double>> sums(k, std::vector<double>(points[0].size(), 0.0));
        std::vector<int> counts(k, 0);
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto& p = points[i];
            auto& s = sums[c.assignment[i]];
            for (std::size_t j = 0; j < p.size(); ++j) s[j] += p[j];
            ++counts[c.assignment[i]];
        }
        for (int j = 0; j < k; ++j) {
            if (counts[j] == 0) {
                double far_d = -1;
                std::size_t far_i = order[0];
                for (std::size_t oi : order) {
                    double d = squared_distance(points[oi], c.centroids[c.assignment[oi]]);
                    if (d > far_d) {
                        far_d = d;
                        far_i = oi;
                    }
                }
                c.centroids[j] = points[far_i];
                c.assignment[far_i] = j;
                changed = true;
            } else {
                for (std::size_t t = 0; t < sums[j].size(); ++t)
                    c.centroids[j][t] = sums[j][t] / counts[j];
            }
        }

        if (!changed && iter > 0) break;
        if (prev_inertia < std::numeric_limits<double>::infinity() && prev_inertia > 0) {
            double rel = (prev_inertia - c.inertia) / prev_inertia;
            if (rel >= 0 && rel < tol) break;
        }
        prev_inertia = c.inertia;
    }

    // Final pass so assignment, centroids and inertia are mutually consistent.
    c.inertia = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        c.assignment[i] = assign_cluster(points[i], c);
        c.inertia += squared_distance(points[i], c.centroids[c.assignment[i]]);
    }
    c.inertia_trace.push_back(c.inertia);
    return c;
}

// User segmentation over a dataset: behavior vectors for every booked user,
// a z-transform and k-means fitted on the users with at least two distinct
// booked courses, and a post-hoc nearest-centroid assignment for the rest.
struct UserSegmentation {
    std::vector<Id> users;             // sorted; every user with bookings
    std::vector<UserVector> vectors;   // aligned with users
    std::vector<char> eligible;        // >= 2 distinct booked courses
    Standardizer standardizer;
    Clustering clustering;             // fitted over the eligible subset
    std::map<Id, int> assignment;      // cluster per user (all users)
};

inline UserSegmentation segment_users(const Dataset& data, int k, std::uint64_t seed,
                                      int max_iter = 100, double tol = 1e-6) {
    std::unordered_map<Id, double> ratings;
    for (const auto& c : data.courses) ratings.emplace(c.id, c.rating);

    UserSegmentation seg;
    for (const auto& [user, history] : group_bookings_by_user(data.bookings)) {
        seg.users.push_back(user);
        seg.vectors.push_back(build_user_vector(history, ratings));
        std::set<Id> distinct;
        for (const auto& b : history) distinct.insert(b.course_id);
        seg.eligible.push_back(distinct.size() >= 2);
    }

    std::vector<std::vector<double>> eligible_vectors;
    for (std::size_t i = 0; i < seg.users.size(); ++i)
        if (seg.eligible[i]) eligible_vectors.push_back(seg.vectors[i].to_vector());
    if (eligible_vectors.size() < 2) {
        // Tiny corpora: fall back to every booked user.
        eligible_vectors.clear();
        for (const auto& v : seg.vectors) eligible_vectors.push_back(v.to_vector());
        std::fill(seg.eligible.begin(), seg.eligible.end(), 1);
    }
    if (eligible_vectors.size() < 2)
        throw std::runtime_error("segment_users: need at least 2 user vectors");

    seg.standardizer = fit_standardizer(eligible_vectors);
    std::vector<std::vector<double>> std_vectors;
    std_vectors.reserve(eligible_vectors.size());
    for (const auto& v : eligible_vectors) std_vectors.push_back(seg.standardizer.apply(v));
    int k_eff = std::min<int>(k, static_cast<int>(std_vectors.size()));
    // A few restarts guard against poor k-means++ draws; best inertia wins.
    seg.clustering = kmeans(std_vectors, k_eff, seed, max_iter, tol);
    for (std::uint64_t restart = 1; restart < 5; ++restart) {
        Clustering c = kmeans(std_vectors, k_eff, seed + restart * 7919, max_iter, tol);
        if (c.inertia < seg.clustering.inertia) seg.clustering = std::move(c);
    }

    for (std::size_t i = 0; i < seg.users.size(); ++i)
        seg.assignment[seg.users[i]] =
            assign_cluster(seg.standardizer.apply(seg.vectors[i].to_vector()), seg.clustering);
    return seg;
}

// Adjusted Rand index between two labelings of the same points.
inline double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("ari: size mismatch");
    std::size_t n = a.size();
    if (n < 2) return 1.0;
    std::unordered_map<int, int> ida, idb;
    for (int x : a) ida.emplace(x, static_cast<int>(ida.size()));
    for (int x : b) idb.emplace(x, static_cast<int>(idb.size()));
    std::vector<std::vector<long long>> table(ida.size(), std::vector<long long>(idb.size(), 0));
    for (std::size_t i = 0; i < n; ++i) ++table[ida[a[i]]][idb[b[i]]];

    auto choose2 = [](long long x) { return x * (x - 1) / 2.0; };
    double sum_ij = 0, sum_a = 0, sum_b = 0;
    std::vector<long long> rows(ida.size(), 0), cols(idb.size(), 0);
    for (std::size_t i = 0; i < table.size(); ++i)
        for (std::size_t j = 0; j < table[i].size(); ++j) {
            sum_ij += choose2(table[i][j]);
            rows[i] += table[i][j];
            cols[j] += table[i][j];
        }
    for (long long r : rows) sum_a += choose2(r);
    for (long long c : cols) sum_b += choose2(c);
    double total = choose2(static_cast<long long>(n));
    double expected = sum_a * sum_b / total;
    double max_index = 0.5 * (sum_a + sum_b);
    if (max_index == expected) return 1.0;
    return (sum_ij - expected) / (max_index - expected);
}

}  // namespace coldpack
