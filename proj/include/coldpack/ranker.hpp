#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "coldpack/behavior.hpp"
#include "coldpack/coursecf.hpp"
#include "coldpack/domain.hpp"
#include "coldpack/evalharness.hpp"
#include "coldpack/optionsim.hpp"
#include "coldpack/pricesim.hpp"
#include "coldpack/reference.hpp"

namespace coldpack {

// ---------------------------------------------------------------------------
// Fusion weights on the simplex.
// ---------------------------------------------------------------------------

struct FusionWeights {
    double w_price = 1.0 / 3.0;
    double w_opt = 1.0 / 3.0;
    double w_course = 1.0 / 3.0;

    static FusionWeights normalized(double p, double o, double c) {
        if (p < 0 || o < 0 || c < 0)
            throw std::invalid_argument("fusion weights must be nonnegative");
        double s = p + o + c;
        if (s <= 0) throw std::invalid_argument("fusion weights must not all be zero");
        return FusionWeights{p / s, o / s, c / s};
    }

    std::array<double, 3> as_array() const { return {w_price, w_opt, w_course}; }
};

// Weighted sum of already-normalized component scores.
inline double fuse_components(double norm_price, double norm_opt, double norm_course,
                              const FusionWeights& w) {
    return w.w_price * norm_price + w.w_opt * norm_opt + w.w_course * norm_course;
}

// Min-max normalization over a candidate set; a constant column maps to 0.
inline std::vector<double> minmax_normalize(const std::vector<double>& values) {
    std::vector<double> out(values.size(), 0.0);
    if (values.empty()) return out;
    double lo = *std::min_element(values.begin(), values.end());
    double hi = *std::max_element(values.begin(), values.end());
    if (hi > lo)
        for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - lo) / (hi - lo);
    return out;
}

// ---------------------------------------------------------------------------
// Trained model.
// ---------------------------------------------------------------------------

enum class Setting { jaccard, opt_only, full_no_r, full_with_r };

inline const char* setting_name(Setting s) {
    switch (s) {
        case Setting::jaccard: return "jaccard";
        case Setting::opt_only: return "opt_only";
        case Setting::full_no_r: return "full_no_r";
        case Setting::full_with_r: return "full_with_r";
    }
    return "?";
}

inline Setting setting_from_name(const std::string& s) {
    if (s == "jaccard") return Setting::jaccard;
    if (s == "opt_only") return Setting::opt_only;
    if (s == "full_no_r") return Setting::full_no_r;
    if (s == "full_with_r") return Setting::full_with_r;
    throw std::invalid_argument("unknown setting: " + s);
}

struct RecommenderConfig {
    int k = 5;
    int top_m = 20;
    double omega = 1000;  // currency scaling factor, minor units
    LogisticHyperparams logistic;
    std::uint64_t seed = 0;
    Setting setting = Setting::full_with_r;
};

struct TrainedRecommender {
    RecommenderConfig config;
    Standardizer standardizer;
    Clustering clustering;
    OptionModelSet option_models;
    CooccurrenceMatrix cooccurrence;
    SeasonalIndex seasonal_index;
    FusionWeights weights;
    std::vector<double> global_mean_vector;  // unstandardized; cold-user stand-in
};

// ---------------------------------------------------------------------------
// Serving support.
// ---------------------------------------------------------------------------

struct ServingIndex {
    std::unordered_map<Id, const Course*> courses;
    std::unordered_map<Id, const Package*> packages;
    std::map<Id, std::vector<const Package*>> packages_by_course;
    std::unordered_map<Id, double> ratings;

    explicit ServingIndex(const Dataset& d) {
        for (const auto& c : d.courses) {
            courses.emplace(c.id, &c);
            ratings.emplace(c.id, c.rating);
        }
        for (const auto& p : d.packages) {
            packages.emplace(p.id, &p);
            packages_by_course[p.course_id].push_back(&p);
        }
        for (auto& [id, v] : packages_by_course)
            std::sort(v.begin(), v.end(),
                      [](const Package* a, const Package* b) { return a->id < b->id; });
    }
};

struct DateWindow {
    Date start;
    Date end;  // inclusive

    bool intersects(const Package& p) const {
        return p.active_from <= end && p.active_to >= start;
    }
};

// Raw per-candidate component scores. Both price variants are carried so the
// experiment's settings can share one scoring pass.
struct CandidateComponents {
    const Package* pkg = nullptr;
    double price_with_r = 0;
    double price_no_r = 0;
    double opt = 0;
    double course = 0;
    double jaccard = 0;
};

struct UserCandidates {
    std::vector<CandidateComponents> candidates;
    std::optional<ReferenceSelection> reference;
    bool cold_fallback = false;
};

// Runs the shared pipeline stages: reference selection, course CF filtering,
// candidate gathering in the window, and raw component scoring. Users with
// no history fall back to the most-booked courses scored by option
// similarity under the global mean vector.
inline UserCandidates score_candidates(const ServingIndex& index,
                                       const TrainedRecommender& model,
                                       const std::vector<Booking>& history,
                                       const DateWindow& window) {
    UserCandidates out;

    std::vector<Id> candidate_courses;
    std::vector<double> u_std;
    int cluster = 0;
    double sigma_u = 0;
    const Package* ref_pkg = nullptr;
    std::map<Id, double> course_cf;

    if (history.empty()) {
        out.cold_fallback = true;
        std::vector<std::pair<std::uint32_t, Id>> popular;
        for (std::size_t i = 0; i < model.cooccurrence.course_ids.size(); ++i)
            popular.push_back({model.cooccurrence.counts[i][i], model.cooccurrence.course_ids[i]});
        std::sort(popular.begin(), popular.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        for (int i = 0; i < model.config.top_m && i < (int)popular.size(); ++i)
            candidate_courses.push_back(popular[i].second);
        u_std = model.standardizer.apply(model.global_mean_vector);
        cluster = assign_cluster(u_std, model.clustering);
    } else {
        ReferenceSelection ref = select_reference(history, window.start);
        out.reference = ref;
        auto pit = index.packages.find(ref.package_id);
        if (pit == index.packages.end())
            throw std::runtime_error("score_candidates: reference package missing: " +
                                     ref.package_id);
        ref_pkg = pit->second;
        course_cf = course_scores(history, model.cooccurrence);
        candidate_courses = filter_courses(course_cf, model.config.top_m, ref.course_id);
        u_std = model.standardizer.apply(
            build_user_vector(history, index.ratings).to_vector());
        cluster = assign_cluster(u_std, model.clustering);
        sigma_u = user_spending_stats(history).sigma;
    }

    // Per-user option probabilities are fixed across candidates.
    std::array<double, kNumOptionFlags> prob;
    for (int k = 0; k < kNumOptionFlags; ++k)
        prob[k] = option_probability(model.option_models.cell(cluster, k).model, u_std);

    for (const Id& cid : candidate_courses) {
        auto it = index.packages_by_course.find(cid);
        if (it == index.packages_by_course.end()) continue;
        for (const Package* p : it->second) {
            if (!window.intersects(*p)) continue;
            CandidateComponents c;
            c.pkg = p;
            auto flags = option_flags(*p);
            for (int k = 0; k < kNumOptionFlags; ++k)
                c.opt += flags[k] ? prob[k] : 1.0 - prob[k];
            if (!out.cold_fallback) {
                auto sit = course_cf.find(cid);
                c.course = sit == course_cf.end() ? 0.0 : sit->second;
                double r = seasonal_ratio(model.seasonal_index, p->play_month,
                                          ref_pkg->play_month);
                c.price_with_r =
                    price_similarity(*p, *ref_pkg, sigma_u, model.config.omega, r);
                c.price_no_r =
                    price_similarity(*p, *ref_pkg, sigma_u, model.config.omega, 1.0);
                c.jaccard = jaccard_similarity(*p, *ref_pkg);
            }
            out.candidates.push_back(c);
        }
    }
    return out;
}

struct ScoredPackage {
    Id package_id;
    double final_score = 0;
    double norm_price = 0, norm_opt = 0, norm_course = 0;
    CandidateComponents raw;
};

// Normalizes the setting's active components over the candidate set, fuses
// them, and ranks descending (ties: lower package id). Cold-fallback users
// are ranked by option similarity alone.
inline std::vector<ScoredPackage> rank_candidates(const UserCandidates& uc, Setting setting,
                                                  const FusionWeights& w) {
    std::size_t n = uc.candidates.size();
    std::vector<double> price_raw(n), opt_raw(n), course_raw(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& c = uc.candidates[i];
        switch (setting) {
            case Setting::jaccard: price_raw[i] = c.jaccard; break;
            case Setting::opt_only: price_raw[i] = 0; break;
            case Setting::full_no_r: price_raw[i] = c.price_no_r; break;
            case Setting::full_with_r: price_raw[i] = c.price_with_r; break;
        }
        opt_raw[i] = c.opt;
        course_raw[i] = c.course;
    }
    auto price_n = minmax_normalize(price_raw);
    auto opt_n = minmax_normalize(opt_raw);
    auto course_n = minmax_normalize(course_raw);

    std::vector<ScoredPackage> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& c = uc.candidates[i];
        ScoredPackage s;
        s.package_id = c.pkg->id;
        s.raw = c;
        s.norm_price = price_n[i];
        s.norm_opt = setting == Setting::jaccard ? 0.0 : opt_n[i];
        s.norm_course = course_n[i];
        if (uc.cold_fallback) {
            s.final_score = c.opt;
        } else if (setting == Setting::opt_only) {
            s.final_score = fuse_components(0.0, opt_n[i], course_n[i], w);
        } else if (setting == Setting::jaccard) {
            s.final_score = fuse_components(price_n[i], 0.0, course_n[i], w);
        } else {
            s.final_score = fuse_components(price_n[i], opt_n[i], course_n[i], w);
        }
        out[i] = std::move(s);
    }
    std::sort(out.begin(), out.end(), [](const ScoredPackage& a, const ScoredPackage& b) {
        if (a.final_score != b.final_score) return a.final_score > b.final_score;
        return a.package_id < b.package_id;
    });
    return out;
}

struct RecommendResult {
    std::vector<ScoredPackage> items;  // at most n, all active in the window
    bool cold_fallback = false;
    std::optional<ReferenceSelection> reference;
};

inline RecommendResult recommend(const ServingIndex& index, const TrainedRecommender& model,
                                 const std::vector<Booking>& history, const DateWindow& window,
                                 int n) {
    UserCandidates uc = score_candidates(index, model, history, window);
    RecommendResult res;
    res.cold_fallback = uc.cold_fallback;
    res.reference = uc.reference;
    res.items = rank_candidates(uc, model.config.setting, model.weights);
    if ((int)res.items.size() > n) res.items.resize(n);
    return res;
}

// ---------------------------------------------------------------------------
// Weight optimization.
// ---------------------------------------------------------------------------

// Coordinate-pair hill-climbing on the weight simplex. `active` masks the
// dimensions a setting actually uses; inactive weights stay 0. From the
// current point the +/-step moves over each ordered pair of active
// coordinates are evaluated; the best strict improvement is taken, otherwise
// the step halves. Stops below step 0.01 or after max_rounds.
inline FusionWeights hill_climb_weights(
    const std::function<double(const FusionWeights&)>& emp_objective,
    std::array<bool, 3> active = {true, true, true}, double step = 0.1, int max_rounds = 100,
    std::uint64_t seed = 0) {
    (void)seed;  // reserved; the search itself is deterministic
    std::vector<int> dims;
    for (int i = 0; i < 3; ++i)
        if (active[i]) dims.push_back(i);
    if (dims.size() < 2)
        throw std::invalid_argument("hill_climb_weights: need at least 2 active dimensions");

    auto make = [&](const std::array<double, 3>& w) {
        return FusionWeights::normalized(w[0], w[1], w[2]);
    };
    std::array<double, 3> cur{0, 0, 0};
    for (int d : dims) cur[d] = 1.0 / static_cast<double>(dims.size());

    double cur_emp = emp_objective(make(cur));
    for (int round = 0; round < max_rounds && step >= 0.01; ++round) {
        double best_emp = cur_emp;
        std::array<double, 3> best = cur;
        for (int i : dims) {
            for (int j : dims) {
                if (i == j) continue;
                std::array<double, 3> cand = cur;
                double moved = std::min(step, cand[j]);
                if (moved <= 0) continue;
                cand[i] += moved;
                cand[j] -= moved;
                double e = emp_objective(make(cand));
                if (e > best_emp) {
                    best_emp = e;
                    best = cand;
                }
            }
        }
        if (best_emp > cur_emp) {
            cur = best;
            cur_emp = best_emp;
        } else {
            step *= 0.5;
        }
    }
    return make(cur);
}

// ---------------------------------------------------------------------------
// Training orchestration.
// ---------------------------------------------------------------------------

// Fits every artifact from the given (already train-side) dataset: behavior
// vectors, z-transform, k-means segments, per-cluster option models, course
// co-occurrence and the seasonal price index. Weights start uniform.
inline TrainedRecommender train_recommender(const Dataset& data,
                                            const RecommenderConfig& config,
                                            const UserSegmentation* precomputed = nullptr) {
    if (data.bookings.empty()) throw std::runtime_error("train_recommender: no bookings");
    TrainedRecommender model;
    model.config = config;

    std::unordered_map<Id, double> ratings;
    for (const auto& c : data.courses) ratings.emplace(c.id, c.rating);

    UserSegmentation seg =
        precomputed ? *precomputed : segment_users(data, config.k, config.seed);
    model.standardizer = seg.standardizer;
    model.clustering = seg.clustering;

    std::vector<std::vector<Booking>> multi;
    for (const auto& [user, h] : group_bookings_by_user(data.bookings))
        if (h.size() >= 2) multi.push_back(h);
    model.option_models = train_option_models(multi, model.clustering, model.standardizer,
                                              ratings, config.logistic);

    std::vector<Id> universe;
    for (const auto& c : data.courses) universe.push_back(c.id);
    model.cooccurrence = build_cooccurrence(data.bookings, universe);
    model.seasonal_index = fit_seasonal_index(data.packages);

    model.global_mean_vector.assign(kUserVectorDim, 0.0);
    for (const auto& v : seg.vectors) {
        auto vv = v.to_vector();
        for (int i = 0; i < kUserVectorDim; ++i) model.global_mean_vector[i] += vv[i];
    }
    for (double& x : model.global_mean_vector) x /= static_cast<double>(seg.vectors.size());

    model.weights = FusionWeights{};
    return model;
}

}  // namespace coldpack
