#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "coldpack/evalharness.hpp"
#include "coldpack/ranker.hpp"

namespace coldpack {

inline std::vector<Setting> all_settings() {
    return {Setting::jaccard, Setting::opt_only, Setting::full_no_r, Setting::full_with_r};
}

// A setting only exercises some weight dimensions; the rest stay pinned at 0
// during hill-climbing.
inline std::array<bool, 3> setting_active_weights(Setting s) {
    switch (s) {
        case Setting::jaccard: return {true, false, true};   // jaccard slot + course
        case Setting::opt_only: return {false, true, true};  // option + course
        default: return {true, true, true};
    }
}

struct ExperimentConfig {
    Date cutoff;
    int horizon_days = 15;
    int max_n = 20;                  // curves run n = 1..max_n
    int tune_n = 5;                  // EMP@n objective for weight tuning
    int val_horizon_days = 15;       // width of one validation fold
    int val_folds = 2;               // folds carved backwards from the cutoff
    double hill_step = 0.1;
    int hill_max_rounds = 100;
    std::vector<Setting> settings = {};  // empty is rejected; use all_settings()
    RecommenderConfig recommender;
};

struct SettingCurve {
    Setting setting = Setting::full_with_r;
    FusionWeights weights;
    double tuned_val_emp = 0;
    double uniform_val_emp = 0;  // the hill-climb's starting point
    std::vector<double> emp;     // emp[i] = EMP@(i+1)
    int users = 0;
};

struct ExperimentReport {
    std::vector<SettingCurve> curves;
    int evaluated_users = 0;
    int max_candidates = 0;  // largest per-user candidate set seen
    Date cutoff;
    int horizon_days = 15;
};

// Per-user component cache: scoring once serves every setting and every
// weight point, so tuning reduces to cheap re-ranking.
struct CandidateCache {
    std::vector<Id> users;
    std::vector<UserCandidates> per_user;
};

inline CandidateCache build_candidate_cache(const ServingIndex& index,
                                            const TrainedRecommender& model,
                                            const std::map<Id, std::vector<Booking>>& histories,
                                            const std::map<Id, std::set<Id>>& truth,
                                            const DateWindow& window) {
    CandidateCache cache;
    static const std::vector<Booking> kEmpty;
    for (const auto& [user, tset] : truth) {
        if (tset.empty()) continue;
        auto hit = histories.find(user);
        const auto& history = hit == histories.end() ? kEmpty : hit->second;
        cache.users.push_back(user);
        cache.per_user.push_back(score_candidates(index, model, history, window));
    }
    return cache;
}

inline std::map<Id, std::vector<Id>> rank_cache(const CandidateCache& cache, Setting setting,
                                                const FusionWeights& w, int n) {
    std::map<Id, std::vector<Id>> recs;
    for (std::size_t i = 0; i < cache.users.size(); ++i) {
        auto ranked = rank_candidates(cache.per_user[i], setting, w);
        std::vector<Id>& ids = recs[cache.users[i]];
        for (std::size_t j = 0; j < ranked.size() && j < static_cast<std::size_t>(n); ++j)
            ids.push_back(ranked[j].package_id);
    }
    return recs;
}

struct ValidationFold {
    CandidateCache cache;
    std::map<Id, std::set<Id>> truth;
};

// Tunes one setting's weights by hill-climbing the mean EMP@n across the
// validation folds.
inline FusionWeights tune_setting_weights(const std::vector<ValidationFold>& folds,
                                          Setting setting, int n, double step, int max_rounds,
                                          std::uint64_t seed, double* tuned_emp = nullptr,
                                          double* uniform_emp = nullptr) {
    if (folds.empty()) throw std::invalid_argument("tune_setting_weights: no folds");
    for (const auto& f : folds)
        if (f.truth.empty())
            throw std::invalid_argument("tune_setting_weights: empty validation truth");
    auto objective = [&](const FusionWeights& w) {
        double sum = 0;
        for (const auto& f : folds) {
            auto recs = rank_cache(f.cache, setting, w, n);
            sum += emp_at_n(recs, f.truth, n).value_or(0.0);
        }
        return sum / static_cast<double>(folds.size());
    };
    if (uniform_emp) {
        auto active = setting_active_weights(setting);
        std::array<double, 3> u{0, 0, 0};
        int n_active = 0;
        for (int i = 0; i < 3; ++i) n_active += active[i];
        for (int i = 0; i < 3; ++i)
            if (active[i]) u[i] = 1.0 / n_active;
        *uniform_emp = objective(FusionWeights::normalized(u[0], u[1], u[2]));
    }
    FusionWeights w =
        hill_climb_weights(objective, setting_active_weights(setting), step, max_rounds, seed);
    if (tuned_emp) *tuned_emp = objective(w);
    return w;
}

// The four-setting offline experiment: temporal split, training on the train
// side only, per-setting weight tuning on a validation window carved from
// the tail of the train side, then EMP@n curves on the held-out window.
// Every setting shares the same reference selection and course filtering.
inline ExperimentReport run_experiment(const Dataset& data, const ExperimentConfig& cfg) {
    if (cfg.settings.empty())
        throw std::invalid_argument("run_experiment: settings list is empty");

    TemporalSplit split = temporal_split(data, cfg.cutoff, cfg.horizon_days);

    Dataset train_data = train_slice(data, cfg.cutoff);
    ServingIndex train_index(train_data);

    // Validation folds carved backwards from the cutoff; each fold trains a
    // core model strictly before its own window. Candidates come from the
    // train-side package table.
    if (cfg.val_folds < 1) throw std::invalid_argument("run_experiment: need >= 1 fold");
    std::vector<ValidationFold> folds;
    for (int f = cfg.val_folds; f >= 1; --f) {
        Date fold_cutoff = cfg.cutoff.plus_days(-f * cfg.val_horizon_days);
        TemporalSplit fold_split = temporal_split(train_data, fold_cutoff, cfg.val_horizon_days);
        Dataset core_data = train_slice(train_data, fold_cutoff);
        TrainedRecommender core_model = train_recommender(core_data, cfg.recommender);
        DateWindow fold_window{fold_cutoff.plus_days(1),
                               fold_cutoff.plus_days(cfg.val_horizon_days)};
        auto core_histories = group_bookings_by_user(core_data.bookings);
        ValidationFold fold;
        fold.cache = build_candidate_cache(train_index, core_model, core_histories,
                                           fold_split.truth, fold_window);
        fold.truth = fold_split.truth;
        folds.push_back(std::move(fold));
    }

    TrainedRecommender model = train_recommender(train_data, cfg.recommender);
    auto histories = group_bookings_by_user(train_data.bookings);

    // Serving candidates include packages that start after the cutoff; they
    // are the items under recommendation, not training input.
    ServingIndex full_index(data);
    DateWindow test_window{cfg.cutoff.plus_days(1), cfg.cutoff.plus_days(cfg.horizon_days)};
    CandidateCache test_cache =
        build_candidate_cache(full_index, model, histories, split.truth, test_window);

    ExperimentReport report;
    report.cutoff = cfg.cutoff;
    report.horizon_days = cfg.horizon_days;
    report.evaluated_users = static_cast<int>(test_cache.users.size());
    for (const auto& uc : test_cache.per_user)
        report.max_candidates =
            std::max(report.max_candidates, static_cast<int>(uc.candidates.size()));

    for (Setting setting : cfg.settings) {
        SettingCurve curve;
        curve.setting = setting;
        curve.weights = tune_setting_weights(folds, setting, cfg.tune_n, cfg.hill_step,
                                             cfg.hill_max_rounds, cfg.recommender.seed,
                                             &curve.tuned_val_emp, &curve.uniform_val_emp);
        auto recs = rank_cache(test_cache, setting, curve.weights, cfg.max_n);
        curve.users = report.evaluated_users;
        for (int n = 1; n <= cfg.max_n; ++n)
            curve.emp.push_back(emp_at_n(recs, split.truth, n).value_or(0.0));
        report.curves.push_back(std::move(curve));
    }
    return report;
}

}  // namespace coldpack
