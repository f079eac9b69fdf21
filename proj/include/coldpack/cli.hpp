#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "coldpack/config.hpp"
#include "coldpack/dataset_io.hpp"
#include "coldpack/experiment.hpp"
#include "coldpack/model_io.hpp"
#include "coldpack/svg.hpp"
#include "coldpack/synthgen.hpp"

namespace coldpack::cli {

// Exit codes: 0 success, 1 runtime failure, 2 config/validation error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

inline std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

// A run's effective configuration, written next to its outputs.
inline void write_snapshot(const std::filesystem::path& dir, const std::string& command,
                           const KeyValueConfig& cfg) {
    write_file(dir / (command + ".config.snapshot"),
               "# " + command + " effective configuration\n" + cfg.to_string());
}

inline Dataset load_and_validate(const std::string& data_dir) {
    Dataset data = load_dataset(data_dir);
    auto report = validate_dataset(data);
    if (!report.empty()) {
        std::ostringstream msg;
        msg << "dataset validation failed (" << report.size() << " violations):";
        for (std::size_t i = 0; i < report.size() && i < 10; ++i)
            msg << "\n  " << report[i].entity_id << ": " << report[i].rule;
        throw ConfigError(msg.str());
    }
    return data;
}

inline Date dataset_end(const Dataset& d) {
    Date end = d.bookings.empty() ? Date{0} : d.bookings.back().booked_at;
    for (const auto& b : d.bookings) end = std::max(end, b.booked_at);
    return end;
}

inline std::vector<Setting> parse_settings(const std::string& s) {
    if (s == "all" || s.empty()) return all_settings();
    std::vector<Setting> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ','))
        if (!part.empty()) out.push_back(setting_from_name(part));
    if (out.empty()) throw ConfigError("settings list is empty");
    return out;
}

inline DateWindow parse_window(const std::string& s) {
    auto colon = s.find(':');
    if (colon == std::string::npos)
        throw ConfigError("window must be START:END, got '" + s + "'");
    Date a = parse_iso_date(s.substr(0, colon));
    Date b = parse_iso_date(s.substr(colon + 1));
    if (b < a) throw ConfigError("window end precedes start");
    return DateWindow{a, b};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// gen
// ---------------------------------------------------------------------------

inline GeneratorConfig generator_config_from(const KeyValueConfig& kv) {
    GeneratorConfig cfg;
    cfg.n_users = static_cast<int>(kv.get_int("n_users", cfg.n_users));
    cfg.n_courses = static_cast<int>(kv.get_int("n_courses", cfg.n_courses));
    cfg.n_packages_per_course_month = static_cast<int>(
        kv.get_int("n_packages_per_course_month", cfg.n_packages_per_course_month));
    cfg.months = static_cast<int>(kv.get_int("months", cfg.months));
    cfg.start = parse_iso_date(kv.get_string("start", to_iso(cfg.start)));
    cfg.price_noise_sd = kv.get_int("price_noise_sd", cfg.price_noise_sd);
    cfg.bookings_per_user_year =
        kv.get_double("bookings_per_user_year", cfg.bookings_per_user_year);
    cfg.seed = static_cast<std::uint64_t>(kv.get_int("seed", cfg.seed));
    if (kv.has("cluster_mix")) {
        auto mix = kv.get_double_list("cluster_mix");
        if (mix.size() == kNumArchetypes - 1) {
            // Four named proportions; the remainder goes to the noise archetype.
            double sum = 0;
            for (double p : mix) sum += p;
            mix.push_back(1.0 - sum);
        }
        if (mix.size() != kNumArchetypes)
            throw ConfigError("cluster_mix: expected 4 or 5 proportions");
        for (int i = 0; i < kNumArchetypes; ++i) cfg.cluster_mix[i] = mix[i];
    }
    return cfg;
}

inline int cmd_gen(const std::string& config_path, const std::string& out_dir,
                   std::optional<std::uint64_t> seed_flag) {
    namespace fs = std::filesystem;
    KeyValueConfig kv;
    if (!config_path.empty()) kv = KeyValueConfig::from_file(config_path);
    if (seed_flag) kv.set("seed", std::to_string(*seed_flag));  // flags win

    GeneratorConfig cfg;
    try {
        cfg = generator_config_from(kv);
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    GeneratedData g = generate_dataset(cfg);
    fs::create_directories(out_dir);
    save_dataset(g.dataset, out_dir);

    nlohmann::json gt;
    gt["base_price"] = g.ground_truth.base_price;
    gt["min_price"] = g.ground_truth.min_price;
    gt["noise_sd"] = g.ground_truth.noise_sd;
    gt["quality_spread"] = g.ground_truth.quality_spread;
    gt["seasonal_index"] = g.ground_truth.seasonal_index;
    nlohmann::json coef = nlohmann::json::object();
    auto names = price_feature_names();
    for (std::size_t i = 0; i < names.size(); ++i)
        if (g.ground_truth.coefficients[i] != 0.0) coef[names[i]] = g.ground_truth.coefficients[i];
    gt["coefficients"] = std::move(coef);
    detail::write_file(fs::path(out_dir) / "ground_truth.json", gt.dump(2) + "\n");

    std::ostringstream labels;
    labels << "user_id,archetype\n";
    for (std::size_t i = 0; i < g.user_ids.size(); ++i)
        labels << g.user_ids[i] << ',' << kArchetypeNames[g.planted_labels[i]] << '\n';
    detail::write_file(fs::path(out_dir) / "planted_labels.csv", labels.str());

    KeyValueConfig snapshot;
    snapshot.set("n_users", std::to_string(cfg.n_users));
    snapshot.set("n_courses", std::to_string(cfg.n_courses));
    snapshot.set("n_packages_per_course_month",
                 std::to_string(cfg.n_packages_per_course_month));
    snapshot.set("months", std::to_string(cfg.months));
    snapshot.set("start", to_iso(cfg.start));
    snapshot.set("price_noise_sd", std::to_string(cfg.price_noise_sd));
    snapshot.set("bookings_per_user_year", detail::fmt6(cfg.bookings_per_user_year));
    snapshot.set("seed", std::to_string(cfg.seed));
    std::ostringstream mix;
    for (int i = 0; i < kNumArchetypes; ++i) mix << (i ? ", " : "") << cfg.cluster_mix[i];
    snapshot.set("cluster_mix", mix.str());
    detail::write_snapshot(out_dir, "gen", snapshot);

    std::cout << "gen: " << g.dataset.courses.size() << " courses, "
              << g.dataset.packages.size() << " packages, " << g.dataset.bookings.size()
              << " bookings -> " << out_dir << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// profile
// ---------------------------------------------------------------------------

inline int cmd_profile(const std::string& data_dir, int k, std::uint64_t seed,
                       const std::string& out_dir) {
    namespace fs = std::filesystem;
    Dataset data = detail::load_and_validate(data_dir);
    UserSegmentation seg = segment_users(data, k, seed);

    std::ostringstream centroids;
    centroids << "cluster";
    for (const char* n : kUserVectorDimNames) centroids << ',' << n;
    centroids << '\n';
    for (int c = 0; c < seg.clustering.k; ++c) {
        centroids << c;
        for (double v : seg.clustering.centroids[c]) centroids << ',' << detail::fmt6(v);
        centroids << '\n';
    }
    detail::write_file(fs::path(out_dir) / "centroids.csv", centroids.str());

    std::ostringstream assignments;
    assignments << "user_id,cluster,eligible\n";
    for (std::size_t i = 0; i < seg.users.size(); ++i)
        assignments << seg.users[i] << ',' << seg.assignment.at(seg.users[i]) << ','
                    << int(seg.eligible[i]) << '\n';
    detail::write_file(fs::path(out_dir) / "assignments.csv", assignments.str());

    KeyValueConfig snapshot;
    snapshot.set("data", data_dir);
    snapshot.set("k", std::to_string(k));
    snapshot.set("seed", std::to_string(seed));
    detail::write_snapshot(out_dir, "profile", snapshot);

    std::cout << "profile: " << seg.users.size() << " users, k=" << seg.clustering.k
              << ", inertia=" << detail::fmt6(seg.clustering.inertia) << " -> " << out_dir
              << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

inline int cmd_train(const std::string& data_dir, const std::string& out_dir,
                     RecommenderConfig rc, const std::string& cutoff_str) {
    namespace fs = std::filesystem;
    Dataset data = detail::load_and_validate(data_dir);
    Date cutoff = cutoff_str.empty() ? detail::dataset_end(data) : parse_iso_date(cutoff_str);
    Dataset train_data = train_slice(data, cutoff);
    if (train_data.bookings.empty()) throw ConfigError("no bookings on the train side");

    UserSegmentation seg = segment_users(train_data, rc.k, rc.seed);
    TrainedRecommender model = train_recommender(train_data, rc, &seg);
    save_model(model, out_dir);

    std::ostringstream assignments;
    assignments << "user_id,cluster,eligible\n";
    for (std::size_t i = 0; i < seg.users.size(); ++i)
        assignments << seg.users[i] << ',' << seg.assignment.at(seg.users[i]) << ','
                    << int(seg.eligible[i]) << '\n';
    detail::write_file(fs::path(out_dir) / "assignments.csv", assignments.str());

    KeyValueConfig snapshot;
    snapshot.set("data", data_dir);
    snapshot.set("cutoff", to_iso(cutoff));
    snapshot.set("k", std::to_string(rc.k));
    snapshot.set("top_m", std::to_string(rc.top_m));
    snapshot.set("omega", detail::fmt6(rc.omega));
    snapshot.set("l2", detail::fmt6(rc.logistic.l2));
    snapshot.set("seed", std::to_string(rc.seed));
    detail::write_snapshot(out_dir, "train", snapshot);

    std::cout << "train: model over " << train_data.bookings.size() << " bookings ("
              << model.clustering.k << " clusters) -> " << out_dir << "\n"
              << "fingerprint: " << model_fingerprint(model) << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// tune
// ---------------------------------------------------------------------------

inline int cmd_tune(const std::string& model_dir, const std::string& val_manifest, int n,
                    const std::string& val_cutoff_str, int horizon, double step,
                    int max_rounds) {
    namespace fs = std::filesystem;
    TrainedRecommender model = load_model(model_dir);
    Dataset val_data = detail::load_and_validate(val_manifest);
    Date val_cutoff = val_cutoff_str.empty()
                          ? detail::dataset_end(val_data).plus_days(-horizon)
                          : parse_iso_date(val_cutoff_str);

    TemporalSplit split = temporal_split(val_data, val_cutoff, horizon);
    Dataset history_data = train_slice(val_data, val_cutoff);
    TrainedRecommender core = train_recommender(history_data, model.config);
    ServingIndex index(val_data);
    DateWindow window{val_cutoff.plus_days(1), val_cutoff.plus_days(horizon)};
    auto histories = group_bookings_by_user(history_data.bookings);

    std::vector<ValidationFold> folds(1);
    folds[0].cache = build_candidate_cache(index, core, histories, split.truth, window);
    folds[0].truth = split.truth;

    double before = 0, after = 0;
    {
        auto recs = rank_cache(folds[0].cache, model.config.setting, model.weights, n);
        before = emp_at_n(recs, split.truth, n).value_or(0.0);
    }
    FusionWeights tuned =
        tune_setting_weights(folds, model.config.setting, n, step, max_rounds,
                             model.config.seed, &after);
    model.weights = tuned;
    save_model(model, model_dir);

    nlohmann::json j;
    j["setting"] = setting_name(model.config.setting);
    j["n"] = n;
    j["val_cutoff"] = to_iso(val_cutoff);
    j["horizon_days"] = horizon;
    j["weights"] = {{"w_price", tuned.w_price},
                    {"w_opt", tuned.w_opt},
                    {"w_course", tuned.w_course}};
    j["emp_before"] = before;
    j["emp_after"] = after;
    detail::write_file(fs::path(model_dir) / "weights.json", j.dump(2) + "\n");

    KeyValueConfig snapshot;
    snapshot.set("model", model_dir);
    snapshot.set("val", val_manifest);
    snapshot.set("n", std::to_string(n));
    snapshot.set("val_cutoff", to_iso(val_cutoff));
    snapshot.set("horizon", std::to_string(horizon));
    detail::write_snapshot(model_dir, "tune", snapshot);

    std::cout << "tune: EMP@" << n << " " << detail::fmt6(before) << " -> "
              << detail::fmt6(after) << "  weights=(" << detail::fmt6(tuned.w_price) << ", "
              << detail::fmt6(tuned.w_opt) << ", " << detail::fmt6(tuned.w_course) << ")\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// recommend
// ---------------------------------------------------------------------------

inline int cmd_recommend(const std::string& data_dir, const std::string& model_dir,
                         const std::string& user, const std::string& window_str, int n) {
    Dataset data = detail::load_and_validate(data_dir);
    TrainedRecommender model = load_model(model_dir);
    DateWindow window = detail::parse_window(window_str);
    ServingIndex index(data);
    std::vector<Booking> history;
    for (const auto& b : data.bookings)
        if (b.user_id == user) history.push_back(b);

    RecommendResult res = recommend(index, model, history, window, n);

    nlohmann::json items = nlohmann::json::array();
    for (const auto& item : res.items) {
        nlohmann::json ji;
        ji["package_id"] = item.package_id;
        ji["course_id"] = item.raw.pkg->course_id;
        ji["price"] = item.raw.pkg->price;
        ji["final_score"] = item.final_score;
        ji["components"] = {{"price", item.raw.price_with_r},
                            {"price_no_r", item.raw.price_no_r},
                            {"option", item.raw.opt},
                            {"course", item.raw.course},
                            {"jaccard", item.raw.jaccard}};
        ji["normalized"] = {{"price", item.norm_price},
                            {"option", item.norm_opt},
                            {"course", item.norm_course}};
        items.push_back(std::move(ji));
    }
    nlohmann::json out;
    out["user"] = user;
    out["window"] = {{"start", to_iso(window.start)}, {"end", to_iso(window.end)}};
    out["cold_fallback"] = res.cold_fallback;
    if (res.reference) {
        out["reference"] = {{"course_id", res.reference->course_id},
                            {"package_id", res.reference->package_id},
                            {"score", res.reference->score}};
    }
    out["weights"] = {{"w_price", model.weights.w_price},
                      {"w_opt", model.weights.w_opt},
                      {"w_course", model.weights.w_course}};
    out["items"] = std::move(items);
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

inline std::string emp_curves_csv(const ExperimentReport& report) {
    std::ostringstream out;
    out << "setting,n,emp,users\n";
    for (const auto& curve : report.curves)
        for (std::size_t i = 0; i < curve.emp.size(); ++i)
            out << setting_name(curve.setting) << ',' << i + 1 << ','
                << detail::fmt6(curve.emp[i]) << ',' << curve.users << '\n';
    return out.str();
}

inline nlohmann::json experiment_summary(const ExperimentReport& report) {
    nlohmann::json j;
    j["cutoff"] = to_iso(report.cutoff);
    j["horizon_days"] = report.horizon_days;
    j["evaluated_users"] = report.evaluated_users;
    j["max_candidates"] = report.max_candidates;
    nlohmann::json per_setting = nlohmann::json::object();
    double jac5 = -1, opt5 = -1, with_r5 = -1;
    for (const auto& curve : report.curves) {
        std::size_t i5 = std::min<std::size_t>(4, curve.emp.size() - 1);
        nlohmann::json js;
        js["weights"] = {{"w_price", curve.weights.w_price},
                         {"w_opt", curve.weights.w_opt},
                         {"w_course", curve.weights.w_course}};
        js["tuned_val_emp"] = curve.tuned_val_emp;
        js["emp_at_5"] = curve.emp[i5];
        js["emp"] = curve.emp;
        per_setting[setting_name(curve.setting)] = std::move(js);
        if (curve.setting == Setting::jaccard) jac5 = curve.emp[i5];
        if (curve.setting == Setting::opt_only) opt5 = curve.emp[i5];
        if (curve.setting == Setting::full_with_r) with_r5 = curve.emp[i5];
    }
    j["settings"] = std::move(per_setting);
    // Relative improvements of the full score at n=5 over both baselines.
    if (with_r5 >= 0 && jac5 > 0)
        j["improvement_at_5"]["full_with_r_vs_jaccard"] = with_r5 / jac5 - 1.0;
    if (with_r5 >= 0 && opt5 > 0)
        j["improvement_at_5"]["full_with_r_vs_opt_only"] = with_r5 / opt5 - 1.0;
    return j;
}

inline int cmd_eval(const std::string& data_dir, const std::string& cutoff_str, int horizon,
                    const std::string& settings_str, int max_n, const std::string& out_dir,
                    RecommenderConfig rc) {
    namespace fs = std::filesystem;
    Dataset data = detail::load_and_validate(data_dir);

    ExperimentConfig ec;
    ec.cutoff = cutoff_str.empty() ? detail::dataset_end(data).plus_days(-horizon)
                                   : parse_iso_date(cutoff_str);
    ec.horizon_days = horizon;
    ec.max_n = max_n;
    ec.settings = detail::parse_settings(settings_str);
    ec.recommender = rc;

    ExperimentReport report = run_experiment(data, ec);

    detail::write_file(fs::path(out_dir) / "emp_curves.csv", emp_curves_csv(report));
    std::vector<SvgSeries> series;
    const char* colors[] = {"#888888", "#1f77b4", "#2ca02c", "#d62728"};
    int color = 0;
    for (const auto& curve : report.curves) {
        SvgSeries s;
        s.label = setting_name(curve.setting);
        s.color = colors[color++ % 4];
        for (std::size_t i = 0; i < curve.emp.size(); ++i) {
            s.x.push_back(static_cast<double>(i + 1));
            s.y.push_back(curve.emp[i]);
        }
        series.push_back(std::move(s));
    }
    detail::write_file(fs::path(out_dir) / "emp_curves.svg",
                       svg_line_chart(series, "EMP@n by setting", "n", "EMP@n"));
    detail::write_file(fs::path(out_dir) / "summary.json",
                       experiment_summary(report).dump(2) + "\n");

    KeyValueConfig snapshot;
    snapshot.set("data", data_dir);
    snapshot.set("cutoff", to_iso(ec.cutoff));
    snapshot.set("horizon", std::to_string(horizon));
    snapshot.set("settings", settings_str.empty() ? "all" : settings_str);
    snapshot.set("N", std::to_string(max_n));
    snapshot.set("seed", std::to_string(rc.seed));
    detail::write_snapshot(out_dir, "eval", snapshot);

    std::cout << "eval: " << report.evaluated_users << " users";
    for (const auto& curve : report.curves)
        std::cout << "  " << setting_name(curve.setting) << "@5="
                  << detail::fmt6(curve.emp[std::min<std::size_t>(4, curve.emp.size() - 1)]);
    std::cout << " -> " << out_dir << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// price-report
// ---------------------------------------------------------------------------

inline int cmd_price_report(const std::string& data_dir, const std::string& course,
                            const std::string& out_dir) {
    namespace fs = std::filesystem;
    Dataset data = detail::load_and_validate(data_dir);
    std::vector<Package> pkgs;
    for (const auto& p : data.packages)
        if (p.course_id == course) pkgs.push_back(p);
    if (pkgs.empty()) throw ConfigError("no packages for course " + course);
    PriceModelFit fit = fit_price_model(pkgs);

    std::ostringstream csv;
    csv << "package_id,price,prediction,residual\n";
    std::vector<double> truth, pred;
    for (const auto& p : pkgs) {
        double yhat = predict_price(fit, p);
        csv << p.id << ',' << p.price << ',' << detail::fmt6(yhat) << ','
            << detail::fmt6(p.price - yhat) << '\n';
        truth.push_back(static_cast<double>(p.price));
        pred.push_back(yhat);
    }
    detail::write_file(fs::path(out_dir) / "price_report.csv", csv.str());
    detail::write_file(fs::path(out_dir) / "price_report.svg",
                       svg_scatter(truth, pred, "True prices vs. predictions (" + course + ")",
                                   "true price", "predicted price"));
    nlohmann::json j;
    j["course"] = course;
    j["packages"] = pkgs.size();
    j["r_squared"] = fit.r_squared;
    j["residual_sd"] = fit.residuals.sd_all;
    j["residual_sd_top_quartile"] = fit.residuals.sd_top_quartile;
    j["residual_sd_bottom_quartile"] = fit.residuals.sd_bottom_quartile;
    detail::write_file(fs::path(out_dir) / "price_report.json", j.dump(2) + "\n");

    std::cout << "price-report: course " << course << " R^2=" << detail::fmt6(fit.r_squared)
              << " -> " << out_dir << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// explain-ref
// ---------------------------------------------------------------------------

inline int cmd_explain_ref(const std::string& data_dir, const std::string& user,
                           const std::string& date_str) {
    Dataset data = detail::load_and_validate(data_dir);
    Date target = parse_iso_date(date_str);
    std::vector<Booking> history;
    for (const auto& b : data.bookings)
        if (b.user_id == user) history.push_back(b);
    if (history.empty()) throw ConfigError("user " + user + " has no bookings");

    std::map<Id, std::vector<Booking>> by_course;
    for (const auto& b : history) by_course[b.course_id].push_back(b);
    ReferenceSelection sel = select_reference(history, target);

    nlohmann::json scores = nlohmann::json::object();
    for (const auto& [course, bookings] : by_course)
        scores[course] = seasonal_course_score(bookings, month_of(target));
    nlohmann::json out;
    out["user"] = user;
    out["target_date"] = date_str;
    out["course_scores"] = std::move(scores);
    out["reference"] = {{"course_id", sel.course_id},
                        {"package_id", sel.package_id},
                        {"score", sel.score}};
    std::cout << out.dump(2) << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// pipeline
// ---------------------------------------------------------------------------

inline int cmd_pipeline(const std::string& out_dir, const std::string& config_path,
                        std::optional<std::uint64_t> seed_flag,
                        const std::string& settings_str, int max_n, int horizon,
                        RecommenderConfig rc) {
    namespace fs = std::filesystem;
    using clock = std::chrono::steady_clock;
    nlohmann::json log;
    auto timed = [&](const char* stage, auto&& fn) {
        auto t0 = clock::now();
        fn();
        double secs = std::chrono::duration<double>(clock::now() - t0).count();
        log["stages"][stage]["seconds"] = secs;
        std::cout << "pipeline stage " << stage << ": " << detail::fmt6(secs) << "s\n";
    };

    fs::path data_dir = fs::path(out_dir) / "data";
    fs::path model_dir = fs::path(out_dir) / "model";
    fs::path report_dir = fs::path(out_dir) / "report";

    try {
        timed("gen", [&] { cmd_gen(config_path, data_dir.string(), seed_flag); });

        Dataset data = load_dataset(data_dir.string());
        Date cutoff = detail::dataset_end(data).plus_days(-horizon);

        timed("train", [&] {
            cmd_train(data_dir.string(), model_dir.string(), rc, to_iso(cutoff));
        });
        timed("tune", [&] {
            cmd_tune(model_dir.string(), data_dir.string(), 5, to_iso(cutoff.plus_days(-horizon)),
                     horizon, 0.1, 100);
        });
        timed("eval", [&] {
            cmd_eval(data_dir.string(), to_iso(cutoff), horizon, settings_str, max_n,
                     report_dir.string(), rc);
        });
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("pipeline: ") + e.what());
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("pipeline: ") + e.what());
    }

    {
        std::ifstream in(report_dir / "summary.json");
        if (in) {
            nlohmann::json summary = nlohmann::json::parse(in);
            log["max_candidates"] = summary.value("max_candidates", 0);
            log["evaluated_users"] = summary.value("evaluated_users", 0);
        }
    }
    detail::write_file(fs::path(out_dir) / "pipeline.json", log.dump(2) + "\n");
    std::cout << "pipeline: done -> " << out_dir << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// Argument parsing.
// ---------------------------------------------------------------------------

inline int run_cli(int argc, const char* const* argv) {
    CLI::App app{"coldpack - short-lived dynamic booking package recommender"};
    app.require_subcommand(1);

    std::string config_path, data_dir, out_dir, model_dir, user, window, date_str;
    std::string cutoff_str, settings_str = "all", course;
    std::uint64_t seed = 1;
    bool seed_given = false;
    int k = 5, n = 5, max_n = 20, horizon = 15, max_rounds = 100;
    double step = 0.1;
    RecommenderConfig rc;

    auto add_rc = [&](CLI::App* cmd) {
        cmd->add_option("--k", rc.k, "number of user clusters");
        cmd->add_option("--top-m", rc.top_m, "courses kept by the CF filter");
        cmd->add_option("--omega", rc.omega, "currency scaling factor (minor units)");
        cmd->add_option("--l2", rc.logistic.l2, "logistic L2 strength");
        cmd->add_option("--model-seed", rc.seed, "seed for k-means and tuning");
    };

    auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
    gen->add_option("--config", config_path, "generator config file");
    gen->add_option("--out", out_dir, "output directory")->required();
    gen->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t s) { seed = s; seed_given = true; }, "generator seed");

    auto* profile = app.add_subcommand("profile", "build and cluster user vectors");
    profile->add_option("--data", data_dir, "dataset directory or manifest")->required();
    profile->add_option("--k", k, "number of clusters");
    profile->add_option("--seed", seed, "k-means seed");
    profile->add_option("--out", out_dir, "output directory")->required();

    auto* train = app.add_subcommand("train", "fit every model artifact");
    train->add_option("--data", data_dir, "dataset directory or manifest")->required();
    train->add_option("--out", model_dir, "model output directory")->required();
    train->add_option("--cutoff", cutoff_str, "train on bookings up to this date");
    add_rc(train);

    auto* tune = app.add_subcommand("tune", "hill-climb fusion weights on a validation split");
    tune->add_option("--model", model_dir, "model directory")->required();
    tune->add_option("--val", data_dir, "validation dataset manifest")->required();
    tune->add_option("--n", n, "EMP@n objective");
    tune->add_option("--val-cutoff", cutoff_str, "validation cutoff date");
    tune->add_option("--horizon", horizon, "validation window length in days");
    tune->add_option("--step", step, "initial hill-climb step");
    tune->add_option("--max-rounds", max_rounds, "hill-climb round limit");

    auto* rec = app.add_subcommand("recommend", "rank packages for one user");
    rec->add_option("--data", data_dir, "dataset directory or manifest")->required();
    rec->add_option("--model", model_dir, "model directory")->required();
    rec->add_option("--user", user, "user id")->required();
    rec->add_option("--window", window, "target window START:END")->required();
    rec->add_option("--n", n, "list length");

    auto* eval = app.add_subcommand("eval", "run the four-setting offline experiment");
    eval->add_option("--data", data_dir, "dataset directory or manifest")->required();
    eval->add_option("--cutoff", cutoff_str, "temporal split cutoff");
    eval->add_option("--horizon", horizon, "test window length in days");
    eval->add_option("--settings", settings_str, "all or comma list of settings");
    eval->add_option("--N", max_n, "evaluate EMP@n for n=1..N");
    eval->add_option("--out", out_dir, "report directory")->required();
    add_rc(eval);

    auto* price = app.add_subcommand("price-report", "per-course price regression report");
    price->add_option("--data", data_dir, "dataset directory or manifest")->required();
    price->add_option("--course", course, "course id")->required();
    price->add_option("--out", out_dir, "report directory")->required();

    auto* explain = app.add_subcommand("explain-ref", "show the reference selection for a user");
    explain->add_option("--data", data_dir, "dataset directory or manifest")->required();
    explain->add_option("--user", user, "user id")->required();
    explain->add_option("--date", date_str, "target date")->required();

    auto* pipeline = app.add_subcommand("pipeline", "gen -> train -> tune -> eval -> report");
    pipeline->add_option("--out", out_dir, "run directory")->required();
    pipeline->add_option("--config", config_path, "generator config file");
    pipeline->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t s) { seed = s; seed_given = true; }, "generator seed");
    pipeline->add_option("--settings", settings_str, "all or comma list of settings");
    pipeline->add_option("--N", max_n, "evaluate EMP@n for n=1..N");
    pipeline->add_option("--horizon", horizon, "test window length in days");
    add_rc(pipeline);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        std::optional<std::uint64_t> seed_flag;
        if (seed_given) seed_flag = seed;
        if (gen->parsed()) return cmd_gen(config_path, out_dir, seed_flag);
        if (profile->parsed()) return cmd_profile(data_dir, k, seed, out_dir);
        if (train->parsed()) return cmd_train(data_dir, model_dir, rc, cutoff_str);
        if (tune->parsed())
            return cmd_tune(model_dir, data_dir, n, cutoff_str, horizon, step, max_rounds);
        if (rec->parsed()) return cmd_recommend(data_dir, model_dir, user, window, n);
        if (eval->parsed())
            return cmd_eval(data_dir, cutoff_str, horizon, settings_str, max_n, out_dir, rc);
        if (price->parsed()) return cmd_price_report(data_dir, course, out_dir);
        if (explain->parsed()) return cmd_explain_ref(data_dir, user, date_str);
        if (pipeline->parsed())
            return cmd_pipeline(out_dir, config_path, seed_flag, settings_str, max_n, horizon,
                                rc);
        std::cerr << "no subcommand\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

}  // namespace coldpack::cli
