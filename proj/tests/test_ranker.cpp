#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <memory>

#include "coldpack/experiment.hpp"
#include "coldpack/model_io.hpp"
#include "coldpack/ranker.hpp"
#include "coldpack/synthgen.hpp"
#include "fixtures.hpp"

using namespace coldpack;
using namespace coldpack::test;

TEST_CASE("fusion weights live on the simplex") {
    FusionWeights w = FusionWeights::normalized(2.0, 1.0, 1.0);
    CHECK(w.w_price == doctest::Approx(0.5));
    CHECK(w.w_price + w.w_opt + w.w_course == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS(FusionWeights::normalized(-0.1, 0.5, 0.6));
    CHECK_THROWS(FusionWeights::normalized(0, 0, 0));
}

TEST_CASE("minmax normalization") {
    auto n = minmax_normalize({2.0, 4.0, 3.0});
    CHECK(n[0] == 0.0);
    CHECK(n[1] == 1.0);
    CHECK(n[2] == doctest::Approx(0.5));
    auto c = minmax_normalize({7.0, 7.0, 7.0});
    CHECK(c == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("fusion is the plain weighted sum") {
    FusionWeights w{0.5, 0.3, 0.2};
    double price[3] = {1.0, 0.2, 0.6};
    double opt[3] = {0.1, 0.9, 0.4};
    double course[3] = {0.0, 1.0, 0.5};
    for (int i = 0; i < 3; ++i) {
        double expected = 0.5 * price[i] + 0.3 * opt[i] + 0.2 * course[i];
        CHECK(fuse_components(price[i], opt[i], course[i], w) ==
              doctest::Approx(expected).epsilon(1e-12));
    }
}

namespace {

std::vector<Package> toy_packages() {
    std::vector<Package> pkgs;
    for (int i = 0; i < 6; ++i) {
        Package p = make_package("P" + std::to_string(i), "C0", make_date(2013, 6, 1), 10,
                                 {i % 2, 0, 0, 1, 0, 1, 1, 1}, 8000 + 700 * i);
        pkgs.push_back(p);
    }
    return pkgs;
}

UserCandidates toy_candidates(const std::vector<Package>& pkgs) {
    UserCandidates uc;
    for (std::size_t i = 0; i < pkgs.size(); ++i) {
        CandidateComponents c;
        c.pkg = &pkgs[i];
        c.price_with_r = 1.0 / (1.0 + 0.3 * i);
        c.price_no_r = 1.0 / (1.0 + 0.25 * i);
        c.opt = 2.0 + 0.4 * ((i * 3) % 5);
        c.course = 0.1 * ((i * 2) % 4);
        c.jaccard = (i % 3) / 3.0;
        uc.candidates.push_back(c);
    }
    return uc;
}

}  // namespace

TEST_CASE("degenerate weights reduce the ranking to one component") {
    auto pkgs = toy_packages();
    UserCandidates uc = toy_candidates(pkgs);
    auto ranked = rank_candidates(uc, Setting::full_with_r, FusionWeights{1.0, 0.0, 0.0});
    for (std::size_t i = 1; i < ranked.size(); ++i)
        CHECK(ranked[i - 1].raw.price_with_r >= ranked[i].raw.price_with_r);

    auto by_opt = rank_candidates(uc, Setting::full_with_r, FusionWeights{0.0, 1.0, 0.0});
    for (std::size_t i = 1; i < by_opt.size(); ++i)
        CHECK(by_opt[i - 1].raw.opt >= by_opt[i].raw.opt);
}

TEST_CASE("identical candidates tie everywhere and ids break the ties") {
    auto pkgs = toy_packages();
    UserCandidates uc = toy_candidates(pkgs);
    for (auto& c : uc.candidates) {
        c.price_with_r = 0.4;
        c.price_no_r = 0.4;
        c.opt = 2.0;
        c.course = 0.3;
        c.jaccard = 0.5;
    }
    auto ranked = rank_candidates(uc, Setting::full_with_r, FusionWeights{});
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        CHECK(ranked[i].final_score == ranked[0].final_score);
        if (i > 0) CHECK(ranked[i - 1].package_id < ranked[i].package_id);
    }
}

TEST_CASE("three-candidate fusion matches the hand-summed values") {
    auto pkgs = toy_packages();
    UserCandidates uc = toy_candidates(pkgs);
    uc.candidates.resize(3);
    FusionWeights w{0.5, 0.3, 0.2};
    auto ranked = rank_candidates(uc, Setting::full_with_r, w);

    std::vector<double> pr, op, co;
    for (const auto& c : uc.candidates) {
        pr.push_back(c.price_with_r);
        op.push_back(c.opt);
        co.push_back(c.course);
    }
    auto prn = minmax_normalize(pr), opn = minmax_normalize(op), con = minmax_normalize(co);
    for (const auto& s : ranked) {
        std::size_t i = 0;
        while (uc.candidates[i].pkg->id != s.package_id) ++i;
        double expected = 0.5 * prn[i] + 0.3 * opn[i] + 0.2 * con[i];
        CHECK(s.final_score == doctest::Approx(expected).epsilon(1e-12));
    }
}

namespace {

struct World {
    GeneratedData g;
    Date cutoff;
    Dataset train_data;
    std::unique_ptr<ServingIndex> full_index;
    TrainedRecommender model;
    std::map<Id, std::vector<Booking>> train_histories;
    DateWindow window;

    static World make(std::uint64_t seed) {
        World w;
        GeneratorConfig cfg;
        cfg.n_users = 800;
        cfg.n_courses = 40;
        cfg.months = 12;
        cfg.seed = seed;
        w.g = generate_dataset(cfg);
        Date end = add_months_first_day(cfg.start, cfg.months).plus_days(-1);
        w.cutoff = end.plus_days(-15);
        w.train_data = train_slice(w.g.dataset, w.cutoff);
        w.full_index = std::make_unique<ServingIndex>(w.g.dataset);
        RecommenderConfig rc;
        rc.seed = 17;
        w.model = train_recommender(w.train_data, rc);
        w.train_histories = group_bookings_by_user(w.train_data.bookings);
        w.window = DateWindow{w.cutoff.plus_days(1), w.cutoff.plus_days(15)};
        return w;
    }
};

}  // namespace

TEST_CASE("recommendations stay inside the active window") {
    World w = World::make(41);
    int users_checked = 0;
    for (const auto& [user, history] : w.train_histories) {
        if (users_checked++ > 150) break;
        RecommendResult res = recommend(*w.full_index, w.model, history, w.window, 5);
        for (const auto& item : res.items) {
            const Package* p = w.full_index->packages.at(item.package_id);
            CHECK(p->active_from <= w.window.end);
            CHECK(p->active_to >= w.window.start);
        }
    }

    // a window after everything expired yields nothing
    DateWindow far{make_date(2020, 1, 1), make_date(2020, 1, 15)};
    const auto& some_user = w.train_histories.begin()->second;
    CHECK(recommend(*w.full_index, w.model, some_user, far, 5).items.empty());
}

TEST_CASE("recommend is deterministic and respects n") {
    World w = World::make(43);
    const auto& history = w.train_histories.begin()->second;
    RecommendResult a = recommend(*w.full_index, w.model, history, w.window, 5);
    RecommendResult b = recommend(*w.full_index, w.model, history, w.window, 5);
    REQUIRE(a.items.size() == b.items.size());
    CHECK(a.items.size() <= 5);
    for (std::size_t i = 0; i < a.items.size(); ++i) {
        CHECK(a.items[i].package_id == b.items[i].package_id);
        CHECK(a.items[i].final_score == b.items[i].final_score);
    }
}

TEST_CASE("single candidate comes back alone") {
    World w = World::make(47);
    const auto& history = w.train_histories.begin()->second;
    UserCandidates uc = score_candidates(*w.full_index, w.model, history, w.window);
    REQUIRE(uc.candidates.size() > 1);
    UserCandidates one = uc;
    one.candidates.resize(1);
    auto ranked = rank_candidates(one, Setting::full_with_r, w.model.weights);
    REQUIRE(ranked.size() == 1);
    CHECK(ranked[0].package_id == one.candidates[0].pkg->id);
}

TEST_CASE("ranking equals an independent end-to-end recomputation") {
    World w = World::make(53);
    int users_checked = 0;
    for (const auto& [user, history] : w.train_histories) {
        if (history.empty()) continue;
        if (users_checked++ > 20) break;

        RecommendResult got = recommend(*w.full_index, w.model, history, w.window, 10);

        // Independent recomputation from the module-level operations.
        ReferenceSelection ref = select_reference(history, w.window.start);
        auto cf = course_scores(history, w.model.cooccurrence);
        auto courses = filter_courses(cf, w.model.config.top_m, ref.course_id);
        const Package* ref_pkg = w.full_index->packages.at(ref.package_id);
        double sigma = user_spending_stats(history).sigma;
        auto u_std = w.model.standardizer.apply(
            build_user_vector(history, w.full_index->ratings).to_vector());
        int cluster = assign_cluster(u_std, w.model.clustering);

        std::vector<const Package*> cands;
        std::vector<double> price, opt, course;
        for (const Id& cid : courses) {
            auto it = w.full_index->packages_by_course.find(cid);
            if (it == w.full_index->packages_by_course.end()) continue;
            for (const Package* p : it->second) {
                if (p->active_from > w.window.end || p->active_to < w.window.start) continue;
                cands.push_back(p);
                double r = seasonal_ratio(w.model.seasonal_index, p->play_month,
                                          ref_pkg->play_month);
                price.push_back(
                    price_similarity(*p, *ref_pkg, sigma, w.model.config.omega, r));
                opt.push_back(option_similarity(*p, u_std, w.model.option_models, cluster));
                course.push_back(cf.count(cid) ? cf.at(cid) : 0.0);
            }
        }
        auto pn = minmax_normalize(price), on = minmax_normalize(opt),
             cn = minmax_normalize(course);
        std::vector<std::pair<double, Id>> expected;
        for (std::size_t i = 0; i < cands.size(); ++i)
            expected.push_back({fuse_components(pn[i], on[i], cn[i], w.model.weights),
                                cands[i]->id});
        std::sort(expected.begin(), expected.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });

        REQUIRE(got.items.size() == std::min<std::size_t>(10, expected.size()));
        for (std::size_t i = 0; i < got.items.size(); ++i) {
            CHECK(got.items[i].package_id == expected[i].second);
            CHECK(got.items[i].final_score == doctest::Approx(expected[i].first).epsilon(1e-12));
        }
    }
    CHECK(users_checked > 10);
}

TEST_CASE("cold users fall back to popular courses scored by options") {
    World w = World::make(59);
    RecommendResult res = recommend(*w.full_index, w.model, {}, w.window, 5);
    CHECK(res.cold_fallback);
    CHECK_FALSE(res.reference.has_value());
    CHECK_FALSE(res.items.empty());
    // ranked by raw option similarity
    for (std::size_t i = 1; i < res.items.size(); ++i)
        CHECK(res.items[i - 1].final_score >= res.items[i].final_score);
}

TEST_CASE("hill climbing returns the start on a flat surface") {
    auto flat = [](const FusionWeights&) { return 0.25; };
    FusionWeights w = hill_climb_weights(flat);
    CHECK(w.w_price == doctest::Approx(1.0 / 3));
    CHECK(w.w_opt == doctest::Approx(1.0 / 3));
    CHECK(w.w_course == doctest::Approx(1.0 / 3));
}

TEST_CASE("hill climbing moves toward a planted optimum and never regresses") {
    auto objective = [](const FusionWeights& w) {
        // peak at (0.7, 0.1, 0.2)
        return 1.0 - std::abs(w.w_price - 0.7) - std::abs(w.w_opt - 0.1) -
               std::abs(w.w_course - 0.2);
    };
    FusionWeights w = hill_climb_weights(objective);
    CHECK(objective(w) >= objective(FusionWeights{}));
    CHECK(w.w_price == doctest::Approx(0.7).epsilon(0.1));

    // masked: only price and course active
    FusionWeights m = hill_climb_weights(objective, {true, false, true});
    CHECK(m.w_opt == 0.0);
    CHECK(objective(m) >= objective(FusionWeights::normalized(1, 0, 1)));
}

TEST_CASE("weight scaling before normalization leaves the ranking unchanged") {
    auto pkgs = toy_packages();
    UserCandidates uc = toy_candidates(pkgs);
    FusionWeights a = FusionWeights::normalized(0.5, 0.3, 0.2);
    FusionWeights b = FusionWeights::normalized(5.0, 3.0, 2.0);
    auto ra = rank_candidates(uc, Setting::full_with_r, a);
    auto rb = rank_candidates(uc, Setting::full_with_r, b);
    REQUIRE(ra.size() == rb.size());
    for (std::size_t i = 0; i < ra.size(); ++i) CHECK(ra[i].package_id == rb[i].package_id);
}

TEST_CASE("tuning rejects an empty validation truth") {
    std::vector<ValidationFold> folds(1);
    CHECK_THROWS(tune_setting_weights(folds, Setting::full_with_r, 5, 0.1, 10, 1));
}

TEST_CASE("model save/load round-trips the serving behavior") {
    namespace fs = std::filesystem;
    World w = World::make(61);
    fs::path dir = fs::temp_directory_path() / "coldpack_model_rt";
    fs::remove_all(dir);
    save_model(w.model, dir.string());
    CHECK(fs::exists(dir / "manifest.json"));
    TrainedRecommender loaded = load_model(dir.string());
    CHECK(model_fingerprint(loaded) == model_fingerprint(w.model));

    const auto& history = w.train_histories.begin()->second;
    RecommendResult a = recommend(*w.full_index, w.model, history, w.window, 5);
    RecommendResult b = recommend(*w.full_index, loaded, history, w.window, 5);
    REQUIRE(a.items.size() == b.items.size());
    for (std::size_t i = 0; i < a.items.size(); ++i)
        CHECK(a.items[i].package_id == b.items[i].package_id);
}

TEST_CASE("trained artifacts ignore everything past the cutoff") {
    World w = World::make(67);
    std::string before = model_fingerprint(w.model);

    // Perturb everything the training slice excludes: test-window bookings
    // and packages only the test window can see.
    std::set<Id> train_packages;
    for (const auto& p : w.train_data.packages) train_packages.insert(p.id);
    Dataset tampered = w.g.dataset;
    int touched = 0;
    for (auto& b : tampered.bookings)
        if (b.booked_at > w.cutoff) {
            b.price_paid += 5000;
            b.options.lunch = 1 - b.options.lunch;
            ++touched;
        }
    for (auto& p : tampered.packages)
        if (!train_packages.count(p.id)) {
            p.price += 7777;
            ++touched;
        }
    REQUIRE(touched > 0);

    TrainedRecommender retrained =
        train_recommender(train_slice(tampered, w.cutoff), w.model.config);
    CHECK(model_fingerprint(retrained) == before);
}

TEST_CASE("experiment report has the requested curves with monotone emp") {
    World w = World::make(71);
    ExperimentConfig cfg;
    cfg.cutoff = w.cutoff;
    cfg.horizon_days = 15;
    cfg.max_n = 10;
    cfg.settings = all_settings();
    cfg.recommender.seed = 17;
    ExperimentReport report = run_experiment(w.g.dataset, cfg);
    REQUIRE(report.curves.size() == 4);
    CHECK(report.evaluated_users > 10);
    for (const auto& curve : report.curves) {
        REQUIRE(curve.emp.size() == 10);
        for (std::size_t i = 1; i < curve.emp.size(); ++i)
            CHECK(curve.emp[i] >= curve.emp[i - 1] - 1e-15);
        CHECK(curve.users == report.evaluated_users);
    }

    ExperimentConfig single = cfg;
    single.settings = {Setting::jaccard};
    ExperimentReport r1 = run_experiment(w.g.dataset, single);
    CHECK(r1.curves.size() == 1);
    CHECK(r1.curves[0].setting == Setting::jaccard);

    single.settings = {};
    CHECK_THROWS(run_experiment(w.g.dataset, single));
}
