#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "coldpack/optionsim.hpp"
#include "coldpack/rng.hpp"
#include "fixtures.hpp"

using namespace coldpack;
using namespace coldpack::test;

TEST_CASE("zero model gives probability one half") {
    LogisticModel m;
    m.coefficients.assign(11, 0.0);
    std::vector<double> u(11, 0.3);
    CHECK(option_probability(m, u) == doctest::Approx(0.5));
}

TEST_CASE("published caddie intercept evaluates to its closed form") {
    LogisticModel m;
    m.intercept = -5.6731;
    m.coefficients.assign(11, 0.0);
    std::vector<double> u(11, 0.0);
    double expected = 1.0 / (1.0 + std::exp(5.6731));
    CHECK(option_probability(m, u) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(option_probability(m, u) == doctest::Approx(0.003428).epsilon(2e-3));
}

TEST_CASE("extreme logits stay inside the open unit interval") {
    LogisticModel m;
    m.intercept = 700.0;
    m.coefficients.assign(1, 0.0);
    double hi = option_probability(m, {0.0});
    CHECK(hi < 1.0);
    CHECK(std::isfinite(hi));
    m.intercept = -700.0;
    double lo = option_probability(m, {0.0});
    CHECK(lo > 0.0);
    CHECK(std::isfinite(lo));
}

TEST_CASE("dimension mismatch is rejected") {
    LogisticModel m;
    m.coefficients.assign(11, 0.0);
    CHECK_THROWS(option_probability(m, std::vector<double>(3, 0.0)));
}

TEST_CASE("probability is increasing along a positive coefficient") {
    LogisticModel m;
    m.intercept = 0.2;
    m.coefficients = {1.5, -0.4, 0.0};
    double prev = -1;
    for (double x = -3; x <= 3; x += 0.25) {
        double p = option_probability(m, {x, 0.7, 0.1});
        CHECK(p > prev);
        prev = p;
    }
}

namespace {

OptionModelSet hand_models(int n_clusters, int dim, double intercept_step) {
    OptionModelSet set;
    set.n_clusters = n_clusters;
    set.dim = dim;
    set.cells.resize(n_clusters);
    for (int c = 0; c < n_clusters; ++c)
        for (int k = 0; k < kNumOptionFlags; ++k) {
            set.cells[c][k].model.intercept = intercept_step * (k - 2);
            set.cells[c][k].model.coefficients.assign(dim, 0.05 * (c + 1));
        }
    return set;
}

}  // namespace

TEST_CASE("all-even probabilities score half the flag count") {
    OptionModelSet set = hand_models(1, 4, 0.0);
    for (auto& cell : set.cells[0]) cell.model.coefficients.assign(4, 0.0);
    std::vector<double> u(4, 0.0);
    Package p = make_package("P1", "C1", make_date(2013, 6, 1), 10, {1, 0, 1, 0, 1, 1, 1, 1});
    CHECK(option_similarity(p, u, set, 0) == doctest::Approx(2.5));
}

TEST_CASE("saturated probabilities give the limiting scores") {
    OptionModelSet set;
    set.n_clusters = 1;
    set.dim = 2;
    set.cells.resize(1);
    for (int k = 0; k < kNumOptionFlags; ++k) {
        set.cells[0][k].model.intercept = 40.0;  // P -> 1
        set.cells[0][k].model.coefficients.assign(2, 0.0);
    }
    std::vector<double> u(2, 0.0);
    Package all = make_package("P1", "C1", make_date(2013, 6, 1), 10, {1, 1, 1, 1, 1, 1, 1, 1});
    Package bare = make_package("P2", "C1", make_date(2013, 6, 1), 10, {});
    CHECK(option_similarity(all, u, set, 0) == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(option_similarity(bare, u, set, 0) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("three-option toy equals the hand-summed matches") {
    OptionModelSet set = hand_models(2, 3, 0.3);
    std::vector<double> u = {0.5, -1.0, 2.0};
    Package p = make_package("P1", "C1", make_date(2013, 6, 1), 10, {1, 1, 0, 0, 1, 1, 1, 1});
    auto flags = option_flags(p);
    double expected = 0;
    for (int k = 0; k < kNumOptionFlags; ++k) {
        double prob = option_probability(set.cells[1][k].model, u);
        expected += flags[k] ? prob : 1.0 - prob;
    }
    CHECK(option_similarity(p, u, set, 1) == doctest::Approx(expected).epsilon(1e-12));
    CHECK_THROWS(option_similarity(p, u, set, 7));
}

TEST_CASE("flag flip shifts the score by exactly 2p-1") {
    OptionModelSet set = hand_models(1, 3, 0.4);
    std::vector<double> u = {0.2, 0.9, -0.4};
    Package p = make_package("P1", "C1", make_date(2013, 6, 1), 10, {0, 1, 0, 1, 0, 1, 1, 1});
    double base = option_similarity(p, u, set, 0);
    for (int k = 0; k < kNumOptionFlags; ++k) {
        Package q = p;
        int* fields[5] = {&q.options.lunch, &q.options.caddie, &q.options.competition,
                          &q.options.holiday, &q.options.pair_party};
        *fields[k] = 1 - *fields[k];
        double flipped = option_similarity(q, u, set, 0);
        double pk = option_probability(set.cells[0][k].model, u);
        double expected_delta = (*fields[k] == 1 ? 1.0 : -1.0) * (2.0 * pk - 1.0);
        CHECK(flipped - base == doctest::Approx(expected_delta).epsilon(1e-12));
    }
}

TEST_CASE("identical option flags imply identical scores") {
    OptionModelSet set = hand_models(1, 3, 0.25);
    std::vector<double> u = {1.0, 0.0, -1.0};
    Package a = make_package("PA", "C1", make_date(2013, 6, 1), 5, {1, 0, 1, 0, 0, 1, 1, 1},
                             8000, "none");
    Package b = make_package("PB", "C9", make_date(2013, 12, 1), 40, {1, 0, 1, 0, 0, 3, 2, 2},
                             15000, "early_bird");
    CHECK(option_similarity(a, u, set, 0) == option_similarity(b, u, set, 0));
}

TEST_CASE("analytic gradient matches central finite differences") {
    Rng rng(101);
    for (int inst = 0; inst < 25; ++inst) {
        int dim = 3 + static_cast<int>(rng.uniform_int(0, 5));
        int rows = 8 + static_cast<int>(rng.uniform_int(0, 20));
        std::vector<std::vector<double>> x(rows, std::vector<double>(dim));
        std::vector<int> y(rows);
        for (auto& r : x)
            for (auto& v : r) v = rng.uniform(-2, 2);
        for (auto& v : y) v = rng.bernoulli(0.5);
        LogisticModel m;
        m.intercept = rng.uniform(-1, 1);
        m.coefficients.resize(dim);
        for (auto& c : m.coefficients) c = rng.uniform(-1, 1);

        double g0;
        std::vector<double> g;
        logistic_gradient(m, x, y, 1e-4, g0, g);

        const double h = 1e-5;
        auto check_dim = [&](double analytic, double* slot) {
            double orig = *slot;
            *slot = orig + h;
            double up = logistic_loss(m, x, y, 1e-4);
            *slot = orig - h;
            double dn = logistic_loss(m, x, y, 1e-4);
            *slot = orig;
            double numeric = (up - dn) / (2 * h);
            double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
            CHECK(std::abs(analytic - numeric) / denom < 1e-4);
        };
        check_dim(g0, &m.intercept);
        for (int j = 0; j < dim; ++j) check_dim(g[j], &m.coefficients[j]);
    }
}

TEST_CASE("training reduces the loss and finds a planted rule") {
    Rng rng(55);
    std::vector<OptionTrainingRow> rows;
    for (int i = 0; i < 400; ++i) {
        OptionTrainingRow r;
        r.cluster = 0;
        r.features.assign(kUserVectorDim, 0.0);
        for (auto& v : r.features) v = rng.normal();
        // planted: high caddie_rate (dim 3) drives the caddie flag (option 1)
        double z = 2.5 * r.features[3] - 0.3;
        r.response = {rng.bernoulli(0.4), rng.bernoulli(logistic(z)), rng.bernoulli(0.3),
                      rng.bernoulli(0.5), rng.bernoulli(0.2)};
        rows.push_back(std::move(r));
    }
    OptionModelSet set = train_option_models_from_rows(rows, 1, kUserVectorDim);
    for (int k = 0; k < kNumOptionFlags; ++k) {
        const auto& cell = set.cells[0][k];
        CHECK(cell.meta.final_loss <= cell.meta.initial_loss);
    }
    CHECK(set.cells[0][1].model.coefficients[3] > 0.5);
}

TEST_CASE("constant cells clamp and are flagged") {
    std::vector<OptionTrainingRow> rows;
    for (int i = 0; i < 10; ++i) {
        OptionTrainingRow r;
        r.cluster = 0;
        r.features.assign(3, 0.1 * i);
        r.response = {1, 0, 1, 0, 1};  // lunch always on, caddie always off
        rows.push_back(std::move(r));
    }
    OptionModelSet set = train_option_models_from_rows(rows, 2, 3);
    CHECK(set.cells[0][0].meta.constant);
    CHECK(set.cells[0][1].meta.constant);
    std::vector<double> u(3, 0.0);
    CHECK(option_probability(set.cells[0][0].model, u) == doctest::Approx(1.0 - 1e-3));
    CHECK(option_probability(set.cells[0][1].model, u) == doctest::Approx(1e-3));
    // cluster 1 has no rows at all: still a complete grid, neutral models
    CHECK(set.cells[1][0].meta.constant);
    CHECK(option_probability(set.cells[1][0].model, u) == doctest::Approx(0.5));
}

TEST_CASE("leave-last-out trainer builds a complete grid from histories") {
    auto ratings = std::unordered_map<Id, double>{{"CA", 4.0}, {"CB", 3.5}};
    std::vector<std::vector<Booking>> histories;
    Rng rng(9);
    for (int u = 0; u < 30; ++u) {
        std::vector<Booking> h;
        int n = 2 + static_cast<int>(rng.uniform_int(0, 3));
        for (int i = 0; i < n; ++i) {
            Booking b;
            b.user_id = "U" + std::to_string(u);
            b.course_id = u % 2 ? "CA" : "CB";
            b.package_id = "P" + std::to_string(u * 10 + i);
            b.booked_at = make_date(2012, 7, 1).plus_days(i * 20);
            b.play_date = b.booked_at.plus_days(5);
            b.price_paid = 8000 + 1000 * (u % 5);
            b.options.lunch = rng.bernoulli(u % 2 ? 0.8 : 0.2);
            b.options.caddie = rng.bernoulli(0.3);
            b.party_size = 2 + u % 3;
            b.num_parties = 1;
            h.push_back(std::move(b));
        }
        histories.push_back(std::move(h));
    }
    std::vector<std::vector<double>> vecs;
    for (const auto& h : histories)
        vecs.push_back(build_user_vector(h, ratings).to_vector());
    Standardizer st = fit_standardizer(vecs);
    std::vector<std::vector<double>> std_vecs;
    for (const auto& v : vecs) std_vecs.push_back(st.apply(v));
    Clustering cl = kmeans(std_vecs, 2, 3);

    OptionModelSet a = train_option_models(histories, cl, st, ratings);
    OptionModelSet b = train_option_models(histories, cl, st, ratings);
    REQUIRE(a.n_clusters == 2);
    for (int c = 0; c < 2; ++c)
        for (int k = 0; k < kNumOptionFlags; ++k) {
            CHECK(a.cells[c][k].model.coefficients.size() == kUserVectorDim);
            // deterministic refit
            CHECK(a.cells[c][k].model.intercept == b.cells[c][k].model.intercept);
        }
    CHECK_THROWS(train_option_models({{histories[0][0]}}, cl, st, ratings));
}
