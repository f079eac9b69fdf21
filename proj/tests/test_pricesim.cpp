#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "coldpack/pricesim.hpp"
#include "coldpack/synthgen.hpp"
#include "fixtures.hpp"

using namespace coldpack;
using namespace coldpack::test;

TEST_CASE("seasonal ratio arithmetic") {
    SeasonalIndex idx;
    idx.index[5] = 1.2;   // June
    idx.index[11] = 0.8;  // December
    CHECK(seasonal_ratio(idx, 6, 6) == doctest::Approx(1.0));
    CHECK(seasonal_ratio(idx, 6, 12) == doctest::Approx(1.5));
    for (int a = 1; a <= 12; ++a)
        for (int b = 1; b <= 12; ++b)
            CHECK(seasonal_ratio(idx, a, b) * seasonal_ratio(idx, b, a) ==
                  doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("seasonal index fits monthly means over the grand mean") {
    std::vector<Package> pkgs;
    // June packages at 12000, December at 8000, grand mean 10000
    for (int i = 0; i < 10; ++i) {
        Package p = make_package("PJ" + std::to_string(i), "C", make_date(2012, 6, 1), 10, {},
                                 12000);
        p.play_month = 6;
        pkgs.push_back(p);
        Package q = make_package("PD" + std::to_string(i), "C", make_date(2012, 12, 1), 10, {},
                                 8000);
        q.play_month = 12;
        pkgs.push_back(q);
    }
    SeasonalIndex idx = fit_seasonal_index(pkgs);
    CHECK(idx.at(6) == doctest::Approx(1.2));
    CHECK(idx.at(12) == doctest::Approx(0.8));
    CHECK(idx.at(3) == 1.0);  // no packages: imputed
    for (int m = 1; m <= 12; ++m) CHECK(idx.at(m) > 0.0);
}

TEST_CASE("price similarity formula cases") {
    CHECK(price_similarity_value(9000, 9000, 500, 1000, 1.3) == doctest::Approx(1.0));
    CHECK(price_similarity_value(10000, 8000, 1000, 1000, 1.0) == doctest::Approx(0.5));
    CHECK_THROWS(price_similarity_value(1, 2, 0, 0, 1));
    CHECK_THROWS(price_similarity_value(1, 2, -1, 100, 1));
    CHECK_THROWS(price_similarity_value(1, 2, 0, 100, 0));
}

TEST_CASE("bigger spending deviation tolerates bigger gaps") {
    double prev = 0;
    for (double sigma : {0.0, 500.0, 1000.0, 5000.0}) {
        double s = price_similarity_value(12000, 9000, sigma, 1000, 1.0);
        CHECK(s > prev);
        prev = s;
    }
}

TEST_CASE("price similarity properties on random parameterizations") {
    Rng rng(313);
    for (int t = 0; t < 10000; ++t) {
        Money a = rng.uniform_int(0, 50000);
        Money b = rng.uniform_int(0, 50000);
        double sigma = rng.uniform(0, 5000);
        double omega = rng.uniform(1, 5000);
        double r = rng.uniform(0.2, 3.0);
        double s = price_similarity_value(a, b, sigma, omega, r);
        CHECK(s > 0.0);
        CHECK(s <= 1.0);
        CHECK((s == 1.0) == (a == b));
        // strictly decreasing in the gap
        double further = price_similarity_value(a, b + (b >= a ? 1000 : -1000), sigma, omega, r);
        CHECK(further < s);
        // joint scaling of (omega + sigma) and the gap leaves it unchanged
        double k = rng.uniform(0.5, 4.0);
        double scaled = 1.0 / (1.0 + r / (k * (omega + sigma)) *
                                         (k * std::abs(double(a) - double(b))));
        CHECK(scaled == doctest::Approx(s).epsilon(1e-12));
    }
}

TEST_CASE("spending stats match the worked examples and the user vector") {
    Dataset d = small_fixture();
    std::vector<Booking> one = {d.bookings[0]};
    SpendingStats s1 = user_spending_stats(one);
    CHECK(s1.avg == doctest::Approx(static_cast<double>(one[0].price_paid)));
    CHECK(s1.sigma == 0.0);

    Booking b1 = d.bookings[0], b2 = d.bookings[0];
    b1.price_paid = 8000;
    b2.price_paid = 12000;
    SpendingStats s2 = user_spending_stats({b1, b2});
    CHECK(s2.avg == doctest::Approx(10000));
    CHECK(s2.sigma == doctest::Approx(2000));

    std::unordered_map<Id, double> ratings = {{"CA", 4.2}, {"CB", 3.6}};
    auto by_user = std::map<Id, std::vector<Booking>>{};
    for (const auto& b : d.bookings) by_user[b.user_id].push_back(b);
    for (const auto& [user, h] : by_user) {
        UserVector v = build_user_vector(h, ratings);
        SpendingStats s = user_spending_stats(h);
        CHECK(v.avg_spending == s.avg);
        CHECK(v.std_spending == s.sigma);
    }
    CHECK_THROWS(user_spending_stats({}));
}

namespace {

// Random but fully populated package attributes for regression fixtures.
Package random_package(Rng& rng, int i) {
    Package p;
    p.id = "P" + std::to_string(i);
    p.course_id = "C0";
    Date from = make_date(2012, 1 + (int)rng.uniform_int(0, 11), 1 + (int)rng.uniform_int(0, 20));
    p.active_from = from;
    p.shortness = 3 + (int)rng.uniform_int(0, 40);
    p.active_to = from.plus_days(p.shortness);
    p.play_month = month_of(from);
    p.play_dow = 1 + (int)rng.uniform_int(0, 6);
    p.options.lunch = rng.bernoulli(0.5);
    p.options.caddie = rng.bernoulli(0.3);
    p.options.competition = rng.bernoulli(0.2);
    p.options.pair_party = rng.bernoulli(0.3);
    p.options.holiday = rng.bernoulli(0.4);
    p.options.min_party_size = 1 + (int)rng.uniform_int(0, 2);
    p.options.min_num_parties = 1 + (int)rng.uniform_int(0, 2);
    p.options.num_laps = rng.bernoulli(0.2) ? 2 : 1;
    p.promotion_type = kPromotionLevels[rng.uniform_int(0, kNumPromotionLevels - 1)];
    return p;
}

PricingGroundTruth flat_ground_truth(Rng& rng, Money noise_sd) {
    GeneratorConfig cfg;
    cfg.tuning.seasonal_amplitude = 0.0;  // flat index: exactly linear prices
    cfg.price_noise_sd = noise_sd;
    return gendetail::make_ground_truth(cfg, rng);
}

}  // namespace

TEST_CASE("zero-noise linear prices are recovered to under one minor unit") {
    Rng rng(99);
    PricingGroundTruth gt = flat_ground_truth(rng, 0);
    std::vector<Package> pkgs;
    for (int i = 0; i < 260; ++i) {
        Package p = random_package(rng, i);
        p.price = ground_truth_price(p, gt, rng);
        pkgs.push_back(p);
    }
    PriceModelFit fit = fit_price_model(pkgs);
    CHECK(fit.residuals.max_abs < 1.0);
    CHECK(fit.r_squared > 0.999);
    // planted coefficients are identified up to rounding
    auto names = price_feature_names();
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == "caddie")
            CHECK(fit.coefficients[i] == doctest::Approx(gt.coefficients[i]).epsilon(0.02));
        if (names[i] == "num_laps")
            CHECK(fit.coefficients[i] == doctest::Approx(gt.coefficients[i]).epsilon(0.02));
    }
    CHECK_THROWS(fit_price_model(std::vector<Package>(pkgs.begin(), pkgs.begin() + 10)));
}

TEST_CASE("heteroscedastic noise shows up in the residual quartiles") {
    Rng rng(123);
    PricingGroundTruth gt = flat_ground_truth(rng, 400);
    std::vector<Package> pkgs;
    for (int i = 0; i < 2000; ++i) {
        Package p = random_package(rng, i);
        p.price = ground_truth_price(p, gt, rng);
        pkgs.push_back(p);
    }
    PriceModelFit fit = fit_price_model(pkgs);
    CHECK(fit.residuals.sd_top_quartile > fit.residuals.sd_bottom_quartile);
}
