#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "coldpack/behavior.hpp"
#include "coldpack/domain.hpp"

namespace coldpack {

// ---------------------------------------------------------------------------
// Linear price model feature expansion.
//
// Dummy-coded main effects for month (11) and day of week (6), the package
// attribute and promotional columns, and month/dow interactions with the
// lunch and caddie flags. The full 4-way Cartesian product would explode, so
// the interaction set is capped to stay full-rank on desk-scale corpora.
// ---------------------------------------------------------------------------

inline constexpr const char* kPromotionLevels[] = {"none", "early_bird", "last_minute",
                                                   "weekday_deal"};
inline constexpr int kNumPromotionLevels = 4;

inline int promotion_level(const std::string& s) {
    for (int i = 0; i < kNumPromotionLevels; ++i)
        if (s == kPromotionLevels[i]) return i;
    return 0;  // unknown types fold into the baseline
}

inline constexpr int kPriceFeatureDim = 1     // intercept
                                        + 11  // month 2..12
                                        + 6   // dow 2..7
                                        + 4   // lunch, caddie, competition, pair_party
                                        + 3   // min_party_size, min_num_parties, num_laps
                                        + 3   // promotion levels beyond baseline
                                        + 1   // shortness
                                        + 22  // month x {lunch, caddie}
                                        + 12; // dow x {lunch, caddie}

inline std::vector<double> price_features(const Package& p) {
    std::vector<double> x;
    x.reserve(kPriceFeatureDim);
    x.push_back(1.0);
    for (int m = 2; m <= 12; ++m) x.push_back(p.play_month == m ? 1.0 : 0.0);
    for (int d = 2; d <= 7; ++d) x.push_back(p.play_dow == d ? 1.0 : 0.0);
    const auto& o = p.options;
    x.push_back(o.lunch);
    x.push_back(o.caddie);
    x.push_back(o.competition);
    x.push_back(o.pair_party);
    x.push_back(o.min_party_size);
    x.push_back(o.min_num_parties);
    x.push_back(o.num_laps);
    int promo = promotion_level(p.promotion_type);
    for (int l = 1; l < kNumPromotionLevels; ++l) x.push_back(promo == l ? 1.0 : 0.0);
    x.push_back(p.shortness);
    for (int m = 2; m <= 12; ++m) {
        double md = p.play_month == m ? 1.0 : 0.0;
        x.push_back(md * o.lunch);
        x.push_back(md * o.caddie);
    }
    for (int d = 2; d <= 7; ++d) {
        double dd = p.play_dow == d ? 1.0 : 0.0;
        x.push_back(dd * o.lunch);
        x.push_back(dd * o.caddie);
    }
    return x;
}

inline std::vector<std::string> price_feature_names() {
    std::vector<std::string> names;
    names.push_back("intercept");
    for (int m = 2; m <= 12; ++m) names.push_back("month_" + std::to_string(m));
    for (int d = 2; d <= 7; ++d) names.push_back("dow_" + std::to_string(d));
    names.insert(names.end(), {"lunch", "caddie", "competition", "pair_party",
                               "min_party_size", "min_num_parties", "num_laps"});
    for (int l = 1; l < kNumPromotionLevels; ++l)
        names.push_back(std::string("promo_") + kPromotionLevels[l]);
    names.push_back("shortness");
    for (int m = 2; m <= 12; ++m) {
        names.push_back("month_" + std::to_string(m) + "_x_lunch");
        names.push_back("month_" + std::to_string(m) + "_x_caddie");
    }
    for (int d = 2; d <= 7; ++d) {
        names.push_back("dow_" + std::to_string(d) + "_x_lunch");
        names.push_back("dow_" + std::to_string(d) + "_x_caddie");
    }
    return names;
}

// ---------------------------------------------------------------------------
// Seasonal price index.
// ---------------------------------------------------------------------------

// Mean package price per calendar month divided by the grand mean. Months
// with no packages (or a degenerate mean) are imputed to 1.
struct SeasonalIndex {
    std::array<double, 12> index{1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1};

    double at(int month) const {
        if (month < 1 || month > 12)
            throw std::invalid_argument("seasonal index: month outside 1..12");
        return index[month - 1];
    }
};

inline SeasonalIndex fit_seasonal_index(const std::vector<Package>& packages) {
    SeasonalIndex idx;
    std::array<double, 12> sum{};
    std::array<long long, 12> count{};
    double grand_sum = 0;
    for (const auto& p : packages) {
        sum[p.play_month - 1] += static_cast<double>(p.price);
        ++count[p.play_month - 1];
        grand_sum += static_cast<double>(p.price);
    }
    if (packages.empty() || grand_sum <= 0) return idx;
    double grand_mean = grand_sum / static_cast<double>(packages.size());
    for (int m = 0; m < 12; ++m) {
        if (count[m] == 0) continue;
        double v = (sum[m] / count[m]) / grand_mean;
        if (v > 0) idx.index[m] = v;
    }
    return idx;
}

inline double seasonal_ratio(const SeasonalIndex& idx, int month_p, int month_ref) {
    return idx.at(month_p) / idx.at(month_ref);
}

// ---------------------------------------------------------------------------
// Price similarity.
// ---------------------------------------------------------------------------

inline double price_similarity_value(Money price_p, Money price_ref, double sigma_u,
                                     double omega, double r) {
    if (omega <= 0) throw std::invalid_argument("price_similarity: omega must be > 0");
    if (sigma_u < 0) throw std::invalid_argument("price_similarity: sigma must be >= 0");
    if (r <= 0) throw std::invalid_argument("price_similarity: seasonal ratio must be > 0");
    double diff = std::abs(static_cast<double>(price_p) - static_cast<double>(price_ref));
    return 1.0 / (1.0 + r / (omega + sigma_u) * diff);
}

inline double price_similarity(const Package& p, const Package& p_ref, double sigma_u,
                               double omega, double r) {
    return price_similarity_value(p.price, p_ref.price, sigma_u, omega, r);
}

// Population mean/deviation of a user's paid prices; matches the UserVector
// spending fields exactly (same computation).
struct SpendingStats {
    double avg = 0;
    double sigma = 0;
};

inline SpendingStats user_spending_stats(const std::vector<Booking>& history) {
    if (history.empty()) throw std::invalid_argument("user_spending_stats: empty history");
    std::vector<double> prices;
    prices.reserve(history.size());
    for (const auto& b : history) prices.push_back(static_cast<double>(b.price_paid));
    MeanSd s = population_stats(prices);
    return SpendingStats{s.mean, s.sd};
}

// ---------------------------------------------------------------------------
// Demonstrative per-course price regression (not in the scoring path).
// ---------------------------------------------------------------------------

namespace detail {

// Solves (A)x = b for symmetric positive definite A via Cholesky.
inline std::vector<double> solve_spd(std::vector<std::vector<double>> a,
                                     std::vector<double> b) {
    std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a[i][j];
            for (std::size_t t = 0; t < j; ++t) s -= a[i][t] * a[j][t];
            if (i == j) {
                if (s <= 0) throw std::runtime_error("solve_spd: matrix not positive definite");
                a[i][i] = std::sqrt(s);
            } else {
                a[i][j] = s / a[j][j];
            }
        }
    }
    // forward: L y = b
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t t = 0; t < i; ++t) s -= a[i][t] * b[t];
        b[i] = s / a[i][i];
    }
    // backward: L^T x = y
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t t = ii + 1; t < n; ++t) s -= a[t][ii] * b[t];
        b[ii] = s / a[ii][ii];
    }
    return b;
}

}  // namespace detail

struct ResidualSummary {
    double sd_all = 0;
    double sd_top_quartile = 0;     // by predicted price
    double sd_bottom_quartile = 0;  // by predicted price
    double max_abs = 0;
};

struct PriceModelFit {
    std::vector<double> coefficients;  // aligned with price_features()
    double r_squared = 0;
    ResidualSummary residuals;
};

inline double predict_price(const PriceModelFit& fit, const Package& p) {
    auto x = price_features(p);
    double y = 0;
    for (std::size_t i = 0; i < x.size(); ++i) y += fit.coefficients[i] * x[i];
    return y;
}

// Ordinary least squares with a small ridge term on the dummy-coded
// expansion. Demonstrates that price is largely predictable from the package
// description; the scoring path never calls this.
inline PriceModelFit fit_price_model(const std::vector<Package>& packages,
                                     double ridge = 1e-8) {
    const int dim = kPriceFeatureDim;
    if (packages.size() < static_cast<std::size_t>(dim) + 5)
        throw std::invalid_argument("fit_price_model: need at least " +
                                    std::to_string(dim + 5) + " packages");

    std::vector<std::vector<double>> xtx(dim, std::vector<double>(dim, 0.0));
    std::vector<double> xty(dim, 0.0);
    for (const auto& p : packages) {
        auto x = price_features(p);
        double y = static_cast<double>(p.price);
        for (int i = 0; i < dim; ++i) {
            xty[i] += x[i] * y;
            for (int j = 0; j <= i; ++j) xtx[i][j] += x[i] * x[j];
        }
    }
    for (int i = 0; i < dim; ++i) {
        for (int j = i + 1; j < dim; ++j) xtx[i][j] = xtx[j][i];
        xtx[i][i] += ridge;
    }

    PriceModelFit fit;
    fit.coefficients = detail::solve_spd(std::move(xtx), std::move(xty));

    std::vector<double> predictions, residuals;
    double y_mean = 0;
    for (const auto& p : packages) y_mean += static_cast<double>(p.price);
    y_mean /= static_cast<double>(packages.size());
    double ss_res = 0, ss_tot = 0;
    for (const auto& p : packages) {
        double pred = predict_price(fit, p);
        double res = static_cast<double>(p.price) - pred;
        predictions.push_back(pred);
        residuals.push_back(res);
        ss_res += res * res;
        ss_tot += (static_cast<double>(p.price) - y_mean) * (static_cast<double>(p.price) - y_mean);
    }
    fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;

    std::vector<std::size_t> by_pred(packages.size());
    for (std::size_t i = 0; i < by_pred.size(); ++i) by_pred[i] = i;
    std::sort(by_pred.begin(), by_pred.end(),
              [&](std::size_t a, std::size_t b) { return predictions[a] < predictions[b]; });
    std::size_t q = packages.size() / 4;
    auto sd_of = [&](std::size_t lo, std::size_t hi) {
        std::vector<double> xs;
        for (std::size_t i = lo; i < hi; ++i) xs.push_back(residuals[by_pred[i]]);
        return population_stats(xs).sd;
    };
    fit.residuals.sd_all = population_stats(residuals).sd;
    if (q >= 2) {
        fit.residuals.sd_bottom_quartile = sd_of(0, q);
        fit.residuals.sd_top_quartile = sd_of(packages.size() - q, packages.size());
    }
    for (double r : residuals) fit.residuals.max_abs = std::max(fit.residuals.max_abs, std::abs(r));
    return fit;
}

}  // namespace coldpack
