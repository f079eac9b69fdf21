#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "coldpack/dates.hpp"
#include "coldpack/domain.hpp"
#include "coldpack/pricesim.hpp"
#include "coldpack/reference.hpp"
#include "coldpack/rng.hpp"

namespace coldpack {

// ---------------------------------------------------------------------------
// Configuration.
// ---------------------------------------------------------------------------

// The five user archetypes. The mix defaults to 35/35/10/10/10; the exact
// centroid parameters below are generator choices, not published values.
inline constexpr int kNumArchetypes = 5;
inline constexpr const char* kArchetypeNames[kNumArchetypes] = {"pairs", "friends", "refined",
                                                                "league", "noise"};

struct ArchetypeSpec {
    double lunch_p, caddie_p, competition_p, pair_party_p;
    double weekend_p;       // chance a booking targets a weekend/holiday date
    double two_lap_p;       // chance the user habitually books two rounds
    double spend_level;     // scales the price target around the fair price
    double spend_jitter_sd; // per-booking lognormal jitter on the price target
    bool erratic;           // occasion-driven spending (the refined segment)
    int party_size_lo, party_size_hi;
    int num_parties_lo, num_parties_hi;
    int favored_month;      // 0 = no seasonal preference
    double course_tier;     // 0 = cheap venues .. 1 = premium venues
    double quality_pref;    // latent package quality the user gravitates to
};

inline const std::array<ArchetypeSpec, kNumArchetypes>& archetype_specs() {
    static const std::array<ArchetypeSpec, kNumArchetypes> specs = {{
        // lunch caddie comp  pair  wknd  2lap  level jitter erratic party parties month tier
        {0.55, 0.06, 0.04, 0.80, 0.80, 0.03, 0.97, 0.05, false, 2, 2, 1, 1, 5, 0.58, 0.0},    // pairs
        {0.72, 0.07, 0.10, 0.06, 0.68, 0.08, 0.95, 0.05, false, 4, 4, 1, 1, 10, 0.48, -0.2},  // friends
        {0.48, 0.90, 0.12, 0.12, 0.10, 0.15, 1.18, 0.10, true, 2, 3, 1, 1, 4, 0.95, 1.4},    // refined
        {0.30, 0.10, 0.68, 0.04, 0.35, 0.30, 1.02, 0.05, false, 3, 3, 2, 3, 9, 0.62, 0.2},   // league
        {0.40, 0.15, 0.15, 0.20, 0.50, 0.10, 0.90, 0.14, false, 2, 3, 1, 2, 0, 0.12, -1.0},  // noise
    }};
    return specs;
}

// Internal generator knobs with documented defaults. These shape the
// synthetic corpus only; the scoring pipeline never reads them.
struct GeneratorTuning {
    Money base_price = 6000;
    Money min_price = 1500;
    double seasonal_amplitude = 0.08;  // peak-to-mean of the monthly multiplier
    int seasonal_peak_month = 8;
    double coefficient_jitter = 0.08;  // relative jitter on the planted coefficients
    double option_prop_jitter = 0.14;  // user-level jitter on archetype option rates
    double lap_flip_p = 0.025;          // chance a booking deviates from the lap habit
    double treat_p = 0.013;            // chance a disciplined booking splurges anyway
    double explore_p = 0.08;           // chance a booking tries a non-favorite course
    double favorite_tier_sd = 0.10;    // venue spread inside a user's favorites
    int booking_lead_max_days = 14;
    int candidate_date_slack_days = 14;
    int n_regions = 10;                // capped so regions hold >= ~15 courses
};

struct GeneratorConfig {
    int n_users = 10000;
    int n_courses = 200;
    int n_packages_per_course_month = 10;
    int months = 12;
    Date start = make_date(2012, 6, 1);
    // pairs, friends, refined, league, noise; must sum to 1.
    std::array<double, kNumArchetypes> cluster_mix = {0.35, 0.35, 0.10, 0.10, 0.10};
    Money price_noise_sd = 200;
    double bookings_per_user_year = 4.5;
    std::uint64_t seed = 1;
    GeneratorTuning tuning;

    void validate() const {
        if (n_users < 1 || n_courses < 1 || n_packages_per_course_month < 1 || months < 1)
            throw std::invalid_argument("generator config: all counts must be >= 1");
        double sum = 0;
        for (double p : cluster_mix) {
            if (p < 0) throw std::invalid_argument("cluster_mix: negative proportion");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("cluster_mix: proportions must sum to 1");
        if (price_noise_sd < 0)
            throw std::invalid_argument("price_noise_sd must be >= 0");
        if (bookings_per_user_year <= 0)
            throw std::invalid_argument("bookings_per_user_year must be > 0");
    }
};

// ---------------------------------------------------------------------------
// Pricing ground truth.
// ---------------------------------------------------------------------------

// Planted linear pricing model on the price_features() expansion. The
// coefficient on the intercept column is zero: base_price plays that role.
// Prices additionally carry a latent per-package quality component (scaled
// by quality_spread) that no observable attribute exposes; it is part of
// what makes price itself informative.
struct PricingGroundTruth {
    std::vector<double> coefficients;  // dim == kPriceFeatureDim
    Money base_price = 6000;
    std::array<double, 12> seasonal_index{1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
    Money noise_sd = 0;     // noise scale at the base price level
    Money min_price = 1500;
    double quality_spread = 0.045;  // relative price shift per latent quality unit

    void validate() const {
        double mean = 0;
        for (double s : seasonal_index) {
            if (s <= 0) throw std::invalid_argument("seasonal_index entries must be > 0");
            mean += s;
        }
        mean /= 12.0;
        if (std::abs(mean - 1.0) > 1e-9)
            throw std::invalid_argument("seasonal_index must average to 1");
    }
};

// Deterministic part of the planted price: (base + coef . features),
// scaled by the seasonal multiplier of the play month.
inline double planted_price_mean(const Package& p, const PricingGroundTruth& gt) {
    auto x = price_features(p);
    double d = static_cast<double>(gt.base_price);
    for (std::size_t i = 0; i < x.size(); ++i) d += gt.coefficients[i] * x[i];
    return d * gt.seasonal_index[p.play_month - 1];
}

// Planted price with heteroscedastic noise: the noise sd scales with the
// price level, so pricing loosens at the high end. latent_quality shifts the
// price by quality_spread per unit without touching any observable field.
inline Money ground_truth_price(const Package& p, const PricingGroundTruth& gt, Rng& rng,
                                double latent_quality = 0.0) {
    double mean = planted_price_mean(p, gt);
    mean *= 1.0 + gt.quality_spread * latent_quality;
    double noise = 0;
    if (gt.noise_sd > 0) {
        double sd = static_cast<double>(gt.noise_sd) *
                    std::max(0.1, mean / static_cast<double>(gt.base_price));
        noise = rng.normal(0.0, sd);
    }
    auto price = static_cast<Money>(std::llround(mean + noise));
    return std::max(gt.min_price, price);
}

// Lifespan mixture: short specials, a monthly bulk, and a long tail. The CDF
// at 31 days is 0.90 by construction.
inline int sample_package_lifespan(Rng& rng) {
    double u = rng.uniform();
    if (u < 0.30) return 1 + static_cast<int>(rng.uniform_int(0, 5));     // 1..6
    if (u < 0.90) return 14 + static_cast<int>(rng.uniform_int(0, 16));   // 14..30
    return 32 + static_cast<int>(rng.uniform_int(0, 58));                 // 32..90
}

// ---------------------------------------------------------------------------
// Dataset generation.
// ---------------------------------------------------------------------------

struct GeneratedData {
    Dataset dataset;
    PricingGroundTruth ground_truth;
    std::vector<Id> user_ids;          // every configured user, booked or not
    std::vector<int> planted_labels;   // archetype index per user_ids entry
};

namespace gendetail {

inline std::string course_id(int i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "C%04d", i);
    return buf;
}
inline std::string package_id(int i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "P%06d", i);
    return buf;
}
inline std::string user_id(int i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "U%05d", i);
    return buf;
}

// Synthetic national holidays, one fixed list per calendar year.
inline std::set<Date> make_holiday_calendar(Date start, Date end) {
    static const int md[][2] = {{1, 1},  {1, 2},  {2, 11}, {3, 20}, {4, 29},
                                {5, 3},  {5, 4},  {5, 5},  {7, 21}, {9, 15},
                                {9, 23}, {10, 14}, {11, 3}, {11, 23}, {12, 23}};
    std::set<Date> cal;
    for (int y = year_of(start); y <= year_of(end); ++y)
        for (const auto& e : md) {
            Date d = make_date(y, e[0], e[1]);
            if (start <= d && d <= end) cal.insert(d);
        }
    return cal;
}

inline PricingGroundTruth make_ground_truth(const GeneratorConfig& cfg, Rng& rng) {
    const auto& t = cfg.tuning;
    PricingGroundTruth gt;
    gt.base_price = t.base_price;
    gt.min_price = t.min_price;
    gt.noise_sd = cfg.price_noise_sd;
    gt.coefficients.assign(kPriceFeatureDim, 0.0);

    auto names = price_feature_names();
    auto set = [&](const std::string& name, double mean) {
        auto it = std::find(names.begin(), names.end(), name);
        gt.coefficients[it - names.begin()] =
            mean * (1.0 + t.coefficient_jitter * rng.normal());
    };
    set("lunch", 500);
    set("caddie", 2200);
    set("competition", 450);
    set("pair_party", 300);
    set("min_party_size", -120);
    set("min_num_parties", -80);
    set("num_laps", 3800);
    set("promo_early_bird", -400);
    set("promo_last_minute", -650);
    set("promo_weekday_deal", -500);
    set("shortness", 8);
    set("dow_5", 250);
    set("dow_6", 700);
    set("dow_7", 550);

    double sum = 0;
    for (int m = 1; m <= 12; ++m) {
        double s = 1.0 + t.seasonal_amplitude *
                             std::cos(2.0 * 3.14159265358979323846 *
                                      (m - t.seasonal_peak_month) / 12.0);
        gt.seasonal_index[m - 1] = s;
        sum += s;
    }
    for (double& s : gt.seasonal_index) s *= 12.0 / sum;
    return gt;
}

struct GenPackage {
    Package pkg;
    Date target;   // the play date the package is built around
    double quality = 0;  // latent tier folded into the price
};

}  // namespace gendetail

// Generates a corpus with the target statistical shape: mostly
// month-or-shorter package lifespans, archetype-driven user behavior with
// tight per-user spending bands (the refined segment excepted), and planted
// linear pricing with a seasonal multiplier.
inline GeneratedData generate_dataset(const GeneratorConfig& cfg) {
    cfg.validate();
    const auto& tun = cfg.tuning;
    Rng rng(cfg.seed);
    GeneratedData out;

    Date period_start = cfg.start;
    Date period_end = add_months_first_day(cfg.start, cfg.months).plus_days(-1);
    out.dataset.holiday_calendar =
        gendetail::make_holiday_calendar(period_start, period_end.plus_days(90));
    out.ground_truth = gendetail::make_ground_truth(cfg, rng);
    const PricingGroundTruth& gt = out.ground_truth;

    // --- courses ------------------------------------------------------------
    int n_regions = std::clamp(cfg.n_courses / 15, 1, tun.n_regions);
    std::vector<double> course_factor(cfg.n_courses);
    for (int i = 0; i < cfg.n_courses; ++i) {
        double f = rng.uniform(0.78, 1.32);
        course_factor[i] = f;
        Course c;
        c.id = gendetail::course_id(i);
        c.region = "R" + std::to_string(i % n_regions);
        double rating = 3.3 + 1.1 * (f - 0.78) / 0.54 + rng.normal(0, 0.25);
        c.rating = std::clamp(std::round(rating * 10.0) / 10.0, 1.0, 5.0);
        out.dataset.courses.push_back(std::move(c));
    }
    // Region course lists sorted by price level; archetype tier picks within.
    std::vector<std::vector<int>> region_courses(n_regions);
    for (int i = 0; i < cfg.n_courses; ++i) region_courses[i % n_regions].push_back(i);
    for (auto& rc : region_courses)
        std::sort(rc.begin(), rc.end(),
                  [&](int a, int b) { return course_factor[a] < course_factor[b]; });

    // --- packages -----------------------------------------------------------
    std::vector<std::vector<gendetail::GenPackage>> by_course(cfg.n_courses);
    int package_counter = 0;
    auto draw_dow = [&](Rng& r) {
        // More weekend than weekday packages, mirroring demand.
        static const double w[7] = {0.10, 0.10, 0.10, 0.10, 0.13, 0.25, 0.22};
        std::vector<double> weights(w, w + 7);
        return static_cast<int>(r.weighted_index(weights)) + 1;
    };
    for (int ci = 0; ci < cfg.n_courses; ++ci) {
        PricingGroundTruth course_gt = gt;
        course_gt.base_price =
            static_cast<Money>(std::llround(static_cast<double>(gt.base_price) *
                                            course_factor[ci]));
        for (int mi = 0; mi < cfg.months; ++mi) {
            Date month_start = add_months_first_day(cfg.start, mi);
            int dim = days_in_month(year_of(month_start), month_of(month_start));
            for (int j = 0; j < cfg.n_packages_per_course_month; ++j) {
                gendetail::GenPackage g;
                Package& p = g.pkg;
                p.id = gendetail::package_id(package_counter++);
                p.course_id = out.dataset.courses[ci].id;
                int lifespan = sample_package_lifespan(rng);
                p.active_from = month_start.plus_days(
                    static_cast<int>(rng.uniform_int(0, dim - 1)));
                p.active_to = p.active_from.plus_days(lifespan);
                p.shortness = lifespan;

                // Pick the target play date: a date in the window matching a
                // drawn day-of-week, else the window midpoint.
                int want_dow = draw_dow(rng);
                std::vector<Date> matching;
                for (int d = 0; d <= lifespan; ++d) {
                    Date cand = p.active_from.plus_days(d);
                    if (weekday_iso(cand) == want_dow) matching.push_back(cand);
                }
                g.target = matching.empty()
                               ? p.active_from.plus_days(lifespan / 2)
                               : matching[rng.uniform_int(0, static_cast<int>(matching.size()) - 1)];
                p.play_month = month_of(g.target);
                p.play_dow = weekday_iso(g.target);

                p.options.lunch = rng.bernoulli(0.50);
                p.options.caddie = rng.bernoulli(0.25);
                p.options.competition = rng.bernoulli(0.20);
                p.options.pair_party = rng.bernoulli(0.25);
                p.options.holiday = is_weekend(g.target) ||
                                    out.dataset.holiday_calendar.count(g.target);
                double u = rng.uniform();
                p.options.min_party_size = u < 0.80 ? 1 : (u < 0.95 ? 2 : 3);
                u = rng.uniform();
                p.options.min_num_parties = u < 0.96 ? 1 : (u < 0.99 ? 2 : 3);
                p.options.num_laps = rng.bernoulli(0.12) ? 2 : 1;
                u = rng.uniform();
                if (u < 0.50) p.promotion_type = "none";
                else if (u < 0.70) p.promotion_type = "early_bird";
                else if (u < 0.85) p.promotion_type = "last_minute";
                else p.promotion_type = p.play_dow <= 5 ? "weekday_deal" : "none";

                g.quality = std::clamp(rng.normal(), -2.0, 2.0);
                p.price = ground_truth_price(p, course_gt, rng, g.quality);
                by_course[ci].push_back(std::move(g));
            }
        }
        std::sort(by_course[ci].begin(), by_course[ci].end(),
                  [](const gendetail::GenPackage& a, const gendetail::GenPackage& b) {
                      if (a.target != b.target) return a.target < b.target;
                      return a.pkg.id < b.pkg.id;
                  });
        for (const auto& g : by_course[ci]) out.dataset.packages.push_back(g.pkg);
    }

    // --- users and bookings ---------------------------------------------------
    std::vector<double> mix(cfg.cluster_mix.begin(), cfg.cluster_mix.end());
    const auto& specs = archetype_specs();
    double mean_bookings = cfg.bookings_per_user_year * cfg.months / 12.0;

    for (int ui = 0; ui < cfg.n_users; ++ui) {
        out.user_ids.push_back(gendetail::user_id(ui));
        int arch = static_cast<int>(rng.weighted_index(mix));
        out.planted_labels.push_back(arch);
        const ArchetypeSpec& a = specs[arch];

        int region = static_cast<int>(rng.uniform_int(0, n_regions - 1));
        const auto& rc = region_courses[region];

        // Favorite courses, biased toward the archetype's price tier and kept
        // inside a narrow price band so per-user spending stays coherent.
        int n_fav = std::min<int>(2 + rng.poisson(1.3), std::min<int>(6, (int)rc.size()));
        double tier_u = std::clamp(a.course_tier + rng.normal(0, 0.08), 0.02, 0.98);
        std::vector<int> favorites;
        int guard = 0;
        while ((int)favorites.size() < n_fav && ++guard < 200) {
            double pos = std::clamp(tier_u + rng.normal(0, tun.favorite_tier_sd), 0.0, 0.999);
            int pick = rc[static_cast<int>(pos * rc.size())];
            if (std::find(favorites.begin(), favorites.end(), pick) == favorites.end())
                favorites.push_back(pick);
        }

        auto clip01 = [](double p) { return std::clamp(p, 0.02, 0.98); };
        double lunch_p = clip01(a.lunch_p + rng.normal(0, tun.option_prop_jitter));
        double caddie_p = clip01(a.caddie_p + rng.normal(0, tun.option_prop_jitter));
        double comp_p = clip01(a.competition_p + rng.normal(0, tun.option_prop_jitter));
        double pair_p = clip01(a.pair_party_p + rng.normal(0, tun.option_prop_jitter));
        double weekend_p = clip01(a.weekend_p + rng.normal(0, 0.08));
        bool two_lap_habit = rng.bernoulli(a.two_lap_p);
        int party_size_u = static_cast<int>(rng.uniform_int(a.party_size_lo, a.party_size_hi));
        int num_parties_u =
            static_cast<int>(rng.uniform_int(a.num_parties_lo, a.num_parties_hi));
        int favored_month = a.favored_month ? 1 + (a.favored_month - 1 +
                                                   (int)rng.uniform_int(0, 2) + 11) % 12
                                            : 1 + (int)rng.uniform_int(0, 11);
        double spend_level = a.spend_level * (1.0 + rng.normal(0, 0.04));
        double quality_pref = a.quality_pref + rng.normal(0, 0.25);

        int n_bookings = rng.poisson(mean_bookings);
        for (int bi = 0; bi < n_bookings; ++bi) {
            int want_weekend = rng.bernoulli(weekend_p);

            // Play month biased toward the favored season; the day respects
            // the user's weekday/weekend preference.
            std::vector<double> month_w(cfg.months);
            for (int mi = 0; mi < cfg.months; ++mi) {
                int m = month_of(add_months_first_day(cfg.start, mi));
                month_w[mi] =
                    0.55 + month_kernel(month_circular_distance(m, favored_month));
            }
            int mi = static_cast<int>(rng.weighted_index(month_w));
            Date month_start = add_months_first_day(cfg.start, mi);
            int month_days = days_in_month(year_of(month_start), month_of(month_start));
            Date play_target = month_start;
            for (int attempt = 0; attempt < 8; ++attempt) {
                play_target =
                    month_start.plus_days(static_cast<int>(rng.uniform_int(0, month_days - 1)));
                bool holiday_like = is_weekend(play_target) ||
                                    out.dataset.holiday_calendar.count(play_target);
                if (holiday_like == static_cast<bool>(want_weekend)) break;
            }

            int course;
            if (rng.bernoulli(tun.explore_p)) {
                course = rc[rng.uniform_int(0, static_cast<int>(rc.size()) - 1)];
            } else {
                std::vector<double> w(favorites.size());
                for (std::size_t f = 0; f < favorites.size(); ++f) w[f] = 1.0 / (1.0 + f);
                course = favorites[rng.weighted_index(w)];
            }
            const auto& shelf = by_course[course];
            if (shelf.empty()) continue;

            // Candidate packages around the target date.
            std::vector<const gendetail::GenPackage*> cands;
            for (const auto& g : shelf) {
                int gap = std::abs(g.target - play_target);
                if (gap <= tun.candidate_date_slack_days) cands.push_back(&g);
            }
            if (cands.empty()) {
                int best_gap = INT32_MAX;
                const gendetail::GenPackage* best = nullptr;
                for (const auto& g : shelf) {
                    int gap = std::abs(g.target - play_target);
                    if (gap < best_gap) {
                        best_gap = gap;
                        best = &g;
                    }
                }
                cands.push_back(best);
            }

            // Desired booking profile for this outing. Erratic spenders run
            // on occasions: rare lavish outings, modest ones otherwise.
            int play_month_w = month_of(play_target);
            double lunch_season =
                0.15 * std::cos(2.0 * 3.14159265358979323846 * (play_month_w - 12) / 12.0);
            double comp_season =
                0.12 * std::cos(2.0 * 3.14159265358979323846 * (play_month_w - 10) / 12.0);
            auto clip01b = [](double p) { return std::clamp(p, 0.02, 0.98); };
            int want_lunch = rng.bernoulli(clip01b(lunch_p + lunch_season));
            int want_comp = rng.bernoulli(clip01b(comp_p + comp_season));
            int want_pair = rng.bernoulli(pair_p);
            double occasion;
            int want_caddie, want_laps;
            bool splurge = rng.bernoulli(a.erratic ? 0.18 : tun.treat_p);
            if (a.erratic || splurge) {
                occasion = (splurge ? 1.30 : 0.92) * std::exp(rng.normal(0, a.spend_jitter_sd));
                want_caddie = splurge || rng.bernoulli(a.erratic ? 0.55 : 0.35);
                want_laps = splurge ? 2 : 1;
            } else {
                occasion = std::exp(rng.normal(0, a.spend_jitter_sd));
                want_caddie = rng.bernoulli(caddie_p);
                want_laps = (two_lap_habit != rng.bernoulli(tun.lap_flip_p)) ? 2 : 1;
            }

            // Score candidates: option matching dominates, each dimension
            // weighted by how opinionated the user is about it, so that
            // indifferent dimensions add no selection noise. The price term
            // compares the asking price against the fair (promo-free) price
            // of that candidate at the user's spending level.
            auto conf = [](double p) { return std::abs(2.0 * p - 1.0); };
            double conf_laps = a.erratic ? 0.6 : conf(two_lap_habit ? 1.0 - tun.lap_flip_p
                                                                    : tun.lap_flip_p);
            double conf_caddie = a.erratic ? 0.9 : conf(caddie_p);
            PricingGroundTruth course_gt = gt;
            course_gt.base_price = static_cast<Money>(
                std::llround(static_cast<double>(gt.base_price) * course_factor[course]));
            const gendetail::GenPackage* chosen = nullptr;
            double best_score = -1e18;
            if (splurge) {
                // A lavish outing books the priciest thing on the shelf.
                for (const auto* g : cands) {
                    if (g->pkg.options.min_party_size > party_size_u) continue;
                    if (!chosen || g->pkg.price > chosen->pkg.price) chosen = g;
                }
                if (!chosen) chosen = cands.front();
            } else {
                for (const auto* g : cands) {
                    const Package& p = g->pkg;
                    Package fair_probe = p;
                    fair_probe.promotion_type = "none";
                    double fair = planted_price_mean(fair_probe, course_gt);
                    double target = fair * spend_level * occasion *
                                    (1.0 + gt.quality_spread * quality_pref);
                    double s = 0;
                    s += (p.options.lunch == want_lunch) * 2.0 * std::max(conf(lunch_p), 0.5);
                    s += (p.options.caddie == want_caddie) * 2.8 * conf_caddie;
                    s += (p.options.competition == want_comp) * 2.4 * conf(comp_p);
                    s += (p.options.pair_party == want_pair) * 1.6 * conf(pair_p);
                    s -= (p.options.holiday != want_weekend) * 2.5;
                    s += (p.options.num_laps == want_laps) * 2.4 * conf_laps;
                    s -= (p.options.min_party_size > party_size_u) * 2.5;
                    s -= (p.options.min_num_parties > num_parties_u) * 3.0;
                    s -= std::abs(static_cast<double>(p.price) - target) / (0.04 * fair);
                    if (s > best_score) {
                        best_score = s;
                        chosen = g;
                    }
                }
            }

            Booking b;
            b.user_id = out.user_ids.back();
            b.course_id = chosen->pkg.course_id;
            b.package_id = chosen->pkg.id;
            b.play_date = chosen->target;
            int lead = 1 + static_cast<int>(rng.uniform_int(0, tun.booking_lead_max_days - 1));
            b.booked_at = std::max(period_start, b.play_date.plus_days(-lead));
            b.price_paid = chosen->pkg.price;
            b.options = chosen->pkg.options;
            b.party_size = party_size_u;
            b.num_parties = a.num_parties_lo == a.num_parties_hi
                                ? num_parties_u
                                : static_cast<int>(rng.uniform_int(a.num_parties_lo,
                                                                   a.num_parties_hi));
            out.dataset.bookings.push_back(std::move(b));
        }
    }

    sort_dataset(out.dataset);
    return out;
}

// Fraction of booked users whose every paid price stays within +/-30% of
// their own mean spend.
inline double spend_adherence_fraction(const Dataset& d) {
    std::map<Id, std::vector<double>> prices;
    for (const auto& b : d.bookings)
        prices[b.user_id].push_back(static_cast<double>(b.price_paid));
    if (prices.empty()) return 1.0;
    int adherent = 0;
    for (const auto& [user, xs] : prices) {
        double mean = 0;
        for (double x : xs) mean += x;
        mean /= xs.size();
        bool ok = true;
        for (double x : xs)
            if (std::abs(x - mean) > 0.3 * mean) ok = false;
        adherent += ok;
    }
    return static_cast<double>(adherent) / static_cast<double>(prices.size());
}

}  // namespace coldpack
