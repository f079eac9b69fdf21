#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "coldpack/behavior.hpp"
#include "coldpack/domain.hpp"

namespace coldpack {

// One binary logistic model: p = sigmoid(intercept + coefficients . u).
struct LogisticModel {
    double intercept = 0.0;
    std::vector<double> coefficients;
};

// Stable sigmoid, clamped to the open interval (0,1) so downstream logs and
// odds stay finite for |z| up to at least 700.
inline double logistic(double z) {
    double p;
    if (z >= 0) {
        p = 1.0 / (1.0 + std::exp(-z));
    } else {
        double e = std::exp(z);
        p = e / (1.0 + e);
    }
    const double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2;  // largest double < 1
    const double lo = std::numeric_limits<double>::min();
    return std::min(hi, std::max(lo, p));
}

inline double option_probability(const LogisticModel& m, const std::vector<double>& u_std) {
    if (m.coefficients.size() != u_std.size())
        throw std::invalid_argument("option_probability: dimension mismatch");
    double z = m.intercept;
    for (std::size_t i = 0; i < u_std.size(); ++i) z += m.coefficients[i] * u_std[i];
    return logistic(z);
}

struct LogisticHyperparams {
    double l2 = 1e-4;
    double learning_rate = 0.1;
    int max_epochs = 500;
    double min_improvement = 1e-8;
    double constant_clamp = 1e-3;  // probability bound for degenerate cells
};

// Mean log-loss with L2 on the coefficients (intercept unregularized).
// Written in softplus form, softplus(z) - y z, so extreme logits stay exact.
inline double logistic_loss(const LogisticModel& m, const std::vector<std::vector<double>>& x,
                            const std::vector<int>& y, double l2) {
    double loss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double z = m.intercept;
        for (std::size_t j = 0; j < x[i].size(); ++j) z += m.coefficients[j] * x[i][j];
        double softplus = std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
        loss += softplus - y[i] * z;
    }
    loss /= static_cast<double>(x.size());
    double reg = 0;
    for (double c : m.coefficients) reg += c * c;
    return loss + 0.5 * l2 * reg;
}

inline void logistic_gradient(const LogisticModel& m, const std::vector<std::vector<double>>& x,
                              const std::vector<int>& y, double l2, double& g_intercept,
                              std::vector<double>& g_coef) {
    g_intercept = 0;
    g_coef.assign(m.coefficients.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = option_probability(m, x[i]) - y[i];
        g_intercept += r;
        for (std::size_t j = 0; j < g_coef.size(); ++j) g_coef[j] += r * x[i][j];
    }
    double n = static_cast<double>(x.size());
    g_intercept /= n;
    for (std::size_t j = 0; j < g_coef.size(); ++j)
        g_coef[j] = g_coef[j] / n + l2 * m.coefficients[j];
}

struct LogisticFitMeta {
    int iterations = 0;
    double initial_loss = 0;
    double final_loss = 0;
    bool constant = false;
};

// Full-batch gradient descent from a zero start. A step that increases the
// loss is rejected and the learning rate halved.
inline LogisticModel fit_logistic(const std::vector<std::vector<double>>& x,
                                  const std::vector<int>& y, const LogisticHyperparams& hp,
                                  LogisticFitMeta& meta) {
    LogisticModel m;
    m.coefficients.assign(x.empty() ? 0 : x[0].size(), 0.0);
    double lr = hp.learning_rate;
    double loss = logistic_loss(m, x, y, hp.l2);
    meta.initial_loss = loss;
    double g0;
    std::vector<double> g;
    for (int epoch = 0; epoch < hp.max_epochs; ++epoch) {
        meta.iterations = epoch + 1;
        logistic_gradient(m, x, y, hp.l2, g0, g);
        LogisticModel cand = m;
        cand.intercept -= lr * g0;
        for (std::size_t j = 0; j < g.size(); ++j) cand.coefficients[j] -= lr * g[j];
        double cand_loss = logistic_loss(cand, x, y, hp.l2);
        if (cand_loss > loss) {
            lr *= 0.5;
            if (lr < 1e-12) break;
            continue;
        }
        double improvement = loss - cand_loss;
        m = std::move(cand);
        loss = cand_loss;
        if (improvement < hp.min_improvement) break;
    }
    meta.final_loss = loss;
    return m;
}

struct TrainedCell {
    LogisticModel model;
    LogisticFitMeta meta;
};

// Complete (cluster x option) grid of logistic models.
struct OptionModelSet {
    int n_clusters = 0;
    int dim = kUserVectorDim;
    std::vector<std::array<TrainedCell, kNumOptionFlags>> cells;

    const TrainedCell& cell(int cluster, int option) const {
        if (cluster < 0 || cluster >= n_clusters)
            throw std::invalid_argument("option models: unknown cluster id");
        return cells[cluster][option];
    }
};

// One training example: the user vector rebuilt without the last booking,
// the flags of that held-out last booking, and the user's cluster.
struct OptionTrainingRow {
    std::vector<double> features;
    std::array<int, kNumOptionFlags> response;
    int cluster = 0;
};

inline OptionModelSet train_option_models_from_rows(const std::vector<OptionTrainingRow>& rows,
                                                    int n_clusters, int dim,
                                                    const LogisticHyperparams& hp = {}) {
    OptionModelSet set;
    set.n_clusters = n_clusters;
    set.dim = dim;
    set.cells.resize(n_clusters);
    for (int c = 0; c < n_clusters; ++c) {
        std::vector<std::vector<double>> x;
        for (const auto& r : rows)
            if (r.cluster == c) x.push_back(r.features);
        for (int k = 0; k < kNumOptionFlags; ++k) {
            std::vector<int> y;
            y.reserve(x.size());
            for (const auto& r : rows)
                if (r.cluster == c) y.push_back(r.response[k]);
            TrainedCell& cell = set.cells[c][k];
            long sum = 0;
            for (int v : y) sum += v;
            if (y.empty() || sum == 0 || sum == static_cast<long>(y.size())) {
                // Degenerate cell: constant response (or no data). Clamp the
                // probability so downstream logits stay finite.
                double p = y.empty() ? 0.5
                                     : (sum == 0 ? hp.constant_clamp : 1.0 - hp.constant_clamp);
                cell.model.intercept = std::log(p / (1.0 - p));
                cell.model.coefficients.assign(dim, 0.0);
                cell.meta.constant = true;
                cell.meta.initial_loss = cell.meta.final_loss =
                    y.empty() ? 0.0 : logistic_loss(cell.model, x, y, hp.l2);
            } else {
                cell.model = fit_logistic(x, y, hp, cell.meta);
            }
        }
    }
    return set;
}

// Builds the leave-last-out training rows and fits the full grid. Each
// history must hold >= 2 bookings sorted ascending by booked_at; the cluster
// is assigned from the leave-last-out vector so training mirrors how the
// models are applied to a live history.
inline OptionModelSet train_option_models(
    const std::vector<std::vector<Booking>>& user_histories, const Clustering& clustering,
    const Standardizer& standardizer, const std::unordered_map<Id, double>& rating_by_course,
    const LogisticHyperparams& hp = {}) {
    std::vector<OptionTrainingRow> rows;
    rows.reserve(user_histories.size());
    for (const auto& h : user_histories) {
        if (h.size() < 2)
            throw std::invalid_argument("train_option_models: history with < 2 bookings");
        std::vector<Booking> head(h.begin(), h.end() - 1);
        const Booking& last = h.back();
        OptionTrainingRow row;
        row.features = standardizer.apply(build_user_vector(head, rating_by_course).to_vector());
        row.response = option_flags(last.options);
        row.cluster = assign_cluster(row.features, clustering);
        rows.push_back(std::move(row));
    }
    return train_option_models_from_rows(rows, clustering.k, kUserVectorDim, hp);
}

// User-weighed option similarity: sum over the flag set O of the probability
// that the user's next booking matches the package's value of that flag.
inline double option_similarity(const Package& p, const std::vector<double>& u_std,
                                const OptionModelSet& models, int cluster) {
    auto flags = option_flags(p);
    double score = 0;
    for (int k = 0; k < kNumOptionFlags; ++k) {
        double prob = option_probability(models.cell(cluster, k).model, u_std);
        score += flags[k] ? prob : 1.0 - prob;
    }
    return score;
}

}  // namespace coldpack
