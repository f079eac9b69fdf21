#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "coldpack/csv.hpp"
#include "coldpack/ranker.hpp"

namespace coldpack {

inline constexpr int kModelFormatVersion = 1;

// FNV-1a, used for content hashes in the model manifest.
inline std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string fnv1a_hex(const std::string& bytes) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(bytes)));
    return buf;
}

namespace detail {

inline nlohmann::json weights_to_json(const FusionWeights& w) {
    return {{"w_price", w.w_price}, {"w_opt", w.w_opt}, {"w_course", w.w_course}};
}

inline FusionWeights weights_from_json(const nlohmann::json& j) {
    return FusionWeights{j.at("w_price").get<double>(), j.at("w_opt").get<double>(),
                         j.at("w_course").get<double>()};
}

}  // namespace detail

inline std::string model_to_json_string(const TrainedRecommender& m) {
    nlohmann::json j;
    j["format_version"] = kModelFormatVersion;
    j["config"] = {{"k", m.config.k},
                   {"top_m", m.config.top_m},
                   {"omega", m.config.omega},
                   {"seed", m.config.seed},
                   {"setting", setting_name(m.config.setting)},
                   {"logistic",
                    {{"l2", m.config.logistic.l2},
                     {"learning_rate", m.config.logistic.learning_rate},
                     {"max_epochs", m.config.logistic.max_epochs},
                     {"min_improvement", m.config.logistic.min_improvement},
                     {"constant_clamp", m.config.logistic.constant_clamp}}}};
    j["standardizer"] = {{"mean", m.standardizer.mean}, {"sd", m.standardizer.sd}};
    j["clustering"] = {{"k", m.clustering.k},
                       {"centroids", m.clustering.centroids},
                       {"inertia", m.clustering.inertia},
                       {"iterations", m.clustering.iterations}};
    j["seasonal_index"] = m.seasonal_index.index;
    j["weights"] = detail::weights_to_json(m.weights);
    j["global_mean_vector"] = m.global_mean_vector;
    nlohmann::json cells = nlohmann::json::array();
    for (int c = 0; c < m.option_models.n_clusters; ++c)
        for (int k = 0; k < kNumOptionFlags; ++k) {
            const TrainedCell& cell = m.option_models.cells[c][k];
            nlohmann::json jc_cell;
            jc_cell["cluster"] = c;
            jc_cell["option"] = kOptionFlagNames[k];
            jc_cell["intercept"] = cell.model.intercept;
            jc_cell["coefficients"] = cell.model.coefficients;
            jc_cell["iterations"] = cell.meta.iterations;
            jc_cell["initial_loss"] = cell.meta.initial_loss;
            jc_cell["final_loss"] = cell.meta.final_loss;
            jc_cell["constant"] = cell.meta.constant;
            cells.push_back(std::move(jc_cell));
        }
    j["option_models"] = std::move(cells);
    return j.dump(2);
}

// Triplet form, upper triangle. Diagonals are always written (zero included)
// so the course universe survives a round trip.
inline std::string cooccurrence_to_csv(const CooccurrenceMatrix& m) {
    std::ostringstream out;
    out << "course_i,course_j,count\n";
    for (std::size_t i = 0; i < m.course_ids.size(); ++i)
        for (std::size_t j = i; j < m.course_ids.size(); ++j)
            if (i == j || m.counts[i][j] > 0)
                out << m.course_ids[i] << ',' << m.course_ids[j] << ',' << m.counts[i][j]
                    << '\n';
    return out.str();
}

// Table-style report of the fitted logistic weights, one row per
// (cluster, option, dimension).
inline std::string option_weights_report_csv(const OptionModelSet& models) {
    std::ostringstream out;
    out << "cluster,option,dimension,weight\n";
    char buf[32];
    for (int c = 0; c < models.n_clusters; ++c)
        for (int k = 0; k < kNumOptionFlags; ++k) {
            const LogisticModel& m = models.cells[c][k].model;
            for (int d = 0; d < static_cast<int>(m.coefficients.size()); ++d) {
                std::snprintf(buf, sizeof buf, "%.6f", m.coefficients[d]);
                out << c << ',' << kOptionFlagNames[k] << ',' << kUserVectorDimNames[d] << ','
                    << buf << '\n';
            }
            std::snprintf(buf, sizeof buf, "%.6f", m.intercept);
            out << c << ',' << kOptionFlagNames[k] << ",intercept," << buf << '\n';
        }
    return out.str();
}

// A short stable digest of every trained artifact; equal fingerprints mean
// byte-identical persisted models.
inline std::string model_fingerprint(const TrainedRecommender& m) {
    return fnv1a_hex(model_to_json_string(m) + cooccurrence_to_csv(m.cooccurrence));
}

inline void save_model(const TrainedRecommender& m, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::string model_json = model_to_json_string(m);
    std::string cooc_csv = cooccurrence_to_csv(m.cooccurrence);
    std::string report_csv = option_weights_report_csv(m.option_models);
    {
        std::ofstream out(fs::path(dir) / "model.json", std::ios::binary);
        out << model_json << '\n';
    }
    {
        std::ofstream out(fs::path(dir) / "cooccurrence.csv", std::ios::binary);
        out << cooc_csv;
    }
    {
        std::ofstream out(fs::path(dir) / "option_weights.csv", std::ios::binary);
        out << report_csv;
    }
    nlohmann::json manifest = {
        {"format_version", kModelFormatVersion},
        {"artifacts",
         {{"model", {{"path", "model.json"}, {"fnv1a", fnv1a_hex(model_json)}}},
          {"cooccurrence", {{"path", "cooccurrence.csv"}, {"fnv1a", fnv1a_hex(cooc_csv)}}},
          {"option_weights",
           {{"path", "option_weights.csv"}, {"fnv1a", fnv1a_hex(report_csv)}}}}}};
    std::ofstream out(fs::path(dir) / "manifest.json", std::ios::binary);
    out << manifest.dump(2) << '\n';
}

inline TrainedRecommender load_model(const std::string& dir) {
    namespace fs = std::filesystem;
    std::ifstream in(fs::path(dir) / "model.json");
    if (!in) throw std::runtime_error("cannot open model.json in " + dir);
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.value("format_version", -1) != kModelFormatVersion)
        throw std::runtime_error("unsupported model format_version");

    TrainedRecommender m;
    const auto& jc = j.at("config");
    m.config.k = jc.at("k").get<int>();
    m.config.top_m = jc.at("top_m").get<int>();
    m.config.omega = jc.at("omega").get<double>();
    m.config.seed = jc.at("seed").get<std::uint64_t>();
    m.config.setting = setting_from_name(jc.at("setting").get<std::string>());
    const auto& jl = jc.at("logistic");
    m.config.logistic.l2 = jl.at("l2").get<double>();
    m.config.logistic.learning_rate = jl.at("learning_rate").get<double>();
    m.config.logistic.max_epochs = jl.at("max_epochs").get<int>();
    m.config.logistic.min_improvement = jl.at("min_improvement").get<double>();
    m.config.logistic.constant_clamp = jl.at("constant_clamp").get<double>();

    m.standardizer.mean = j.at("standardizer").at("mean").get<std::vector<double>>();
    m.standardizer.sd = j.at("standardizer").at("sd").get<std::vector<double>>();
    m.clustering.k = j.at("clustering").at("k").get<int>();
    m.clustering.centroids =
        j.at("clustering").at("centroids").get<std::vector<std::vector<double>>>();
    m.clustering.inertia = j.at("clustering").at("inertia").get<double>();
    m.clustering.iterations = j.at("clustering").at("iterations").get<int>();
    m.seasonal_index.index = j.at("seasonal_index").get<std::array<double, 12>>();
    m.weights = detail::weights_from_json(j.at("weights"));
    m.global_mean_vector = j.at("global_mean_vector").get<std::vector<double>>();

    m.option_models.n_clusters = m.clustering.k;
    m.option_models.dim = static_cast<int>(m.standardizer.mean.size());
    m.option_models.cells.resize(m.clustering.k);
    std::map<std::string, int> option_index;
    for (int k = 0; k < kNumOptionFlags; ++k) option_index[kOptionFlagNames[k]] = k;
    for (const auto& cell : j.at("option_models")) {
        int c = cell.at("cluster").get<int>();
        int k = option_index.at(cell.at("option").get<std::string>());
        TrainedCell& t = m.option_models.cells.at(c)[k];
        t.model.intercept = cell.at("intercept").get<double>();
        t.model.coefficients = cell.at("coefficients").get<std::vector<double>>();
        t.meta.iterations = cell.at("iterations").get<int>();
        t.meta.initial_loss = cell.at("initial_loss").get<double>();
        t.meta.final_loss = cell.at("final_loss").get<double>();
        t.meta.constant = cell.at("constant").get<bool>();
    }

    // The co-occurrence matrix restores from its triplet file.
    CsvTable t = read_csv((fs::path(dir) / "cooccurrence.csv").string());
    std::vector<Id> universe;
    for (const auto& row : t.rows) {
        universe.push_back(row[0]);
        universe.push_back(row[1]);
    }
    CooccurrenceMatrix cm;
    cm.course_ids = universe;
    std::sort(cm.course_ids.begin(), cm.course_ids.end());
    cm.course_ids.erase(std::unique(cm.course_ids.begin(), cm.course_ids.end()),
                        cm.course_ids.end());
    for (std::size_t i = 0; i < cm.course_ids.size(); ++i)
        cm.index[cm.course_ids[i]] = static_cast<int>(i);
    cm.counts.assign(cm.course_ids.size(),
                     std::vector<std::uint32_t>(cm.course_ids.size(), 0));
    for (const auto& row : t.rows) {
        int i = cm.index.at(row[0]);
        int jx = cm.index.at(row[1]);
        auto v = static_cast<std::uint32_t>(parse_ll(row[2], "cooccurrence.count"));
        cm.counts[i][jx] = v;
        cm.counts[jx][i] = v;
    }
    m.cooccurrence = std::move(cm);
    return m;
}

}  // namespace coldpack
