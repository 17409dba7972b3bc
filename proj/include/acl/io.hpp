#ifndef ACL_IO_HPP
#define ACL_IO_HPP

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "acl/common.hpp"
#include "acl/eval.hpp"
#include "acl/features.hpp"
#include "acl/models.hpp"
#include "acl/sketch.hpp"
#include "acl/solver.hpp"

namespace acl {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// enum names
// ---------------------------------------------------------------------------

inline PeriodicKind periodic_kind_from_string(const std::string& s) {
    if (s == "rff") return PeriodicKind::ComplexExponential;
    if (s == "quantized") return PeriodicKind::UniversalQuantizer;
    if (s == "modulo") return PeriodicKind::ComplexModulo;
    if (s == "tabulated") return PeriodicKind::TabulatedCustom;
    throw DataError("unknown nonlinearity: " + s);
}

inline FrequencyLaw frequency_law_from_string(const std::string& s) {
    if (s == "gaussian") return FrequencyLaw::Gaussian;
    if (s == "folded_gaussian") return FrequencyLaw::FoldedGaussian;
    throw DataError("unknown frequency law: " + s);
}

inline TaskKind task_kind_from_string(const std::string& s) {
    if (s == "kmeans") return TaskKind::KMeans;
    if (s == "gmm") return TaskKind::GMM;
    throw DataError("unknown task: " + s);
}

// ---------------------------------------------------------------------------
// feature maps and sketches
// ---------------------------------------------------------------------------

inline json to_json(const FeatureMapConfig& cfg) {
    json j;
    j["d"] = cfg.d;
    j["m"] = cfg.m;
    j["law"] = to_string(cfg.law);
    j["sigma2"] = cfg.sigma2;
    j["omega_seed"] = cfg.omega_seed;
    if (cfg.dither_seed)
        j["dither_seed"] = *cfg.dither_seed;
    else
        j["dither_seed"] = nullptr;
    j["nonlinearity"] = to_string(cfg.nonlinearity);
    j["renormalize"] = cfg.renormalize;
    return j;
}

inline FeatureMapConfig feature_map_config_from_json(const json& j) {
    FeatureMapConfig cfg;
    try {
        cfg.d = j.at("d").get<int>();
        cfg.m = j.at("m").get<int>();
        cfg.law = frequency_law_from_string(j.at("law").get<std::string>());
        cfg.sigma2 = j.at("sigma2").get<double>();
        cfg.omega_seed = j.at("omega_seed").get<std::uint64_t>();
        if (j.contains("dither_seed") && !j.at("dither_seed").is_null())
            cfg.dither_seed = j.at("dither_seed").get<std::uint64_t>();
        cfg.nonlinearity = periodic_kind_from_string(j.at("nonlinearity").get<std::string>());
        cfg.renormalize = j.value("renormalize", false);
    } catch (const json::exception& e) {
        throw DataError(std::string("bad feature map config: ") + e.what());
    }
    if (cfg.nonlinearity == PeriodicKind::TabulatedCustom)
        throw DataError("tabulated nonlinearities are not serializable in map configs");
    return cfg;
}

inline json to_json(const Sketch& s, const FeatureMapConfig& map_cfg) {
    json values = json::array();
    for (int j = 0; j < s.size(); ++j)
        values.push_back({s.values[j].real(), s.values[j].imag()});
    json out;
    out["m"] = s.size();
    out["count"] = s.count;
    out["map"] = to_json(map_cfg);
    out["values"] = std::move(values);
    return out;
}

/// Loads a sketch and rebuilds its feature map from the embedded config.
inline std::pair<Sketch, FeatureMap> sketch_from_json(const json& j) {
    try {
        const FeatureMapConfig cfg = feature_map_config_from_json(j.at("map"));
        FeatureMap map = FeatureMap::create(cfg);
        Sketch s;
        s.count = j.at("count").get<std::int64_t>();
        const auto& values = j.at("values");
        if (static_cast<int>(values.size()) != j.at("m").get<int>() ||
            cfg.m != static_cast<int>(values.size()))
            throw DataError("sketch length disagrees with its map");
        s.values.resize(values.size());
        for (std::size_t i = 0; i < values.size(); ++i)
            s.values[static_cast<Eigen::Index>(i)] =
                cdouble(values[i].at(0).get<double>(), values[i].at(1).get<double>());
        s.map_hash = map.hash();
        return {std::move(s), std::move(map)};
    } catch (const json::exception& e) {
        throw DataError(std::string("bad sketch file: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// models
// ---------------------------------------------------------------------------

inline json to_json(const Box& box) {
    json j;
    j["l"] = std::vector<double>(box.lower.data(), box.lower.data() + box.lower.size());
    j["u"] = std::vector<double>(box.upper.data(), box.upper.data() + box.upper.size());
    return j;
}

inline Box box_from_json(const json& j) {
    const auto l = j.at("l").get<std::vector<double>>();
    const auto u = j.at("u").get<std::vector<double>>();
    return Box(Eigen::Map<const VectorXd>(l.data(), l.size()),
               Eigen::Map<const VectorXd>(u.data(), u.size()));
}

namespace detail {

inline json matrix_columns_to_json(const MatrixXd& mat) {
    json cols = json::array();
    for (Eigen::Index k = 0; k < mat.cols(); ++k)
        cols.push_back(std::vector<double>(mat.col(k).data(), mat.col(k).data() + mat.rows()));
    return cols;
}

inline MatrixXd matrix_columns_from_json(const json& j, int d) {
    MatrixXd mat(d, static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) {
        const auto col = j[k].get<std::vector<double>>();
        if (static_cast<int>(col.size()) != d) throw DataError("ragged column in model file");
        mat.col(static_cast<Eigen::Index>(k)) =
            Eigen::Map<const VectorXd>(col.data(), col.size());
    }
    return mat;
}

}  // namespace detail

inline json to_json(const MixtureModel& model, const Box& box, double S = 0.0) {
    json j;
    if (std::holds_alternative<DiracMixture>(model)) {
        const auto& mix = std::get<DiracMixture>(model);
        j["task"] = "kmeans";
        j["K"] = mix.components();
        j["d"] = mix.dim();
        j["weights"] =
            std::vector<double>(mix.weights.data(), mix.weights.data() + mix.weights.size());
        j["centroids"] = detail::matrix_columns_to_json(mix.centroids);
    } else {
        const auto& mix = std::get<GaussianMixture>(model);
        j["task"] = "gmm";
        j["K"] = mix.components();
        j["d"] = mix.dim();
        j["weights"] =
            std::vector<double>(mix.weights.data(), mix.weights.data() + mix.weights.size());
        j["means"] = detail::matrix_columns_to_json(mix.means);
        j["variances"] = detail::matrix_columns_to_json(mix.variances);
        j["S"] = S;
    }
    j["box"] = to_json(box);
    return j;
}

inline std::pair<MixtureModel, Box> model_from_json(const json& j) {
    try {
        const int d = j.at("d").get<int>();
        const Box box = box_from_json(j.at("box"));
        const auto w = j.at("weights").get<std::vector<double>>();
        if (j.at("task") == "kmeans") {
            DiracMixture mix;
            mix.weights = Eigen::Map<const VectorXd>(w.data(), w.size());
            mix.centroids = detail::matrix_columns_from_json(j.at("centroids"), d);
            return {mix, box};
        }
        GaussianMixture mix;
        mix.weights = Eigen::Map<const VectorXd>(w.data(), w.size());
        mix.means = detail::matrix_columns_from_json(j.at("means"), d);
        mix.variances = detail::matrix_columns_from_json(j.at("variances"), d);
        return {mix, box};
    } catch (const json::exception& e) {
        throw DataError(std::string("bad model file: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// experiment configs
// ---------------------------------------------------------------------------

inline ExperimentConfig experiment_config_from_json(const json& j) {
    ExperimentConfig cfg;
    try {
        cfg.task = task_kind_from_string(j.value("task", "kmeans"));
        cfg.K = j.value("K", cfg.K);
        cfg.d = j.value("d", cfg.d);
        if (j.contains("n_list"))
            cfg.n_list = j.at("n_list").get<std::vector<int>>();
        else if (j.contains("n"))
            cfg.n_list = {j.at("n").get<int>()};
        cfg.super_n = j.value("super_n", cfg.super_n);
        if (j.contains("m_list")) cfg.m_list = j.at("m_list").get<std::vector<int>>();
        if (j.contains("kinds")) {
            cfg.kinds.clear();
            for (const auto& k : j.at("kinds"))
                cfg.kinds.push_back(periodic_kind_from_string(k.get<std::string>()));
        }
        cfg.trials = j.value("trials", cfg.trials);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.success_factor = j.value("success_factor", cfg.success_factor);
        if (j.contains("sigma2")) {
            if (j.at("sigma2").is_string()) {
                const std::string preset = j.at("sigma2").get<std::string>();
                if (preset == "kmeans")
                    cfg.sigma2 = 1.0 / (10.0 * cfg.d);
                else if (preset == "gmm")
                    cfg.sigma2 = 1.0 / (100.0 * cfg.d);
                else
                    throw DataError("unknown sigma2 preset: " + preset);
            } else {
                cfg.sigma2 = j.at("sigma2").get<double>();
            }
        }
        if (j.contains("law")) cfg.law = frequency_law_from_string(j.at("law").get<std::string>());
        cfg.separation = j.value("separation", cfg.separation);
        cfg.gen.sigma_base = j.value("sigma_base", cfg.gen.sigma_base);
        cfg.trials = std::max(cfg.trials, 1);
        cfg.baseline_restarts = j.value("baseline_restarts", cfg.baseline_restarts);
        cfg.solver.restarts = j.value("solver_restarts", cfg.solver.restarts);
        cfg.solver.inner_max_iters = j.value("solver_inner_iters", cfg.solver.inner_max_iters);
        cfg.solver.final_max_iters = j.value("solver_final_iters", cfg.solver.final_max_iters);
        if (j.contains("solver_variant")) {
            const std::string v = j.at("solver_variant").get<std::string>();
            if (v == "clomp")
                cfg.solver.variant = SolverVariant::CLOMP;
            else if (v == "clompr")
                cfg.solver.variant = SolverVariant::CLOMPR;
            else if (v == "splitting")
                cfg.solver.variant = SolverVariant::Splitting;
            else
                throw DataError("unknown solver variant: " + v);
        }
    } catch (const json::exception& e) {
        throw DataError(std::string("bad experiment config: ") + e.what());
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

/// Numeric CSV with one row per sample; set has_header to skip a label row.
inline MatrixXd load_matrix_csv(const std::string& path, bool has_header = false) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first && has_header) {
            first = false;
            continue;
        }
        first = false;
        std::vector<double> row;
        std::istringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            try {
                row.push_back(std::stod(tok));
            } catch (const std::exception&) {
                throw DataError("non-numeric CSV value '" + tok + "' in " + path);
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw DataError("ragged CSV rows in " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError("empty CSV: " + path);
    MatrixXd X(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return X;
}

inline void write_experiment_csv(std::ostream& out, const std::vector<ExperimentRow>& rows) {
    out << "task,m,m_over_Kd,kind,n,median_excess,success_rate,trials\n";
    out.precision(12);
    for (const auto& r : rows)
        out << to_string(r.task) << ',' << r.m << ',' << r.m_over_kd << ',' << r.kind << ','
            << r.n << ',' << r.median_excess << ',' << r.success_rate << ',' << r.trials
            << '\n';
}

inline void write_trial_details_csv(std::ostream& out, const std::vector<TrialDetail>& details) {
    out << "m,kind,n,trial,excess,success,final_cost,error\n";
    out.precision(12);
    for (const auto& t : details)
        out << t.m << ',' << t.kind << ',' << t.n << ',' << t.trial << ',' << t.excess << ','
            << t.success << ',' << t.final_cost << ',' << t.error << '\n';
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open: " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DataError("cannot parse " + path + ": " + e.what());
    }
}

inline void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write: " + path);
    out << j.dump(2) << '\n';
}

}  // namespace acl

#endif  // ACL_IO_HPP
