#ifndef ACL_EVAL_HPP
#define ACL_EVAL_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "acl/common.hpp"
#include "acl/models.hpp"
#include "acl/rng.hpp"
#include "acl/sketch.hpp"
#include "acl/solver.hpp"

namespace acl {

// ---------------------------------------------------------------------------
// task metrics
// ---------------------------------------------------------------------------

/// Sum of squared distances from each row to its closest centroid.
inline double sse(const DiracMixture& model, const MatrixXd& X) {
    if (X.rows() == 0) throw DataError("empty dataset");
    if (X.cols() != model.dim()) throw DimensionError("dataset/model dimension mismatch");
    double total = 0.0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (int k = 0; k < model.components(); ++k)
            best = std::min(best, (X.row(i).transpose() - model.centroids.col(k)).squaredNorm());
        total += best;
    }
    return total;
}

/// Log likelihood of the dataset under a diagonal Gaussian mixture,
/// evaluated with the log-sum-exp trick.
inline double log_likelihood(const GaussianMixture& model, const MatrixXd& X) {
    if (X.rows() == 0) throw DataError("empty dataset");
    if (X.cols() != model.dim()) throw DimensionError("dataset/model dimension mismatch");
    const int K = model.components(), d = model.dim();
    VectorXd log_norm(K);  // log w_k - (1/2) log((2 pi)^d prod gamma)
    for (int k = 0; k < K; ++k) {
        const double logdet = model.variances.col(k).array().log().sum();
        log_norm[k] = std::log(std::max(model.weights[k], 1e-300)) -
                      0.5 * (d * std::log(kTwoPi) + logdet);
    }
    double total = 0.0;
    VectorXd logs(K);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        for (int k = 0; k < K; ++k) {
            const double maha = ((X.row(i).transpose() - model.means.col(k)).array().square() /
                                 model.variances.col(k).array())
                                    .sum();
            logs[k] = log_norm[k] - 0.5 * maha;
        }
        const double mx = logs.maxCoeff();
        total += mx + std::log((logs.array() - mx).exp().sum());
    }
    return total;
}

// ---------------------------------------------------------------------------
// classical baselines
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<int> kmeans_pp_seeds(const MatrixXd& X, int K, std::mt19937_64& eng) {
    const Eigen::Index n = X.rows();
    std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
    std::vector<int> chosen = {static_cast<int>(first(eng))};
    VectorXd d2 = (X.rowwise() - X.row(chosen[0])).rowwise().squaredNorm();
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    while (static_cast<int>(chosen.size()) < K) {
        const double total = d2.sum();
        int pick = 0;
        if (total > 0.0) {
            double target = uni(eng) * total, acc = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc >= target) {
                    pick = static_cast<int>(i);
                    break;
                }
            }
        } else {
            pick = static_cast<int>(first(eng));
        }
        chosen.push_back(pick);
        d2 = d2.cwiseMin((X.rowwise() - X.row(pick)).rowwise().squaredNorm());
    }
    return chosen;
}

}  // namespace detail

/// Best-of-restarts Lloyd iterations with k-means++ seeding. An emptied
/// cluster is reseeded at the point farthest from its assigned centroid.
/// Weights of the returned mixture are the cluster fractions.
inline DiracMixture kmeans_baseline(const MatrixXd& X, int K, int restarts, std::uint64_t seed,
                                    std::vector<double>* objective_trace = nullptr) {
    const Eigen::Index n = X.rows();
    const int d = static_cast<int>(X.cols());
    if (n < K) throw DataError("need at least K samples");
    DiracMixture best;
    double best_sse = std::numeric_limits<double>::infinity();
    for (int r = 0; r < std::max(1, restarts); ++r) {
        auto eng = make_engine(derive_seed(seed, r));
        const auto seeds = detail::kmeans_pp_seeds(X, K, eng);
        MatrixXd centroids(d, K);
        for (int k = 0; k < K; ++k) centroids.col(k) = X.row(seeds[k]).transpose();

        std::vector<int> assign(n, 0);
        VectorXd counts(K);
        double prev = std::numeric_limits<double>::infinity();
        for (int iter = 0; iter < 300; ++iter) {
            double obj = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                double bd = std::numeric_limits<double>::infinity();
                for (int k = 0; k < K; ++k) {
                    const double dist = (X.row(i).transpose() - centroids.col(k)).squaredNorm();
                    if (dist < bd) {
                        bd = dist;
                        assign[i] = k;
                    }
                }
                obj += bd;
            }
            if (objective_trace && r == 0) objective_trace->push_back(obj);
            MatrixXd sums = MatrixXd::Zero(d, K);
            counts.setZero();
            for (Eigen::Index i = 0; i < n; ++i) {
                sums.col(assign[i]) += X.row(i).transpose();
                counts[assign[i]] += 1.0;
            }
            for (int k = 0; k < K; ++k) {
                if (counts[k] > 0.0) {
                    centroids.col(k) = sums.col(k) / counts[k];
                } else {
                    // farthest point from its own centroid takes over
                    Eigen::Index far = 0;
                    double fd = -1.0;
                    for (Eigen::Index i = 0; i < n; ++i) {
                        const double dist =
                            (X.row(i).transpose() - centroids.col(assign[i])).squaredNorm();
                        if (dist > fd) {
                            fd = dist;
                            far = i;
                        }
                    }
                    centroids.col(k) = X.row(far).transpose();
                }
            }
            if (std::abs(prev - obj) <= 1e-9 * std::max(1.0, prev)) break;
            prev = obj;
        }

        DiracMixture mix;
        mix.centroids = centroids;
        mix.weights = counts / static_cast<double>(n);
        const double final_sse = sse(mix, X);
        if (final_sse < best_sse) {
            best_sse = final_sse;
            best = mix;
        }
    }
    return best;
}

/// Diagonal-covariance EM with k-means++ initialization and a variance
/// floor; keeps the best restart by final log likelihood.
inline GaussianMixture em_baseline(const MatrixXd& X, int K, int restarts, std::uint64_t seed,
                                   std::vector<double>* objective_trace = nullptr) {
    const Eigen::Index n = X.rows();
    const int d = static_cast<int>(X.cols());
    if (n < K) throw DataError("need at least K samples");
    const VectorXd global_var =
        (X.rowwise() - X.colwise().mean()).array().square().colwise().mean();
    const double width = (X.colwise().maxCoeff() - X.colwise().minCoeff()).maxCoeff();
    const double floor = std::max(1e-8 * width * width, 1e-12);

    GaussianMixture best;
    double best_ll = -std::numeric_limits<double>::infinity();
    for (int r = 0; r < std::max(1, restarts); ++r) {
        auto eng = make_engine(derive_seed(seed, 1000 + r));
        const auto seeds = detail::kmeans_pp_seeds(X, K, eng);
        GaussianMixture gm;
        gm.weights = VectorXd::Constant(K, 1.0 / K);
        gm.means.resize(d, K);
        for (int k = 0; k < K; ++k) gm.means.col(k) = X.row(seeds[k]).transpose();
        gm.variances = global_var.cwiseMax(floor).replicate(1, K);

        MatrixXd resp(n, K);
        double prev = -std::numeric_limits<double>::infinity();
        for (int iter = 0; iter < 300; ++iter) {
            // E step
            double ll = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) {
                double mx = -std::numeric_limits<double>::infinity();
                for (int k = 0; k < K; ++k) {
                    const double maha =
                        ((X.row(i).transpose() - gm.means.col(k)).array().square() /
                         gm.variances.col(k).array())
                            .sum();
                    const double logdet = gm.variances.col(k).array().log().sum();
                    resp(i, k) = std::log(std::max(gm.weights[k], 1e-300)) -
                                 0.5 * (d * std::log(kTwoPi) + logdet + maha);
                    mx = std::max(mx, resp(i, k));
                }
                double sum = 0.0;
                for (int k = 0; k < K; ++k) sum += std::exp(resp(i, k) - mx);
                const double log_px = mx + std::log(sum);
                ll += log_px;
                for (int k = 0; k < K; ++k) resp(i, k) = std::exp(resp(i, k) - log_px);
            }
            if (objective_trace && r == 0) objective_trace->push_back(ll);
            // M step
            for (int k = 0; k < K; ++k) {
                const double nk = resp.col(k).sum();
                if (nk < 1e-10) {
                    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
                    gm.means.col(k) = X.row(pick(eng)).transpose();
                    gm.variances.col(k) = global_var.cwiseMax(floor);
                    gm.weights[k] = 1.0 / n;
                    continue;
                }
                gm.weights[k] = nk / n;
                gm.means.col(k) = (X.transpose() * resp.col(k)) / nk;
                VectorXd var = VectorXd::Zero(d);
                for (Eigen::Index i = 0; i < n; ++i)
                    var += resp(i, k) *
                           (X.row(i).transpose() - gm.means.col(k)).array().square().matrix();
                gm.variances.col(k) = (var / nk).cwiseMax(floor);
            }
            gm.weights /= gm.weights.sum();
            if (ll - prev <= 1e-9 * std::abs(ll) && iter > 0) break;
            prev = ll;
        }
        const double final_ll = log_likelihood(gm, X);
        if (final_ll > best_ll) {
            best_ll = final_ll;
            best = gm;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// synthetic ground truth
// ---------------------------------------------------------------------------

struct GmmGenOptions {
    double sigma_base = 0.03;         // per-axis std, as a fraction of the unit box
    double sigma_jitter = 0.25;       // relative spread of per-component stds
    double weight_concentration = 10; // Dirichlet concentration (large = near uniform)
    int max_rejections = 1000;
};

/// Plants a diagonal GMM in the unit box: means drawn uniformly until every
/// pair is at least separation * (mean sigma) apart, near-uniform Dirichlet
/// weights, isotropic per-component variances, then n samples (the first K
/// samples take one component each). Deterministic given the seed.
inline std::pair<MatrixXd, GaussianMixture> generate_gmm_data(int K, int d, int n,
                                                              double separation,
                                                              std::uint64_t seed,
                                                              const GmmGenOptions& gen = {}) {
    if (n < K) throw ArgumentError("need n >= K samples");
    auto eng = make_engine(derive_seed(seed, 0xDA7A));
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    VectorXd sigma(K);
    for (int k = 0; k < K; ++k)
        sigma[k] = gen.sigma_base * (1.0 + gen.sigma_jitter * (2.0 * uni(eng) - 1.0));
    const double min_dist = separation * sigma.mean();

    MatrixXd means(d, K);
    bool ok = false;
    for (int attempt = 0; attempt < gen.max_rejections && !ok; ++attempt) {
        for (int k = 0; k < K; ++k)
            for (int l = 0; l < d; ++l) means(l, k) = uni(eng);
        ok = true;
        for (int a = 0; a < K && ok; ++a)
            for (int b = a + 1; b < K && ok; ++b)
                if ((means.col(a) - means.col(b)).norm() < min_dist) ok = false;
    }
    if (!ok)
        throw InfeasibleError("could not place " + std::to_string(K) +
                              " modes at separation " + std::to_string(min_dist));

    std::gamma_distribution<double> gamma_draw(gen.weight_concentration, 1.0);
    VectorXd w(K);
    for (int k = 0; k < K; ++k) w[k] = gamma_draw(eng);
    w /= w.sum();

    GaussianMixture truth;
    truth.weights = w;
    truth.means = means;
    truth.variances.resize(d, K);
    for (int k = 0; k < K; ++k) truth.variances.col(k).setConstant(sigma[k] * sigma[k]);

    MatrixXd X = sample_mixture(truth, n, derive_seed(seed, 0x5A3E), /*force_cover=*/true);
    return {X, truth};
}

// ---------------------------------------------------------------------------
// scoring
// ---------------------------------------------------------------------------

/// Risk of the candidate on the dataset minus the risk of the baseline:
/// excess SSE for k-means, excess negative log likelihood for GMM.
inline double empirical_excess_risk(const MixtureModel& candidate, const MixtureModel& baseline,
                                    const MatrixXd& X, TaskKind task) {
    if (task == TaskKind::KMeans)
        return sse(std::get<DiracMixture>(candidate), X) -
               sse(std::get<DiracMixture>(baseline), X);
    return log_likelihood(std::get<GaussianMixture>(baseline), X) -
           log_likelihood(std::get<GaussianMixture>(candidate), X);
}

enum class SuccessStatus { Success, Failure, NotEvaluable };

/// k-means succeeds when SSE(candidate) <= factor * SSE(baseline); GMM when
/// LL(candidate) >= LL(baseline)/factor, which requires LL(baseline) > 0.
inline SuccessStatus success(const MixtureModel& candidate, const MixtureModel& baseline,
                             const MatrixXd& X, TaskKind task, double factor = 1.2) {
    if (!(factor > 1.0)) throw ArgumentError("success factor must exceed 1");
    if (task == TaskKind::KMeans) {
        const double c = sse(std::get<DiracMixture>(candidate), X);
        const double b = sse(std::get<DiracMixture>(baseline), X);
        return c <= factor * b ? SuccessStatus::Success : SuccessStatus::Failure;
    }
    const double b = log_likelihood(std::get<GaussianMixture>(baseline), X);
    if (!(b > 0.0)) return SuccessStatus::NotEvaluable;
    const double c = log_likelihood(std::get<GaussianMixture>(candidate), X);
    return c >= b / factor ? SuccessStatus::Success : SuccessStatus::Failure;
}

// ---------------------------------------------------------------------------
// experiment harness
// ---------------------------------------------------------------------------

struct ExperimentConfig {
    TaskKind task = TaskKind::KMeans;
    int K = 10;
    int d = 5;
    std::vector<int> n_list = {10000};
    std::int64_t super_n = 0;  // > 0: draw subsets of a fixed super-dataset
    std::vector<int> m_list = {100};
    std::vector<PeriodicKind> kinds = {PeriodicKind::ComplexExponential,
                                       PeriodicKind::UniversalQuantizer,
                                       PeriodicKind::ComplexModulo};
    int trials = 10;
    std::uint64_t seed = 0;
    double success_factor = 1.2;
    double sigma2 = 0.0;  // 0: use the task preset 1/(10 d) or 1/(100 d)
    FrequencyLaw law = FrequencyLaw::FoldedGaussian;
    double separation = 8.0;
    GmmGenOptions gen;
    SolverOptions solver;
    int baseline_restarts = 10;

    double resolved_sigma2() const {
        if (sigma2 > 0.0) return sigma2;
        return task == TaskKind::KMeans ? 1.0 / (10.0 * d) : 1.0 / (100.0 * d);
    }
};

struct ExperimentRow {
    TaskKind task;
    int m = 0;
    double m_over_kd = 0.0;
    std::string kind;
    int n = 0;
    double median_excess = 0.0;
    double success_rate = 0.0;
    int trials = 0;
};

struct TrialDetail {
    int m = 0;
    std::string kind;
    int n = 0;
    int trial = 0;
    double excess = std::numeric_limits<double>::quiet_NaN();
    int success = -1;  // 1/0, -1 = not evaluable or failed
    double final_cost = std::numeric_limits<double>::quiet_NaN();
    std::string error;
};

namespace detail {

inline std::uint64_t mix_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                             std::uint64_t c, std::uint64_t tag) {
    std::uint64_t s = derive_seed(seed, tag);
    s = derive_seed(s, a + 1);
    s = derive_seed(s, b + 1);
    return derive_seed(s, c + 1);
}

inline MatrixXd subset_rows(const MatrixXd& X, int n, std::uint64_t seed) {
    // partial Fisher-Yates over the row indices: a uniform subset without
    // replacement
    const Eigen::Index total = X.rows();
    if (n > total) throw ArgumentError("subset larger than the dataset");
    std::vector<Eigen::Index> idx(total);
    std::iota(idx.begin(), idx.end(), Eigen::Index(0));
    auto eng = make_engine(seed);
    MatrixXd out(n, X.cols());
    for (int i = 0; i < n; ++i) {
        std::uniform_int_distribution<Eigen::Index> pick(i, total - 1);
        std::swap(idx[i], idx[pick(eng)]);
        out.row(i) = X.row(idx[i]);
    }
    return out;
}

template <typename Fn>
void run_jobs(int count, int jobs, Fn&& fn) {
    if (jobs <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    };
    std::vector<std::thread> pool;
    const int n_threads = std::min(jobs, count);
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace detail

/// Runs the full sweep over (m, feature kind, n, trial), one row of medians
/// per cell. Per-trial failures are recorded and skipped, never fatal.
///
/// Frequencies use the preset variance divided by the mean component
/// variance of the planted mixture, i.e. the presets are expressed in units
/// of the mode scale. Within a trial all feature kinds share Omega and xi
/// (the plain RFF runs force xi = 0), and the asymmetric sketches are
/// renormalized by 1/F_1 before learning.
inline std::vector<ExperimentRow> run_experiment(const ExperimentConfig& cfg, int jobs = 1,
                                                 std::vector<TrialDetail>* details = nullptr) {
    if (cfg.trials < 1) throw ArgumentError("need at least one trial");
    if (!(cfg.success_factor > 1.0)) throw ArgumentError("success factor must exceed 1");

    // ground truth and evaluation data
    const std::int64_t gen_n =
        cfg.super_n > 0 ? cfg.super_n
                        : *std::max_element(cfg.n_list.begin(), cfg.n_list.end());
    auto [X_super, truth] =
        generate_gmm_data(cfg.K, cfg.d, static_cast<int>(gen_n), cfg.separation, cfg.seed,
                          cfg.gen);

    const Box data_box(X_super.colwise().minCoeff().transpose(),
                       X_super.colwise().maxCoeff().transpose());
    // presets are expressed in units of the component scale: frequencies must
    // resolve structure at the size of one mode, not of the whole cloud
    const double component_var = truth.variances.mean();
    const double sigma2_eff = cfg.resolved_sigma2() / std::max(component_var, 1e-12);
    const double S_cap = cfg.task == TaskKind::GMM
                             ? std::max(4.0 * truth.variances.maxCoeff(),
                                        16.0 * variance_floor(data_box))
                             : 1.0;

    // per-n learning datasets (exp-1 style: one dataset per n, trials vary
    // the map draw; exp-2 style: one subset per trial)
    struct NData {
        int n;
        MatrixXd X;                 // exp-1 dataset (empty in subset mode)
        MixtureModel baseline;
    };
    std::vector<NData> ndata(cfg.n_list.size());
    const MatrixXd* eval_X = &X_super;
    for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
        ndata[ni].n = cfg.n_list[ni];
        if (cfg.super_n > 0) continue;  // baseline shared below
        ndata[ni].X = cfg.n_list[ni] == X_super.rows()
                          ? X_super
                          : detail::subset_rows(X_super, cfg.n_list[ni],
                                                detail::mix_key(cfg.seed, ni, 0, 0, 0xD5));
    }

    // baselines on the evaluation data
    MixtureModel shared_baseline;
    if (cfg.super_n > 0) {
        shared_baseline =
            cfg.task == TaskKind::KMeans
                ? MixtureModel(kmeans_baseline(X_super, cfg.K, cfg.baseline_restarts, cfg.seed))
                : MixtureModel(em_baseline(X_super, cfg.K, cfg.baseline_restarts, cfg.seed));
    } else {
        for (auto& nd : ndata) {
            nd.baseline =
                cfg.task == TaskKind::KMeans
                    ? MixtureModel(kmeans_baseline(nd.X, cfg.K, cfg.baseline_restarts, cfg.seed))
                    : MixtureModel(em_baseline(nd.X, cfg.K, cfg.baseline_restarts, cfg.seed));
        }
    }

    struct Job {
        std::size_t mi, ki, ni;
        int trial;
    };
    std::vector<Job> jobs_list;
    for (std::size_t mi = 0; mi < cfg.m_list.size(); ++mi)
        for (std::size_t ki = 0; ki < cfg.kinds.size(); ++ki)
            for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni)
                for (int t = 0; t < cfg.trials; ++t) jobs_list.push_back({mi, ki, ni, t});

    std::vector<TrialDetail> trial_results(jobs_list.size());

    detail::run_jobs(static_cast<int>(jobs_list.size()), jobs, [&](int ji) {
        const Job& job = jobs_list[ji];
        const int m = cfg.m_list[job.mi];
        const PeriodicKind kind = cfg.kinds[job.ki];
        const int n = cfg.n_list[job.ni];
        TrialDetail& out = trial_results[ji];
        out.m = m;
        out.kind = to_string(kind);
        out.n = n;
        out.trial = job.trial;
        try {
            FeatureMapConfig fm;
            fm.d = cfg.d;
            fm.m = m;
            fm.law = cfg.law;
            fm.sigma2 = sigma2_eff;
            fm.omega_seed = detail::mix_key(cfg.seed, job.mi, job.ni, job.trial, 0xA0);
            fm.nonlinearity = kind;
            if (kind == PeriodicKind::ComplexExponential) {
                fm.dither_seed = std::nullopt;  // symmetric runs drop the dither
                fm.renormalize = false;
            } else {
                fm.dither_seed = detail::mix_key(cfg.seed, job.mi, job.ni, job.trial, 0xB0);
                fm.renormalize = true;
            }
            const FeatureMap psi = FeatureMap::create(fm);

            const MatrixXd X_learn =
                cfg.super_n > 0
                    ? detail::subset_rows(X_super, n,
                                          detail::mix_key(cfg.seed, job.ni, job.trial, 0, 0xD5))
                    : ndata[job.ni].X;
            const Sketch z = sketch_dataset(psi, X_learn);
            const FeatureMap phi = psi.renormalize() || kind != PeriodicKind::ComplexExponential
                                       ? psi.reference()
                                       : psi;

            TaskSpec task;
            task.kind = cfg.task;
            task.K = cfg.K;
            task.box = data_box;
            task.S = S_cap;

            SolverOptions opts = cfg.solver;
            opts.trace = nullptr;
            opts.seed = detail::mix_key(cfg.seed, job.mi * 101 + job.ki, job.ni, job.trial, 0xC0);
            if (cfg.task == TaskKind::GMM && cfg.K >= 16)
                opts.variant = SolverVariant::Splitting;

            const MixtureModel model = solve_sketch(z, phi, task, opts);
            out.final_cost = std::visit([&](const auto& mm) { return cost(phi, z, mm); }, model);

            const MatrixXd& X_eval = cfg.super_n > 0 ? *eval_X : ndata[job.ni].X;
            const MixtureModel& baseline =
                cfg.super_n > 0 ? shared_baseline : ndata[job.ni].baseline;
            out.excess = empirical_excess_risk(model, baseline, X_eval, cfg.task);
            switch (success(model, baseline, X_eval, cfg.task, cfg.success_factor)) {
                case SuccessStatus::Success: out.success = 1; break;
                case SuccessStatus::Failure: out.success = 0; break;
                case SuccessStatus::NotEvaluable: out.success = -1; break;
            }
        } catch (const std::exception& e) {
            out.error = e.what();
        }
    });

    if (details) *details = trial_results;

    // aggregate one row per (m, kind, n) in declaration order
    std::vector<ExperimentRow> rows;
    for (std::size_t mi = 0; mi < cfg.m_list.size(); ++mi)
        for (std::size_t ki = 0; ki < cfg.kinds.size(); ++ki)
            for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
                std::vector<double> excesses;
                int successes = 0, evaluable = 0, attempted = 0;
                for (std::size_t ji = 0; ji < jobs_list.size(); ++ji) {
                    const Job& job = jobs_list[ji];
                    if (job.mi != mi || job.ki != ki || job.ni != ni) continue;
                    ++attempted;
                    const TrialDetail& td = trial_results[ji];
                    if (!td.error.empty()) continue;
                    if (std::isfinite(td.excess)) excesses.push_back(td.excess);
                    if (td.success >= 0) {
                        ++evaluable;
                        successes += td.success;
                    }
                }
                ExperimentRow row;
                row.task = cfg.task;
                row.m = cfg.m_list[mi];
                row.m_over_kd = static_cast<double>(cfg.m_list[mi]) / (cfg.K * cfg.d);
                row.kind = to_string(cfg.kinds[ki]);
                row.n = cfg.n_list[ni];
                row.trials = attempted;
                if (!excesses.empty()) {
                    std::sort(excesses.begin(), excesses.end());
                    const std::size_t h = excesses.size() / 2;
                    row.median_excess = excesses.size() % 2 == 1
                                            ? excesses[h]
                                            : 0.5 * (excesses[h - 1] + excesses[h]);
                } else {
                    row.median_excess = std::numeric_limits<double>::quiet_NaN();
                }
                row.success_rate =
                    evaluable > 0 ? static_cast<double>(successes) / evaluable : 0.0;
                rows.push_back(row);
            }
    return rows;
}

}  // namespace acl

#endif  // ACL_EVAL_HPP
