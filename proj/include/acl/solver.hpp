#ifndef ACL_SOLVER_HPP
#define ACL_SOLVER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "acl/common.hpp"
#include "acl/models.hpp"
#include "acl/sketch.hpp"

namespace acl {

enum class TaskKind { KMeans, GMM };

inline const char* to_string(TaskKind k) { return k == TaskKind::KMeans ? "kmeans" : "gmm"; }

/// What to learn: task type, number of components, feasible box, and (for
/// GMM) the variance cap S.
struct TaskSpec {
    TaskKind kind = TaskKind::KMeans;
    int K = 1;
    Box box;
    double S = 1.0;

    double gamma_min() const { return variance_floor(box); }

    static TaskSpec kmeans(int K, Box box) {
        TaskSpec t;
        t.kind = TaskKind::KMeans;
        t.K = K;
        t.box = std::move(box);
        return t;
    }
    static TaskSpec gmm(int K, Box box, double S) {
        TaskSpec t;
        t.kind = TaskKind::GMM;
        t.K = K;
        t.box = std::move(box);
        t.S = S;
        return t;
    }
};

enum class SolverVariant { CLOMP, CLOMPR, Splitting };

struct SolverOptions {
    int restarts = 5;             // random inits per atom search
    int inner_max_iters = 150;    // joint refinement budget inside the greedy loop
    int final_max_iters = 400;    // budget of the last global refinement
    double gradient_tolerance = 1e-9;
    double step_initial = 1.0;
    std::uint64_t seed = 0;
    SolverVariant variant = SolverVariant::CLOMPR;
    std::vector<std::pair<int, double>>* trace = nullptr;  // (stage, cost) checkpoints
};

// ---------------------------------------------------------------------------
// sketch-matching cost
// ---------------------------------------------------------------------------

namespace detail {

inline void require_learning_map(const FeatureMap& map, const Sketch& z) {
    if (map.nonlinearity().kind() != PeriodicKind::ComplexExponential)
        throw UnsupportedAnalyticSketchError("the learning phase needs the plain RFF map");
    if (z.size() != map.size())
        throw DimensionError("sketch length " + std::to_string(z.size()) +
                             " does not match map size " + std::to_string(map.size()));
}

}  // namespace detail

/// C(theta; z) = || z - A(P_theta) ||_2. The asymmetric scenario enters only
/// through z; the model sketch always uses the reference RFF map.
template <typename Model>
double cost(const FeatureMap& map, const Sketch& z, const Model& model) {
    detail::require_learning_map(map, z);
    return (z.values - sketch_model(map, model)).norm();
}

/// Gradient of the cost in the flattened parameter layout of
/// sketch_model_jacobian. Zero at an exact match, where the norm is not
/// differentiable.
template <typename Model>
VectorXd cost_gradient(const FeatureMap& map, const Sketch& z, const Model& model) {
    detail::require_learning_map(map, z);
    const VectorXcd r = z.values - sketch_model(map, model);
    const double c = r.norm();
    const MatrixXcd J = sketch_model_jacobian(map, model);
    if (c == 0.0) return VectorXd::Zero(J.cols());
    VectorXd g(J.cols());
    for (Eigen::Index p = 0; p < J.cols(); ++p) g[p] = -J.col(p).dot(r).real() / c;
    return g;
}

// ---------------------------------------------------------------------------
// internals: packed working model and projected gradient machinery
// ---------------------------------------------------------------------------

namespace detail {

// Mixture under construction: raw-coordinate atoms plus free nonnegative
// weights. Locations live in the task box, variances in [gamma_min, S].
struct WorkingModel {
    TaskKind kind;
    MatrixXd locations;  // d x K
    MatrixXd variances;  // d x K (GMM) or 0 x K
    VectorXd beta;       // free weights >= 0

    int atoms() const { return static_cast<int>(beta.size()); }
};

// Scaled packing: [beta, locations in [0,1], variances in [0,1]]. Scaling the
// box and the variance range onto the unit cube keeps one step size workable
// for all coordinates; projection is a plain clamp.
struct Packing {
    const TaskSpec* task;
    int d = 0;

    int size(int K) const {
        return task->kind == TaskKind::KMeans ? K * (1 + d) : K * (1 + 2 * d);
    }

    VectorXd pack(const WorkingModel& w) const {
        const int K = w.atoms();
        VectorXd p(size(K));
        p.head(K) = w.beta;
        const VectorXd span = (task->box.upper - task->box.lower).cwiseMax(1e-300);
        for (int k = 0; k < K; ++k)
            p.segment(K + k * d, d) =
                (w.locations.col(k) - task->box.lower).cwiseQuotient(span);
        if (task->kind == TaskKind::GMM) {
            const double gspan = std::max(task->S - task->gamma_min(), 1e-300);
            for (int k = 0; k < K; ++k)
                p.segment(K + K * d + k * d, d) =
                    (w.variances.col(k).array() - task->gamma_min()) / gspan;
        }
        return p;
    }

    WorkingModel unpack(const VectorXd& p, int K) const {
        WorkingModel w;
        w.kind = task->kind;
        w.beta = p.head(K);
        w.locations.resize(d, K);
        const VectorXd span = task->box.upper - task->box.lower;
        for (int k = 0; k < K; ++k)
            w.locations.col(k) =
                task->box.lower + p.segment(K + k * d, d).cwiseProduct(span);
        if (task->kind == TaskKind::GMM) {
            w.variances.resize(d, K);
            const double gspan = task->S - task->gamma_min();
            for (int k = 0; k < K; ++k)
                w.variances.col(k) =
                    (task->gamma_min() + p.segment(K + K * d + k * d, d).array() * gspan)
                        .matrix();
        } else {
            w.variances.resize(0, K);
        }
        return w;
    }

    void project(VectorXd& p, int K) const {
        for (int i = 0; i < K; ++i) p[i] = std::max(p[i], 0.0);
        for (Eigen::Index i = K; i < p.size(); ++i) p[i] = std::clamp(p[i], 0.0, 1.0);
    }
};

// Fused evaluation of F = ||z - sum_k beta_k a_k||^2 and its gradient in the
// scaled packing, without materializing the m x P Jacobian.
class MatchObjective {
public:
    MatchObjective(const FeatureMap& map, const TaskSpec& task, const VectorXcd& target)
        : map_(map), task_(task), target_(target) {
        packing_.task = &task_;
        packing_.d = map.dim();
    }

    const Packing& packing() const { return packing_; }

    void atom_sketch(const VectorXd& loc, const VectorXd& var, VectorXcd& out) const {
        if (task_.kind == TaskKind::KMeans) {
            const VectorXd phase = map_.omega().transpose() * loc + map_.dither();
            const double scale = 1.0 / std::sqrt(static_cast<double>(map_.size()));
            out.resize(map_.size());
            for (int j = 0; j < map_.size(); ++j) out[j] = std::polar(scale, phase[j]);
        } else {
            out = gaussian_component_sketch(map_, loc, var);
        }
    }

    VectorXcd model_sketch(const WorkingModel& w) const {
        VectorXcd acc = VectorXcd::Zero(map_.size());
        VectorXcd a;
        for (int k = 0; k < w.atoms(); ++k) {
            atom_sketch(w.locations.col(k),
                        task_.kind == TaskKind::GMM ? VectorXd(w.variances.col(k)) : VectorXd(),
                        a);
            acc += w.beta[k] * a;
        }
        return acc;
    }

    double value(const VectorXd& p, int K) const {
        const WorkingModel w = packing_.unpack(p, K);
        return (target_ - model_sketch(w)).squaredNorm();
    }

    double value_and_gradient(const VectorXd& p, int K, VectorXd& grad) const {
        const int d = packing_.d;
        const WorkingModel w = packing_.unpack(p, K);
        std::vector<VectorXcd> atom(w.atoms());
        VectorXcd model = VectorXcd::Zero(map_.size());
        for (int k = 0; k < K; ++k) {
            atom_sketch(w.locations.col(k),
                        task_.kind == TaskKind::GMM ? VectorXd(w.variances.col(k)) : VectorXd(),
                        atom[k]);
            model += w.beta[k] * atom[k];
        }
        const VectorXcd r = target_ - model;
        grad.setZero(p.size());

        const VectorXd span = task_.box.upper - task_.box.lower;
        const double gspan = task_.S - task_.gamma_min();
        VectorXcd s(map_.size());
        for (int k = 0; k < K; ++k) {
            // dF/dbeta_k = -2 Re <a_k, r>
            grad[k] = -2.0 * atom[k].dot(r).real();
            s = r.conjugate().cwiseProduct(atom[k]);
            // dF/dloc = 2 beta_k Im(Omega s), scaled by the box span
            const VectorXcd om_s = map_.omega() * s;
            for (int l = 0; l < d; ++l)
                grad[K + k * d + l] = 2.0 * w.beta[k] * om_s[l].imag() * span[l];
            if (task_.kind == TaskKind::GMM) {
                // dF/dgamma = beta_k Re(Omega^2 s), scaled by the variance span
                const VectorXcd om2_s = map_.omega_squared() * s;
                for (int l = 0; l < d; ++l)
                    grad[K + K * d + k * d + l] = w.beta[k] * om2_s[l].real() * gspan;
            }
        }
        return (target_ - model).squaredNorm();
    }

private:
    const FeatureMap& map_;
    const TaskSpec& task_;
    VectorXcd target_;
    Packing packing_;
};

// Projected gradient descent with Armijo backtracking (halving, c = 1e-4).
// Returns the reached objective value; p is updated in place and stays
// feasible. The objective never increases.
template <typename ValueGrad, typename Value, typename Project>
double projected_gradient_descent(VectorXd& p, ValueGrad&& value_grad, Value&& value,
                                  Project&& project, int max_iters, double tol,
                                  double step_init) {
    constexpr double kArmijo = 1e-4;
    VectorXd grad(p.size()), trial(p.size());
    double step = step_init;
    double f = 0.0;
    bool have_f = false;
    for (int iter = 0; iter < max_iters; ++iter) {
        f = value_grad(p, grad);
        have_f = true;
        bool accepted = false;
        int backtracks = 0;
        while (step > 1e-18) {
            trial = p - step * grad;
            project(trial);
            const double ft = value(trial);
            const double decrease = grad.dot(p - trial);
            if (decrease >= 0.0 && ft <= f - kArmijo * decrease) {
                const double move = (p - trial).norm();
                p = trial;
                f = ft;
                accepted = true;
                if (backtracks == 0) step *= 1.6;
                if (move <= tol * (1.0 + p.norm())) return f;
                break;
            }
            step *= 0.5;
            ++backtracks;
        }
        if (!accepted) break;
    }
    if (!have_f) {
        VectorXd g(p.size());
        f = value_grad(p, g);
    }
    return f;
}

// min_{beta >= 0} || z - A beta ||^2 by projected gradient with a Lipschitz
// step; cheap because the number of atoms stays small.
inline VectorXd nnls_weights(const std::vector<VectorXcd>& atoms, const VectorXcd& target,
                             const VectorXd& init) {
    const int K = static_cast<int>(atoms.size());
    MatrixXd G(K, K);
    VectorXd b(K);
    for (int i = 0; i < K; ++i) {
        b[i] = atoms[i].dot(target).real();
        for (int j = i; j < K; ++j) {
            G(i, j) = atoms[i].dot(atoms[j]).real();
            G(j, i) = G(i, j);
        }
    }
    VectorXd beta = init.size() == K ? init : VectorXd::Zero(K);
    for (int i = 0; i < K; ++i) beta[i] = std::max(beta[i], 0.0);
    const double L = 2.0 * G.norm() + 1e-12;
    const double step = 1.0 / L;
    for (int it = 0; it < 200; ++it) {
        const VectorXd grad = 2.0 * (G * beta - b);
        VectorXd next = (beta - step * grad).cwiseMax(0.0);
        const double change = (next - beta).norm();
        beta = next;
        if (change < 1e-10 * (1.0 + beta.norm())) break;
    }
    return beta;
}

// Best atom by gradient ascent on the normalized residual correlation
// Re<r, a> / ||a||, restarted from random points in the box.
inline void search_atom(const MatchObjective& obj, const TaskSpec& task, const VectorXcd& residual,
                        const FeatureMap& map, const SolverOptions& opts, std::mt19937_64& eng,
                        VectorXd& best_loc, VectorXd& best_var) {
    const int d = map.dim();
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const VectorXd span = task.box.upper - task.box.lower;
    const double width = task.box.width_inf();
    const double var_init =
        std::clamp(width * width / 64.0, task.gamma_min(), task.kind == TaskKind::GMM ? task.S
                                                                                      : 1.0);

    // ascend on the scaled coordinates [loc in [0,1]^d, (gmm) var in [0,1]^d]
    const double gmin = task.gamma_min();
    const double gspan = std::max(task.S - gmin, 1e-300);
    const int n_par = task.kind == TaskKind::GMM ? 2 * d : d;

    auto unpack = [&](const VectorXd& p, VectorXd& loc, VectorXd& var) {
        loc = task.box.lower + p.head(d).cwiseProduct(span);
        if (task.kind == TaskKind::GMM)
            var = (gmin + p.tail(d).array() * gspan).matrix();
    };

    VectorXcd a;
    VectorXd loc(d), var;
    auto neg_value = [&](const VectorXd& p) {
        unpack(p, loc, var);
        obj.atom_sketch(loc, var, a);
        const double nrm = a.norm();
        if (nrm < 1e-300) return 0.0;
        return -a.dot(residual).real() / nrm;
    };
    auto neg_value_grad = [&](const VectorXd& p, VectorXd& grad) {
        unpack(p, loc, var);
        obj.atom_sketch(loc, var, a);
        const double nrm2 = a.squaredNorm();
        const double nrm = std::sqrt(nrm2);
        grad.setZero(p.size());
        if (nrm < 1e-300) return 0.0;
        const double N = a.dot(residual).real();
        const VectorXcd s = residual.conjugate().cwiseProduct(a);
        const VectorXcd om_s = map.omega() * s;
        // dN/dloc_l = -Im(Omega s)_l; negate once more for the descent form
        for (int l = 0; l < d; ++l) grad[l] = om_s[l].imag() / nrm * span[l];
        if (task.kind == TaskKind::GMM) {
            const VectorXcd om2_s = map.omega_squared() * s;
            const VectorXd a2 = a.cwiseAbs2();
            const VectorXd dnrm2 = -(map.omega_squared() * a2);  // d||a||^2/dgamma
            for (int l = 0; l < d; ++l) {
                const double dN = -0.5 * om2_s[l].real();
                const double dD = dnrm2[l] / (2.0 * nrm);
                grad[d + l] = -((dN * nrm - N * dD) / nrm2) * gspan;
            }
        }
        return -N / nrm;
    };
    auto project = [&](VectorXd& p) {
        for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = std::clamp(p[i], 0.0, 1.0);
    };

    const int iters = std::max(40, opts.inner_max_iters / 3);
    double best = 1e300;
    VectorXd best_p;
    for (int r = 0; r < std::max(1, opts.restarts); ++r) {
        VectorXd p(n_par);
        for (int l = 0; l < d; ++l) p[l] = uni(eng);
        if (task.kind == TaskKind::GMM)
            for (int l = 0; l < d; ++l) p[d + l] = (var_init - gmin) / gspan;
        const double val = projected_gradient_descent(p, neg_value_grad, neg_value, project,
                                                      iters, 1e-10, opts.step_initial);
        if (val < best) {
            best = val;
            best_p = p;
        }
    }
    unpack(best_p, best_loc, best_var);
}

inline DiracMixture to_dirac(const WorkingModel& w) {
    DiracMixture mix;
    const double total = w.beta.sum();
    mix.weights = total > 0.0 ? VectorXd(w.beta / total)
                              : VectorXd::Constant(w.atoms(), 1.0 / w.atoms());
    mix.centroids = w.locations;
    return mix;
}

inline GaussianMixture to_gaussian(const WorkingModel& w) {
    GaussianMixture mix;
    const double total = w.beta.sum();
    mix.weights = total > 0.0 ? VectorXd(w.beta / total)
                              : VectorXd::Constant(w.atoms(), 1.0 / w.atoms());
    mix.means = w.locations;
    mix.variances = w.variances;
    return mix;
}

inline MixtureModel to_model(const WorkingModel& w) {
    if (w.kind == TaskKind::KMeans) return to_dirac(w);
    return to_gaussian(w);
}

inline double model_cost(const MatchObjective& obj, const VectorXcd& target,
                         const WorkingModel& w) {
    WorkingModel norm = w;
    const double total = norm.beta.sum();
    if (total > 0.0)
        norm.beta /= total;
    else
        norm.beta.setConstant(norm.atoms(), 1.0 / norm.atoms());
    return (target - obj.model_sketch(norm)).norm();
}

// Greedy sketch matching shared by both tasks. Keeps the best normalized
// candidate seen at any checkpoint, so the returned model never loses to an
// intermediate one.
inline WorkingModel clomp_impl(const Sketch& z, const FeatureMap& map, const TaskSpec& task,
                               const SolverOptions& opts) {
    require_learning_map(map, z);
    if (task.K < 1) throw InfeasibleError("need at least one component");
    if (task.box.dim() != map.dim())
        throw InfeasibleError("task box dimension does not match the feature map");
    if (task.box.empty()) throw InfeasibleError("task box is empty");
    if (task.kind == TaskKind::GMM && !(task.S > task.gamma_min()))
        throw InfeasibleError("variance cap S must exceed the variance floor");

    auto eng = make_engine(opts.seed);
    const VectorXcd& target = z.values;
    MatchObjective obj(map, task, target);
    const Packing& packing = obj.packing();
    const int d = map.dim();
    const int K = task.K;

    WorkingModel w;
    w.kind = task.kind;
    w.locations.resize(d, 0);
    w.variances.resize(task.kind == TaskKind::GMM ? d : 0, 0);
    w.beta.resize(0);

    WorkingModel best;
    double best_cost = 1e300;
    int stage = 0;
    auto checkpoint = [&](const WorkingModel& cand) {
        const double c = model_cost(obj, target, cand);
        if (opts.trace) opts.trace->emplace_back(stage, c);
        ++stage;
        if (c < best_cost) {
            best_cost = c;
            best = cand;
        }
    };

    auto nnls_refresh = [&](WorkingModel& m) {
        std::vector<VectorXcd> atoms(m.atoms());
        for (int k = 0; k < m.atoms(); ++k)
            obj.atom_sketch(m.locations.col(k),
                            task.kind == TaskKind::GMM ? VectorXd(m.variances.col(k))
                                                       : VectorXd(),
                            atoms[k]);
        m.beta = nnls_weights(atoms, target, m.beta);
    };

    const int passes = opts.variant == SolverVariant::CLOMP ? K : 2 * K;
    VectorXcd residual = target;
    VectorXd loc, var;
    for (int t = 0; t < passes; ++t) {
        search_atom(obj, task, residual, map, opts, eng, loc, var);
        // append the new atom with zero weight; NNLS reweighs everything
        w.locations.conservativeResize(d, w.atoms() + 1);
        w.locations.col(w.atoms()) = task.box.clamp(loc);
        if (task.kind == TaskKind::GMM) {
            w.variances.conservativeResize(d, w.beta.size() + 1);
            w.variances.col(w.beta.size()) = var;
        }
        w.beta.conservativeResize(w.beta.size() + 1);
        w.beta[w.beta.size() - 1] = 0.0;

        nnls_refresh(w);
        if (w.atoms() > K) {
            // hard threshold back to the K heaviest atoms
            std::vector<int> order(w.atoms());
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(),
                             [&](int a, int b) { return w.beta[a] > w.beta[b]; });
            order.resize(K);
            std::sort(order.begin(), order.end());
            WorkingModel trimmed;
            trimmed.kind = w.kind;
            trimmed.locations.resize(d, K);
            trimmed.variances.resize(w.variances.rows(), K);
            trimmed.beta.resize(K);
            for (int i = 0; i < K; ++i) {
                trimmed.locations.col(i) = w.locations.col(order[i]);
                if (w.variances.rows() > 0) trimmed.variances.col(i) = w.variances.col(order[i]);
                trimmed.beta[i] = w.beta[order[i]];
            }
            w = trimmed;
            nnls_refresh(w);
        }

        // joint refinement of all atoms and weights
        VectorXd p = packing.pack(w);
        const int Kc = w.atoms();
        projected_gradient_descent(
            p, [&](const VectorXd& q, VectorXd& g) { return obj.value_and_gradient(q, Kc, g); },
            [&](const VectorXd& q) { return obj.value(q, Kc); },
            [&](VectorXd& q) { packing.project(q, Kc); }, opts.inner_max_iters,
            opts.gradient_tolerance, opts.step_initial);
        w = packing.unpack(p, Kc);

        residual = target - obj.model_sketch(w);
        checkpoint(w);
    }

    // final global refinement with a larger budget
    {
        VectorXd p = packing.pack(w);
        const int Kc = w.atoms();
        projected_gradient_descent(
            p, [&](const VectorXd& q, VectorXd& g) { return obj.value_and_gradient(q, Kc, g); },
            [&](const VectorXd& q) { return obj.value(q, Kc); },
            [&](VectorXd& q) { packing.project(q, Kc); }, opts.final_max_iters,
            opts.gradient_tolerance, opts.step_initial);
        w = packing.unpack(p, Kc);
        checkpoint(w);
    }

    // output weights are normalized; return the best checkpoint
    const double total = best.beta.sum();
    if (total > 0.0)
        best.beta /= total;
    else
        best.beta.setConstant(best.atoms(), 1.0 / best.atoms());
    if (opts.trace) opts.trace->emplace_back(stage, best_cost);
    return best;
}

}  // namespace detail

/// Greedy sketch matching: repeatedly pick the atom most correlated with the
/// residual, reweigh by nonnegative least squares, and jointly refine under
/// the box (and variance) constraints. The CLOMPR variant runs 2K passes
/// with hard thresholding back to K atoms.
inline MixtureModel clomp(const Sketch& z, const FeatureMap& map, const TaskSpec& task,
                          const SolverOptions& opts = {}) {
    return detail::to_model(detail::clomp_impl(z, map, task, opts));
}

inline DiracMixture clomp_kmeans(const Sketch& z, const FeatureMap& map, const TaskSpec& task,
                                 const SolverOptions& opts = {}) {
    if (task.kind != TaskKind::KMeans) throw ArgumentError("task is not k-means");
    return detail::to_dirac(detail::clomp_impl(z, map, task, opts));
}

inline GaussianMixture clomp_gmm(const Sketch& z, const FeatureMap& map, const TaskSpec& task,
                                 const SolverOptions& opts = {}) {
    if (task.kind != TaskKind::GMM) throw ArgumentError("task is not gmm");
    return detail::to_gaussian(detail::clomp_impl(z, map, task, opts));
}

/// Fits one Gaussian to the sketch, then repeatedly splits the component with
/// the largest total variance along its widest axis (means offset by
/// +-sqrt(gamma_max), that axis variance halved) and refines globally until K
/// components are reached. Preferred over CLOMP when K is large.
inline GaussianMixture gaussian_splitting(const Sketch& z, const FeatureMap& map,
                                          const TaskSpec& task, const SolverOptions& opts = {}) {
    using namespace detail;
    if (task.kind != TaskKind::GMM) throw ArgumentError("gaussian splitting needs a gmm task");
    require_learning_map(map, z);
    if (task.K < 1) throw InfeasibleError("need at least one component");
    if (task.box.dim() != map.dim())
        throw InfeasibleError("task box dimension does not match the feature map");

    auto eng = make_engine(opts.seed);
    const VectorXcd& target = z.values;
    MatchObjective obj(map, task, target);
    const Packing& packing = obj.packing();
    const int d = map.dim();

    // single-Gaussian fit first
    WorkingModel w;
    w.kind = TaskKind::GMM;
    VectorXd loc, var;
    search_atom(obj, task, target, map, opts, eng, loc, var);
    w.locations = loc;
    w.variances = var;
    std::vector<VectorXcd> atom(1);
    obj.atom_sketch(loc, var, atom[0]);
    w.beta = nnls_weights(atom, target, VectorXd::Ones(1));

    auto refine = [&](WorkingModel& m, int iters) {
        VectorXd p = packing.pack(m);
        const int Kc = m.atoms();
        projected_gradient_descent(
            p, [&](const VectorXd& q, VectorXd& g) { return obj.value_and_gradient(q, Kc, g); },
            [&](const VectorXd& q) { return obj.value(q, Kc); },
            [&](VectorXd& q) { packing.project(q, Kc); }, iters, opts.gradient_tolerance,
            opts.step_initial);
        m = packing.unpack(p, Kc);
    };
    refine(w, opts.inner_max_iters);

    int stage = 0;
    WorkingModel best = w;
    double best_cost = model_cost(obj, target, w);
    if (opts.trace) opts.trace->emplace_back(stage++, best_cost);

    while (w.atoms() < task.K) {
        int split = 0;
        for (int k = 1; k < w.atoms(); ++k)
            if (w.variances.col(k).sum() > w.variances.col(split).sum()) split = k;
        int axis = 0;
        w.variances.col(split).maxCoeff(&axis);
        const double offset = std::sqrt(w.variances(axis, split));

        const int K_new = w.atoms() + 1;
        w.locations.conservativeResize(d, K_new);
        w.variances.conservativeResize(d, K_new);
        w.beta.conservativeResize(K_new);
        w.locations.col(K_new - 1) = w.locations.col(split);
        w.variances.col(K_new - 1) = w.variances.col(split);
        w.locations(axis, K_new - 1) += offset;
        w.locations(axis, split) -= offset;
        w.locations.col(K_new - 1) = task.box.clamp(w.locations.col(K_new - 1));
        w.locations.col(split) = task.box.clamp(w.locations.col(split));
        w.variances(axis, split) =
            std::max(0.5 * w.variances(axis, split), task.gamma_min());
        w.variances(axis, K_new - 1) = w.variances(axis, split);
        w.beta[K_new - 1] = 0.5 * w.beta[split];
        w.beta[split] *= 0.5;

        refine(w, opts.inner_max_iters);
        const double c = model_cost(obj, target, w);
        if (opts.trace) opts.trace->emplace_back(stage++, c);
        if (w.atoms() == task.K && c < best_cost) {
            best_cost = c;
            best = w;
        }
    }

    refine(w, opts.final_max_iters);
    const double c = model_cost(obj, target, w);
    if (opts.trace) opts.trace->emplace_back(stage++, c);
    if (w.atoms() != best.atoms() || c < best_cost) {
        best_cost = c;
        best = w;
    }

    const double total = best.beta.sum();
    if (total > 0.0)
        best.beta /= total;
    else
        best.beta.setConstant(best.atoms(), 1.0 / best.atoms());
    return to_gaussian(best);
}

/// Dispatch on the configured variant; Splitting falls back to CLOMPR for
/// k-means tasks, where there is nothing to split.
inline MixtureModel solve_sketch(const Sketch& z, const FeatureMap& map, const TaskSpec& task,
                                 const SolverOptions& opts = {}) {
    if (opts.variant == SolverVariant::Splitting && task.kind == TaskKind::GMM)
        return gaussian_splitting(z, map, task, opts);
    return clomp(z, map, task, opts);
}

}  // namespace acl

#endif  // ACL_SOLVER_HPP
