// Command line front end: sketching, learning, evaluation, verification and
// experiment sweeps over the asymmetric sketched-learning toolbox.
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.
// The ACL_SEED environment variable overrides the default seed of any
// subcommand whose --seed flag was left at its default.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "acl/acl.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

std::uint64_t env_default_seed() {
    if (const char* env = std::getenv("ACL_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw acl::ArgumentError("ACL_SEED is not an unsigned integer");
        }
    }
    return 0;
}

acl::VectorXd parse_vector(const std::string& csv) {
    std::vector<double> vals;
    std::istringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            vals.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw acl::ArgumentError("expected a comma-separated list of numbers, got: " + csv);
        }
    }
    if (vals.empty()) throw acl::ArgumentError("empty vector flag");
    return Eigen::Map<const acl::VectorXd>(vals.data(), vals.size());
}

void print_config(const std::string& cmd, const acl::json& j) {
    std::cout << "config " << cmd << ": " << j.dump() << std::endl;
}

std::ostream& open_or_stdout(std::ofstream& file, const std::string& path) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) throw acl::DataError("cannot write: " + path);
    return file;
}

// ---------------------------------------------------------------------------

struct SketchArgs {
    std::string data, map, out;
    bool header = false;
    int nodes = 1;
    int float_bits = 64;
};

int run_sketch(const SketchArgs& a) {
    const acl::json map_json = acl::load_json_file(a.map);
    const acl::FeatureMapConfig cfg = acl::feature_map_config_from_json(map_json);
    const acl::FeatureMap map = acl::FeatureMap::create(cfg);
    const acl::MatrixXd X = acl::load_matrix_csv(a.data, a.header);

    acl::json conf;
    conf["data"] = a.data;
    conf["header"] = a.header;
    conf["map"] = acl::to_json(cfg);
    conf["out"] = a.out;
    conf["nodes"] = a.nodes;
    conf["float_bits"] = a.float_bits;
    print_config("sketch", conf);

    const auto sim = acl::simulate_nodes(map, X, a.nodes, a.float_bits);
    acl::write_json_file(a.out, acl::to_json(sim.sketch, cfg));
    std::cout << "sketched " << X.rows() << " samples into m=" << map.size() << " (nodes "
              << a.nodes << ", total contribution bits " << sim.total_bits << ")" << std::endl;
    return kExitOk;
}

struct LearnArgs {
    std::string sketch, out, task = "kmeans", lower, upper, variant = "clompr", trace;
    int K = 1;
    double S = 0.0;
    bool renormalize = false;
    std::uint64_t seed = 0;
    int restarts = 5, inner_iters = 150, final_iters = 400;
};

int run_learn(const LearnArgs& a) {
    auto [z, psi] = acl::sketch_from_json(acl::load_json_file(a.sketch));
    if (a.renormalize) {
        if (psi.renormalize())
            throw acl::ArgumentError("sketch is already renormalized; drop --renormalize");
        const acl::cdouble f1 = psi.nonlinearity().fourier_coefficient(1);
        if (std::abs(f1) < 1e-12)
            throw acl::DegenerateFunctionError("cannot renormalize: F_1 = 0");
        z.values *= 1.0 / f1;
    }
    const acl::FeatureMap phi = psi.reference();
    z.map_hash = phi.hash();  // learning always happens against the reference map

    if (a.lower.empty() || a.upper.empty())
        throw acl::ArgumentError("--lower and --upper are required");
    const acl::Box box(parse_vector(a.lower), parse_vector(a.upper));

    acl::TaskSpec task;
    task.kind = acl::task_kind_from_string(a.task);
    task.K = a.K;
    task.box = box;
    if (task.kind == acl::TaskKind::GMM) {
        if (!(a.S > 0.0)) throw acl::ArgumentError("gmm tasks need --S > 0");
        task.S = a.S;
    }

    acl::SolverOptions opts;
    opts.seed = a.seed;
    opts.restarts = a.restarts;
    opts.inner_max_iters = a.inner_iters;
    opts.final_max_iters = a.final_iters;
    if (a.variant == "clomp")
        opts.variant = acl::SolverVariant::CLOMP;
    else if (a.variant == "clompr")
        opts.variant = acl::SolverVariant::CLOMPR;
    else if (a.variant == "splitting")
        opts.variant = acl::SolverVariant::Splitting;
    else
        throw acl::ArgumentError("unknown variant: " + a.variant);

    acl::json conf;
    conf["sketch"] = a.sketch;
    conf["task"] = a.task;
    conf["K"] = a.K;
    conf["box"] = acl::to_json(box);
    conf["S"] = task.S;
    conf["renormalize"] = a.renormalize;
    conf["seed"] = a.seed;
    conf["restarts"] = a.restarts;
    conf["inner_iters"] = a.inner_iters;
    conf["final_iters"] = a.final_iters;
    conf["variant"] = a.variant;
    conf["out"] = a.out;
    print_config("learn", conf);

    std::vector<std::pair<int, double>> trace;
    if (!a.trace.empty()) opts.trace = &trace;

    const acl::MixtureModel model = acl::solve_sketch(z, phi, task, opts);
    const double final_cost =
        std::visit([&](const auto& mm) { return acl::cost(phi, z, mm); }, model);
    if (!std::isfinite(final_cost)) throw acl::Error("non-finite final cost");

    acl::write_json_file(a.out, acl::to_json(model, box, task.S));
    if (!a.trace.empty()) {
        std::ofstream tr(a.trace);
        if (!tr) throw acl::DataError("cannot write: " + a.trace);
        tr << "stage,cost\n";
        for (const auto& [stage, c] : trace) tr << stage << ',' << c << '\n';
    }
    std::cout << "final cost " << final_cost << ", model written to " << a.out << std::endl;
    return kExitOk;
}

struct EvalArgs {
    std::string model, data, out;
    bool header = false;
    int baseline_restarts = 10;
    double factor = 1.2;
    std::uint64_t seed = 0;
};

int run_eval(const EvalArgs& a) {
    auto [model, box] = acl::model_from_json(acl::load_json_file(a.model));
    const acl::MatrixXd X = acl::load_matrix_csv(a.data, a.header);

    acl::json conf;
    conf["model"] = a.model;
    conf["data"] = a.data;
    conf["header"] = a.header;
    conf["baseline_restarts"] = a.baseline_restarts;
    conf["success_factor"] = a.factor;
    conf["seed"] = a.seed;
    print_config("eval", conf);

    const bool kmeans = std::holds_alternative<acl::DiracMixture>(model);
    const acl::TaskKind task = kmeans ? acl::TaskKind::KMeans : acl::TaskKind::GMM;
    const int K = kmeans ? std::get<acl::DiracMixture>(model).components()
                         : std::get<acl::GaussianMixture>(model).components();
    const acl::MixtureModel baseline =
        kmeans ? acl::MixtureModel(acl::kmeans_baseline(X, K, a.baseline_restarts, a.seed))
               : acl::MixtureModel(acl::em_baseline(X, K, a.baseline_restarts, a.seed));

    const double metric = kmeans ? acl::sse(std::get<acl::DiracMixture>(model), X)
                                 : acl::log_likelihood(std::get<acl::GaussianMixture>(model), X);
    const double base_metric =
        kmeans ? acl::sse(std::get<acl::DiracMixture>(baseline), X)
               : acl::log_likelihood(std::get<acl::GaussianMixture>(baseline), X);
    const double excess = acl::empirical_excess_risk(model, baseline, X, task);
    const acl::SuccessStatus status = acl::success(model, baseline, X, task, a.factor);
    const char* status_name = status == acl::SuccessStatus::Success ? "success"
                              : status == acl::SuccessStatus::Failure ? "failure"
                                                                      : "not_evaluable";

    std::ofstream file;
    std::ostream& out = open_or_stdout(file, a.out);
    out << "task,metric,baseline_metric,excess_risk,status\n";
    out.precision(12);
    out << acl::to_string(task) << ',' << metric << ',' << base_metric << ',' << excess << ','
        << status_name << '\n';
    return kExitOk;
}

struct VerifyArgs {
    std::vector<std::string> suites = {"all"};
    std::string out;
    std::string m_list = "64,256,1024";
    int seeds = 5, pairs = 128, instances = 20, grid = 100, dithers = 2000, models = 10;
    std::uint64_t seed = 0;
};

int run_verify(const VerifyArgs& a) {
    auto wants = [&](const std::string& s) {
        for (const auto& suite : a.suites)
            if (suite == "all" || suite == s) return true;
        return false;
    };

    acl::json conf;
    conf["suites"] = a.suites;
    conf["m_list"] = a.m_list;
    conf["seeds"] = a.seeds;
    conf["pairs"] = a.pairs;
    conf["instances"] = a.instances;
    conf["grid"] = a.grid;
    conf["dithers"] = a.dithers;
    conf["models"] = a.models;
    conf["seed"] = a.seed;
    conf["out"] = a.out;
    print_config("verify", conf);

    std::ofstream file;
    std::ostream& out = open_or_stdout(file, a.out);
    out << "suite,name,value,expected,tolerance,pass\n";
    out.precision(12);
    auto emit = [&](const acl::CheckRow& r) {
        out << r.suite << ',' << r.name << ',' << r.value << ',' << r.expected << ','
            << r.tolerance << ',' << (r.pass ? 1 : 0) << '\n';
    };

    bool all_pass = true;
    if (wants("constants")) {
        for (const auto& r : acl::verify_constants()) {
            emit(r);
            all_pass &= r.pass;
        }
    }
    if (wants("slpd")) {
        std::vector<int> ms;
        {
            std::istringstream ss(a.m_list);
            std::string tok;
            while (std::getline(ss, tok, ',')) ms.push_back(std::stoi(tok));
        }
        const auto rows = acl::verify_slpd(ms, a.seeds, a.pairs, 2, a.seed);
        for (const auto& r : rows) {
            acl::CheckRow c{"slpd",
                            "m=" + std::to_string(r.m) + ";kind=" + r.kind +
                                ";seed=" + std::to_string(r.seed),
                            r.eps_hat, 0.0, 0.0, true};
            emit(c);
        }
    }
    if (wants("suboptimality")) {
        const auto rows = acl::verify_suboptimality(a.instances, a.grid, 256, 2, 64, a.seed);
        for (const auto& r : rows) {
            acl::CheckRow c{"suboptimality", "instance_" + std::to_string(r.instance), r.lhs,
                            r.rhs, 0.0, r.holds};
            emit(c);
            all_pass &= r.holds;
        }
    }
    if (wants("dither")) {
        const auto res = acl::verify_dither_expectation(a.models, a.dithers, 64, 2, 64, a.seed);
        acl::CheckRow c{"dither", "max_pair_z", res.max_pair_z, 0.0, 3.0, res.pass};
        emit(c);
        acl::CheckRow info{"dither", "unsquared_spread_reported", res.unsquared_spread, 0.0, 0.0,
                           true};
        emit(info);
        all_pass &= res.pass;
    }
    if (wants("smoothness")) {
        for (const auto& r : acl::verify_smoothness(1.0, 200000, 10, 3, a.seed)) {
            emit(r);
            all_pass &= r.pass;
        }
    }
    if (!all_pass) throw acl::Error("verification checks failed");
    return kExitOk;
}

struct ExperimentArgs {
    std::string config, out, detail;
    int jobs = 1;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

int run_experiment_cmd(const ExperimentArgs& a) {
    const acl::json cfg_json = acl::load_json_file(a.config);
    acl::ExperimentConfig cfg = acl::experiment_config_from_json(cfg_json);
    if (a.seed_set) cfg.seed = a.seed;

    acl::json conf;
    conf["config_file"] = a.config;
    conf["resolved"] = cfg_json;
    conf["seed"] = cfg.seed;
    conf["sigma2_preset"] = cfg.resolved_sigma2();
    conf["jobs"] = a.jobs;
    conf["out"] = a.out;
    print_config("experiment", conf);

    std::vector<acl::TrialDetail> details;
    const auto rows = acl::run_experiment(cfg, a.jobs, &details);

    std::ofstream file;
    std::ostream& out = open_or_stdout(file, a.out);
    acl::write_experiment_csv(out, rows);
    if (!a.detail.empty()) {
        std::ofstream det(a.detail);
        if (!det) throw acl::DataError("cannot write: " + a.detail);
        acl::write_trial_details_csv(det, details);
    }
    for (const auto& td : details)
        if (!td.error.empty())
            std::cerr << "trial failed (m=" << td.m << ", kind=" << td.kind << ", n=" << td.n
                      << ", trial=" << td.trial << "): " << td.error << std::endl;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sketched learning with symmetric, quantized or modulo feature maps"};
    app.require_subcommand(1);

    std::uint64_t seed_default = 0;
    try {
        seed_default = env_default_seed();
    } catch (const acl::ArgumentError& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kExitUsage;
    }

    SketchArgs sk;
    auto* sketch_cmd = app.add_subcommand("sketch", "average a feature map over a CSV dataset");
    sketch_cmd->add_option("--data", sk.data, "input CSV, one sample per row")->required();
    sketch_cmd->add_flag("--header", sk.header, "skip the first CSV row");
    sketch_cmd->add_option("--map", sk.map, "feature map config JSON")->required();
    sketch_cmd->add_option("--out", sk.out, "output sketch JSON")->required();
    sketch_cmd->add_option("--nodes", sk.nodes, "simulated aggregation nodes")->default_val(1);
    sketch_cmd->add_option("--float-bits", sk.float_bits, "bits per float on the wire")
        ->default_val(64);

    LearnArgs le;
    le.seed = seed_default;
    auto* learn_cmd = app.add_subcommand("learn", "fit a mixture model to a sketch");
    learn_cmd->add_option("--sketch", le.sketch, "input sketch JSON")->required();
    learn_cmd->add_option("--out", le.out, "output model JSON")->required();
    learn_cmd->add_option("--task", le.task, "kmeans or gmm")->default_val("kmeans");
    learn_cmd->add_option("-K,--K", le.K, "number of components")->required();
    learn_cmd->add_option("--lower", le.lower, "box lower bounds, comma separated")->required();
    learn_cmd->add_option("--upper", le.upper, "box upper bounds, comma separated")->required();
    learn_cmd->add_option("--S", le.S, "variance cap for gmm");
    learn_cmd->add_flag("--renormalize", le.renormalize, "divide the sketch by F_1 first");
    learn_cmd->add_option("--seed", le.seed, "solver seed")->default_val(seed_default);
    learn_cmd->add_option("--restarts", le.restarts, "atom search restarts")->default_val(5);
    learn_cmd->add_option("--inner-iters", le.inner_iters)->default_val(150);
    learn_cmd->add_option("--final-iters", le.final_iters)->default_val(400);
    learn_cmd->add_option("--variant", le.variant, "clomp, clompr or splitting")
        ->default_val("clompr");
    learn_cmd->add_option("--trace", le.trace, "write a stage,cost CSV");

    EvalArgs ev;
    ev.seed = seed_default;
    auto* eval_cmd = app.add_subcommand("eval", "score a model against a dataset baseline");
    eval_cmd->add_option("--model", ev.model, "model JSON")->required();
    eval_cmd->add_option("--data", ev.data, "dataset CSV")->required();
    eval_cmd->add_flag("--header", ev.header, "skip the first CSV row");
    eval_cmd->add_option("--out", ev.out, "output CSV (default stdout)");
    eval_cmd->add_option("--baseline-restarts", ev.baseline_restarts)->default_val(10);
    eval_cmd->add_option("--factor", ev.factor, "success factor")->default_val(1.2);
    eval_cmd->add_option("--seed", ev.seed, "baseline seed")->default_val(seed_default);

    VerifyArgs ve;
    ve.seed = seed_default;
    auto* verify_cmd = app.add_subcommand("verify", "run the numerical verification suites");
    verify_cmd
        ->add_option("--suite", ve.suites,
                     "constants, slpd, suboptimality, dither, smoothness or all")
        ->default_val(std::vector<std::string>{"all"});
    verify_cmd->add_option("--out", ve.out, "output CSV (default stdout)");
    verify_cmd->add_option("--m-list", ve.m_list)->default_val("64,256,1024");
    verify_cmd->add_option("--seeds", ve.seeds)->default_val(5);
    verify_cmd->add_option("--pairs", ve.pairs)->default_val(128);
    verify_cmd->add_option("--instances", ve.instances)->default_val(20);
    verify_cmd->add_option("--grid", ve.grid)->default_val(100);
    verify_cmd->add_option("--dithers", ve.dithers)->default_val(2000);
    verify_cmd->add_option("--models", ve.models)->default_val(10);
    verify_cmd->add_option("--seed", ve.seed)->default_val(seed_default);

    ExperimentArgs ex;
    ex.seed = seed_default;
    auto* exp_cmd = app.add_subcommand("experiment", "run a sweep from a JSON config");
    exp_cmd->add_option("--config", ex.config, "experiment config JSON")->required();
    exp_cmd->add_option("--out", ex.out, "results CSV (default stdout)");
    exp_cmd->add_option("--detail", ex.detail, "per-trial CSV");
    exp_cmd->add_option("--jobs", ex.jobs, "trial-level parallelism")->default_val(1);
    auto* seed_opt = exp_cmd->add_option("--seed", ex.seed, "override the config seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (sketch_cmd->parsed()) return run_sketch(sk);
        if (learn_cmd->parsed()) return run_learn(le);
        if (eval_cmd->parsed()) return run_eval(ev);
        if (verify_cmd->parsed()) return run_verify(ve);
        if (exp_cmd->parsed()) {
            ex.seed_set = seed_opt->count() > 0;
            if (!ex.seed_set && std::getenv("ACL_SEED")) {
                ex.seed_set = true;
                ex.seed = seed_default;
            }
            return run_experiment_cmd(ex);
        }
    } catch (const acl::ArgumentError& e) {
        std::cerr << "usage error: " << e.what() << std::endl;
        return kExitUsage;
    } catch (const acl::DataError& e) {
        std::cerr << "data error: " << e.what() << std::endl;
        return kExitData;
    } catch (const acl::DimensionError& e) {
        std::cerr << "data error: " << e.what() << std::endl;
        return kExitData;
    } catch (const acl::IncompatibleSketchError& e) {
        std::cerr << "data error: " << e.what() << std::endl;
        return kExitData;
    } catch (const acl::Error& e) {
        std::cerr << "numerical error: " << e.what() << std::endl;
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kExitNumerical;
    }
    return kExitUsage;
}
