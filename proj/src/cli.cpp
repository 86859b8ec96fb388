#include "scenopt/cli.hpp"

#include "scenopt/bounds.hpp"
#include "scenopt/cuboid.hpp"
#include "scenopt/discard.hpp"
#include "scenopt/errors.hpp"
#include "scenopt/parallel.hpp"
#include "scenopt/probkernel.hpp"
#include "scenopt/scenario.hpp"
#include "scenopt/spec_io.hpp"
#include "scenopt/validate.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace scenopt::cli {

namespace {

using io::Json;

struct Infeasible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    SCENOPT_REQUIRE(f.good(), ConfigError, "cannot write '" + path + "'");
    f << text;
}

// Records what produced an output; only the manifest carries the wall clock,
// so result files stay byte-identical across runs.
struct Manifest {
    std::string path;
    Json doc;

    void begin(const std::string& command, const std::vector<std::string>& args) {
        doc = {{"command", command}, {"arguments", args}, {"version", kVersion}, {"parameters", Json::object()},
               {"outputs", Json::array()}};
    }
    void param(const std::string& key, Json value) { doc["parameters"][key] = std::move(value); }
    void output(const std::string& p) { doc["outputs"].push_back(p); }
    void finish() {
        if (path.empty()) return;
        doc["wall_clock"] = utc_now();
        write_file(path, doc.dump(2) + "\n");
    }
};

std::vector<std::uint64_t> discard_counts(const io::SpecFile& spec, const std::vector<std::uint64_t>& flag) {
    const std::size_t n = spec.program.stages.size();
    if (flag.empty()) return spec.discard;
    if (flag.size() == 1) return std::vector<std::uint64_t>(n, flag.front());
    SCENOPT_REQUIRE(flag.size() == n, ConfigError, "--R needs one value per stage (or a single value)");
    return flag;
}

bounds::PlanRequest plan_request(const io::SpecFile& spec, std::optional<double> theta,
                                 const std::optional<std::string>& policy, const std::vector<std::uint64_t>& R) {
    bounds::PlanRequest req;
    req.theta_total = theta.value_or(spec.theta_total.value_or(1e-6));
    req.policy = policy ? bounds::parse_policy(*policy) : spec.policy.value_or(bounds::Policy::implicit);
    req.discard = discard_counts(spec, R);
    return req;
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out, Manifest& manifest) {
    if (out_path.empty()) {
        out << text;
    } else {
        write_file(out_path, text);
        manifest.output(out_path);
    }
}

std::string csv_with_manifest(const std::string& csv, const Manifest& manifest) {
    return manifest.path.empty() ? csv : "# manifest: " + manifest.path + "\n" + csv;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multi-stage scenario optimization: sample sizes, solving, discarding, validation"};
    app.name("scenopt");
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::optional<std::size_t> threads_flag;
    Manifest manifest;
    app.add_option("--threads", threads_flag, "Worker threads (default: SCENARIO_OPT_THREADS or 1)")
        ->check(CLI::PositiveNumber);
    app.add_option("--manifest", manifest.path, "Write a run manifest (JSON) to this path");
    app.fallthrough();

    // samplesize
    auto* ss = app.add_subcommand("samplesize", "Sample size for one stage");
    int zeta = 0;
    double ss_eps = 0.0, ss_theta = 0.0;
    std::uint64_t ss_R = 0;
    std::string ss_method = "implicit";
    ss->add_option("--zeta", zeta, "Support-rank bound")->required()->check(CLI::PositiveNumber);
    ss->add_option("--eps", ss_eps, "Violation level in (0,1)")->required()->check(CLI::Range(0.0, 1.0));
    ss->add_option("--theta", ss_theta, "Confidence parameter in (0,1)")->required()->check(CLI::Range(0.0, 1.0));
    ss->add_option("--discard", ss_R, "Number of samples to discard");
    ss->add_option("--method", ss_method, "implicit | chernoff | refined")
        ->check(CLI::IsMember({"implicit", "chernoff", "refined"}));

    // plan
    auto* pl = app.add_subcommand("plan", "Per-stage sample sizes for a program spec");
    std::string spec_path;
    std::optional<double> theta_flag;
    std::optional<std::string> policy_flag;
    std::vector<std::uint64_t> R_flag;
    pl->add_option("--spec", spec_path, "Program spec (JSON)")->required();
    pl->add_option("--theta", theta_flag, "Total confidence parameter");
    pl->add_option("--policy", policy_flag, "implicit | chernoff | refined");
    pl->add_option("--R", R_flag, "Discard counts per stage")->delimiter(',');

    // solve
    auto* so = app.add_subcommand("solve", "Plan, draw, solve, discard and validate");
    std::uint64_t seed = 0, replication = 0, n_val = 0;
    std::string algorithm = "greedy", out_path;
    double alpha = 0.05;
    so->add_option("--spec", spec_path, "Program spec (JSON)")->required();
    so->add_option("--seed", seed, "Root seed");
    so->add_option("--replication", replication, "Replication index within the seed");
    so->add_option("--theta", theta_flag, "Total confidence parameter");
    so->add_option("--policy", policy_flag, "implicit | chernoff | refined");
    so->add_option("--discard", algorithm, "optimal | greedy | marginal")
        ->check(CLI::IsMember({"optimal", "greedy", "marginal"}));
    so->add_option("--R", R_flag, "Discard counts per stage")->delimiter(',');
    so->add_option("--validate", n_val, "Fresh validation samples per stage (0 = skip)");
    so->add_option("--alpha", alpha, "Validation interval level")->check(CLI::Range(0.0, 1.0));
    so->add_option("--out", out_path, "Write the solution JSON here instead of stdout");

    // validate
    auto* va = app.add_subcommand("validate", "Estimate violation probabilities");
    std::vector<double> x_flag;
    std::optional<std::size_t> stage_flag;
    bool survey = false;
    std::uint64_t reps = 0;
    bool mc_only = false;
    n_val = 0;
    va->add_option("--spec", spec_path, "Program spec (JSON)")->required();
    va->add_option("--seed", seed, "Root seed");
    va->add_option("--x", x_flag, "Decision vector to check")->delimiter(',');
    va->add_option("--stage", stage_flag, "Only this stage");
    va->add_option("--n-val", n_val, "Validation samples per stage");
    va->add_option("--alpha", alpha, "Interval level")->check(CLI::Range(0.0, 1.0));
    va->add_flag("--survey", survey, "Repeat draw/solve/discard/estimate over replications (CSV)");
    va->add_option("--reps", reps, "Survey replications");
    va->add_option("--theta", theta_flag, "Total confidence parameter");
    va->add_option("--policy", policy_flag, "implicit | chernoff | refined");
    va->add_option("--discard", algorithm, "optimal | greedy | marginal")
        ->check(CLI::IsMember({"optimal", "greedy", "marginal"}));
    va->add_option("--R", R_flag, "Discard counts per stage")->delimiter(',');
    va->add_flag("--monte-carlo", mc_only, "Always sample, even where a closed form exists");
    va->add_option("--out", out_path, "Write output here instead of stdout");

    // cuboid
    auto* cu = app.add_subcommand("cuboid", "Minimal-diameter cuboid benchmark tables");
    cu->require_subcommand(1);
    auto* t1 = cu->add_subcommand("table1", "Implicit sample sizes, multi-stage (a) and single-stage (b)");
    auto* t2 = cu->add_subcommand("table2", "Relative diameter surplus of single-stage over multi-stage");
    double cu_theta = 1e-6;
    std::string out_dir;
    std::vector<std::size_t> n_list = cuboid::kTableN;
    std::vector<double> eps_list = cuboid::kTableEps;
    std::uint64_t cu_reps = 10'000;
    t1->add_option("--theta", cu_theta, "Total confidence parameter");
    t1->add_option("--out-dir", out_dir, "Write table1a.csv and table1b.csv here");
    t2->add_option("--theta", cu_theta, "Total confidence parameter");
    t2->add_option("--reps", cu_reps, "Replications per cell")->check(CLI::PositiveNumber);
    t2->add_option("--seed", seed, "Root seed");
    t2->add_option("--n", n_list, "Cuboid dimensions")->delimiter(',');
    t2->add_option("--eps", eps_list, "Violation levels")->delimiter(',');
    t2->add_option("--out", out_path, "Write the CSV here instead of stdout");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return usage;
    }

    const std::size_t threads = resolve_threads(threads_flag);
    try {
        if (ss->parsed()) {
            manifest.begin("samplesize", args);
            SCENOPT_REQUIRE(ss_eps > 0.0 && ss_eps < 1.0, ConfigError, "--eps must lie in (0,1)");
            SCENOPT_REQUIRE(ss_theta > 0.0 && ss_theta < 1.0, ConfigError, "--theta must lie in (0,1)");
            std::uint64_t K = 0;
            std::string method = ss_method;
            if (ss_R == 0) {
                if (ss_method == "implicit") K = bounds::implicit_sample_size(zeta, ss_eps, ss_theta);
                if (ss_method == "chernoff") K = bounds::chernoff_sample_size(zeta, ss_eps, ss_theta);
                if (ss_method == "refined") K = bounds::refined_sample_size(zeta, ss_eps, ss_theta);
            } else if (ss_method == "implicit") {
                K = bounds::implicit_sample_size_with_discarding(zeta, ss_eps, ss_theta, ss_R);
                method = "implicit-discard";
            } else {
                K = bounds::explicit_sample_size_with_discarding(zeta, ss_eps, ss_theta, ss_R);
                method = "explicit-discard";
            }
            const double bound = bounds::discard_posterior_confidence(zeta, K, ss_R, ss_eps);
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.6g", bound);
            out << K << "\nachieved_bound=" << buf << "\n";
            manifest.param("zeta", zeta);
            manifest.param("eps", ss_eps);
            manifest.param("theta", ss_theta);
            manifest.param("discard", ss_R);
            manifest.param("method", method);
            manifest.param("sample_size", K);
            manifest.finish();
            return ok;
        }

        if (pl->parsed()) {
            manifest.begin("plan", args);
            const io::SpecFile spec = io::load_spec(spec_path);
            const auto plan = bounds::plan_multistage(spec.program, plan_request(spec, theta_flag, policy_flag, R_flag));
            Json doc = io::to_json(plan);
            if (!manifest.path.empty()) doc["manifest"] = manifest.path;
            out << doc.dump(2) << "\n";
            manifest.param("spec", spec_path);
            manifest.finish();
            return ok;
        }

        if (so->parsed()) {
            manifest.begin("solve", args);
            const io::SpecFile spec = io::load_spec(spec_path);
            const ScenarioProgram& program = spec.program;
            const auto req = plan_request(spec, theta_flag, policy_flag, R_flag);
            const auto plan = bounds::plan_multistage(program, req);
            const MultiSample ms = draw_multisample(program, plan, seed, replication);
            const ScenarioSystem sys(program, ms);

            Json doc;
            if (!spec.name.empty()) doc["spec"] = spec.name;
            doc["seed"] = seed;
            doc["replication"] = replication;
            doc["plan"] = io::to_json(plan);

            bool any_discard = false;
            for (auto r : req.discard) any_discard = any_discard || r > 0;
            Solution sol;
            ScenarioSystem::Mask keep = sys.full_mask();
            if (any_discard) {
                const Solution full = sys.solve();
                if (full.ok()) {
                    const auto alg = discard::parse_algorithm(algorithm);
                    const auto res = discard::remove(alg, program, ms, req.discard, threads);
                    sol = res.reduced_solution;
                    for (std::size_t i = 0; i < res.removed.size(); ++i) {
                        for (std::size_t s : res.removed[i]) keep[sys.global_index(i, s)] = 0;
                    }
                    Json modes = Json::array();
                    for (auto m : res.assumption_mode) modes.push_back(discard::to_string(m));
                    doc["discard"] = {{"algorithm", discard::to_string(alg)},
                                      {"removed", io::to_json(res.removed)},
                                      {"original_objective", res.original.objective},
                                      {"objective_improvement", res.objective_improvement},
                                      {"assumption", modes}};
                } else {
                    sol = full;
                }
            } else {
                sol = sys.solve();
            }
            doc["solution"] = io::to_json(sol);
            if (!sol.ok()) {
                doc["diagnostic"] = "the sampled program is infeasible";
                if (!manifest.path.empty()) doc["manifest"] = manifest.path;
                emit(doc.dump(2) + "\n", out_path, out, manifest);
                manifest.finish();
                err << "error: sampled program is infeasible (seed " << seed << ", replication " << replication
                    << ")\n";
                return infeasible;
            }
            const StageSets support = support_set(sys, keep, sol);
            doc["support"] = io::to_json(support);
            Json sizes = Json::array();
            for (const auto& s : support) sizes.push_back(s.size());
            doc["support_sizes"] = sizes;
            if (n_val > 0) {
                Json v = Json::array();
                for (std::size_t i = 0; i < program.stages.size(); ++i) {
                    if (!program.stages[i].sampler) continue;
                    v.push_back(io::to_json(
                        validate::estimate_violation(program, i, sol.x, n_val, alpha, seed, replication, threads)));
                }
                doc["validation"] = v;
            }
            if (!manifest.path.empty()) doc["manifest"] = manifest.path;
            manifest.param("spec", spec_path);
            manifest.param("seed", seed);
            manifest.param("replication", replication);
            manifest.param("theta_total", req.theta_total);
            manifest.param("policy", bounds::to_string(req.policy));
            manifest.param("discard", req.discard);
            manifest.param("algorithm", algorithm);
            manifest.param("n_val", n_val);
            manifest.param("threads", threads);
            emit(doc.dump(2) + "\n", out_path, out, manifest);
            manifest.finish();
            return ok;
        }

        if (va->parsed()) {
            manifest.begin("validate", args);
            const io::SpecFile spec = io::load_spec(spec_path);
            const ScenarioProgram& program = spec.program;
            manifest.param("spec", spec_path);
            manifest.param("seed", seed);
            manifest.param("threads", threads);
            if (survey) {
                const auto req = plan_request(spec, theta_flag, policy_flag, R_flag);
                const auto plan = bounds::plan_multistage(program, req);
                validate::SurveyOptions opt;
                opt.replications = reps;
                opt.seed = seed;
                opt.n_val = n_val > 0 ? n_val : opt.n_val;
                opt.alpha = alpha;
                opt.algorithm = discard::parse_algorithm(algorithm);
                opt.prefer_exact = !mc_only;
                opt.threads = threads;
                const auto res = validate::violation_survey(program, plan, opt);
                emit(csv_with_manifest(validate::survey_csv(res), manifest), out_path, out, manifest);
                err << "replications=" << res.replications << " infeasible=" << res.infeasible;
                for (std::size_t i = 0; i < res.exceed_frequency.size(); ++i) {
                    err << " stage" << i << "_exceed_frequency=" << res.exceed_frequency[i];
                }
                err << "\n";
                manifest.param("replications", reps);
                manifest.param("infeasible", res.infeasible);
                manifest.param("exceedances", res.exceedances);
                manifest.finish();
                return ok;
            }
            SCENOPT_REQUIRE(x_flag.size() == program.dimension, ConfigError, "--x must have one entry per dimension");
            SCENOPT_REQUIRE(n_val >= 1, ConfigError, "--n-val must be >= 1");
            Json v = Json::array();
            for (std::size_t i = 0; i < program.stages.size(); ++i) {
                if (stage_flag && *stage_flag != i) continue;
                Json e = io::to_json(validate::estimate_violation(program, i, x_flag, n_val, alpha, seed, 0, threads));
                if (auto exact = validate::exact_violation(program, i, x_flag)) e["exact"] = *exact;
                v.push_back(e);
            }
            Json doc{{"x", x_flag}, {"alpha", alpha}, {"estimates", v}};
            if (!manifest.path.empty()) doc["manifest"] = manifest.path;
            emit(doc.dump(2) + "\n", out_path, out, manifest);
            manifest.finish();
            return ok;
        }

        if (t1->parsed()) {
            manifest.begin("cuboid table1", args);
            manifest.param("theta", cu_theta);
            const auto table = cuboid::run_table1(cu_theta);
            const std::string a = csv_with_manifest(cuboid::table1_csv(table, cuboid::Mode::multi_stage), manifest);
            const std::string b = csv_with_manifest(cuboid::table1_csv(table, cuboid::Mode::single_stage), manifest);
            if (out_dir.empty()) {
                out << "# (a) multi-stage\n" << a << "\n# (b) single-stage\n" << b;
            } else {
                std::filesystem::create_directories(out_dir);
                const std::string pa = (std::filesystem::path(out_dir) / "table1a.csv").string();
                const std::string pb = (std::filesystem::path(out_dir) / "table1b.csv").string();
                write_file(pa, a);
                write_file(pb, b);
                manifest.output(pa);
                manifest.output(pb);
                out << pa << "\n" << pb << "\n";
            }
            manifest.finish();
            return ok;
        }

        if (t2->parsed()) {
            manifest.begin("cuboid table2", args);
            cuboid::Table2Options opt;
            opt.n_list = n_list;
            opt.eps_list = eps_list;
            opt.replications = cu_reps;
            opt.seed = seed;
            opt.theta_total = cu_theta;
            opt.threads = threads;
            manifest.param("theta", cu_theta);
            manifest.param("reps", cu_reps);
            manifest.param("seed", seed);
            manifest.param("n", n_list);
            manifest.param("eps", eps_list);
            manifest.param("threads", threads);
            const auto table = cuboid::run_table2(opt);
            emit(csv_with_manifest(cuboid::table2_csv(table), manifest), out_path, out, manifest);
            manifest.finish();
            return ok;
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return usage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return usage;
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << "\n";
        return usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return failure;
    }
    return usage;
}

}  // namespace scenopt::cli
