// evoconstruct command line: evaluate, search, certify and store constructions.
// Exit codes: 0 ok, 1 infeasible input or failed run, 2 usage error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "evo/certify.hpp"
#include "evo/combinatorics.hpp"
#include "evo/engine.hpp"
#include "evo/numbertheory.hpp"
#include "evo/problem.hpp"
#include "evo/store.hpp"

using namespace evo;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
    if (path == "-") {
        std::stringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// inline JSON, @file, or a path to an existing file
json json_arg(const std::string& s, const char* what) {
    if (s.empty()) return json::object();
    std::string text = s;
    if (s[0] == '@') text = slurp(s.substr(1));
    else if (s[0] != '{' && s[0] != '[' && std::filesystem::exists(s)) text = slurp(s);
    try {
        return json::parse(text);
    } catch (const std::exception& e) {
        throw UsageError(std::string("bad JSON for ") + what + ": " + e.what());
    }
}

const Problem& problem_arg(const std::string& id) {
    const Problem* p = Registry::get().find(id);
    if (!p) throw UsageError("unknown problem '" + id + "' (see: evoconstruct list)");
    return *p;
}

// a bare construction, or any document with a "construction" field (repo records, best.json)
json construction_doc(const json& j) {
    if (j.is_object() && j.contains("kind")) return j;
    if (j.is_object() && j.contains("construction")) return j.at("construction");
    if (j.is_object() && j.contains("best") && j.at("best").is_object()) {
        const auto& b = j.at("best");
        if (b.contains("construction")) return b.at("construction");
        if (b.contains("payload") && b.at("payload").contains("kind") && b.at("payload").at("kind").is_string())
            return b.at("payload");
    }
    throw UsageError("no construction found in the given document");
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

int cmd_list(bool as_json) {
    json all = json::array();
    for (const auto& id : Registry::get().ids()) {
        const auto& p = Registry::get().at(id);
        json row = {{"id", id},
                    {"kind", p.kind},
                    {"orientation", p.minimizes(p.default_instance) ? "minimize" : "maximize"},
                    {"default_instance", p.default_instance},
                    {"certify", static_cast<bool>(p.certify)},
                    {"baseline", static_cast<bool>(p.baseline)},
                    {"doc", p.doc}};
        if (as_json) all.push_back(row);
        else
            std::cout << id << "\t" << p.kind << "\t" << row["orientation"].get<std::string>() << "\t" << p.doc << "\n";
    }
    if (as_json) std::cout << all.dump(2) << "\n";
    return 0;
}

int cmd_eval(const std::string& pid, const std::string& inst_s, const std::string& file, bool cert, int bits,
             bool as_json) {
    const auto& p = problem_arg(pid);
    const json doc = construction_doc(json_arg(file, "--construction"));
    Construction c;
    try {
        c = construction_from_json(doc);
    } catch (const std::exception& e) {
        std::cout << "infeasible: " << e.what() << "\n";
        return 1;
    }
    const json inst = resolve_instance(p, json_arg(inst_s, "--instance"), &c);
    const auto r = evaluate(p, inst, c);
    if (as_json) {
        json out = report_to_json(r);
        out["instance"] = inst;
        if (cert && r.feasible) out["certificate"] = certificate_json(p.id, c, certify(p.id, inst, c, bits));
        std::cout << out.dump(2) << "\n";
        return r.feasible ? 0 : 1;
    }
    if (!r.feasible) {
        std::cout << "infeasible: " << r.message << "\n";
        if (!r.details.empty()) std::cout << r.details.dump() << "\n";
        return 1;
    }
    std::cout << fmt(r.raw) << "\n";
    if (!r.valid) std::cout << "invalid (penalty " << fmt(r.penalty) << ")\n";
    if (!r.details.empty()) std::cout << r.details.dump() << "\n";
    if (cert) std::cout << certificate_json(p.id, c, certify(p.id, inst, c, bits)).dump() << "\n";
    return 0;
}

int cmd_run(const std::string& cfg_path, int workers, long long seed, const std::string& runs, bool generalize) {
    ExperimentConfig cfg;
    try {
        cfg = config_from_json(json_arg(cfg_path, "--config"));
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception& e) {
        throw UsageError(std::string("bad config: ") + e.what());
    }
    if (workers > 0) cfg.worker_count = workers;
    if (seed >= 0) cfg.master_seed = static_cast<std::uint64_t>(seed);
    if (!runs.empty()) cfg.runs_dir = runs;
    if (cfg.runs_dir.empty()) cfg.runs_dir = "runs";
    if (generalize) cfg.mode = RunMode::generalize;
    if (auto why = config_problem(cfg); !why.empty()) throw UsageError("bad config: " + why);
    const auto rep = run_experiment(cfg);
    json out = run_report_to_json(rep);
    std::cout << out.dump(2) << "\n";
    if (rep.no_feasible) {
        std::cerr << "no feasible candidate after " << rep.eval_count << " evaluations\n";
        return 1;
    }
    return 0;
}

int cmd_baseline(const std::string& pid, const std::string& params_s) {
    const auto& p = problem_arg(pid);
    if (!p.baseline) throw UsageError("problem " + pid + " has no baseline");
    const json params = json_arg(params_s, "--params");
    std::optional<Construction> c;
    try {
        c = p.baseline(params.empty() ? p.default_instance : params);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (!c) throw UsageError("no baseline for these parameters");
    std::cout << to_json(*c).dump() << "\n";
    return 0;
}

int cmd_oracle(const std::string& pid, const std::string& params_s) {
    const json params = json_arg(params_s, "--params");
    json out;
    try {
        if (pid == "edp") {
            const long D = params.value("D", 1L);
            out = {{"D", D}, {"longest", combinatorics::edp_longest(D)}};
        } else if (pid == "imo_tiling") {
            const long n = params.value("n", 4L);
            out = {{"n", n}, {"min_tiles", combinatorics::imo_min_tiles(static_cast<int>(n))}, {"formula", combinatorics::imo_formula(n)}};
        } else if (pid == "difference_basis") {
            const long n = params.value("n", 10L);
            auto b = numbertheory::min_difference_basis(n);
            out = {{"n", n}, {"size", b.size()}, {"basis", b}};
        } else {
            problem_arg(pid);
            throw UsageError("no oracle for " + pid + " (oracles: edp, imo_tiling, difference_basis)");
        }
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    std::cout << out.dump() << "\n";
    return 0;
}

int cmd_report(const std::string& dir, const std::string& format) {
    try {
        std::cout << (format == "csv" ? report_csv(dir) : report_plotdata(dir));
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"evoconstruct: search, score and certify mathematical constructions"};
    app.require_subcommand(1);

    bool list_json = false;
    auto* list = app.add_subcommand("list", "registered problems");
    list->add_flag("--json", list_json);

    std::string problem, instance, construction, params, config, run_dir, format = "csv", runs;
    bool do_cert = false, as_json = false, uncertified = false;
    int bits = kDefaultBits, workers = 0;
    long long seed = -1;

    auto* ev = app.add_subcommand("eval", "score a construction");
    ev->add_option("--problem", problem)->required();
    ev->add_option("--instance", instance, "instance JSON (inline, @file or path)");
    ev->add_option("--construction", construction, "construction JSON file, - for stdin")->required();
    ev->add_flag("--certify", do_cert);
    ev->add_option("--bits", bits)->check(CLI::Range(64, 4096));
    ev->add_flag("--json", as_json);

    auto* search = app.add_subcommand("search", "run a search-mode experiment");
    search->add_option("--config", config)->required();
    search->add_option("--workers", workers)->check(CLI::PositiveNumber);
    search->add_option("--seed", seed)->check(CLI::NonNegativeNumber);
    search->add_option("--runs", runs, "runs directory (default: config runs_dir, else ./runs)");

    auto* gen = app.add_subcommand("generalize", "run a generalizer-mode experiment");
    gen->add_option("--config", config)->required();
    gen->add_option("--workers", workers)->check(CLI::PositiveNumber);
    gen->add_option("--seed", seed)->check(CLI::NonNegativeNumber);
    gen->add_option("--runs", runs);

    auto* base = app.add_subcommand("baseline", "emit a built-in construction");
    base->add_option("--problem", problem)->required();
    base->add_option("--params", params);

    auto* orc = app.add_subcommand("oracle", "exhaustive reference values");
    orc->add_option("--problem", problem)->required();
    orc->add_option("--params", params);

    auto* rep = app.add_subcommand("report", "CSV or plot data from a run log");
    rep->add_option("--run", run_dir)->required();
    rep->add_option("--format", format)->check(CLI::IsMember({"csv", "plotdata"}));

    auto* repo = app.add_subcommand("repo", "best-construction repository ($EVOCONSTRUCT_REPO, default ./repo)");
    repo->require_subcommand(1);
    std::string run_id;
    auto* radd = repo->add_subcommand("add", "store a construction if it beats the current record");
    radd->add_option("--problem", problem)->required();
    radd->add_option("--construction", construction)->required();
    radd->add_option("--instance", instance);
    radd->add_option("--bits", bits)->check(CLI::Range(64, 4096));
    radd->add_flag("--uncertified", uncertified, "skip certification");
    radd->add_option("--run-id", run_id);
    radd->add_option("--seed", seed)->check(CLI::NonNegativeNumber);
    auto* rshow = repo->add_subcommand("show", "print the stored record");
    rshow->add_option("--problem", problem)->required();
    rshow->add_option("--instance", instance);
    auto* rver = repo->add_subcommand("verify", "re-evaluate stored records");
    rver->add_option("--problem", problem);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*list) return cmd_list(list_json);
        if (*ev) return cmd_eval(problem, instance, construction, do_cert, bits, as_json);
        if (*search) return cmd_run(config, workers, seed, runs, false);
        if (*gen) return cmd_run(config, workers, seed, runs, true);
        if (*base) return cmd_baseline(problem, params);
        if (*orc) return cmd_oracle(problem, params);
        if (*rep) return cmd_report(run_dir, format);
        if (*radd) {
            problem_arg(problem);
            const json doc = construction_doc(json_arg(construction, "--construction"));
            Provenance prov{run_id, seed >= 0 ? static_cast<std::uint64_t>(seed) : 0, "", kEvaluatorVersion};
            BestRecord r;
            try {
                r = make_best_record(problem, json_arg(instance, "--instance"), doc, uncertified ? 0 : bits, prov);
            } catch (const std::runtime_error& e) {
                std::cout << e.what() << "\n";
                return 1;
            }
            const auto res = repo_add(repo_root(), r);
            std::cout << res.message << "\n" << res.path << "\n";
            if (!res.archived.empty()) std::cout << "previous record archived at " << res.archived << "\n";
            return res.stored ? 0 : 1;
        }
        if (*rshow) {
            problem_arg(problem);
            auto r = repo_show(repo_root(), problem, json_arg(instance, "--instance"));
            if (!r) {
                std::cerr << "no record for " << problem << "\n";
                return 1;
            }
            std::cout << best_record_to_json(*r).dump(2) << "\n";
            return 0;
        }
        if (*rver) {
            if (!problem.empty()) problem_arg(problem);
            std::size_t n = 0;
            auto issues = repo_verify(repo_root(), problem, &n);
            for (const auto& i : issues) std::cout << i.path << ": " << i.message << "\n";
            std::cout << n << " records checked, " << issues.size() << " problems\n";
            return issues.empty() ? 0 : 1;
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
