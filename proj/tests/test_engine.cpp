#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "evo/canon.hpp"
#include "evo/engine.hpp"

using namespace evo;
namespace fs = std::filesystem;

namespace {

const Problem& P(const std::string& id) { return Registry::get().at(id); }

CandidateRecord rec(long id, double score, bool feasible = true, long generation = 0) {
    CandidateRecord r;
    r.id = id;
    r.payload = Construction(IntSet{{0}});
    r.score = score;
    r.report.feasible = feasible;
    r.report.raw = score;
    r.report.score = score;
    r.generation = generation;
    return r;
}

fs::path scratch(const std::string& name) {
    auto d = fs::temp_directory_path() / ("evo_engine_" + name);
    fs::remove_all(d);
    return d;
}

std::vector<json> read_log(const fs::path& p) {
    std::ifstream in(p);
    std::vector<json> out;
    for (std::string line; std::getline(in, line);) out.push_back(json::parse(line));
    return out;
}

double harmonic_number(int n) {
    double h = 0;
    for (int k = 1; k <= n; ++k) h += 1.0 / k;
    return h;
}

}  // namespace

TEST_CASE("admit") {
    SUBCASE("empty archive takes a feasible record") {
        Archive a(2, 4);
        CHECK(admit(a, rec(1, 0.5)));
        CHECK(a.size() == 1);
        REQUIRE(a.incumbent);
        CHECK(a.incumbent->id == 1);
    }
    SUBCASE("infeasible records never become best") {
        Archive a(2, 4);
        CHECK_FALSE(admit(a, rec(1, 7.0, false)));
        CHECK(a.size() == 0);
        CHECK_FALSE(a.incumbent);
    }
    SUBCASE("full niche and a worse record") {
        Archive a(1, 3);
        for (long i = 1; i <= 3; ++i) admit(a, rec(i, static_cast<double>(i)));
        const auto before = a.niches[0].size();
        std::vector<long> ids;
        for (const auto& r : a.niches[0]) ids.push_back(r.id);
        CHECK_FALSE(admit(a, rec(9, 0.5)));
        std::vector<long> after;
        for (const auto& r : a.niches[0]) after.push_back(r.id);
        CHECK(a.niches[0].size() == before);
        CHECK(after == ids);
        CHECK(a.incumbent->score == 3.0);
    }
    SUBCASE("full niche and a better record evicts the worst") {
        Archive a(1, 3);
        for (long i = 1; i <= 3; ++i) admit(a, rec(i, static_cast<double>(i)));
        CHECK(admit(a, rec(4, 10.0)));
        CHECK(a.niches[0].size() == 3);
        CHECK(a.niches[0].back().score == 2.0);
        CHECK(a.incumbent->score == 10.0);
        CHECK(a.evicted == 1);
    }
    SUBCASE("random score streams") {
        Rng rng(77);
        for (int trial = 0; trial < 50; ++trial) {
            Archive a(1 + static_cast<int>(rng.below(4)), 4 + static_cast<int>(rng.below(12)));
            double best = -HUGE_VAL;
            for (long i = 0; i < 300; ++i) {
                auto r = rec(i, std::floor(rng.uniform(-50, 50)), rng.uniform() < 0.9, static_cast<long>(rng.below(40)));
                const bool changed = admit(a, r);
                const bool expect = r.report.feasible && r.score > best;
                CHECK(changed == expect);
                if (expect) best = r.score;
                for (const auto& n : a.niches) {
                    CHECK(n.size() <= a.niche_capacity);
                    for (std::size_t k = 1; k < n.size(); ++k) CHECK(n[k - 1].score >= n[k].score);
                }
                if (a.incumbent) CHECK(a.incumbent->score == best);
            }
        }
    }
    CHECK(niche_of("signs", 3, 4) == niche_of("signs", 9, 4));
    CHECK(niche_of("signs", 3, 1) == 0);
}

TEST_CASE("search candidates") {
    SUBCASE("no-op strategy keeps the incumbent") {
        const auto& p = P("hl_maximal");
        auto inc = *p.baseline({{"n", 10}});
        auto out = score_search_candidate(default_strategy(p), p, {}, inc, 1000, 3, 1);
        CHECK(payload_to_json(out.best.payload) == payload_to_json(inc.payload));
        CHECK(out.report.raw == evaluate(p, {}, inc).raw);
    }
    SUBCASE("random restarts on thomson n=2") {
        const auto& p = P("thomson");
        StrategyConfig s = default_strategy(p);
        s.kind = StrategyKind::random_restart;
        s.restart_count = 1;
        auto out = score_search_candidate(s, p, {{"d", 3}, {"n", 2}}, std::nullopt, 60000, 11, 20000);
        CHECK(std::fabs(out.report.raw - 0.5) < 1e-9);
    }
    SUBCASE("annealing on hl_maximal from the k=1 family") {
        const auto& p = P("hl_maximal");
        auto inc = *p.baseline({{"n", 100}});
        StrategyConfig s = default_strategy(p);
        auto out = score_search_candidate(s, p, resolve_instance(p, {}, &inc), inc, 20000, 5, 60);
        CHECK(out.report.raw >= 1.495);
    }
    CHECK_THROWS(score_search_candidate(default_strategy(P("tammes")), P("tammes"), {}, std::nullopt, 0, 1));
}

TEST_CASE("run_experiment examples") {
    SUBCASE("single evaluation") {
        ExperimentConfig c;
        c.problem_id = "block_stacking";
        c.total_evals = 1;
        c.proposer.strategy_evals = 50;
        auto r = run_experiment(c);
        REQUIRE(r.best);
        CHECK(r.best->score >= 0);
        CHECK(r.history.size() == 1);
        CHECK(r.eval_count == 1);
    }
    SUBCASE("seed only") {
        ExperimentConfig c;
        c.problem_id = "hl_maximal";
        c.start = "baseline";
        c.baseline_params = {{"n", 100}};
        c.total_evals = 0;
        auto r = run_experiment(c);
        REQUIRE(r.best);
        CHECK(r.best->score == 1.495);
        CHECK(r.history.empty());
        CHECK(r.eval_count == 0);
    }
    SUBCASE("unknown problem and bad configs") {
        ExperimentConfig c;
        c.problem_id = "nope";
        CHECK_THROWS(run_experiment(c));
        c.problem_id = "tammes";
        c.archive_capacity = 2;
        c.niche_count = 3;
        CHECK_FALSE(config_problem(c).empty());
        c.archive_capacity = 8;
        c.mode = RunMode::generalize;
        CHECK_FALSE(config_problem(c).empty());
        c.instance_list = {{{"n", 4}}};
        CHECK(config_problem(c).empty());
        c.worker_count = 0;
        CHECK_FALSE(config_problem(c).empty());
    }
    SUBCASE("nothing feasible") {
        ExperimentConfig c;
        c.problem_id = "difference_basis";
        c.instance = {{"n", 1000}};
        c.total_evals = 2;
        c.proposer.strategy_evals = 2;
        auto r = run_experiment(c);
        CHECK(r.no_feasible);
        CHECK_FALSE(r.best);
    }
}

TEST_CASE("config json round trip") {
    json j = {{"problem", "tammes"},
              {"instance", {{"n", 5}}},
              {"workers", 3},
              {"seed", 99},
              {"total_evals", 12},
              {"proposer", {{"strategy", {{"kind", "coordinate_descent"}}}, {"strategy_evals", 40}}},
              {"normalization_table", {{"{\"n\":5}", 1.2}}}};
    auto c = config_from_json(j);
    CHECK(c.worker_count == 3);
    CHECK(c.master_seed == 99);
    CHECK(c.proposer.strategy->kind == StrategyKind::coordinate_descent);
    CHECK(c.normalization_table.at(canonical_json({{"n", 5}})) == 1.2);
    auto back = config_from_json(config_to_json(c));
    CHECK(config_to_json(back) == config_to_json(c));
    CHECK_THROWS(config_from_json({{"problem", "tammes"}, {"mode", "sideways"}}));
    CHECK_THROWS(config_from_json({{"problem", "tammes"}, {"proposer", {{"strategy", {{"move_weights", {{"flip", 1}}}}}}}}));
}

TEST_CASE("determinism, monotonicity, budget and orientation") {
    ExperimentConfig c;
    c.problem_id = "thomson";
    c.instance = {{"n", 5}};
    c.total_evals = 12;
    c.eval_budget_ms = 60000;
    c.proposer.strategy_evals = 80;
    c.master_seed = 2024;
    auto a = run_experiment(c);
    auto b = run_experiment(c);
    CHECK(run_report_to_json(a, false).dump() == run_report_to_json(b, false).dump());

    // more workers only change scheduling
    c.worker_count = 3;
    auto w = run_experiment(c);
    CHECK(run_report_to_json(w, false).dump() == run_report_to_json(a, false).dump());

    c.master_seed = 2025;
    c.worker_count = 1;
    auto other = run_experiment(c);
    CHECK(run_report_to_json(other, false).dump() != run_report_to_json(a, false).dump());

    for (std::size_t i = 1; i < a.history.size(); ++i) CHECK(a.history[i].second >= a.history[i - 1].second);
    REQUIRE(a.best);
    CHECK(a.best->report.score == -a.best->report.raw);
    CHECK(a.best->score == -a.best->report.raw);

    // log-based checks
    const auto dir = scratch("log");
    c.runs_dir = dir.string();
    c.eval_budget_ms = 200;
    c.worker_count = 2;
    auto r = run_experiment(c);
    const fs::path run = r.run_dir;
    CHECK(fs::exists(run / "config.json"));
    CHECK(fs::exists(run / "best.json"));
    auto lines = read_log(run / "log.ndjson");
    REQUIRE(lines.size() == 12);
    double total_wall = 0;
    std::set<long> ids;
    for (const auto& l : lines) {
        total_wall += l.at("wall_ms").get<double>();
        ids.insert(l.at("id").get<long>());
        for (const char* k : {"id", "parents", "score", "feasible", "wall_ms", "seed"}) CHECK(l.contains(k));
        CHECK(l.at("seed").get<std::uint64_t>() == split_seed(c.master_seed, l.at("id").get<std::uint64_t>()));
    }
    CHECK(ids.size() == 12);
    CHECK(total_wall <= 12.0 * 2 * 200);
    auto best = json::parse(std::ifstream(run / "best.json"));
    CHECK(best.at("best").at("score") == r.best->score);
    auto cfg = config_from_json(json::parse(std::ifstream(run / "config.json")));
    CHECK(cfg.total_evals == 12);
    fs::remove_all(dir);
}

TEST_CASE("orientation for every minimization problem") {
    Rng rng(4);
    for (const auto& id : Registry::get().ids()) {
        const auto& p = P(id);
        json inst = p.default_instance;
        if (id == "ff_kakeya" || id == "ff_nikodym") inst = {{"p", 3}, {"d", 2}};
        for (int t = 0; t < 3; ++t) {
            auto c = p.random(inst, rng);
            auto r = evaluate(p, resolve_instance(p, inst, &c), c);
            if (!r.feasible) continue;
            CAPTURE(id);
            CHECK(r.score == (p.minimizes(inst) ? -r.raw : r.raw));
        }
    }
}

TEST_CASE("generalizer scoring") {
    SUBCASE("harmonic emitter") {
        const auto& p = P("block_stacking");
        std::map<std::string, double> table;
        std::vector<json> insts;
        for (int n : {1, 2, 4}) {
            insts.push_back({{"n", n}});
            table[canonical_json({{"n", n}})] = harmonic_number(n) / 2;
        }
        Generator g = [&](const json& inst, Rng&, long) { return p.baseline(inst); };
        json per;
        double m = score_generalizer_candidate(p, g, insts, table, 1000, 1, &per);
        CHECK(std::fabs(m - 1) < 1e-6);
        CHECK(m <= 1 + 1e-12);
        CHECK(per.size() == 3);
    }
    SUBCASE("empty generator") {
        const auto& p = P("imo_tiling");
        Generator g = [](const json&, Rng&, long) -> std::optional<Construction> { return Construction(Tiling{}); };
        CHECK(score_generalizer_candidate(p, g, {{{"n", 4}}, {{"n", 9}}}, {}, 100, 1) == 0.0);
        Generator none = [](const json&, Rng&, long) -> std::optional<Construction> { return std::nullopt; };
        CHECK(score_generalizer_candidate(p, none, {{{"n", 4}}}, {}, 100, 1) == 0.0);
        Generator boom = [](const json&, Rng&, long) -> std::optional<Construction> { throw std::runtime_error("x"); };
        CHECK(score_generalizer_candidate(p, boom, {{{"n", 4}}}, {}, 100, 1) == 0.0);
    }
    SUBCASE("finite field Kakeya references") {
        const auto& p = P("ff_kakeya");
        std::map<std::string, double> table;
        std::vector<json> insts;
        for (long q : {5L, 13L}) {
            const double size = 0.25 * q * q * q + 0.875 * q * q - 0.125;
            json inst = {{"p", q}, {"d", 3}};
            insts.push_back(inst);
            table[canonical_json(inst)] = size / static_cast<double>(q * q * q);
        }
        Generator g = [&](const json& inst, Rng&, long) { return p.baseline(inst); };
        CHECK(score_generalizer_candidate(p, g, insts, table, 1000, 1) == 1.0);
        // baseline references give the same answer
        CHECK(score_generalizer_candidate(p, g, insts, {}, 1000, 1) == 1.0);
    }
    SUBCASE("generalize mode through the engine") {
        ExperimentConfig c;
        c.problem_id = "block_stacking";
        c.mode = RunMode::generalize;
        c.instance_list = {{{"n", 2}}, {{"n", 3}}};
        c.total_evals = 4;
        c.proposer.strategy_evals = 20;
        auto r = run_experiment(c);
        REQUIRE(r.best);
        // runs start from the harmonic baseline and never fall below it
        CHECK(r.best->score >= 1 - 1e-9);
        CHECK(r.best->report.details.at("instances").size() == 2);
    }
}

TEST_CASE("external proposers in the loop") {
    ExperimentConfig c;
    c.problem_id = "sumdiff";
    c.total_evals = 4;
    c.proposer.strategy_evals = 20;
    SUBCASE("skip falls back to builtin") {
        c.proposer.external = "while read l; do echo '{\"type\":\"skip\"}'; done";
        auto r = run_experiment(c);
        REQUIRE(r.best);
        CHECK(r.best->source == "builtin");
        CHECK_FALSE(r.external_quarantined);
    }
    SUBCASE("constructions are scored directly") {
        c.proposer.external =
            "while read l; do echo '{\"type\":\"construction\",\"construction\":{\"kind\":\"intset\",\"elems\":"
            "[0,1,2,4,5,9,12,13,14,16,17,21,24,25,26,28,29]}}'; done";
        auto r = run_experiment(c);
        REQUIRE(r.best);
        CHECK(r.best->source == "external");
        CHECK(r.best->report.raw == doctest::Approx(1.059793).epsilon(1e-6));
    }
    SUBCASE("broken endpoint is quarantined and the run finishes") {
        c.total_evals = 8;
        c.proposer.external = "while read l; do echo garbage; done";
        auto r = run_experiment(c);
        CHECK(r.external_quarantined);
        CHECK(r.eval_count == 8);
        REQUIRE(r.best);
    }
}
