#include "evo/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <thread>

#include "evo/canon.hpp"

namespace evo {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

void write_atomic(const fs::path& path, const std::string& text) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << text;
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

const char* mode_name(RunMode m) { return m == RunMode::search ? "search" : "generalize"; }

}  // namespace

// ---------------------------------------------------------------- config

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    ExperimentConfig c;
    c.problem_id = j.contains("problem_id") ? j.at("problem_id").get<std::string>() : j.value("problem", std::string());
    if (c.problem_id.empty()) throw std::invalid_argument("config: problem_id missing");
    c.instance = j.value("instance", json::object());
    const std::string mode = j.value("mode", std::string("search"));
    if (mode == "search") c.mode = RunMode::search;
    else if (mode == "generalize") c.mode = RunMode::generalize;
    else throw std::invalid_argument("config: unknown mode '" + mode + "'");
    if (j.contains("instance_list"))
        for (const auto& i : j.at("instance_list")) c.instance_list.push_back(i);
    c.worker_count = j.value("worker_count", j.value("workers", 1));
    c.batch_size = j.value("batch_size", c.batch_size);
    c.eval_budget_ms = j.value("eval_budget_ms", c.eval_budget_ms);
    c.total_evals = j.value("total_evals", c.total_evals);
    if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
    else if (j.contains("seed")) c.master_seed = j.at("seed").get<std::uint64_t>();
    c.archive_capacity = j.value("archive_capacity", c.archive_capacity);
    c.niche_count = j.value("niche_count", c.niche_count);
    c.start = j.value("start", c.start);
    c.baseline_params = j.value("baseline_params", json::object());
    c.runs_dir = j.value("runs_dir", std::string());
    c.run_id = j.value("run_id", std::string());

    const Problem* p = Registry::get().find(c.problem_id);
    if (j.contains("proposer")) {
        const auto& pj = j.at("proposer");
        c.proposer.builtin = pj.value("builtin", true);
        if (pj.contains("strategy") && !pj.at("strategy").is_null())
            c.proposer.strategy = strategy_from_json(pj.at("strategy"), p);
        c.proposer.external = pj.value("external", std::string());
        c.proposer.external_timeout_ms = pj.value("external_timeout_ms", c.proposer.external_timeout_ms);
        c.proposer.strategy_evals = pj.value("strategy_evals", c.proposer.strategy_evals);
    }
    if (j.contains("normalization_table")) {
        const auto& t = j.at("normalization_table");
        if (t.is_array()) {
            for (const auto& e : t) c.normalization_table[canonical_json(e.at("instance"))] = e.at("reference").get<double>();
        } else {
            // keys are instance JSON texts
            for (auto it = t.begin(); it != t.end(); ++it)
                c.normalization_table[canonical_json(json::parse(it.key()))] = it.value().get<double>();
        }
    }
    return c;
}

json config_to_json(const ExperimentConfig& c) {
    json table = json::array();
    for (const auto& [k, v] : c.normalization_table) table.push_back({{"instance", json::parse(k)}, {"reference", v}});
    json prop = {{"builtin", c.proposer.builtin},
                 {"external", c.proposer.external},
                 {"external_timeout_ms", c.proposer.external_timeout_ms},
                 {"strategy_evals", c.proposer.strategy_evals}};
    if (c.proposer.strategy) prop["strategy"] = strategy_to_json(*c.proposer.strategy);
    json j = {{"problem_id", c.problem_id},
              {"instance", c.instance},
              {"mode", mode_name(c.mode)},
              {"instance_list", c.instance_list},
              {"worker_count", c.worker_count},
              {"batch_size", c.batch_size},
              {"eval_budget_ms", c.eval_budget_ms},
              {"total_evals", c.total_evals},
              {"master_seed", c.master_seed},
              {"proposer", prop},
              {"archive_capacity", c.archive_capacity},
              {"niche_count", c.niche_count},
              {"normalization_table", table},
              {"start", c.start},
              {"baseline_params", c.baseline_params}};
    if (!c.runs_dir.empty()) j["runs_dir"] = c.runs_dir;
    if (!c.run_id.empty()) j["run_id"] = c.run_id;
    return j;
}

std::string config_problem(const ExperimentConfig& c) {
    const Problem* p = Registry::get().find(c.problem_id);
    if (!p) return "unknown problem '" + c.problem_id + "'";
    if (c.worker_count < 1) return "worker_count must be >= 1";
    if (c.batch_size < 1) return "batch_size must be >= 1";
    if (c.eval_budget_ms < 1) return "eval_budget_ms must be >= 1";
    if (c.total_evals < 0) return "total_evals must be >= 0";
    if (c.niche_count < 1) return "niche_count must be >= 1";
    if (c.archive_capacity < c.niche_count) return "archive_capacity must be >= niche_count";
    if (c.proposer.strategy_evals < 1) return "proposer.strategy_evals must be >= 1";
    if (c.proposer.external_timeout_ms < 1) return "proposer.external_timeout_ms must be >= 1";
    if (!c.proposer.builtin && c.proposer.external.empty()) return "no proposer: builtin is off and no external endpoint";
    if (c.mode == RunMode::generalize && c.instance_list.empty()) return "generalize mode needs a nonempty instance_list";
    if (c.start != "random" && c.start != "baseline" && c.start != "none") return "start must be random, baseline or none";
    if (c.start == "baseline" && !p->baseline) return "problem " + p->id + " has no baseline";
    if (c.proposer.strategy) {
        auto why = strategy_problem(*c.proposer.strategy, p);
        if (!why.empty()) return "proposer.strategy: " + why;
    }
    return {};
}

// ---------------------------------------------------------------- records and archive

std::string payload_kind(const CandidateRecord& r) {
    if (const auto* c = std::get_if<Construction>(&r.payload)) return c->kind();
    return "strategy";
}

json record_to_json(const CandidateRecord& r) {
    json payload = std::holds_alternative<Construction>(r.payload)
                       ? to_json(std::get<Construction>(r.payload))
                       : strategy_to_json(std::get<StrategyConfig>(r.payload));
    json j = {{"id", r.id},
              {"parent_ids", r.parent_ids},
              {"payload_kind", payload_kind(r)},
              {"payload", payload},
              {"score", finite_or_null(r.score)},
              {"report", report_to_json(r.report)},
              {"generation", r.generation},
              {"seed_used", r.seed_used},
              {"strategy_evals", r.strategy_evals},
              {"source", r.source}};
    if (r.construction) j["construction"] = to_json(*r.construction);
    return j;
}

Archive::Archive(int niche_count, int capacity)
    : niches(static_cast<std::size_t>(std::max(1, niche_count))),
      niche_capacity(static_cast<std::size_t>(std::max(1, capacity / std::max(1, niche_count)))) {}

std::size_t Archive::size() const {
    std::size_t n = 0;
    for (const auto& v : niches) n += v.size();
    return n;
}

std::vector<const CandidateRecord*> Archive::top(std::size_t k) const {
    std::vector<const CandidateRecord*> all;
    for (const auto& v : niches)
        for (const auto& r : v) all.push_back(&r);
    std::stable_sort(all.begin(), all.end(), [](const CandidateRecord* a, const CandidateRecord* b) {
        if (a->score != b->score) return a->score > b->score;
        return a->id < b->id;
    });
    if (all.size() > k) all.resize(k);
    return all;
}

std::size_t niche_of(const std::string& kind, long generation, std::size_t niche_count) {
    const std::uint64_t band = static_cast<std::uint64_t>(std::max(0L, generation) / 10);
    return static_cast<std::size_t>(mix64(fnv1a(kind) ^ mix64(band)) % std::max<std::size_t>(1, niche_count));
}

bool admit(Archive& a, const CandidateRecord& rec) {
    if (!rec.report.feasible || !std::isfinite(rec.score)) {
        ++a.rejected;
        return false;
    }
    auto& niche = a.niches[niche_of(payload_kind(rec), rec.generation, a.niches.size())];
    // after every equal score, so older records win ties
    auto pos = std::upper_bound(niche.begin(), niche.end(), rec.score,
                                [](double s, const CandidateRecord& r) { return s > r.score; });
    if (niche.size() >= a.niche_capacity && pos == niche.end()) {
        ++a.rejected;
    } else {
        niche.insert(pos, rec);
        ++a.admitted;
        if (niche.size() > a.niche_capacity) {
            niche.pop_back();
            ++a.evicted;
        }
    }
    if (!a.incumbent || rec.score > a.incumbent->score) {
        a.incumbent = rec;
        return true;
    }
    return false;
}

json run_report_to_json(const RunReport& r, bool with_timing) {
    json hist = json::array();
    for (const auto& [i, s] : r.history) hist.push_back({i, finite_or_null(s)});
    json best = nullptr;
    if (r.best) {
        best = record_to_json(*r.best);
        if (!with_timing) best["report"].erase("wall_ms");
    }
    json j = {{"best", best},
              {"history", hist},
              {"eval_count", r.eval_count},
              {"no_feasible", r.no_feasible},
              {"external_quarantined", r.external_quarantined}};
    if (with_timing) {
        j["wall_ms"] = r.wall_ms;
        j["run_dir"] = r.run_dir;
    }
    return j;
}

// ---------------------------------------------------------------- scoring

StrategyOutcome score_search_candidate(const StrategyConfig& s, const Problem& p, const json& inst,
                                       const std::optional<Construction>& incumbent, long budget_ms,
                                       std::uint64_t seed, long max_evals) {
    if (budget_ms < 1) throw std::invalid_argument("budget_ms must be >= 1");
    // run_strategy keeps the start unless something strictly better turns up, which is the
    // chaining rule; the clock check is cooperative so an overrun is at most one evaluation
    auto out = run_strategy(s, p, inst, incumbent, budget_ms, seed, max_evals);
    if (incumbent && !out.report.feasible) {
        auto r = evaluate(p, inst, *incumbent);
        if (rank_score(r) >= rank_score(out.report)) {
            out.best = *incumbent;
            out.report = r;
        }
    }
    return out;
}

double score_generalizer_candidate(const Problem& p, const Generator& g, const std::vector<json>& instances,
                                   const std::map<std::string, double>& table, long budget_ms, std::uint64_t seed,
                                   json* per_instance) {
    if (instances.empty()) throw std::invalid_argument("instance_list is empty");
    const long each = std::max(1L, budget_ms / static_cast<long>(instances.size()));
    double sum = 0;
    if (per_instance) *per_instance = json::array();
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const json& given = instances[i];
        json row = {{"instance", given}};
        double value = p.infeasibility_floor;
        try {
            Rng rng(split_seed(seed, i));
            const json inst0 = resolve_instance(p, given, nullptr);
            auto c = g(inst0, rng, each);
            if (!c) {
                row["error"] = "generator produced nothing";
            } else {
                const json inst = resolve_instance(p, given, &*c);
                auto r = evaluate(p, inst, *c);
                row["feasible"] = r.feasible;
                row["valid"] = r.valid;
                if (r.feasible && r.valid) {
                    row["raw"] = r.raw;
                    double ref = 1;
                    if (auto it = table.find(canonical_json(given)); it != table.end()) {
                        ref = it->second;
                        row["reference_from"] = "table";
                    } else if (p.baseline) {
                        try {
                            if (auto b = p.baseline(given)) {
                                auto br = evaluate(p, resolve_instance(p, given, &*b), *b);
                                if (br.feasible && br.raw != 0) {
                                    ref = br.raw;
                                    row["reference_from"] = "baseline";
                                }
                            }
                        } catch (const std::exception&) {
                        }
                    }
                    row["reference"] = ref;
                    const double norm = p.minimizes(inst) ? ref / r.raw : r.raw / ref;
                    if (std::isfinite(norm)) value = norm;
                } else if (!r.message.empty()) {
                    row["error"] = r.message;
                }
            }
        } catch (const std::exception& e) {
            row["error"] = e.what();
        }
        row["normalized"] = value;
        sum += value;
        if (per_instance) per_instance->push_back(row);
    }
    return sum / static_cast<double>(instances.size());
}

// ---------------------------------------------------------------- run loop

namespace {

struct Slot {
    CandidateRecord rec;
    std::optional<Construction> proposed;  // external construction, evaluated as is
    StrategyConfig strategy;
};

std::optional<StrategyConfig> pick_parent(const Archive& a, Rng& rng, long* parent_id) {
    std::vector<std::size_t> filled;
    for (std::size_t i = 0; i < a.niches.size(); ++i) {
        bool any = false;
        for (const auto& r : a.niches[i]) any = any || std::holds_alternative<StrategyConfig>(r.payload);
        if (any) filled.push_back(i);
    }
    if (filled.empty()) return std::nullopt;
    std::vector<const CandidateRecord*> pool;
    for (const auto& r : a.niches[filled[rng.below(filled.size())]])
        if (std::holds_alternative<StrategyConfig>(r.payload)) pool.push_back(&r);
    const CandidateRecord* x = pool[rng.below(pool.size())];
    const CandidateRecord* y = pool[rng.below(pool.size())];
    const CandidateRecord* w = (y->score > x->score || (y->score == x->score && y->id < x->id)) ? y : x;
    *parent_id = w->id;
    return std::get<StrategyConfig>(w->payload);
}

std::string derive_run_id(const ExperimentConfig& c) {
    json j = config_to_json(c);
    j.erase("runs_dir");
    j.erase("run_id");
    return c.problem_id + "-s" + std::to_string(c.master_seed) + "-" + json_hash16(j).substr(0, 8);
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& cfg) {
    if (auto why = config_problem(cfg); !why.empty()) throw std::invalid_argument(why);
    const auto t0 = Clock::now();
    const Problem& p = Registry::get().at(cfg.problem_id);
    const json inst = resolve_instance(p, cfg.instance, nullptr);
    const bool search = cfg.mode == RunMode::search;

    RunReport rep;
    std::ofstream log;
    fs::path dir;
    if (!cfg.runs_dir.empty()) {
        const std::string id = cfg.run_id.empty() ? derive_run_id(cfg) : cfg.run_id;
        dir = fs::path(cfg.runs_dir) / id;
        fs::create_directories(dir);
        write_atomic(dir / "config.json", config_to_json(cfg).dump(2) + "\n");
        log.open(dir / "log.ndjson", std::ios::trunc);
        if (!log) throw std::runtime_error("cannot open " + (dir / "log.ndjson").string());
        rep.run_dir = dir.string();
    }

    std::unique_ptr<ExternalProposer> ext;
    if (!cfg.proposer.external.empty())
        ext = std::make_unique<ExternalProposer>(cfg.proposer.external, cfg.proposer.external_timeout_ms);

    Archive archive(cfg.niche_count, cfg.archive_capacity);
    std::optional<Construction> incumbent;  // search mode

    if (search && cfg.start == "baseline") {
        // the seed is evaluated but is not one of the total_evals proposals
        const json params = cfg.baseline_params.empty() ? inst : cfg.baseline_params;
        if (auto b = p.baseline(params)) {
            CandidateRecord r;
            r.id = 0;
            r.payload = *b;
            r.construction = *b;
            r.report = evaluate(p, resolve_instance(p, cfg.instance, &*b), *b);
            r.score = rank_score(r.report);
            r.generation = 0;
            r.source = "baseline";
            r.strategy_evals = 1;
            if (admit(archive, r)) incumbent = *b;
        }
    }

    long next_id = 1, done = 0, generation = 0;
    while (done < cfg.total_evals) {
        const long n = std::min<long>(cfg.batch_size, cfg.total_evals - done);
        // proposals are drawn serially so the external endpoint sees one request at a time
        std::vector<Slot> slots(static_cast<std::size_t>(n));
        for (auto& s : slots) {
            auto& r = s.rec;
            r.id = next_id++;
            r.generation = generation;
            r.seed_used = split_seed(cfg.master_seed, static_cast<std::uint64_t>(r.id));
            Rng rng(r.seed_used ^ 0x5bd1e995ULL);
            long parent = -1;
            if (auto par = pick_parent(archive, rng, &parent)) {
                s.strategy = mutate_strategy(*par, rng);
                r.parent_ids = {parent};
            } else {
                s.strategy = cfg.proposer.strategy ? *cfg.proposer.strategy : default_strategy(p);
            }
            if (ext && !ext->quarantined()) {
                std::vector<std::pair<json, double>> top;
                for (const auto* t : archive.top(5)) top.emplace_back(record_to_json(*t)["payload"], t->score);
                const double inc_score = archive.incumbent ? archive.incumbent->score : 0.0;
                auto prop = ext->propose(propose_request(p, inst, incumbent, inc_score, top, cfg.eval_budget_ms,
                                                         r.seed_used),
                                         &p);
                if (prop.type == Proposal::Type::construction && search) {
                    s.proposed = *prop.construction;
                    r.source = "external";
                } else if (prop.type == Proposal::Type::strategy) {
                    s.strategy = *prop.strategy;
                    r.parent_ids.clear();
                    r.source = "external";
                }
            }
            if (s.proposed) r.payload = *s.proposed;
            else r.payload = s.strategy;
        }

        const std::optional<Construction> snapshot = incumbent;
        auto work = [&](Slot& s) {
            auto& r = s.rec;
            const auto w0 = Clock::now();
            try {
                if (s.proposed) {
                    r.construction = *s.proposed;
                    r.report = evaluate(p, resolve_instance(p, cfg.instance, &*s.proposed), *s.proposed);
                    r.strategy_evals = 1;
                } else if (search) {
                    auto out = score_search_candidate(s.strategy, p, inst, snapshot, cfg.eval_budget_ms, r.seed_used,
                                                      cfg.proposer.strategy_evals);
                    r.construction = std::move(out.best);
                    r.report = std::move(out.report);
                    r.strategy_evals = out.evals;
                } else {
                    const long cap = cfg.proposer.strategy_evals;
                    const StrategyConfig strat = s.strategy;
                    long evals = 0;
                    Generator g = [&](const json& in, Rng& rng, long budget) -> std::optional<Construction> {
                        std::optional<Construction> start;
                        if (p.baseline) {
                            try {
                                start = p.baseline(in);
                            } catch (const std::exception&) {
                            }
                        }
                        auto out = run_strategy(strat, p, in, start, budget, rng(), cap);
                        evals += out.evals;
                        return out.best;
                    };
                    json per;
                    const double mean = score_generalizer_candidate(p, g, cfg.instance_list, cfg.normalization_table,
                                                                    cfg.eval_budget_ms, r.seed_used, &per);
                    r.report = std::isfinite(mean) ? scored(mean, {{"instances", per}})
                                                   : infeasible("generalizer mean is not finite");
                    r.report.score = mean;
                    r.strategy_evals = evals;
                }
            } catch (const std::exception& e) {
                r.report = infeasible(std::string("candidate failed: ") + e.what());
            }
            r.score = rank_score(r.report);
            r.report.wall_ms = ms_since(w0);
        };

        const int workers = std::min<int>(cfg.worker_count, static_cast<int>(n));
        if (workers <= 1) {
            for (auto& s : slots) work(s);
        } else {
            std::vector<std::thread> pool;
            std::atomic<std::size_t> next{0};
            for (int w = 0; w < workers; ++w)
                pool.emplace_back([&] {
                    for (std::size_t i; (i = next.fetch_add(1)) < slots.size();) work(slots[i]);
                });
            for (auto& t : pool) t.join();
        }

        // single admission point, in id order
        for (auto& s : slots) {
            auto& r = s.rec;
            ++done;
            if (admit(archive, r) && search) incumbent = r.construction;
            rep.history.emplace_back(done, archive.incumbent ? archive.incumbent->score : -HUGE_VAL);
            if (log.is_open()) {
                json line = {{"id", r.id},
                             {"parents", r.parent_ids},
                             {"score", finite_or_null(r.score)},
                             {"feasible", r.report.feasible},
                             {"valid", r.report.valid},
                             {"wall_ms", r.report.wall_ms},
                             {"seed", r.seed_used},
                             {"generation", r.generation},
                             {"evals", r.strategy_evals},
                             {"source", r.source},
                             {"payload_kind", payload_kind(r)}};
                if (r.report.feasible) line["raw"] = r.report.raw;
                log << line.dump() << '\n';
                log.flush();
            }
        }
        ++generation;
    }

    rep.eval_count = done;
    rep.best = archive.incumbent;
    rep.no_feasible = !archive.incumbent.has_value();
    rep.external_quarantined = ext && ext->quarantined();
    rep.wall_ms = ms_since(t0);
    if (!dir.empty()) {
        json best = rep.best ? record_to_json(*rep.best) : json(nullptr);
        write_atomic(dir / "best.json", json({{"problem_id", p.id},
                                              {"instance", inst},
                                              {"no_feasible", rep.no_feasible},
                                              {"eval_count", rep.eval_count},
                                              {"best", best}})
                                                .dump(2) +
                                            "\n");
    }
    return rep;
}

}  // namespace evo
