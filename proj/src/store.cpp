#include "evo/store.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "evo/canon.hpp"
#include "evo/certify.hpp"

namespace evo {

namespace fs = std::filesystem;

namespace {

std::string now_utc() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_atomic(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << text;
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
    }
    fs::rename(tmp, path);
}

json read_json(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    return json::parse(in);
}

// shortest text that reads back to the same double
std::string num(double x) { return json(x).dump(); }

struct LogLine {
    long id = 0;
    long generation = 0;
    bool feasible = false;
    std::optional<double> score;
    double wall_ms = 0;
};

std::vector<LogLine> read_log(const std::string& run_dir) {
    const fs::path p = fs::path(run_dir) / "log.ndjson";
    std::ifstream in(p);
    if (!in) throw std::runtime_error("missing run log " + p.string());
    std::vector<LogLine> out;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            LogLine l;
            l.id = j.at("id").get<long>();
            l.generation = j.value("generation", 0L);
            l.feasible = j.at("feasible").get<bool>();
            if (!j.at("score").is_null()) l.score = j.at("score").get<double>();
            l.wall_ms = j.at("wall_ms").get<double>();
            out.push_back(l);
        } catch (const std::exception& e) {
            throw std::runtime_error("corrupt run log " + p.string() + " line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

double quantile(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    const double f = pos - static_cast<double>(i);
    if (i + 1 >= sorted.size()) return sorted.back();
    return sorted[i] + f * (sorted[i + 1] - sorted[i]);
}

}  // namespace

json best_record_to_json(const BestRecord& r) {
    json j = {{"problem_id", r.problem_id},
              {"instance", r.instance},
              {"construction", r.construction},
              {"score", r.score},
              {"raw", r.raw},
              {"certificate", r.certificate ? *r.certificate : json(nullptr)},
              {"provenance",
               {{"run_id", r.provenance.run_id},
                {"seed", r.provenance.seed},
                {"timestamp", r.provenance.timestamp},
                {"version", r.provenance.version}}}};
    return j;
}

BestRecord best_record_from_json(const json& j) {
    BestRecord r;
    r.problem_id = j.at("problem_id").get<std::string>();
    r.instance = j.at("instance");
    r.construction = j.at("construction");
    r.score = j.at("score").get<double>();
    r.raw = j.value("raw", r.score);
    if (j.contains("certificate") && !j.at("certificate").is_null()) r.certificate = j.at("certificate");
    if (j.contains("provenance")) {
        const auto& p = j.at("provenance");
        r.provenance.run_id = p.value("run_id", std::string());
        r.provenance.seed = p.value("seed", std::uint64_t{0});
        r.provenance.timestamp = p.value("timestamp", std::string());
        r.provenance.version = p.value("version", std::string(kEvaluatorVersion));
    }
    return r;
}

std::string repo_root() {
    const char* env = std::getenv("EVOCONSTRUCT_REPO");
    return env && *env ? env : "repo";
}

std::string repo_path(const std::string& root, const std::string& problem_id, const json& instance) {
    return (fs::path(root) / problem_id / (json_hash16(instance) + ".json")).string();
}

BestRecord make_best_record(const std::string& problem_id, const json& instance, const json& construction,
                            int bits, Provenance prov) {
    const Problem* p = Registry::get().find(problem_id);
    if (!p) throw std::invalid_argument("unknown problem '" + problem_id + "'");
    const Construction c = construction_from_json(construction);
    const json inst = resolve_instance(*p, instance, &c);
    const auto rep = evaluate(*p, inst, c);
    if (!rep.feasible) throw std::runtime_error("infeasible construction: " + rep.message);
    BestRecord r;
    r.problem_id = problem_id;
    r.instance = inst;
    r.construction = construction;
    r.score = rep.score;
    r.raw = rep.raw;
    if (bits > 0) {
        const auto cert = certify(problem_id, inst, c, bits);
        const double slack = 1e-9 * std::max(1.0, std::fabs(rep.raw));
        if (!(std::stod(cert.lo) <= rep.raw + slack && std::stod(cert.hi) >= rep.raw - slack))
            throw std::runtime_error("certificate [" + cert.lo + ", " + cert.hi + "] misses the score " + num(rep.raw));
        r.certificate = certificate_json(problem_id, c, cert);
    }
    if (prov.timestamp.empty()) prov.timestamp = now_utc();
    r.provenance = prov;
    return r;
}

RepoAddResult repo_add(const std::string& root, const BestRecord& r) {
    RepoAddResult out;
    out.path = repo_path(root, r.problem_id, r.instance);
    const fs::path path = out.path;
    if (fs::exists(path)) {
        const auto old = best_record_from_json(read_json(path));
        out.previous_score = old.score;
        if (!(r.score > old.score)) {
            out.message = "refused: score " + num(r.score) + " does not beat stored " + num(old.score);
            return out;
        }
        const fs::path hist = path.parent_path() / "history";
        fs::create_directories(hist);
        const std::string stem = path.stem().string();
        int k = 1;
        fs::path dest;
        do dest = hist / (stem + "." + std::to_string(k++) + ".json");
        while (fs::exists(dest));
        fs::copy_file(path, dest);
        out.archived = dest.string();
    }
    write_atomic(path, best_record_to_json(r).dump(2) + "\n");
    out.stored = true;
    out.message = out.previous_score ? "replaced " + num(*out.previous_score) + " with " + num(r.score)
                                     : "stored " + num(r.score);
    return out;
}

std::optional<BestRecord> repo_show(const std::string& root, const std::string& problem_id, const json& instance) {
    const Problem* p = Registry::get().find(problem_id);
    if (!p) throw std::invalid_argument("unknown problem '" + problem_id + "'");
    const fs::path path = repo_path(root, problem_id, resolve_instance(*p, instance, nullptr));
    if (!fs::exists(path)) return std::nullopt;
    return best_record_from_json(read_json(path));
}

std::vector<VerifyIssue> repo_verify(const std::string& root, const std::string& problem_id, std::size_t* checked) {
    std::vector<VerifyIssue> issues;
    std::size_t n = 0;
    if (!fs::exists(root)) {
        if (checked) *checked = 0;
        return issues;
    }
    for (const auto& dir : fs::directory_iterator(root)) {
        if (!dir.is_directory()) continue;
        if (!problem_id.empty() && dir.path().filename() != problem_id) continue;
        for (const auto& f : fs::directory_iterator(dir.path())) {
            if (!f.is_regular_file() || f.path().extension() != ".json") continue;
            ++n;
            const std::string path = f.path().string();
            try {
                const auto rec = best_record_from_json(read_json(f.path()));
                if (rec.problem_id != dir.path().filename().string())
                    issues.push_back({path, "stored under the wrong problem"});
                if (f.path().stem().string() != json_hash16(rec.instance))
                    issues.push_back({path, "file name does not match the instance hash"});
                int bits = 0;
                if (rec.certificate) bits = rec.certificate->value("bits", kDefaultBits);
                const auto fresh = make_best_record(rec.problem_id, rec.instance, rec.construction, bits, rec.provenance);
                if (fresh.score != rec.score)
                    issues.push_back({path, "stored score " + num(rec.score) + ", evaluator gives " + num(fresh.score)});
            } catch (const std::exception& e) {
                issues.push_back({path, e.what()});
            }
        }
    }
    if (checked) *checked = n;
    return issues;
}

std::string report_csv(const std::string& run_dir) {
    const auto lines = read_log(run_dir);
    std::ostringstream os;
    os << "eval_index,best_score,wall_ms,feasible_count\n";
    std::optional<double> best;
    long feasible = 0, i = 0;
    for (const auto& l : lines) {
        ++i;
        if (l.feasible) ++feasible;
        if (l.feasible && l.score && (!best || *l.score > *best)) best = l.score;
        os << i << ',' << (best ? num(*best) : "") << ',' << num(l.wall_ms) << ',' << feasible << '\n';
    }
    return os.str();
}

std::string report_plotdata(const std::string& run_dir) {
    const auto lines = read_log(run_dir);
    std::map<long, std::vector<const LogLine*>> by_gen;
    for (const auto& l : lines) by_gen[l.generation].push_back(&l);
    std::ostringstream os;
    os << "generation,count,feasible,min,q25,median,q75,max,best_so_far\n";
    std::optional<double> best;
    for (const auto& [g, ls] : by_gen) {
        std::vector<double> s;
        for (const auto* l : ls)
            if (l->feasible && l->score) s.push_back(*l->score);
        std::sort(s.begin(), s.end());
        if (!s.empty() && (!best || s.back() > *best)) best = s.back();
        os << g << ',' << ls.size() << ',' << s.size();
        if (s.empty()) {
            os << ",,,,,";
        } else {
            for (double q : {0.0, 0.25, 0.5, 0.75, 1.0}) os << ',' << num(quantile(s, q));
        }
        os << ',' << (best ? num(*best) : "") << '\n';
    }
    return os.str();
}

}  // namespace evo
