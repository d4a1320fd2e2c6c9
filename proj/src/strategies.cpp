#include "evo/strategies.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <httplib.h>
#include <set>
#include <stdexcept>

namespace evo {

// ---------------------------------------------------------------- kernels

std::vector<std::string> kernels_for_kind(const std::string& kind) {
    if (kind == "signs") return {"flip", "swap", "insert", "delete", "block"};
    if (kind == "intset" || kind == "residue_set" || kind == "diff_basis") return {"flip", "insert", "delete", "nudge"};
    if (kind == "grid_cells") return {"flip", "nudge", "insert", "delete"};
    if (kind == "tiling") return {"insert", "delete", "nudge", "block"};
    if (kind == "ff_set") return {"delete", "insert", "flip"};
    if (kind == "whyper") return {"gauss", "nudge", "reweight", "flip"};
    if (kind == "joint_pmf") return {"gauss", "nudge", "reweight"};
    if (kind == "poses" || kind == "sphere_points" || kind == "plane_points") return {"gauss", "nudge", "block"};
    if (kind == "step") return {"gauss", "nudge", "reweight"};
    return {"gauss", "nudge"};
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) { return std::chrono::duration<double, std::milli>(Clock::now() - t0).count(); }

std::size_t pick(Rng& rng, std::size_t n) { return static_cast<std::size_t>(rng.below(n)); }

// real coordinates a kernel may move
std::vector<std::vector<double>*> real_fields(Payload& p) {
    return std::visit(
        [](auto& x) -> std::vector<std::vector<double>*> {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, StepFunction>) return {&x.heights};
            else if constexpr (std::is_same_v<T, HLInstance>) return {&x.y, &x.k};
            else if constexpr (std::is_same_v<T, EigenCombo>) return {&x.coeffs};
            else if constexpr (std::is_same_v<T, SpherePoints> || std::is_same_v<T, PlanePoints>) return {&x.coords};
            else if constexpr (std::is_same_v<T, KakeyaOffsets>) return {&x.x};
            else if constexpr (std::is_same_v<T, PoseSet> || std::is_same_v<T, DiskSet>) return {&x.vals};
            else if constexpr (std::is_same_v<T, RingInstance>) return {&x.u, &x.v};
            else if constexpr (std::is_same_v<T, Stack>) return {&x.positions};
            else if constexpr (std::is_same_v<T, WeightedHypergraph>) return {&x.weights};
            else if constexpr (std::is_same_v<T, JointPMF>) return {&x.probs};
            else return {};
        },
        p);
}

// pull a payload back inside what the parser accepts
void sanitize(Payload& p) {
    std::visit(
        [](auto& x) {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, StepFunction>) {
                if (x.nonneg)
                    for (auto& h : x.heights) h = std::max(h, 0.0);
            } else if constexpr (std::is_same_v<T, HLInstance>) {
                std::vector<std::pair<double, double>> yk;
                for (std::size_t i = 0; i < x.y.size(); ++i) yk.emplace_back(x.y[i], x.k[i]);
                std::sort(yk.begin(), yk.end());
                for (std::size_t i = 0; i < yk.size(); ++i) {
                    x.y[i] = yk[i].first;
                    x.k[i] = std::max(std::fabs(yk[i].second), 1e-9);
                    if (i > 0 && !(x.y[i] > x.y[i - 1])) x.y[i] = std::nextafter(x.y[i - 1], HUGE_VAL);
                }
            } else if constexpr (std::is_same_v<T, EigenCombo>) {
                if (std::all_of(x.coeffs.begin(), x.coeffs.end(), [](double v) { return v == 0; })) x.coeffs[0] = 1;
            } else if constexpr (std::is_same_v<T, DiskSet>) {
                for (std::size_t i = 2; i < x.vals.size(); i += 3) x.vals[i] = std::max(std::fabs(x.vals[i]), 1e-12);
            } else if constexpr (std::is_same_v<T, RingInstance>) {
                for (std::size_t i = 0; i < x.u.size(); ++i) {
                    x.u[i] = std::clamp(x.u[i], 0.0, 1.0);
                    x.v[i] = std::clamp(x.v[i], 0.0, 1.0 - x.u[i]);
                }
            } else if constexpr (std::is_same_v<T, WeightedHypergraph>) {
                for (auto& v : x.weights) v = std::max(v, 0.0);
            } else if constexpr (std::is_same_v<T, JointPMF>) {
                for (auto& v : x.probs) v = std::max(v, 0.0);
            }
        },
        p);
}


template <class V>
void toggle_sorted(std::vector<V>& v, const V& x) {
    auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it != v.end() && *it == x) {
        if (v.size() > 1) v.erase(it);
    } else {
        v.insert(it, x);
    }
}

template <class V>
bool insert_sorted(std::vector<V>& v, const V& x) {
    auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it != v.end() && *it == x) return false;
    v.insert(it, x);
    return true;
}

template <class V>
void erase_random(std::vector<V>& v, Rng& rng) {
    if (v.size() > 1) v.erase(v.begin() + static_cast<long>(pick(rng, v.size())));
}

long nudge_amount(Rng& rng, double step) {
    long span = std::max(1L, std::lround(step * 20));
    long d = 1 + static_cast<long>(rng.below(static_cast<std::uint64_t>(span)));
    return rng.below(2) ? d : -d;
}

// integer sets: flip / insert / delete / nudge inside [lo, hi]; `wrap` reduces mod (hi + 1)
void int_kernel(const std::string& k, std::vector<long>& e, long lo, long hi, bool wrap, Rng& rng, double step) {
    auto draw = [&] { return rng.range(lo, hi); };
    if (k == "flip") {
        toggle_sorted(e, draw());
    } else if (k == "insert") {
        for (int t = 0; t < 32 && !insert_sorted(e, draw()); ++t) {
        }
    } else if (k == "delete") {
        erase_random(e, rng);
    } else if (k == "nudge" && !e.empty()) {
        for (int t = 0; t < 8; ++t) {
            const std::size_t i = pick(rng, e.size());
            long x = e[i] + nudge_amount(rng, step);
            if (wrap) x = ((x - lo) % (hi - lo + 1) + (hi - lo + 1)) % (hi - lo + 1) + lo;
            if (x < lo || x > hi || std::binary_search(e.begin(), e.end(), x)) continue;
            e.erase(e.begin() + static_cast<long>(i));
            insert_sorted(e, x);
            break;
        }
    }
}

bool tile_free(const Tiling& t, const std::array<int, 4>& r, std::size_t skip) {
    if (r[0] < 1 || r[2] < 1 || r[1] > t.n || r[3] > t.n || r[0] > r[1] || r[2] > r[3]) return false;
    for (std::size_t i = 0; i < t.tiles.size(); ++i) {
        if (i == skip) continue;
        const auto& o = t.tiles[i];
        if (r[0] <= o[1] && o[0] <= r[1] && r[2] <= o[3] && o[2] <= r[3]) return false;
    }
    return true;
}

void tiling_kernel(const std::string& k, Tiling& t, Rng& rng) {
    if (k == "insert") {
        for (int tries = 0; tries < 32; ++tries) {
            int r = static_cast<int>(rng.range(1, t.n)), c = static_cast<int>(rng.range(1, t.n));
            std::array<int, 4> cell{r, r, c, c};
            if (tile_free(t, cell, t.tiles.size())) {
                t.tiles.push_back(cell);
                return;
            }
        }
    } else if (k == "delete") {
        if (!t.tiles.empty()) t.tiles.erase(t.tiles.begin() + static_cast<long>(pick(rng, t.tiles.size())));
    } else if ((k == "nudge" || k == "block") && !t.tiles.empty()) {
        for (int tries = 0; tries < 16; ++tries) {
            const std::size_t i = pick(rng, t.tiles.size());
            auto r = t.tiles[i];
            const int d = rng.below(2) ? 1 : -1;
            if (k == "nudge") {
                r[pick(rng, 4)] += d;  // one edge
            } else if (rng.below(2)) {
                r[0] += d;
                r[1] += d;
            } else {
                r[2] += d;
                r[3] += d;
            }
            if (tile_free(t, r, i)) {
                t.tiles[i] = r;
                return;
            }
        }
    }
}

std::array<int, 3> random_triple(int n, Rng& rng) {
    while (true) {
        std::array<int, 3> e{static_cast<int>(rng.below(static_cast<std::uint64_t>(n))), static_cast<int>(rng.below(static_cast<std::uint64_t>(n))),
                             static_cast<int>(rng.below(static_cast<std::uint64_t>(n)))};
        std::sort(e.begin(), e.end());
        if (!(e[0] == e[1] && e[1] == e[2])) return e;
    }
}

// move mass between two coordinates, never below zero
void transfer(std::vector<double>& w, Rng& rng, double step) {
    if (w.size() < 2) return;
    const std::size_t i = pick(rng, w.size());
    std::size_t j = pick(rng, w.size() - 1);
    if (j >= i) ++j;
    double d = step * rng.normal();
    d = std::clamp(d, -w[i], w[j]);
    w[i] += d;
    w[j] -= d;
}

bool real_kernel(const std::string& k, Payload& p, Rng& rng, double step) {
    auto fields = real_fields(p);
    std::size_t total = 0;
    for (auto* f : fields) total += f->size();
    if (total == 0) return false;
    if (k == "gauss") {
        for (auto* f : fields)
            for (auto& x : *f) x += step * rng.normal();
        return true;
    }
    if (k == "nudge") {
        std::size_t i = pick(rng, total);
        for (auto* f : fields) {
            if (i < f->size()) {
                (*f)[i] += step * rng.normal();
                break;
            }
            i -= f->size();
        }
        return true;
    }
    if (k == "reweight") {
        transfer(*fields[pick(rng, fields.size())], rng, step);
        return true;
    }
    return false;
}

// one point steps away from its nearest neighbour, with some sideways jitter
// every point steps away from its close neighbours at once; pairs near the minimum distance dominate
void spread_points(std::vector<double>& x, int dim, Rng& rng, double step) {
    const auto d = static_cast<std::size_t>(dim);
    const std::size_t n = d ? x.size() / d : 0;
    if (n < 2) return;
    std::vector<double> dist(n * n, 0.0);
    double dmin = HUGE_VAL;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double q = 0;
            for (std::size_t k = 0; k < d; ++k) q += (x[i * d + k] - x[j * d + k]) * (x[i * d + k] - x[j * d + k]);
            dist[i * n + j] = dist[j * n + i] = std::sqrt(q);
            dmin = std::min(dmin, dist[i * n + j]);
        }
    if (!(dmin > 0)) return;
    std::vector<double> f(x.size(), 0.0);
    double fmax = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double w = std::pow(dmin / dist[i * n + j], 32) / dist[i * n + j];
            for (std::size_t k = 0; k < d; ++k) f[i * d + k] += w * (x[i * d + k] - x[j * d + k]);
        }
        double q = 0;
        for (std::size_t k = 0; k < d; ++k) q += f[i * d + k] * f[i * d + k];
        fmax = std::max(fmax, std::sqrt(q));
    }
    if (!(fmax > 0)) return;
    const double a = step * rng.uniform() / fmax;
    for (std::size_t k = 0; k < x.size(); ++k) x[k] += a * f[k];
}

struct KernelVisitor {
    const std::string& k;
    Rng& rng;
    double step;

    void operator()(SignSeq& s) const {
        auto& a = s.a;
        if (a.empty()) {
            a.push_back(1);
            return;
        }
        if (k == "flip") {
            auto& x = a[pick(rng, a.size())];
            x = -x;
        } else if (k == "swap" && a.size() > 1) {
            std::swap(a[pick(rng, a.size())], a[pick(rng, a.size())]);
        } else if (k == "insert") {
            a.insert(a.begin() + static_cast<long>(pick(rng, a.size() + 1)), rng.below(2) ? 1 : -1);
        } else if (k == "delete") {
            erase_random(a, rng);
        } else if (k == "block") {
            const std::size_t len = 1 + pick(rng, std::max<std::size_t>(1, a.size() / 8));
            const std::size_t at = pick(rng, a.size() - std::min(len, a.size()) + 1);
            for (std::size_t i = at; i < std::min(a.size(), at + len); ++i) a[i] = -a[i];
        }
    }
    void operator()(IntSet& s) const {
        auto& e = s.elems;
        const long w = std::max<long>(2, static_cast<long>(e.size()));
        const long lo = e.empty() ? 0 : e.front() - w, hi = e.empty() ? w : e.back() + w;
        int_kernel(k, e, lo, hi, false, rng, step);
    }
    void operator()(ResidueSet& s) const { int_kernel(k, s.elems, 0, s.m - 1, true, rng, step); }
    void operator()(DiffBasis& b) const { int_kernel(k, b.elems, 0, b.n, false, rng, step); }
    void operator()(GridSubset& g) const {
        auto cell = [&] { return std::array<int, 2>{static_cast<int>(rng.range(1, g.n)), static_cast<int>(rng.range(1, g.n))}; };
        auto& c = g.cells;
        std::sort(c.begin(), c.end());
        if (k == "flip") {
            toggle_sorted(c, cell());
        } else if (k == "insert") {
            for (int t = 0; t < 32 && !insert_sorted(c, cell()); ++t) {
            }
        } else if (k == "delete") {
            erase_random(c, rng);
        } else if (k == "nudge" && !c.empty()) {
            for (int t = 0; t < 8; ++t) {
                const std::size_t i = pick(rng, c.size());
                auto x = c[i];
                x[pick(rng, 2)] += rng.below(2) ? 1 : -1;
                if (x[0] < 1 || x[1] < 1 || x[0] > g.n || x[1] > g.n || std::binary_search(c.begin(), c.end(), x)) continue;
                c.erase(c.begin() + static_cast<long>(i));
                insert_sorted(c, x);
                break;
            }
        }
    }
    void operator()(Tiling& t) const { tiling_kernel(k, t, rng); }
    void operator()(FFSet& f) const {
        auto point = [&] {
            std::vector<int> x(static_cast<std::size_t>(f.d));
            for (auto& v : x) v = static_cast<int>(rng.below(static_cast<std::uint64_t>(f.p)));
            return x;
        };
        auto& pts = f.points;
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        if (k == "flip") toggle_sorted(pts, point());
        else if (k == "insert")
            for (int t = 0; t < 32 && !insert_sorted(pts, point()); ++t) {
            }
        else if (k == "delete") erase_random(pts, rng);
    }
    void operator()(WeightedHypergraph& h) const {
        if (k == "flip" && !h.weights.empty()) {
            auto e = random_triple(static_cast<int>(h.weights.size()), rng);
            auto it = std::find(h.edges.begin(), h.edges.end(), e);
            if (it != h.edges.end()) h.edges.erase(it);
            else h.edges.push_back(e);
            std::sort(h.edges.begin(), h.edges.end());
            return;
        }
        Payload tmp = std::move(h);
        real_kernel(k, tmp, rng, step);
        h = std::move(std::get<WeightedHypergraph>(tmp));
    }
    void operator()(PoseSet& ps) const {
        if (k == "block" && ps.count() > 0) {
            const std::size_t i = pick(rng, ps.count()) * static_cast<std::size_t>(ps.stride());
            const int dims = ps.shape == PoseShape::cube ? 3 : 2;
            for (int j = 0; j < dims; ++j) ps.vals[i + static_cast<std::size_t>(j)] += step * rng.normal();
            return;
        }
        Payload tmp = std::move(ps);
        real_kernel(k, tmp, rng, step);
        ps = std::move(std::get<PoseSet>(tmp));
    }
    void operator()(SpherePoints& sp) const { points(sp); }
    void operator()(PlanePoints& pp) const { points(pp); }
    template <class T>
    void points(T& x) const {
        if (k == "block") {
            spread_points(x.coords, x.dim, rng, step);
            return;
        }
        Payload tmp = std::move(x);
        real_kernel(k, tmp, rng, step);
        x = std::move(std::get<T>(tmp));
    }
    template <class T>
    void operator()(T& x) const {
        Payload tmp = std::move(x);
        real_kernel(k, tmp, rng, step);
        x = std::move(std::get<T>(tmp));
    }
};

}  // namespace

Construction apply_kernel(const std::string& name, const Construction& c, Rng& rng, double step) {
    const auto allowed = kernels_for_kind(c.kind());
    if (std::find(allowed.begin(), allowed.end(), name) == allowed.end())
        throw std::invalid_argument("kernel " + name + " does not apply to " + c.kind());
    Construction out(c.payload);
    std::visit(KernelVisitor{name, rng, step}, out.payload);
    sanitize(out.payload);
    return out;
}

// ---------------------------------------------------------------- strategies

const char* strategy_kind_name(StrategyKind k) {
    switch (k) {
        case StrategyKind::anneal: return "anneal";
        case StrategyKind::coordinate_descent: return "coordinate_descent";
        case StrategyKind::random_restart: return "random_restart";
        case StrategyKind::kernel_mix: return "kernel_mix";
    }
    return "anneal";
}

namespace {

StrategyKind parse_kind(const std::string& s) {
    for (auto k : {StrategyKind::anneal, StrategyKind::coordinate_descent, StrategyKind::random_restart, StrategyKind::kernel_mix})
        if (s == strategy_kind_name(k)) return k;
    throw std::invalid_argument("unknown strategy kind " + s);
}

}  // namespace

json strategy_to_json(const StrategyConfig& s) {
    return {{"kind", strategy_kind_name(s.kind)},
            {"move_weights", s.move_weights},
            {"temperature_schedule", {{"t0", s.t0}, {"decay", s.decay}}},
            {"restart_count", s.restart_count},
            {"step_scale", s.step_scale}};
}

std::string strategy_problem(const StrategyConfig& s, const Problem* p) {
    double sum = 0;
    for (const auto& [k, w] : s.move_weights) {
        if (!(w >= 0) || !std::isfinite(w)) return "move weight for " + k + " must be finite and non-negative";
        const auto& pool = p ? p->kernels : kernel_names();
        if (std::find(pool.begin(), pool.end(), k) == pool.end())
            return "kernel " + k + (p ? " is not available for " + p->id : " is unknown");
        sum += w;
    }
    if (!(sum > 0)) return "move weights must sum to a positive value";
    if (!(s.t0 > 0) || !std::isfinite(s.t0)) return "t0 must be positive";
    if (!(s.decay > 0 && s.decay <= 1)) return "decay must lie in (0, 1]";
    if (s.restart_count < 0) return "restart_count must be non-negative";
    if (!(s.step_scale > 0) || !std::isfinite(s.step_scale)) return "step_scale must be positive";
    return {};
}

StrategyConfig strategy_from_json(const json& j, const Problem* p) {
    if (!j.is_object()) throw std::invalid_argument("strategy must be a JSON object");
    StrategyConfig s = p ? default_strategy(*p) : StrategyConfig{};
    if (j.contains("kind")) s.kind = parse_kind(j.at("kind").get<std::string>());
    if (j.contains("move_weights")) s.move_weights = j.at("move_weights").get<std::map<std::string, double>>();
    if (j.contains("temperature_schedule")) {
        const auto& t = j.at("temperature_schedule");
        if (t.contains("t0")) s.t0 = t.at("t0").get<double>();
        if (t.contains("decay")) s.decay = t.at("decay").get<double>();
    }
    if (j.contains("restart_count")) s.restart_count = j.at("restart_count").get<int>();
    if (j.contains("step_scale")) s.step_scale = j.at("step_scale").get<double>();
    if (auto why = strategy_problem(s, p); !why.empty()) throw std::invalid_argument(why);
    return s;
}

StrategyConfig default_strategy(const Problem& p) {
    StrategyConfig s;
    for (const auto& k : p.kernels) s.move_weights[k] = 1.0;
    if (s.move_weights.empty())
        for (const auto& k : kernels_for_kind(p.kind)) s.move_weights[k] = 1.0;
    return s;
}

StrategyConfig mutate_strategy(const StrategyConfig& parent, Rng& rng) {
    auto factor = [&] { return std::exp(0.25 * rng.normal()); };
    for (int attempt = 0; attempt < 64; ++attempt) {
        StrategyConfig c = parent;
        switch (rng.below(5)) {
            case 0: {
                auto k = static_cast<StrategyKind>((static_cast<int>(c.kind) + 1 + static_cast<int>(rng.below(3))) % 4);
                c.kind = k;
                break;
            }
            case 1: {
                if (c.move_weights.empty()) continue;
                auto it = std::next(c.move_weights.begin(), static_cast<long>(rng.below(c.move_weights.size())));
                it->second = it->second > 0 ? it->second * factor() : 1.0;
                break;
            }
            case 2:
                if (rng.below(2)) c.t0 *= factor();
                else c.decay = std::min(1.0, c.decay * factor());
                break;
            case 3:
                c.restart_count = c.restart_count == 0 || rng.below(2) ? c.restart_count + 1 : c.restart_count - 1;
                break;
            default:
                c.step_scale *= factor();
        }
        if (!(c == parent) && strategy_problem(c).empty()) return c;
    }
    StrategyConfig c = parent;
    c.kind = static_cast<StrategyKind>((static_cast<int>(c.kind) + 1) % 4);
    return c;
}

bool metropolis_accept(double candidate, double current, double temperature, Rng& rng) {
    if (candidate > current) return true;
    if (!(temperature > 0) || !std::isfinite(candidate)) return false;
    return rng.uniform() < std::exp((candidate - current) / temperature);
}

double rank_score(const EvaluationReport& r) {
    return r.feasible && std::isfinite(r.score) ? r.score : -HUGE_VAL;
}

StrategyOutcome run_strategy(const StrategyConfig& s, const Problem& p, const json& inst,
                             const std::optional<Construction>& start, long budget_ms, std::uint64_t seed,
                             long max_evals) {
    const auto t0 = Clock::now();
    Rng rng(seed);
    std::vector<std::string> names;
    std::vector<double> cum;
    double acc = 0;
    for (const auto& [k, w] : s.move_weights)
        if (w > 0 && std::find(p.kernels.begin(), p.kernels.end(), k) != p.kernels.end()) {
            names.push_back(k);
            cum.push_back(acc += w);
        }
    if (names.empty())
        for (const auto& k : p.kernels) {
            names.push_back(k);
            cum.push_back(acc += 1);
        }
    auto sample = [&]() -> const std::string& {
        const double u = rng.uniform() * acc;
        return names[static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin())];
    };

    StrategyOutcome out;
    bool have_best = false;
    auto eval = [&](const Construction& c) {
        ++out.evals;
        auto r = evaluate(p, inst, c);
        if (!have_best || rank_score(r) > rank_score(out.report)) {
            out.best = c;
            out.report = r;
            have_best = true;
        }
        return r;
    };
    auto out_of_time = [&] {
        if (ms_since(t0) >= static_cast<double>(budget_ms)) {
            out.stopped_by_clock = true;
            return true;
        }
        return false;
    };
    const long phases = 1 + s.restart_count;
    for (long phase = 0; phase < phases; ++phase) {
        if (max_evals >= 0 && out.evals >= max_evals) break;
        const long phase_end = max_evals < 0 ? -1 : out.evals + std::max(1L, (max_evals - out.evals) / (phases - phase));
        Construction cur = phase == 0 && start ? *start : p.random(inst, rng);
        if (p.repair && !(phase == 0 && start)) p.repair(inst, cur);
        auto cur_r = eval(cur);
        double step = s.step_scale, temp = s.t0;
        while ((phase_end < 0 || out.evals < phase_end) && !out_of_time()) {
            Construction cand = apply_kernel(sample(), cur, rng, step);
            if (p.repair) p.repair(inst, cand);
            auto r = eval(cand);
            const double a = rank_score(r), b = rank_score(cur_r);
            const bool better = a > b;
            bool accept;
            if (!std::isfinite(a) && !std::isfinite(b)) accept = true;  // wander until feasible
            else if (s.kind == StrategyKind::anneal) accept = metropolis_accept(a, b, temp, rng);
            else if (s.kind == StrategyKind::kernel_mix) accept = a >= b;
            else accept = better;
            step = std::clamp(better ? step * 1.5 : step * 0.97, s.step_scale * 1e-9, s.step_scale * 1e3);
            temp *= s.decay;
            if (accept) {
                cur = std::move(cand);
                cur_r = r;
            }
        }
        if (out.stopped_by_clock) break;
    }
    if (!have_best) {
        // zero budget: the start (or one random draw) is the answer
        Construction c = start ? *start : p.random(inst, rng);
        eval(c);
    }
    out.wall_ms = ms_since(t0);
    return out;
}

// ---------------------------------------------------------------- external proposer

json propose_request(const Problem& p, const json& inst, const std::optional<Construction>& incumbent,
                     double incumbent_score, const std::vector<std::pair<json, double>>& top, long budget_ms,
                     std::uint64_t seed) {
    json tops = json::array();
    for (const auto& [payload, score] : top) tops.push_back({{"payload", payload}, {"score", score}});
    json inc = nullptr;
    if (incumbent) inc = {{"construction", to_json(*incumbent)}, {"score", incumbent_score}};
    return {{"type", "propose"},
            {"problem", {{"id", p.id}, {"instance", inst}, {"doc", p.doc}}},
            {"incumbent", inc},
            {"top", tops},
            {"budget_ms", budget_ms},
            {"seed", seed}};
}

ExternalProposer::ExternalProposer(std::string endpoint, long timeout_ms, int max_errors)
    : endpoint_(std::move(endpoint)), timeout_ms_(timeout_ms), max_errors_(max_errors) {}

ExternalProposer::~ExternalProposer() { stop_process(); }

bool ExternalProposer::quarantined() const {
    std::lock_guard<std::mutex> g(mu_);
    return quarantined_;
}

long ExternalProposer::requests_sent() const {
    std::lock_guard<std::mutex> g(mu_);
    return sent_;
}

int ExternalProposer::consecutive_errors() const {
    std::lock_guard<std::mutex> g(mu_);
    return errors_;
}

namespace {

bool is_http(const std::string& e) { return e.rfind("http://", 0) == 0; }

// sentinel for "no reply in time"
const std::string kTimedOut = "\x01timeout";

}  // namespace

Proposal ExternalProposer::propose(const json& request, const Problem* p) {
    std::lock_guard<std::mutex> g(mu_);
    Proposal out;
    if (quarantined_) return out;
    ++sent_;
    auto fail = [&](const std::string& why) {
        out = Proposal{};
        out.note = why;
        if (++errors_ >= max_errors_) {
            quarantined_ = true;
            stop_process();
        }
        return out;
    };
    auto reply = exchange(request.dump());
    if (!reply) return fail("endpoint unreachable");
    if (*reply == kTimedOut) {
        out.note = "timeout";
        return out;
    }
    json j;
    try {
        j = json::parse(*reply);
    } catch (const std::exception&) {
        return fail("reply is not JSON");
    }
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) return fail("reply has no type");
    const auto type = j["type"].get<std::string>();
    try {
        if (type == "construction") {
            auto c = construction_from_json(j.at("construction"));
            if (p && c.kind() != p->kind) return fail("construction kind " + c.kind() + " does not fit " + p->id);
            out.type = Proposal::Type::construction;
            out.construction = std::move(c);
        } else if (type == "strategy") {
            out.type = Proposal::Type::strategy;
            out.strategy = strategy_from_json(j.at("strategy"), p);
        } else if (type == "skip") {
            out.type = Proposal::Type::skip;
        } else if (type == "error") {
            return fail("endpoint error: " + j.value("message", std::string()));
        } else {
            return fail("unknown reply type " + type);
        }
    } catch (const std::exception& e) {
        return fail(e.what());
    }
    errors_ = 0;
    return out;
}

std::optional<std::string> ExternalProposer::exchange(const std::string& line) {
    return is_http(endpoint_) ? exchange_http(line) : exchange_process(line);
}

std::optional<std::string> ExternalProposer::exchange_http(const std::string& body) {
    std::string rest = endpoint_.substr(7);
    while (!rest.empty() && rest.back() == '/') rest.pop_back();
    std::string host = rest;
    int port = 80;
    if (auto colon = rest.rfind(':'); colon != std::string::npos) {
        host = rest.substr(0, colon);
        port = std::stoi(rest.substr(colon + 1));
    }
    httplib::Client cli(host, port);
    const time_t sec = static_cast<time_t>(timeout_ms_ / 1000);
    const time_t usec = static_cast<time_t>((timeout_ms_ % 1000) * 1000);
    cli.set_connection_timeout(sec, usec);
    cli.set_read_timeout(sec, usec);
    cli.set_write_timeout(sec, usec);
    auto res = cli.Post("/propose", body, "application/json");
    if (!res) {
        if (res.error() == httplib::Error::Read || res.error() == httplib::Error::ConnectionTimeout) return kTimedOut;
        return std::nullopt;
    }
    if (res->status != 200) return std::nullopt;
    std::string b = res->body;
    while (!b.empty() && (b.back() == '\n' || b.back() == '\r')) b.pop_back();
    return b;
}

void ExternalProposer::start_process() {
    int in[2], out[2];
    if (pipe(in) != 0) throw std::runtime_error("pipe failed");
    if (pipe(out) != 0) {
        close(in[0]);
        close(in[1]);
        throw std::runtime_error("pipe failed");
    }
    signal(SIGPIPE, SIG_IGN);
    const pid_t pid = fork();
    if (pid < 0) throw std::runtime_error("fork failed");
    if (pid == 0) {
        dup2(in[0], 0);
        dup2(out[1], 1);
        close(in[0]);
        close(in[1]);
        close(out[0]);
        close(out[1]);
        execl("/bin/sh", "sh", "-c", endpoint_.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(in[0]);
    close(out[1]);
    pid_ = pid;
    to_child_ = in[1];
    from_child_ = out[0];
    fcntl(to_child_, F_SETFD, FD_CLOEXEC);
    fcntl(from_child_, F_SETFD, FD_CLOEXEC);
    pending_.clear();
}

void ExternalProposer::stop_process() {
    if (pid_ < 0) return;
    close(to_child_);
    close(from_child_);
    kill(pid_, SIGTERM);
    waitpid(pid_, nullptr, 0);
    pid_ = to_child_ = from_child_ = -1;
    pending_.clear();
}

std::optional<std::string> ExternalProposer::exchange_process(const std::string& line) {
    if (pid_ < 0) start_process();
    std::string msg = line + "\n";
    for (std::size_t off = 0; off < msg.size();) {
        ssize_t w = write(to_child_, msg.data() + off, msg.size() - off);
        if (w <= 0) {
            stop_process();
            return std::nullopt;
        }
        off += static_cast<std::size_t>(w);
    }
    const auto deadline = Clock::now() + std::chrono::milliseconds(timeout_ms_);
    char buf[4096];
    while (true) {
        if (auto nl = pending_.find('\n'); nl != std::string::npos) {
            std::string reply = pending_.substr(0, nl);
            pending_.erase(0, nl + 1);
            return reply;
        }
        const long left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
        if (left <= 0) {
            // a late reply would desynchronize the stream
            stop_process();
            return kTimedOut;
        }
        pollfd pfd{from_child_, POLLIN, 0};
        int rc = poll(&pfd, 1, static_cast<int>(std::min<long>(left, 1000)));
        if (rc < 0) {
            stop_process();
            return std::nullopt;
        }
        if (rc == 0) continue;
        ssize_t r = read(from_child_, buf, sizeof buf);
        if (r <= 0) {
            stop_process();
            return std::nullopt;
        }
        pending_.append(buf, static_cast<std::size_t>(r));
    }
}

}  // namespace evo
