#include <doctest.h>

#include <httplib.h>

#include <cmath>
#include <thread>

#include "evo/problem.hpp"
#include "evo/strategies.hpp"

using namespace evo;

namespace {

const Problem& P(const std::string& id) { return Registry::get().at(id); }

// small instances keep the round-trip sweep quick
json small_instance(const Problem& p) {
    json inst = p.default_instance;
    if (p.id == "ff_kakeya" || p.id == "ff_nikodym") inst = {{"p", 3}, {"d", 2}};
    if (inst.contains("n") && inst["n"].is_number_integer() && inst["n"].get<long>() > 40) inst["n"] = 40;
    return inst;
}

}  // namespace

TEST_CASE("registered kernels apply to their payload kinds") {
    for (const auto& id : Registry::get().ids()) {
        const auto& p = P(id);
        CAPTURE(id);
        CHECK_FALSE(p.kernels.empty());
        const auto ok = kernels_for_kind(p.kind);
        for (const auto& k : p.kernels) CHECK(std::find(ok.begin(), ok.end(), k) != ok.end());
    }
}

TEST_CASE("kernel outputs round-trip through the codec") {
    Rng rng(17);
    for (const auto& id : Registry::get().ids()) {
        const auto& p = P(id);
        const json inst = small_instance(p);
        auto c = p.random(inst, rng);
        for (int it = 0; it < 40; ++it) {
            for (const auto& k : kernels_for_kind(p.kind)) {
                CAPTURE(id);
                CAPTURE(k);
                auto m = apply_kernel(k, c, rng, 0.1);
                json j = payload_to_json(m.payload);
                Construction back;
                REQUIRE_NOTHROW(back = construction_from_json(j));
                CHECK(payload_to_json(back.payload) == j);
                c = m;
            }
        }
    }
    Construction s(SignSeq{{1, -1}});
    CHECK_THROWS(apply_kernel("gauss", s, rng, 0.1));
}

TEST_CASE("strategy mutation stays valid") {
    const auto& p = P("hl_maximal");
    StrategyConfig s = default_strategy(p);
    s.decay = 1.0;
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        auto c = mutate_strategy(s, rng);
        CHECK(c.decay > 0);
        CHECK(c.decay <= 1);
    }
    StrategyConfig cur = s;
    for (int i = 0; i < 10000; ++i) {
        auto next = mutate_strategy(cur, rng);
        CHECK_FALSE(next == cur);
        double sum = 0;
        for (const auto& [k, w] : next.move_weights) sum += w;
        REQUIRE(sum > 0);
        REQUIRE(strategy_problem(next, &p).empty());
        cur = next;
    }
    auto j = strategy_to_json(cur);
    CHECK(strategy_from_json(j, &p) == cur);
    CHECK_THROWS(strategy_from_json({{"move_weights", {{"flip", 1.0}}}}, &p));
    CHECK_THROWS(strategy_from_json({{"move_weights", {{"gauss", 0.0}}}}, &p));
    CHECK_THROWS(strategy_from_json({{"temperature_schedule", {{"decay", 1.5}}}}, &p));
}

TEST_CASE("metropolis at zero temperature is strict improvement") {
    Rng rng(2), rng2(2);
    for (int i = 0; i < 5000; ++i) {
        double a = std::floor(rng2.uniform(-5, 5)), b = std::floor(rng2.uniform(-5, 5));
        CHECK(metropolis_accept(a, b, 0.0, rng) == (a > b));
    }
    // hot chains take every move eventually, cold ones refuse large losses
    int hot = 0, cold = 0;
    for (int i = 0; i < 2000; ++i) {
        hot += metropolis_accept(0.0, 1.0, 100.0, rng);
        cold += metropolis_accept(0.0, 1.0, 0.01, rng);
    }
    CHECK(hot > 1900);
    CHECK(cold == 0);
}

TEST_CASE("zero-weight kernels are never used") {
    const auto& p = P("edp");
    StrategyConfig s = default_strategy(p);
    for (auto& [k, w] : s.move_weights) w = (k == "flip" || k == "swap") ? 1.0 : 0.0;
    json inst = {{"D", 1}, {"n", 30}};
    Rng rng(1);
    auto start = p.random(inst, rng);
    auto out = run_strategy(s, p, inst, start, 60000, 3, 2000);
    // insert and delete would change the length
    CHECK(out.best.as<SignSeq>().a.size() == 30);
}

TEST_CASE("local search anchors") {
    SUBCASE("thomson n=2 reaches the antipodal pair") {
        const auto& p = P("thomson");
        StrategyConfig s = default_strategy(p);
        s.kind = StrategyKind::random_restart;
        s.restart_count = 1;
        auto out = run_strategy(s, p, {{"d", 3}, {"n", 2}}, std::nullopt, 60000, 11, 20000);
        CHECK(out.report.raw == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(std::fabs(out.report.raw - 0.5) < 1e-9);
    }
    SUBCASE("tammes n=3 by coordinate descent") {
        const auto& p = P("tammes");
        StrategyConfig s = default_strategy(p);
        s.kind = StrategyKind::coordinate_descent;
        auto out = run_strategy(s, p, {{"d", 3}, {"n", 3}}, std::nullopt, 5000, 4);
        CHECK(out.report.raw >= 1.732 - 1e-4);
    }
    SUBCASE("maxmin ratio with 4 planar points by annealing") {
        const auto& p = P("maxmin_ratio");
        StrategyConfig s = default_strategy(p);
        s.kind = StrategyKind::anneal;
        s.t0 = 1e-3;
        s.decay = 0.999;
        auto out = run_strategy(s, p, {{"d", 2}, {"n", 4}}, std::nullopt, 5000, 9);
        CHECK(out.report.raw <= 1.4143);
    }
    SUBCASE("no budget returns the start") {
        const auto& p = P("hl_maximal");
        auto start = *p.baseline({{"n", 10}});
        auto out = run_strategy(default_strategy(p), p, {}, start, 0, 1);
        CHECK(payload_to_json(out.best.payload) == payload_to_json(start.payload));
        CHECK(out.evals == 1);
    }
    SUBCASE("capped runs are reproducible") {
        const auto& p = P("tammes");
        auto a = run_strategy(default_strategy(p), p, {{"n", 6}}, std::nullopt, 60000, 42, 500);
        auto b = run_strategy(default_strategy(p), p, {{"n", 6}}, std::nullopt, 60000, 42, 500);
        CHECK(a.evals == 500);
        CHECK(payload_to_json(a.best.payload) == payload_to_json(b.best.payload));
        CHECK(a.report.raw == b.report.raw);
    }
}

TEST_CASE("external proposer over a subprocess") {
    const auto& p = P("sumdiff");
    json req = propose_request(p, p.default_instance, std::nullopt, 0, {}, 100, 1);
    CHECK(req["type"] == "propose");
    CHECK(req["problem"]["id"] == "sumdiff");
    CHECK(req["incumbent"].is_null());

    SUBCASE("skip") {
        ExternalProposer ep("while read l; do echo '{\"type\":\"skip\"}'; done", 5000);
        auto r = ep.propose(req, &p);
        CHECK(r.type == Proposal::Type::skip);
        CHECK(ep.consecutive_errors() == 0);
    }
    SUBCASE("construction") {
        ExternalProposer ep(
            "while read l; do echo '{\"type\":\"construction\",\"construction\":{\"kind\":\"intset\",\"elems\":"
            "[0,1,2,4,5,9,12,13,14,16,17,21,24,25,26,28,29]}}'; done",
            5000);
        auto r = ep.propose(req, &p);
        REQUIRE(r.type == Proposal::Type::construction);
        auto rep = evaluate(p, p.default_instance, *r.construction);
        CHECK(rep.raw == doctest::Approx(1.059793).epsilon(1e-6));
    }
    SUBCASE("quarantine after five malformed replies") {
        ExternalProposer ep("while read l; do echo 'not json'; done", 5000);
        for (int i = 0; i < 8; ++i) ep.propose(req, &p);
        CHECK(ep.quarantined());
        CHECK(ep.requests_sent() == 5);
    }
    SUBCASE("timeout is a skip") {
        ExternalProposer ep("sleep 5", 200);
        auto r = ep.propose(req, &p);
        CHECK(r.type == Proposal::Type::skip);
        CHECK(r.note == "timeout");
        CHECK_FALSE(ep.quarantined());
    }
    SUBCASE("wrong kind is an error") {
        ExternalProposer ep("while read l; do echo '{\"type\":\"construction\",\"construction\":{\"kind\":\"signs\",\"a\":[1]}}'; done", 5000);
        auto r = ep.propose(req, &p);
        CHECK(r.type == Proposal::Type::skip);
        CHECK(ep.consecutive_errors() == 1);
    }
}

TEST_CASE("external proposer over HTTP") {
    httplib::Server svr;
    int hits = 0;
    svr.Post("/propose", [&](const httplib::Request& rq, httplib::Response& rs) {
        ++hits;
        auto j = json::parse(rq.body);
        json reply = {{"type", "strategy"}, {"strategy", {{"kind", "coordinate_descent"}, {"step_scale", 0.2}}}};
        if (j["seed"] == 7) reply = {{"type", "error"}, {"message", "no"}};
        rs.set_content(reply.dump(), "application/json");
    });
    const int port = svr.bind_to_any_port("127.0.0.1");
    std::thread th([&] { svr.listen_after_bind(); });
    svr.wait_until_ready();

    const auto& p = P("tammes");
    ExternalProposer ep("http://127.0.0.1:" + std::to_string(port), 5000);
    auto r = ep.propose(propose_request(p, p.default_instance, std::nullopt, 0, {}, 100, 1), &p);
    REQUIRE(r.type == Proposal::Type::strategy);
    CHECK(r.strategy->kind == StrategyKind::coordinate_descent);
    CHECK(r.strategy->step_scale == 0.2);
    for (int i = 0; i < 6; ++i) ep.propose(propose_request(p, p.default_instance, std::nullopt, 0, {}, 100, 7), &p);
    CHECK(ep.quarantined());
    CHECK(hits == 6);
    svr.stop();
    th.join();

    ExternalProposer dead("http://127.0.0.1:1", 500);
    CHECK(dead.propose(propose_request(p, p.default_instance, std::nullopt, 0, {}, 100, 1), &p).type ==
          Proposal::Type::skip);
    CHECK(dead.consecutive_errors() == 1);
}
