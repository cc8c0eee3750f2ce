#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "mcao/mcdlp.hpp"
#include "mcao/model.hpp"
#include "mcao/model_io.hpp"
#include "mcao/stats.hpp"
#include "mcao/trace.hpp"
#include "support.hpp"

using namespace mcao;

namespace {

bool mentions(const ValidationReport& r, const std::string& needle) {
    return std::any_of(r.violations.begin(), r.violations.end(),
                       [&](const std::string& v) { return v.find(needle) != std::string::npos; });
}

Instance tabular_single(double p) {
    Instance inst;
    inst.T = 1;
    inst.items = {Item{}};
    make_unit_products(inst);
    inst.family = Family::up_to(1);
    CustomerType ty;
    ty.arrival = 1.0;
    ty.patience = 1;
    ty.revenue = {1.0};
    ty.choice.kind = ChoiceKind::Tabular;
    ty.choice.table[{0}] = {p};
    inst.types.push_back(ty);
    return inst;
}

}  // namespace

TEST_CASE("validate accepts a slack single-item instance") {
    CHECK(validate(tabular_single(0.5)).ok());
}

TEST_CASE("validate flags arrival mass above one") {
    Instance inst = tabular_single(0.5);
    inst.types[0].arrival = 0.6;
    inst.types.push_back(inst.types[0]);
    ValidationReport r = validate(inst);
    CHECK(mentions(r, "arrival mass exceeds 1"));
}

TEST_CASE("validate flags a tabular substitutability violation") {
    Instance inst;
    inst.T = 1;
    inst.items = {Item{}, Item{}};
    make_unit_products(inst);
    inst.family = Family::up_to(2);
    CustomerType ty;
    ty.arrival = 1.0;
    ty.patience = 1;
    ty.revenue = {1.0, 1.0};
    ty.choice.kind = ChoiceKind::Tabular;
    ty.choice.table[{0}] = {0.3};
    ty.choice.table[{1}] = {0.3};
    ty.choice.table[{0, 1}] = {0.4, 0.2};
    inst.types.push_back(ty);
    CHECK(mentions(validate(inst), "substitutability"));
}

TEST_CASE("validate flags a matching instance with a wide family") {
    Instance inst = tabular_single(0.5);
    inst.matching = true;
    inst.family = Family::up_to(2);
    CHECK(mentions(validate(inst), "|S| <= 1"));
}

TEST_CASE("validate requires exactly one patience mode") {
    Instance inst = tabular_single(0.5);
    inst.types[0].leave_prob = 0.5;
    CHECK(mentions(validate(inst), "exactly one of patience and leave_prob"));
}

TEST_CASE("MNL choice probabilities") {
    ChoiceModel c;
    c.weights = {1.0, 1.0};
    c.no_purchase = 1.0;
    CHECK(c.prob(0, {0, 1}) == doctest::Approx(1.0 / 3.0));
    ChoiceModel d;
    d.weights = {2.0};
    d.no_purchase = 2.0;
    CHECK(d.prob(0, {0}) == doctest::Approx(0.5));
    CHECK_THROWS_AS(c.prob(1, {0}), std::invalid_argument);
}

TEST_CASE("tabular lookup returns the stored value") {
    Instance inst = tabular_single(0.37);
    CHECK(inst.types[0].choice.prob(0, {0}) == 0.37);
}

TEST_CASE("MNL substitutability and normalization on random weights") {
    Rng rng = make_rng(11, 0);
    std::uniform_real_distribution<double> w(0.1, 5.0);
    for (int rep = 0; rep < 200; ++rep) {
        ChoiceModel c;
        for (int k = 0; k < 5; ++k) c.weights.push_back(w(rng));
        c.no_purchase = w(rng);
        Assortment S = {0, 2}, U = {0, 2, 3};
        CHECK(c.prob(0, S) >= c.prob(0, U));
        CHECK(c.prob(2, S) >= c.prob(2, U));
        const double none = c.no_purchase / (c.no_purchase + c.weights[0] + c.weights[2] + c.weights[3]);
        CHECK(c.mass(U) + none == doctest::Approx(1.0));
    }
}

TEST_CASE("family enumeration and counting") {
    CHECK(count_up_to(4, 2) == 10);
    CHECK(count_up_to(8, 4) == 162);
    Rng rng = make_rng(1, 0);
    Instance inst = testing::random_instance(rng, {.n = 4, .k = 2});
    auto fam = inst.enumerate_family();
    CHECK(fam.size() == 10);
    CHECK(std::is_sorted(fam.begin(), fam.end()));
    CHECK(inst.family_contains({1, 3}));
    CHECK_FALSE(inst.family_contains({0, 1, 2}));
}

TEST_CASE("split_inventory") {
    Instance inst = tabular_single(0.5);
    inst.types[0].choice.kind = ChoiceKind::Mnl;
    inst.types[0].choice.weights = {1.0};
    SUBCASE("one item with three units") {
        inst.items[0].inventory = 3;
        Instance s = split_inventory(inst);
        REQUIRE(s.n() == 3);
        for (int i = 0; i < 3; ++i) {
            CHECK(s.items[i].inventory == 1);
            CHECK(s.parent_of(i) == 0);
            CHECK(s.types[0].choice.weights[i] == 1.0);
            CHECK(s.types[0].revenue[i] == 1.0);
        }
    }
    SUBCASE("unit inventories are left alone") {
        Instance s = split_inventory(inst);
        CHECK(to_json(s) == to_json(inst));
    }
    SUBCASE("parent map for b = (2, 1)") {
        inst.items = {Item{2, -1}, Item{1, -1}};
        make_unit_products(inst);
        inst.types[0].revenue = {1.0, 2.0};
        inst.types[0].choice.weights = {1.0, 3.0};
        Instance s = split_inventory(inst);
        REQUIRE(s.n() == 3);
        CHECK(s.parent_of(0) == 0);
        CHECK(s.parent_of(1) == 0);
        CHECK(s.parent_of(2) == 1);
    }
}

TEST_CASE("split_inventory keeps the single-item LP optimum at patience 1") {
    // With one stage per customer the copies of an item aggregate back into
    // the original column, so both LPs describe the same polytope image.
    Rng rng = make_rng(5, 0);
    for (int rep = 0; rep < 5; ++rep) {
        testing::RandomSpec sp{.n = 3, .m = 2, .T = 4, .max_inventory = 3, .max_patience = 1, .matching = true};
        Instance inst = testing::random_instance(rng, sp);
        Instance s = split_inventory(inst);
        int units = 0, units2 = 0;
        for (auto& it : inst.items) units += it.inventory;
        for (auto& it : s.items) units2 += it.inventory;
        CHECK(units == units2);
        double a = solve_mcdlp(inst, McdlpVariant::SingleItemLP).opt;
        double b = solve_mcdlp(s, McdlpVariant::SingleItemLP).opt;
        CHECK(b == doctest::Approx(a).epsilon(1e-9));
    }
}

TEST_CASE("JSON round trip is lossless") {
    Rng rng = make_rng(3, 0);
    for (bool ns : {false, true}) {
        Instance inst = testing::random_instance(rng, {.n = 3, .m = 2, .T = 5, .nonstationary = ns});
        Instance back = instance_from_json(to_json(inst));
        CHECK(to_json(back) == to_json(inst));
        CHECK(validate(back).ok());
    }
    Instance tab = tabular_single(0.25);
    CHECK(to_json(instance_from_json(to_json(tab))) == to_json(tab));
}

TEST_CASE("running statistics merge like a single pass") {
    RunningStat all, a, b;
    for (int k = 0; k < 100; ++k) {
        double x = std::sin(k * 0.7) * 3 + k * 0.01;
        all.add(x);
        (k < 37 ? a : b).add(x);
    }
    a.merge(b);
    CHECK(a.n == all.n);
    CHECK(a.mean == doctest::Approx(all.mean).epsilon(1e-12));
    CHECK(a.variance() == doctest::Approx(all.variance()).epsilon(1e-10));
}

TEST_CASE("replica runs agree across execution modes") {
    auto fn = [](std::uint64_t r) {
        Rng rng = make_rng(42, r);
        ReplicaOutcome o;
        o.revenue = uniform01(rng);
        o.counters = {o.revenue > 0.5 ? 1.0 : 0.0};
        return o;
    };
    ReplicaSummary s = run_replicas(5000, fn, ExecMode::Serial);
    ReplicaSummary p = run_replicas(5000, fn, ExecMode::Parallel);
    CHECK(s.revenue.mean == p.revenue.mean);
    CHECK(s.revenue.m2 == p.revenue.m2);
    CHECK(s.counters == p.counters);
}

TEST_CASE("seeded streams are reproducible and distinct") {
    Rng a = make_rng(9, 1), b = make_rng(9, 1), c = make_rng(9, 2);
    CHECK(a() == b());
    CHECK(a() != c());
    CHECK(mix_seed(1, 2) != mix_seed(2, 1));
}

TEST_CASE("check_trace catches broken accounting") {
    Instance inst = tabular_single(1.0);
    PolicyTrace tr;
    tr.initial_inventory = {1};
    tr.final_inventory = {0};
    StepRecord s;
    s.t = 0;
    s.type = 0;
    s.available = {0};
    s.stages.push_back({{0}, {0}, 0});
    s.revenue = 1.0;
    tr.steps.push_back(s);
    tr.revenue = 1.0;
    CHECK(check_trace(inst, tr).empty());
    tr.revenue = 2.0;
    CHECK_FALSE(check_trace(inst, tr).empty());
    tr.revenue = 1.0;
    tr.final_inventory = {1};
    CHECK_FALSE(check_trace(inst, tr).empty());
}
