#include <cmath>
#include <map>

#include "doctest.h"
#include "mcao/mcdlp.hpp"
#include "mcao/simlab.hpp"
#include "support.hpp"

using namespace mcao;

namespace {

// Coefficients of variable v keyed by row name.
std::map<std::string, double> column_of(const LpModel& lp, int v) {
    std::map<std::string, double> out;
    for (const auto& r : lp.rows)
        for (auto [k, a] : r.coefs)
            if (k == v) out[r.name] += a;
    return out;
}

// Direct re-derivation of one column from the instance data.
std::map<std::string, double> expected_column(const Instance& inst, McdlpVariant v, const Column& c, double& obj) {
    const auto& ty = inst.types[c.type];
    const double Q = inst.total_arrival(c.type);
    std::map<std::string, double> out;
    obj = 0.0;
    double mass = 0.0;
    for (int k : c.set) {
        double p = ty.choice.prob(k, c.set);
        obj += Q * ty.revenue[k] * p;
        mass += p;
        out["inv[" + std::to_string(inst.products[k].item) + "]"] += Q * p;
        if (has_overlap_rows(v)) out["ovl[" + std::to_string(k) + "," + std::to_string(c.type) + "]"] = 1.0;
    }
    out["sell[" + std::to_string(c.type) + "]"] = mass;
    out["pat[" + std::to_string(c.type) + "]"] = 1.0;
    return out;
}

}  // namespace

TEST_CASE("toy single-item instance has OPT 1") {
    Instance inst;
    inst.T = 1;
    inst.items = {Item{}};
    make_unit_products(inst);
    inst.family = Family::up_to(1);
    CustomerType ty;
    ty.arrival = 1.0;
    ty.patience = 1;
    ty.revenue = {2.0};
    ty.choice.weights = {1.0};
    inst.types.push_back(ty);
    CHECK(solve_mcdlp(inst, McdlpVariant::SingleItemLP).opt == doctest::Approx(1.0));
}

TEST_CASE("gap family with M = 4") {
    Instance inst = gen_gap_instance(4);
    // x(S) = 1/2 on every base satisfies each row.
    const double p = 1.0 / 6.0;
    auto bases = gap_bases(4);
    std::vector<double> load(inst.n(), 0.0);
    double sell = 0.0, pat = 0.0, obj = 0.0;
    for (const auto& B : bases) {
        for (int i : B) load[i] += 0.5 * p;
        sell += 0.5 * B.size() * p;
        pat += 0.5;
        obj += 0.5 * B.size() * p;
    }
    for (double l : load) CHECK(l <= 1.0);
    CHECK(sell <= 1.0 + 1e-12);
    CHECK(pat <= 2.0);
    CHECK(obj == doctest::Approx(1.0));
    McdlpSolution s = solve_mcdlp(inst, McdlpVariant::McdlpNrs);
    CHECK(s.opt == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("gap LP optimum is 1 for even M") {
    for (int M : {4, 6, 8}) {
        CHECK(solve_mcdlp(gen_gap_instance(M), McdlpVariant::McdlpNrs).opt == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(gap_lp_opt(M).opt == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("hardness instance LP value is n") {
    McdlpSolution s = solve_mcdlp(gen_hardness_instance(5), McdlpVariant::SingleItemLP);
    CHECK(s.opt == doctest::Approx(5.0));
}

TEST_CASE("variant preconditions") {
    Rng rng = make_rng(4, 0);
    Instance inst = testing::random_instance(rng, {.n = 3, .m = 2, .T = 4, .k = 2});
    CHECK_THROWS_AS(check_variant(inst, McdlpVariant::SingleItemLP), std::invalid_argument);
    CHECK_THROWS_AS(check_variant(inst, McdlpVariant::McdlpNr), std::invalid_argument);
    CHECK_THROWS_AS(check_variant(inst, McdlpVariant::McdlpNrs), std::invalid_argument);
    CHECK_THROWS_AS(check_variant(inst, McdlpVariant::MmcdlpNr), std::invalid_argument);
    CHECK_NOTHROW(check_variant(inst, McdlpVariant::McdlpR));
    CHECK_THROWS_AS(parse_variant("nope"), std::invalid_argument);
}

TEST_CASE("oversized family asks for column generation") {
    Rng rng = make_rng(4, 1);
    Instance inst = testing::random_instance(rng, {.n = 24, .m = 1, .T = 1, .k = 12});
    CHECK_THROWS_AS(build(inst, McdlpVariant::McdlpR), std::length_error);
}

TEST_CASE("columns match a direct re-derivation") {
    Rng rng = make_rng(6, 0);
    for (auto v : {McdlpVariant::McdlpR, McdlpVariant::McdlpNr}) {
        Instance inst = testing::random_instance(rng, {.n = 4, .m = 2, .T = 5, .k = 2, .integral = true});
        McdlpModel md = build(inst, v);
        REQUIRE(int(md.columns.size()) == md.lp.num_vars());
        REQUIRE(md.columns.size() == inst.m() * inst.family_size());
        for (int k = 0; k < md.lp.num_vars(); ++k) {
            double obj = 0.0;
            auto want = expected_column(inst, v, md.columns[k], obj);
            auto got = column_of(md.lp, k);
            CHECK(md.lp.c[k] == doctest::Approx(obj));
            REQUIRE(got.size() == want.size());
            for (const auto& [name, a] : want) CHECK(got[name] == doctest::Approx(a));
        }
        for (int i = 0; i < inst.n(); ++i) CHECK(md.lp.rows[md.lp.row_id("inv[" + std::to_string(i) + "]")].rhs == 1.0);
    }
}

TEST_CASE("columns are ordered type-major, then lexicographically") {
    Rng rng = make_rng(6, 1);
    Instance inst = testing::random_instance(rng, {.n = 3, .m = 2, .T = 3, .k = 3});
    McdlpModel md = build(inst, McdlpVariant::McdlpR);
    for (std::size_t k = 1; k < md.columns.size(); ++k) {
        const auto &a = md.columns[k - 1], &b = md.columns[k];
        CHECK((a.type < b.type || (a.type == b.type && a.set < b.set)));
    }
}

TEST_CASE("repeats relax the no-repeat LP") {
    Rng rng = make_rng(7, 0);
    for (int rep = 0; rep < 6; ++rep) {
        Instance inst = testing::random_instance(rng, {.n = 4, .m = 2, .T = 4, .k = 2, .integral = true});
        double r = solve_mcdlp(inst, McdlpVariant::McdlpR).opt;
        double nr = solve_mcdlp(inst, McdlpVariant::McdlpNr).opt;
        CHECK(r >= nr - 1e-7);
    }
}

TEST_CASE("geometric patience enters through its mean") {
    Rng rng = make_rng(7, 1);
    Instance inst = testing::random_instance(rng, {.n = 3, .m = 1, .T = 2, .k = 1});
    inst.types[0].patience = 0;
    inst.types[0].leave_prob = 0.25;
    McdlpModel md = build(inst, McdlpVariant::McdlpR);
    CHECK(md.lp.rows[md.lp.row_id("pat[0]")].rhs == doctest::Approx(4.0));
}

TEST_CASE("integralize splits stationary types") {
    Instance inst;
    inst.T = 4;
    inst.items = {Item{}};
    make_unit_products(inst);
    CustomerType ty;
    ty.arrival = 0.5;
    ty.patience = 1;
    ty.revenue = {1.0};
    ty.choice.weights = {1.0};
    inst.types.push_back(ty);
    Instance out = integralize(inst);
    REQUIRE(out.m() == 2);
    for (int j = 0; j < 2; ++j) CHECK(out.total_arrival(j) == doctest::Approx(1.0));
    inst.types[0].arrival = 0.3;
    CHECK_THROWS_AS(integralize(inst), std::invalid_argument);
}

TEST_CASE("upper-bound verdicts") {
    SUBCASE("greedy respects the LP bound") {
        Rng rng = make_rng(9, 0);
        Instance inst = testing::random_instance(rng, {.n = 4, .m = 2, .T = 6, .k = 2});
        double opt = solve_mcdlp(inst, McdlpVariant::McdlpR).opt;
        auto ev = evaluate_baseline(inst, BaselineKind::Greedy, 4000, 3);
        CHECK(verify_policy_upper_bound(opt, ev.revenue).consistent);
    }
    SUBCASE("a policy that oversells is caught") {
        // One unit item, two sure buyers at price 1: OPT is 1, selling twice earns 2.
        Instance inst;
        inst.T = 2;
        inst.items = {Item{}};
        make_unit_products(inst);
        inst.family = Family::up_to(1);
        CustomerType ty;
        ty.arrival = 1.0;
        ty.patience = 1;
        ty.revenue = {1.0};
        ty.choice.kind = ChoiceKind::Tabular;
        ty.choice.table[{0}] = {1.0};
        inst.types.push_back(ty);
        double opt = solve_mcdlp(inst, McdlpVariant::SingleItemLP).opt;
        CHECK(opt == doctest::Approx(1.0));
        RunningStat rs;
        for (int r = 0; r < 100; ++r) rs.add(2.0);
        CHECK_FALSE(verify_policy_upper_bound(opt, MonteCarloEstimate::from(rs)).consistent);
    }
    SUBCASE("zero revenue") {
        RunningStat rs;
        for (int r = 0; r < 10; ++r) rs.add(0.0);
        Verdict v = verify_policy_upper_bound(0.0, MonteCarloEstimate::from(rs));
        CHECK(v.consistent);
        CHECK(v.bound == 0.0);
    }
}
