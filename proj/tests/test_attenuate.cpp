#include <cmath>

#include "doctest.h"
#include "mcao/attenuate.hpp"
#include "mcao/simlab.hpp"
#include "support.hpp"

using namespace mcao;

namespace {

double sd(double p, double n) { return std::sqrt(std::max(p * (1 - p), 1e-12) / n); }

Instance toy(int T, double p) {
    Instance inst;
    inst.T = T;
    inst.items = {Item{}};
    make_unit_products(inst);
    inst.family = Family::up_to(1);
    inst.matching = true;
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

TEST_CASE("gamma schedule") {
    CHECK(gamma_schedule(1).last() == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(h_limit(1.0) == doctest::Approx(std::log(2.0 - std::exp(-1.0))).epsilon(1e-12));
    GammaSchedule g = gamma_schedule(100000);
    CHECK(g.at(1) == 1.0);
    CHECK(g.last() <= h_limit(1.0));
    CHECK(g.last() >= h_limit(1.0) - 1e-3);
    CHECK(g.ratio() >= 1.0 - h_limit(1.0));
    for (std::size_t t = 1; t < g.gamma.size(); ++t) REQUIRE(g.gamma[t] < g.gamma[t - 1]);
    double prev = 0.0;
    for (int T : {1, 2, 3, 5, 10, 30, 100, 1000, 10000}) {
        double last = gamma_schedule(T).last();
        CHECK(last <= h_limit(1.0));
        CHECK(last >= prev);
        CHECK(last > 0.0);
        prev = last;
    }
}

TEST_CASE("first-step accept rate on the one-item toy") {
    Instance inst = toy(1, 0.5);
    McdlpSolution sol = solve_mcdlp(inst, McdlpVariant::SingleItemLP);
    REQUIRE(sol.x_single(0, 0) == doctest::Approx(1.0));
    AttenPlan plan = AttenPlan::from(sol);
    AttenuationState st = compute_attenuation(inst, plan, {}, 1);
    const std::uint64_t R = 400000;
    AttenEvaluation ev = evaluate_attenuated(inst, plan, st, R, 2, true);
    const double want = (1.0 - std::exp(-1.0)) * 0.5;
    CHECK(std::abs(ev.accept[0][0] - want) <= 3 * sd(want, R));
}

TEST_CASE("availability estimates") {
    Instance inst = toy(2, 0.5);
    AttenPlan plan = AttenPlan::from(solve_mcdlp(inst, McdlpVariant::SingleItemLP));
    AttenuationOptions opt;
    opt.budget = 20000;
    AttenuationState st = compute_attenuation(inst, plan, opt, 3);
    SUBCASE("nothing is sold before the first step") {
        CHECK(st.estimates[0].avail[0] == 1.0);
        CHECK(st.estimates[0].avail_se[0] == 0.0);
    }
    SUBCASE("second step before and after retirement") {
        // Before retirement: 1 - 0.316. With T = 2 the target gamma_2 is
        // 1 - (1 - 1/e)/2, the same number, so retirement is almost idle.
        const double pre = 1.0 - (1.0 - std::exp(-1.0)) * 0.5;
        CHECK(std::abs(st.prevertex[0][0] - pre) <= 3 * sd(pre, opt.budget));
        CHECK(st.gamma.at(2) == doctest::Approx(pre).epsilon(1e-12));
        CHECK(std::abs(st.estimates[1].avail[0] - pre) <= 4 * sd(pre, opt.budget));
    }
    SUBCASE("zero budget is rejected") {
        CHECK_THROWS_AS(estimate_probabilities(inst, plan, st, 0, 0, 1), std::invalid_argument);
    }
}

TEST_CASE("assortment version on one symmetric pair") {
    Instance inst;
    inst.T = 1;
    inst.items = {Item{}, Item{}};
    make_unit_products(inst);
    inst.family = Family::explicit_list({{0, 1}});
    inst.repeated_offers_allowed = true;
    CustomerType ty;
    ty.arrival = 1.0;
    ty.patience = 1;
    ty.revenue = {1.0, 1.0};
    ty.choice.weights = {1.0, 1.0};
    ty.choice.no_purchase = 1.0;
    inst.types.push_back(ty);
    McdlpSolution sol = solve_mcdlp(inst, McdlpVariant::McdlpR);
    REQUIRE(sol.plan[0].size() == 1);
    const double x = sol.plan[0][0].x;
    AttenPlan plan = AttenPlan::from(sol);
    AttenuationState st = compute_attenuation(inst, plan, {}, 4);
    const std::uint64_t R = 300000;
    AttenEvaluation ev = evaluate_attenuated(inst, plan, st, R, 5, true);
    const double want = (1.0 - std::exp(-1.0)) * (1.0 / 3.0) * x;
    for (int u = 0; u < 2; ++u) CHECK(std::abs(ev.accept[0][st.flat(0, 0, u)] - want) <= 3 * sd(want, R));
    PolicyTrace tr = run_algorithm6(inst, sol, 500, 6);
    CHECK(check_trace(inst, tr).empty());
}

TEST_CASE("singleton families give the single-item policy") {
    Rng rng = make_rng(7, 0);
    Instance inst = testing::random_instance(rng, {.n = 3, .m = 2, .T = 4, .k = 1, .max_patience = 3});
    for (auto& ty : inst.types) ty.patience = 3;  // full patience keeps the hypothesis
    Instance rep = inst;
    rep.repeated_offers_allowed = true;
    inst.matching = true;
    McdlpSolution a = solve_mcdlp(inst, McdlpVariant::SingleItemLP);
    McdlpSolution b = solve_mcdlp(rep, McdlpVariant::McdlpR);
    CHECK(a.opt == doctest::Approx(b.opt).epsilon(1e-9));
    AttenPlan pa = AttenPlan::from(a), pb = AttenPlan::from(b);
    AttenuationState sa = compute_attenuation(inst, pa, {}, 8), sb = compute_attenuation(rep, pb, {}, 9);
    auto ea = evaluate_attenuated(inst, pa, sa, 100000, 10), eb = evaluate_attenuated(rep, pb, sb, 100000, 11);
    CHECK(std::abs(ea.revenue.mean - eb.revenue.mean) <=
          4 * std::sqrt(ea.revenue.se() * ea.revenue.se() + eb.revenue.se() * eb.revenue.se()));
}

TEST_CASE("traces never show unavailable items and respect patience") {
    Rng rng = make_rng(12, 0);
    Instance inst = testing::random_instance(rng, {.n = 4, .m = 2, .T = 6, .k = 2, .max_patience = 4});
    inst.repeated_offers_allowed = true;
    for (auto& ty : inst.types) ty.patience = 20;
    McdlpSolution sol = solve_mcdlp(inst, McdlpVariant::McdlpR);
    AttenPlan plan = AttenPlan::from(sol);
    AttenuationOptions opt;
    opt.budget = 500;
    AttenuationState st = compute_attenuation(inst, plan, opt, 13);
    for (std::uint64_t r = 0; r < 300; ++r) {
        PolicyTrace tr = simulate_attenuated(inst, plan, st, 14, r, {.record = true});
        REQUIRE(check_trace(inst, tr).empty());
        for (const auto& s : tr.steps)
            for (const auto& g : s.stages)
                for (int k : g.displayed)
                    CHECK(std::binary_search(s.available.begin(), s.available.end(), inst.products[k].item));
    }
}

TEST_CASE("hypothesis violations") {
    Instance inst = toy(1, 0.5);
    inst.types[0].choice.kind = ChoiceKind::Mnl;
    inst.items = {Item{}, Item{}, Item{}};
    make_unit_products(inst);
    inst.types[0].revenue = {1, 1, 1};
    inst.types[0].choice.weights = {5, 5, 5};
    inst.types[0].choice.no_purchase = 1;
    McdlpSolution sol = solve_mcdlp(inst, McdlpVariant::SingleItemLP);
    AttenPlan plan = AttenPlan::from(sol);
    // Sum of p over the support exceeds 1 with patience 1 when two items are in the plan.
    if (plan.entries[0].size() > 1) {
        CHECK_THROWS_AS(compute_attenuation(inst, plan, {}, 1), std::invalid_argument);
        AttenuationOptions opt;
        opt.warn_only = true;
        AttenuationState st = compute_attenuation(inst, plan, opt, 1);
        CHECK_FALSE(st.guarantee);
        CHECK(simulate_attenuated(inst, plan, st, 1, 0).flags.size() == 1);
    }
    Instance multi = toy(1, 0.5);
    multi.items[0].inventory = 2;
    CHECK_THROWS_AS(compute_attenuation(multi, AttenPlan::from(solve_mcdlp(multi, McdlpVariant::SingleItemLP)), {}, 1),
                    std::invalid_argument);
}

TEST_CASE("availability follows gamma on a random matching instance") {
    Rng rng = make_rng(15, 0);
    Instance inst = testing::random_instance(rng, {.n = 4, .m = 3, .T = 8, .matching = true});
    for (auto& ty : inst.types) ty.patience = 4;
    AttenPlan plan = AttenPlan::from(solve_mcdlp(inst, McdlpVariant::SingleItemLP));
    AttenuationState st = compute_attenuation(inst, plan, {}, 16);
    const std::uint64_t R = 20000;
    AttenEvaluation ev = evaluate_attenuated(inst, plan, st, R, 17);
    for (int t = 0; t <= inst.T; ++t)
        for (int i = 0; i < inst.n(); ++i) {
            const double g = st.gamma.gamma[t];
            // The 2000-replica factors carry their own error on top of the evaluation noise.
            CHECK(std::abs(ev.avail[t][i] - g) <= 4 * (sd(g, R) + sd(g, st.budget)));
        }
}

TEST_CASE("hardness instance with n = 50 clears the ratio") {
    Instance inst = gen_hardness_instance(50);
    McdlpSolution sol = solve_mcdlp(inst, McdlpVariant::SingleItemLP);
    AttenPlan plan = AttenPlan::from(sol);
    AttenuationOptions opt;
    opt.budget = 1000;
    AttenuationState st = compute_attenuation(inst, plan, opt, 18);
    AttenEvaluation ev = evaluate_attenuated(inst, plan, st, 4000, 19);
    CHECK(ev.revenue.mean / sol.opt >= 0.51 - 0.02);
}
