#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "mcao/colgen.hpp"
#include "support.hpp"

using namespace mcao;

namespace {

struct OwnedSubproblem {
    ChoiceModel choice;
    Subproblem sp;
};

// Random pricing problem over P products; sigma is zero when with_sigma is false.
OwnedSubproblem random_subproblem(Rng& rng, int P, int cap, bool with_sigma) {
    std::uniform_real_distribution<double> wv(-2.0, 6.0), sg(0.0, 0.6), wt(0.1, 2.0), v0(0.3, 3.0);
    OwnedSubproblem o;
    o.choice.kind = ChoiceKind::Mnl;
    for (int k = 0; k < P; ++k) o.choice.weights.push_back(wt(rng));
    o.choice.no_purchase = v0(rng);
    o.sp.num_products = P;
    o.sp.family = Family::up_to(cap);
    for (int k = 0; k < P; ++k) {
        o.sp.w.push_back(wv(rng));
        o.sp.sigma.push_back(with_sigma ? sg(rng) : 0.0);
    }
    return o;
}

// min mass over subsets of the first c items with sum wt >= a and sum vt <= b.
double exhaustive_min_mass(const std::vector<long>& wt, const std::vector<long>& vt, const std::vector<double>& mass,
                           int c, int a, int b) {
    double best = std::numeric_limits<double>::infinity();
    for (unsigned mask = 0; mask < (1u << c); ++mask) {
        long sw = 0, sv = 0;
        double sm = 0.0;
        for (int i = 0; i < c; ++i)
            if (mask >> i & 1u) {
                sw += wt[i];
                sv += vt[i];
                sm += mass[i];
            }
        if (sw >= a && sv <= b) best = std::min(best, sm);
    }
    return best;
}

double f_of(const Subproblem& sp, const Assortment& S) {
    double v = 0.0;
    for (int k : S) v += sp.w[k] * sp.choice->prob(k, S);
    return v;
}

double h_of(const Subproblem& sp, const Assortment& S) {
    double v = 0.0;
    for (int k : S) v += sp.sigma[k];
    return v;
}

}  // namespace

TEST_CASE("factor helpers") {
    CHECK(certified_alpha(3.0, 1.0) == doctest::Approx(1.0));
    CHECK(certified_alpha(2.0, 0.0) == 0.0);
    CHECK(std::isinf(certified_alpha(1.0, 1.0)));
    // f = (1 + 2/alpha) h exactly at the returned alpha.
    CHECK(5.0 == doctest::Approx((1.0 + 2.0 / certified_alpha(5.0, 2.0)) * 2.0));
    CHECK(fptas_factor(1.0, 0.1) == doctest::Approx(0.8));
    CHECK(fptas_hypothesis(1.0, 0.1));
    CHECK_FALSE(fptas_hypothesis(9.0, 0.1));
    CHECK(fptas_I(4, 0.1) == 36);
    CHECK(fptas_J(4, 0.1) == 44);
    for (auto k : {OracleKind::Brute, OracleKind::MnlExact, OracleKind::MnlFptas}) CHECK(parse_oracle(oracle_name(k)) == k);
    CHECK_THROWS_AS(parse_oracle("lp"), std::invalid_argument);
}

TEST_CASE("knapsack table matches exhaustive min-mass") {
    Rng rng = make_rng(40, 0);
    std::uniform_int_distribution<long> w(0, 6), v(1, 5);
    std::uniform_real_distribution<double> ms(0.0, 2.0);
    for (int rep = 0; rep < 40; ++rep) {
        const int n = 1 + rep % 6, I = 8, J = 10;
        std::vector<long> wt(n), vt(n);
        std::vector<double> mass(n);
        for (int i = 0; i < n; ++i) {
            wt[i] = w(rng);
            vt[i] = v(rng);
            mass[i] = ms(rng);
        }
        DpTable V = dp_layers(wt, vt, mass, I, J);
        for (int c = 0; c <= n; ++c)
            for (int a = 0; a <= I; ++a)
                for (int b = 0; b <= J; ++b) {
                    double want = exhaustive_min_mass(wt, vt, mass, c, a, b);
                    if (std::isinf(want)) CHECK(std::isinf(V[c][a][b]));
                    else CHECK(V[c][a][b] == doctest::Approx(want).epsilon(1e-12));
                }
    }
}

TEST_CASE("discretization rounds weights down and volumes up") {
    std::vector<long> wt, vt;
    fptas_discretize({1.0, 2.0}, {0.5, 1.0}, 1.0, 1.0, 0.5, wt, vt);
    // n w v / (eps gamma) = 2, 8; n v / (eps delta) = 2, 4.
    CHECK(wt == std::vector<long>{2, 8});
    CHECK(vt == std::vector<long>{2, 4});
    fptas_discretize({1.0}, {0.3}, 1.0, 1.0, 0.7, wt, vt);
    CHECK(wt[0] == 0);  // 0.3 / 0.7 floors to 0
    CHECK(vt[0] == 1);
}

TEST_CASE("exact repeated-case oracle matches brute force") {
    Rng rng = make_rng(41, 0);
    for (int rep = 0; rep < 200; ++rep) {
        const int P = 2 + rep % 7, cap = rep % 2 ? P : 1 + rep % 3;
        auto o = random_subproblem(rng, P, cap, false);
        o.sp.choice = &o.choice;
        OracleResult a = subproblem_mnl_repeated(o.sp), b = subproblem_bruteforce(o.sp);
        CHECK(a.value == doctest::Approx(b.value).epsilon(1e-10).scale(1.0));
        CHECK(int(a.set.size()) <= cap);
    }
}

TEST_CASE("exact oracle refuses overlap duals") {
    Rng rng = make_rng(42, 0);
    auto o = random_subproblem(rng, 3, 3, true);
    o.sp.choice = &o.choice;
    CHECK_THROWS_AS(subproblem_mnl_repeated(o.sp), std::invalid_argument);
}

TEST_CASE("FPTAS meets its factor against brute force") {
    Rng rng = make_rng(43, 0);
    int checked = 0;
    for (double eps : {0.2, 0.1}) {
        for (int rep = 0; rep < 30; ++rep) {
            const int P = 2 + rep % 5;
            auto o = random_subproblem(rng, P, P, true);
            o.sp.choice = &o.choice;
            OracleResult best = subproblem_bruteforce(o.sp);
            FptasStats st;
            OracleResult got = subproblem_mnl_fptas(o.sp, {.eps = eps}, &st);
            CHECK(got.value <= best.value + 1e-12);
            CHECK(got.value == doctest::Approx(subproblem_value(o.sp, got.set)).epsilon(1e-12));
            if (best.set.empty()) {
                CHECK(got.value == 0.0);
                continue;
            }
            double ac = certified_alpha(f_of(o.sp, best.set), h_of(o.sp, best.set));
            if (!fptas_hypothesis(ac, eps)) continue;
            ++checked;
            CHECK(got.value >= fptas_factor(ac, eps) * best.value - 1e-9);
            CHECK(st.dp_runs > 0);
        }
    }
    CHECK(checked > 20);
}

TEST_CASE("FPTAS with zero sigma defers to the exact oracle") {
    Rng rng = make_rng(44, 0);
    auto o = random_subproblem(rng, 5, 5, false);
    o.sp.choice = &o.choice;
    CHECK(subproblem_mnl_fptas(o.sp, {}).value == doctest::Approx(subproblem_bruteforce(o.sp).value));
    o.sp.family = Family::up_to(2);
    CHECK_THROWS_AS(subproblem_mnl_fptas(o.sp, {}), std::invalid_argument);
    o.sp.family = Family::up_to(5);
    CHECK_THROWS_AS(subproblem_mnl_fptas(o.sp, {.eps = 1.0}), std::invalid_argument);
}

TEST_CASE("pair pruning does not change the answer") {
    Rng rng = make_rng(45, 0);
    for (int rep = 0; rep < 20; ++rep) {
        auto o = random_subproblem(rng, 4, 4, true);
        o.sp.choice = &o.choice;
        auto a = subproblem_mnl_fptas(o.sp, {.eps = 0.2, .prune_pairs = true});
        auto b = subproblem_mnl_fptas(o.sp, {.eps = 0.2, .prune_pairs = false});
        CHECK(a.value >= b.value - 1e-12);
    }
}

TEST_CASE("column generation matches full enumeration") {
    Rng rng = make_rng(46, 0);
    for (int rep = 0; rep < 6; ++rep) {
        Instance inst = testing::random_instance(rng, {.n = 4, .m = 2, .T = 4, .k = 4, .integral = true});
        SUBCASE("repeated offers, exact oracle") {
            double full = solve_mcdlp(inst, McdlpVariant::McdlpR).opt;
            for (auto k : {OracleKind::Brute, OracleKind::MnlExact}) {
                ColgenResult cg = column_generate(inst, {.variant = McdlpVariant::McdlpR, .oracle = k});
                CHECK_FALSE(cg.partial);
                CHECK(cg.solution.opt == doctest::Approx(full).epsilon(1e-6));
                for (std::size_t r = 1; r < cg.objectives.size(); ++r) CHECK(cg.objectives[r] >= cg.objectives[r - 1] - 1e-9);
            }
        }
        SUBCASE("no repeats, brute and FPTAS") {
            double full = solve_mcdlp(inst, McdlpVariant::McdlpNr).opt;
            ColgenResult cg = column_generate(inst, {.variant = McdlpVariant::McdlpNr, .oracle = OracleKind::Brute});
            CHECK(cg.solution.opt == doctest::Approx(full).epsilon(1e-6));
            ColgenResult fp = column_generate(inst, {.variant = McdlpVariant::McdlpNr, .oracle = OracleKind::MnlFptas});
            CHECK_FALSE(fp.partial);
            CHECK(fp.solution.opt <= full + 1e-7);
            CHECK(fp.solution.opt >= fp.alpha_hat * full - 1e-7);
            CHECK(fp.alpha_hat <= 1.0);
        }
    }
}

TEST_CASE("oracle and variant mismatches are rejected") {
    Rng rng = make_rng(47, 0);
    Instance inst = testing::random_instance(rng, {.n = 3, .m = 2, .T = 3, .k = 2, .integral = true});
    CHECK_THROWS_AS(column_generate(inst, {.variant = McdlpVariant::McdlpNr, .oracle = OracleKind::MnlExact}),
                    std::invalid_argument);
    CHECK_THROWS_AS(column_generate(inst, {.variant = McdlpVariant::McdlpNr, .oracle = OracleKind::MnlFptas}),
                    std::invalid_argument);
    CHECK_THROWS_AS(column_generate(inst, {.variant = McdlpVariant::SingleItemLP}), std::invalid_argument);
}

TEST_CASE("duals have the documented layout") {
    Rng rng = make_rng(48, 0);
    Instance inst = testing::random_instance(rng, {.n = 3, .m = 2, .T = 3, .k = 2, .integral = true});
    McdlpSolution s = solve_mcdlp(inst, McdlpVariant::McdlpNr);
    DualBundle d = extract_duals(inst, s.model, s.lp);
    CHECK(d.zeta.size() == 3);
    CHECK(int(d.gamma.size()) == inst.m());
    CHECK(int(d.beta.size()) == inst.m());
    CHECK(d.sigma[1][2] == s.lp.y[s.model.lp.row_id("ovl[2,1]")]);
    CHECK(d.zeta[1] == s.lp.y[s.model.lp.row_id("inv[1]")]);
    // Every column of the optimum has reduced cost <= 0.
    for (int j = 0; j < inst.m(); ++j) {
        Subproblem sp = make_subproblem(inst, d, j);
        CHECK(subproblem_bruteforce(sp).value <= d.beta[j] + 1e-7);
    }
}
