#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "mcao/simlab.hpp"
#include "support.hpp"

using namespace mcao;

namespace {

Instance two_products(double r0, double r1, int cap) {
    Instance inst;
    inst.T = 1;
    inst.items = {Item{}, Item{}};
    make_unit_products(inst);
    inst.family = Family::up_to(cap);
    CustomerType ty;
    ty.arrival = 1.0;
    ty.patience = 1;
    ty.revenue = {r0, r1};
    ty.choice.weights = {1.0, 1.0};
    ty.choice.no_purchase = 1.0;
    inst.types.push_back(ty);
    return inst;
}

void add_records(ChoiceData& d, const Assortment& S, int chosen, int times) {
    for (int r = 0; r < times; ++r) {
        d.offered.push_back(S);
        d.chosen.push_back(chosen);
        if (chosen < 0) d.outside_observed = true;
    }
}

// Root of a decreasing function on [lo, hi].
template <class F>
double bisect(F f, double lo, double hi) {
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (f(mid) > 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }

}  // namespace

TEST_CASE("greedy skips a dominated product") {
    // {1}: 10/2 = 5 beats {0,1}: 11/3 and {0}: 1/2.
    Instance inst = two_products(1.0, 10.0, 2);
    CHECK(greedy_assortment(inst, 0, {0, 1}) == Assortment{1});
    CHECK(greedy_assortment(inst, 0, {0}) == Assortment{0});
    CHECK(greedy_assortment(inst, 0, {}).empty());
    SUBCASE("ties go to the lexicographically first set") {
        Instance tie = two_products(1.0, 1.0, 1);
        CHECK(greedy_assortment(tie, 0, {0, 1}) == Assortment{0});
    }
    SUBCASE("zero revenue offers nothing") {
        Instance zero = two_products(0.0, 0.0, 2);
        CHECK(greedy_assortment(zero, 0, {0, 1}).empty());
    }
}

TEST_CASE("conservative policy shows only top fares") {
    HotelTemplate tpl = gen_hotel_like(3, 4);
    Instance inst = build_hotel_instance(tpl, {}, 5);
    for (int j = 0; j < inst.m(); ++j) CHECK(conservative_products(inst, j) == std::vector<int>{1, 3, 5, 7});
    auto ev = evaluate_baseline(inst, BaselineKind::Conservative, 200, 6);
    CHECK(ev.revenue.mean > 0.0);
    for (std::uint64_t r = 0; r < 50; ++r) {
        PolicyTrace tr = simulate_baseline(inst, BaselineKind::Conservative, 7, r, true);
        REQUIRE(check_trace(inst, tr).empty());
        for (const auto& s : tr.steps)
            for (const auto& g : s.stages)
                for (int k : g.displayed) CHECK(k % 2 == 1);
    }
    CHECK_THROWS_AS(simulate_baseline(two_products(1, 1, 1), BaselineKind::Conservative, 1, 0),
                    std::invalid_argument);
}

TEST_CASE("baselines respect the LP bound and stock") {
    Rng rng = make_rng(8, 0);
    Instance inst = testing::random_instance(rng, {.n = 4, .m = 3, .T = 8, .k = 2});
    double opt = solve_mcdlp(inst, McdlpVariant::McdlpR).opt;
    for (auto k : {BaselineKind::Greedy, BaselineKind::OfferAll}) {
        auto ev = evaluate_baseline(inst, k, 4000, 9);
        CHECK(verify_policy_upper_bound(opt, ev.revenue).consistent);
        CHECK(ev.sold_fraction.mean <= 1.0);
        for (std::uint64_t r = 0; r < 30; ++r) CHECK(check_trace(inst, simulate_baseline(inst, k, 10, r, true)).empty());
    }
    auto a = evaluate_baseline(inst, BaselineKind::Greedy, 500, 11, ExecMode::Serial);
    auto b = evaluate_baseline(inst, BaselineKind::Greedy, 500, 11, ExecMode::Parallel);
    CHECK(a.revenue.mean == b.revenue.mean);
}

TEST_CASE("hardness instance") {
    CHECK(hardness_limit() == doctest::Approx(0.51012).epsilon(1e-4));
    SUBCASE("n = 1 always sells") {
        Instance inst = gen_hardness_instance(1);
        CHECK(solve_mcdlp(inst, McdlpVariant::SingleItemLP).opt == doctest::Approx(1.0));
        auto est = hardness_sold_fraction(1, 500, 12);
        CHECK(est.mean == 1.0);
    }
    SUBCASE("shape for n = 6") {
        Instance inst = gen_hardness_instance(6);
        CHECK(validate(inst).ok());
        CHECK(inst.T == 6);
        CHECK(inst.m() == 6);
        for (const auto& ty : inst.types) {
            CHECK(ty.patience == 6);
            CHECK(ty.choice.prob(2, {2}) == doctest::Approx(1.0 / 6.0));
        }
    }
    SUBCASE("offer-all shortcut agrees with the general simulator") {
        Instance inst = gen_hardness_instance(8);
        auto fast = hardness_sold_fraction(8, 20000, 13);
        auto slow = evaluate_baseline(inst, BaselineKind::OfferAll, 20000, 14);
        CHECK(std::abs(fast.mean - slow.sold_fraction.mean) <=
              4 * std::hypot(fast.se(), slow.sold_fraction.se()));
    }
    CHECK_THROWS_AS(gen_hardness_instance(0), std::invalid_argument);
}

TEST_CASE("gap instances") {
    SUBCASE("M = 4") {
        Instance inst = gen_gap_instance(4);
        CHECK(inst.n() == 6);
        CHECK(inst.types[0].patience == 2);
        auto bases = gap_bases(4);
        REQUIRE(bases.size() == 4);
        std::vector<int> cover(6, 0);
        for (const auto& B : bases) {
            CHECK(B.size() == 3);
            for (int i : B) ++cover[i];
        }
        for (int c : cover) CHECK(c == 2);
        // 4 bases x 7 nonempty subsets, each of the 6 singletons counted twice.
        CHECK(inst.family.sets.size() == 22);
        CHECK(gap_greedy_sale_prob(4) == doctest::Approx(2.0 / 3.0));
        CHECK(gap_sale_bound(4) == doctest::Approx(1.25 - std::exp(-1.0)));
    }
    SUBCASE("large M keeps only the bases") {
        Instance inst = gen_gap_instance(20);
        CHECK(inst.n() == 190);
        CHECK(inst.family.sets.size() == 20);
        GapLp lp = gap_lp_opt(20);
        CHECK(lp.opt == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(lp.max_reduced_cost <= 1e-9);
    }
    SUBCASE("greedy sale probability stays under the bound") {
        for (int M : {4, 8, 20, 40}) CHECK(gap_greedy_sale_prob(M) <= gap_sale_bound(M));
        CHECK(gap_sale_bound(40) <= 0.565);
    }
    CHECK_THROWS_AS(gen_gap_instance(5), std::invalid_argument);
}

TEST_CASE("hotel template") {
    HotelTemplate tpl = gen_hotel_like(1);
    CHECK(tpl.rooms == std::vector<std::string>{"King", "Queen", "Suite", "Two-Double"});
    CHECK(tpl.low_fare == std::vector<double>{307, 304, 384, 306});
    CHECK(tpl.high_fare == std::vector<double>{361, 361, 496, 342});
    CHECK(std::accumulate(tpl.share.begin(), tpl.share.end(), 0.0) == doctest::Approx(1.0));
    CHECK(tpl.weights.size() == 40);
    for (const auto& w : tpl.weights) {
        CHECK(w.size() == 8);
        for (double v : w) CHECK(v > 0.0);
    }
    CHECK(gen_hotel_like(1).weights == tpl.weights);
    CHECK(gen_hotel_like(2).weights != tpl.weights);

    SUBCASE("inventory split by largest remainder") {
        auto inv = [&](double lf) {
            Instance inst = build_hotel_instance(tpl, {.loading_factor = lf}, 3);
            std::vector<int> out;
            for (const auto& it : inst.items) out.push_back(it.inventory);
            return out;
        };
        CHECK(inv(1.0) == std::vector<int>{21, 6, 5, 8});   // 20.8, 6, 5.2, 8
        CHECK(inv(2.0) == std::vector<int>{10, 3, 3, 4});   // 10.4, 3, 2.6, 4
    }
    SUBCASE("fares and no-purchase weight") {
        Instance inst = build_hotel_instance(tpl, {.scale_factor = 2.0}, 4);
        CHECK(validate(inst).ok());
        CHECK(inst.price_levels == 2);
        for (const auto& ty : inst.types) {
            for (int r = 0; r < 4; ++r) CHECK(ty.revenue[2 * r + 1] > ty.revenue[2 * r]);
            double vmax = *std::max_element(ty.choice.weights.begin(), ty.choice.weights.end());
            CHECK(ty.choice.no_purchase == doctest::Approx(2.0 * vmax));
        }
        Instance again = build_hotel_instance(tpl, {.scale_factor = 2.0}, 4);
        CHECK(again.types[7].revenue == inst.types[7].revenue);
    }
    SUBCASE("an unreachable high fare is clamped") {
        HotelTemplate t = tpl;
        t.low_fare = {1e6, 1e6, 1e6, 1e6};
        t.high_fare = {1, 1, 1, 1};
        Rng rng = make_rng(5, 0);
        std::vector<double> lo, hi;
        draw_fares(t, 1.0, rng, lo, hi);
        for (int r = 0; r < 4; ++r) CHECK(hi[r] == lo[r] + 1.0);
    }
}

TEST_CASE("MNL log-likelihood gradient matches finite differences") {
    Rng rng = make_rng(15, 0);
    ChoiceData d;
    std::uniform_int_distribution<int> pick(0, 3);
    for (int r = 0; r < 40; ++r) {
        Assortment S{0, 1, 2, 3};
        S.erase(S.begin() + pick(rng));
        int c = pick(rng);
        add_records(d, S, std::binary_search(S.begin(), S.end(), c) ? c : -1, 1);
    }
    REQUIRE(d.outside_observed);
    std::vector<double> u{0.3, -0.2, 0.1, 0.5}, g;
    for (double ridge : {0.0, 0.5}) {
        mnl_gradient(u, d, ridge, g);
        for (int k = 0; k < 4; ++k) {
            auto up = u, dn = u;
            up[k] += 1e-6;
            dn[k] -= 1e-6;
            double fd = (mnl_loglik(up, d, ridge) - mnl_loglik(dn, d, ridge)) / 2e-6;
            CHECK(g[k] == doctest::Approx(fd).epsilon(1e-5));
        }
    }
}

TEST_CASE("MNL fit recovers closed forms") {
    SUBCASE("always offered together: v_i = c_i / c_0") {
        ChoiceData d;
        add_records(d, {0, 1}, 0, 30);
        add_records(d, {0, 1}, 1, 15);
        add_records(d, {0, 1}, -1, 45);
        FitOptions opt;
        opt.shift_no_purchase = false;
        MnlFit f = fit_mnl_type(d, 2, opt);
        CHECK(f.converged);
        CHECK_FALSE(f.regularized);
        CHECK(f.model.weights[0] == doctest::Approx(30.0 / 45.0).epsilon(1e-5));
        CHECK(f.model.weights[1] == doctest::Approx(15.0 / 45.0).epsilon(1e-5));
        CHECK(f.model.no_purchase == 1.0);
        opt.shift_no_purchase = true;
        opt.scale_factor = 3.0;
        CHECK(fit_mnl_type(d, 2, opt).model.no_purchase == doctest::Approx(3.0 * 30.0 / 45.0).epsilon(1e-5));
    }
    SUBCASE("symmetric data gives equal weights") {
        ChoiceData d;
        add_records(d, {0, 1, 2}, 0, 10);
        add_records(d, {0, 1, 2}, 1, 10);
        add_records(d, {0, 1, 2}, 2, 10);
        MnlFit f = fit_mnl_type(d, 3);
        CHECK(f.model.weights[0] == doctest::Approx(f.model.weights[1]).epsilon(1e-6));
        CHECK(f.model.weights[1] == doctest::Approx(f.model.weights[2]).epsilon(1e-6));
    }
    SUBCASE("separable data falls back to the ridge optimum") {
        // Product 0 always bought when offered alone; product 1 half the time.
        ChoiceData d;
        add_records(d, {0}, 0, 10);
        add_records(d, {1}, 1, 5);
        add_records(d, {1}, -1, 5);
        FitOptions opt;
        opt.shift_no_purchase = false;
        MnlFit f = fit_mnl_type(d, 2, opt);
        CHECK(f.regularized);
        CHECK_FALSE(f.warning.empty());
        const double lam = opt.ridge;
        double u0 = bisect([&](double u) { return 10.0 * (1.0 - sigmoid(u)) - lam * u; }, 0.0, 50.0);
        double u1 = bisect([&](double u) { return 5.0 - 10.0 * sigmoid(u) - lam * u; }, -5.0, 5.0);
        CHECK(f.utilities[0] == doctest::Approx(u0).epsilon(1e-4));
        CHECK(f.utilities[1] == doctest::Approx(u1).epsilon(1e-4).scale(1.0));
    }
    SUBCASE("conditional data keeps the sum-zero normalization") {
        ChoiceData d;
        add_records(d, {0, 1}, 0, 20);
        add_records(d, {0, 1}, 1, 10);
        MnlFit f = fit_mnl_type(d, 2);
        CHECK(f.utilities[0] + f.utilities[1] == doctest::Approx(0.0).scale(1.0));
        CHECK(f.model.weights[0] / f.model.weights[1] == doctest::Approx(2.0).epsilon(1e-5));
    }
}

TEST_CASE("transaction parser") {
    std::istringstream in("segment,channel,offered,chosen\n"
                          "biz,web,0 2 1,2\n"
                          "\n"
                          "leisure,web,3,none\n"
                          "biz,web,1,\n");
    auto recs = read_transactions(in);
    REQUIRE(recs.size() == 3);
    CHECK(recs[0].features == std::vector<std::string>{"biz", "web"});
    CHECK(recs[0].offered == Assortment{0, 1, 2});
    CHECK(recs[0].chosen == 2);
    CHECK(recs[1].chosen == -1);
    CHECK(recs[2].chosen == -1);
    MnlFitResult fit = fit_mnl(recs, 4);
    CHECK(fit.type_keys.size() == 2);
    CHECK(fit.type_keys[0] == std::vector<std::string>{"biz", "web"});
    // Products never offered to a type get weight 0.
    CHECK(fit.fits[1].model.weights[0] == 0.0);
    CHECK(fit.fits[1].model.weights[3] > 0.0);

    auto fails = [](const std::string& text) {
        std::istringstream is(text);
        try {
            read_transactions(is);
        } catch (const std::runtime_error& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(fails("f,offered,chosen\na,0 1,2\n").find("line 2") != std::string::npos);
    CHECK(fails("f,offered,chosen\na,0 1\n").find("fields") != std::string::npos);
    CHECK(fails("f,offered,chosen\na,0 x,0\n").find("offered") != std::string::npos);
    CHECK(fails("f,offered,chosen\na,,none\n").find("empty") != std::string::npos);
    CHECK(fails("offered\n") != "");
}

TEST_CASE("sweep is deterministic and bounded by the LP") {
    HotelTemplate tpl = gen_hotel_like(1, 6);
    SweepSpec spec;
    spec.loading_factors = {1.0, 3.0};
    spec.replicas = 60;
    spec.seed = 9;
    std::vector<SweepPolicy> pols{SweepPolicy::Greedy, SweepPolicy::Conservative, SweepPolicy::Norepeat,
                                  SweepPolicy::NorepeatHomog};
    auto a = run_sweep(tpl, spec, pols, ExecMode::Serial);
    auto b = run_sweep(tpl, spec, pols, ExecMode::Parallel);
    REQUIRE(a.size() == 8);
    REQUIRE(b.size() == a.size());
    for (std::size_t r = 0; r < a.size(); ++r) {
        CHECK(a[r].policy == b[r].policy);
        CHECK(a[r].mean == b[r].mean);
        CHECK(a[r].status == "ok");
        CHECK(a[r].pct == doctest::Approx(100.0 * a[r].mean / a[r].lp_opt));
        CHECK(a[r].pct <= 100.0 + 3 * a[r].pct_se);
    }
    // Fares do not depend on the cell, so one LF shares its bound across policies.
    CHECK(a[0].lp_opt == a[3].lp_opt);
    std::ostringstream os;
    write_sweep_csv(os, a);
    std::string csv = os.str();
    CHECK(csv.rfind("loading_factor,patience,cap,scale_factor,policy,lp_opt,mean,se,pct,pct_se,status\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
}
