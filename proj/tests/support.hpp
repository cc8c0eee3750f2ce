#pragma once

#include <algorithm>
#include <random>

#include "mcao/mcdlp.hpp"
#include "mcao/model.hpp"
#include "mcao/rng.hpp"

namespace mcao::testing {

struct RandomSpec {
    int n = 4, m = 3, T = 6;
    int k = 2;               // family cap
    int max_inventory = 1;
    int max_patience = 3;
    bool matching = false;
    bool homogeneous = false;     // revenues shared by all types
    bool nonstationary = false;   // arrival table instead of q_j
    bool integral = false;        // stationary with T q_j integral, then integralized
};

inline Instance random_instance(Rng& rng, const RandomSpec& s) {
    std::uniform_real_distribution<double> rev(1.0, 10.0), wt(0.2, 2.0), v0(0.5, 3.0), u01(0.0, 1.0);
    std::uniform_int_distribution<int> inv(1, s.max_inventory), pat(1, s.max_patience);
    Instance inst;
    inst.T = s.T;
    for (int i = 0; i < s.n; ++i) inst.items.push_back(Item{inv(rng), -1});
    make_unit_products(inst);
    inst.family = Family::up_to(s.matching ? 1 : s.k);
    inst.matching = s.matching;
    std::vector<double> shared(s.n);
    for (auto& r : shared) r = rev(rng);
    std::vector<int> counts(s.m, 1);
    if (s.integral) {
        // Integer expected arrivals per type, T q_j = counts[j], sum <= T.
        std::uniform_int_distribution<int> pick(0, s.m - 1);
        for (int extra = s.T - s.m; extra > 0; --extra)
            if (u01(rng) < 0.5) ++counts[pick(rng)];
    }
    for (int j = 0; j < s.m; ++j) {
        CustomerType ty;
        ty.arrival = s.integral ? double(counts[j]) / s.T : (0.5 + 0.5 * u01(rng)) / s.m;
        ty.patience = pat(rng);
        if (s.homogeneous) {
            ty.revenue = shared;
        } else {
            for (int i = 0; i < s.n; ++i) ty.revenue.push_back(rev(rng));
        }
        ty.choice.kind = ChoiceKind::Mnl;
        for (int i = 0; i < s.n; ++i) ty.choice.weights.push_back(wt(rng));
        ty.choice.no_purchase = v0(rng);
        inst.types.push_back(std::move(ty));
    }
    if (s.nonstationary) {
        inst.arrival_table.assign(s.T, std::vector<double>(s.m, 0.0));
        for (int t = 0; t < s.T; ++t) {
            double tot = 0.0;
            for (int j = 0; j < s.m; ++j) tot += inst.arrival_table[t][j] = u01(rng) + 0.05;
            const double scale = (0.6 + 0.4 * u01(rng)) / tot;
            for (int j = 0; j < s.m; ++j) inst.arrival_table[t][j] *= scale;
        }
    }
    if (s.integral) inst = integralize(inst);
    return inst;
}

}  // namespace mcao::testing
