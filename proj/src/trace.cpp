#include "mcao/trace.hpp"

#include <algorithm>
#include <cmath>

namespace mcao {

int draw_type(const Instance& inst, int t, Rng& rng) {
    double u = uniform01(rng), acc = 0.0;
    for (int j = 0; j < inst.m(); ++j) {
        acc += inst.q(t, j);
        if (u < acc) return j;
    }
    return -1;
}

std::string check_trace(const Instance& inst, const PolicyTrace& tr) {
    std::vector<int> stock = tr.initial_inventory;
    std::vector<int> sold(inst.n(), 0);
    double revenue = 0.0;
    for (const auto& st : tr.steps) {
        double step_rev = 0.0;
        if (st.type < 0 && !st.stages.empty()) return "offers made without an arrival";
        if (st.type >= 0 && !inst.types[st.type].random_patience() &&
            int(st.stages.size()) > inst.types[st.type].patience)
            return "patience exceeded at t=" + std::to_string(st.t);
        int purchases = 0;
        for (const auto& sg : st.stages) {
            for (int k : sg.displayed)
                if (stock[inst.products[k].item] <= 0) return "displayed a sold-out product at t=" + std::to_string(st.t);
            if (sg.purchased >= 0) {
                if (!std::binary_search(sg.displayed.begin(), sg.displayed.end(), sg.purchased))
                    return "purchase outside the displayed set";
                int item = inst.products[sg.purchased].item;
                if (--stock[item] < 0) return "negative stock";
                ++sold[item];
                step_rev += inst.types[st.type].revenue[sg.purchased];
                ++purchases;
            }
        }
        if (purchases > 1) return "customer bought twice";
        if (std::abs(step_rev - st.revenue) > 1e-9) return "step revenue mismatch";
        revenue += step_rev;
    }
    if (std::abs(revenue - tr.revenue) > 1e-9 * std::max(1.0, std::abs(revenue))) return "total revenue mismatch";
    if (!tr.final_inventory.empty())
        for (int i = 0; i < inst.n(); ++i)
            if (tr.initial_inventory[i] - sold[i] != tr.final_inventory[i]) return "inventory not conserved";
    return {};
}

}  // namespace mcao
