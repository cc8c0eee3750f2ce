#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcao/model.hpp"
#include "mcao/rng.hpp"

namespace mcao {

struct Stage {
    Assortment intended;   // what the policy meant to show (after stripping)
    Assortment displayed;  // what the customer actually saw
    int purchased = -1;    // product id or -1
};

struct StepRecord {
    int t = 0;       // 0-based time step
    int type = -1;   // -1: no arrival
    std::vector<int> available;  // items in stock (and not retired) at the start of t
    std::vector<Stage> stages;
    double revenue = 0.0;
};

struct PolicyTrace {
    std::uint64_t replica = 0;
    std::vector<StepRecord> steps;
    std::vector<int> initial_inventory, final_inventory;
    double revenue = 0.0;
    std::vector<std::string> flags;
};

// Categorical draw over the types arriving at t, or -1 for no arrival.
int draw_type(const Instance& inst, int t, Rng& rng);

// Checks revenue accounting, inventory conservation, stock never negative and
// patience limits. Returns an empty string when the trace is consistent.
std::string check_trace(const Instance& inst, const PolicyTrace& tr);

}  // namespace mcao
