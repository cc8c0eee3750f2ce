#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcao/mcdlp.hpp"
#include "mcao/model.hpp"
#include "mcao/stats.hpp"
#include "mcao/trace.hpp"

namespace mcao {

// gamma[0] = gamma_1 = 1, gamma[t] = gamma[t-1] - (1 - e^{-gamma[t-1]}) / T,
// up to gamma[T] = gamma_{T+1}.
struct GammaSchedule {
    int T = 1;
    std::vector<double> gamma;

    double at(int t1) const { return gamma[t1 - 1]; }  // 1-based gamma_t
    double last() const { return gamma.back(); }
    // (1/T) sum_{t=1}^T (1 - e^{-gamma_t})
    double ratio() const;
};

GammaSchedule gamma_schedule(int T);
double h_limit(double z);  // ln((e - 1) e^{-z} + 1)

// Positive-weight assortments per type. The single-item algorithm uses
// singletons only.
struct AttenPlan {
    std::vector<std::vector<PlanEntry>> entries;
    static AttenPlan from(const McdlpSolution& sol);
};

struct AttenuationOptions {
    std::size_t budget = 2000;
    bool warn_only = false;  // proceed when the hypothesis fails, voiding the guarantee
    ExecMode mode = ExecMode::Parallel;
};

// Per-step estimates from one batch of fresh replicas.
struct StepEstimates {
    std::vector<double> avail, avail_se;  // per item, at the start of t
    std::vector<double> offer, offer_se;  // per (type, entry, member): Pr[Offer | Type, Avail]
    std::vector<double> avail_count;      // per item, replicas where it was available
};

struct AttenuationState {
    GammaSchedule gamma;
    std::size_t budget = 0;
    // Flat index of (type, entry, member position) into the edge arrays.
    std::vector<std::vector<int>> offset;
    int flat_size = 0;
    std::vector<std::vector<double>> edge;    // [t][flat]
    std::vector<std::vector<double>> vertex;  // [t][item]
    std::vector<StepEstimates> estimates;     // [t]
    std::vector<std::vector<double>> prevertex, prevertex_se;  // [t][item]: Pr[available before retirement at t+1]
    int edge_flags = 0, vertex_flags = 0, unestimable = 0;
    bool guarantee = true;
    std::vector<std::string> diagnostics;

    int flat(int type, int entry, int pos) const { return offset[type][entry] + pos; }
};

// Validates the plan and instance, then builds an empty state (no steps yet).
AttenuationState init_attenuation(const Instance& inst, const AttenPlan& plan, const AttenuationOptions& opt);

// Re-simulates the policy defined by the first t steps of `state` with fresh
// replicas and estimates availability and conditional offer probabilities at
// step t (0-based). Throws std::invalid_argument for a zero budget.
StepEstimates estimate_probabilities(const Instance& inst, const AttenPlan& plan, const AttenuationState& state,
                                     int t, std::size_t budget, std::uint64_t seed,
                                     ExecMode mode = ExecMode::Parallel);

AttenuationState compute_attenuation(const Instance& inst, const AttenPlan& plan, const AttenuationOptions& opt,
                                     std::uint64_t seed);

struct SimOptions {
    bool record = false;         // fill the PolicyTrace
    bool count_accepts = false;  // per (t, flat) purchase counters
};

// One horizon of the attenuated policy. Counters (if given): availability at
// the start of each t (index t*n + i, t = 0..T), then optional accepts.
PolicyTrace simulate_attenuated(const Instance& inst, const AttenPlan& plan, const AttenuationState& state,
                                std::uint64_t seed, std::uint64_t replica, const SimOptions& sopt = {},
                                ReplicaOutcome* out = nullptr);

struct AttenEvaluation {
    MonteCarloEstimate revenue;
    std::vector<std::vector<double>> avail;  // [t][i], t = 0..T
    std::vector<std::vector<double>> accept; // [t][flat] when counted
    std::uint64_t replicas = 0;
};

AttenEvaluation evaluate_attenuated(const Instance& inst, const AttenPlan& plan, const AttenuationState& state,
                                    std::uint64_t replicas, std::uint64_t seed, bool count_accepts = false,
                                    ExecMode mode = ExecMode::Parallel);

// Single-item attenuated policy; x* from the single-item LP.
PolicyTrace run_algorithm1(const Instance& inst, const McdlpSolution& x, std::size_t budget, std::uint64_t seed);
// Assortment version with repeated offers; x* from MCDLP-R.
PolicyTrace run_algorithm6(const Instance& inst, const McdlpSolution& x, std::size_t budget, std::uint64_t seed);

// Hypothesis of the guarantee per type: sum of purchase masses over the plan
// support is at most 1, or patience covers the support.
bool attenuation_hypothesis(const Instance& inst, const AttenPlan& plan, int type);

}  // namespace mcao
