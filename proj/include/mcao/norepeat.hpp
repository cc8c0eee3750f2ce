#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcao/mcdlp.hpp"
#include "mcao/model.hpp"
#include "mcao/stats.hpp"
#include "mcao/trace.hpp"

namespace mcao {

enum class NoRepeatVariant {
    FirstArrival,    // first arrival of each type only, deterministic patience
    Modified,        // every arrival, homogeneous revenues
    RandomPatience,  // first arrival only, geometric patience
};

const char* norepeat_name(NoRepeatVariant v);

double alpha_star();                              // (3 + sqrt 17) / 2
double norepeat_ratio_bound(double alpha);        // (1 - 1/e)(1/alpha)(1 - 3/(2 alpha) - 2/(3 alpha^2))
double imatch_bound(double alpha);                // 1/(2 alpha); also bounds Seen
double timeout_cmatch_bound(double alpha);        // 1/(2 alpha) + 2/(3 alpha^2)
double modified_offer_factor(double alpha);       // (1 - 3/(2 alpha)) / alpha, 1/6 at alpha = 3
double modified_item_bound(double sum_p, double alpha = 3.0);  // 1 - exp(-c sum_p)
double modified_ratio_bound(double alpha = 3.0);  // 1 - exp(-c)

// Positive-weight assortments per type plus a flat index over their members.
struct NoRepeatPlan {
    std::vector<std::vector<PlanEntry>> entries;
    std::vector<std::vector<int>> offset;  // offset[j][e] into the member counters
    std::vector<std::vector<int>> entry_id;  // entry_id[j][e] into the per-entry counters
    int member_count = 0, entry_count = 0;

    static NoRepeatPlan from(const Instance& inst, const McdlpSolution& sol);
};

struct NoRepeatOptions {
    NoRepeatVariant variant = NoRepeatVariant::FirstArrival;
    double alpha = 0.0;  // 0 selects alpha_star() (3 for Modified)
    // Assert p(i, stripped) >= p(i, S) on every offer; costs one extra choice evaluation.
    bool check_substitutability = false;
    // Experiments run the policies outside their proven regime (e.g. the
    // modified algorithm on heterogeneous fares); plan checks still apply.
    bool enforce_preconditions = true;
};

// Throws std::invalid_argument on variant preconditions or a plan/instance mismatch.
void check_norepeat(const Instance& inst, const NoRepeatPlan& plan, const NoRepeatOptions& opt);
double effective_alpha(const NoRepeatOptions& opt);

// Uniform permutation of 0..size-1 (Fisher-Yates).
std::vector<int> norepeat_order(int size, Rng& rng);

// One horizon. Counters (if given) follow the layout of NoRepeatEvaluation.
PolicyTrace simulate_norepeat(const Instance& inst, const NoRepeatPlan& plan, const NoRepeatOptions& opt,
                              std::uint64_t seed, std::uint64_t replica, bool record = false,
                              ReplicaOutcome* out = nullptr);

// Conditional frequency with its standard error.
struct Freq {
    double k = 0.0, n = 0.0;
    double p() const { return n > 0 ? k / n : 0.0; }
    double se() const { return bernoulli_se(k, n); }
};

struct NoRepeatEvaluation {
    MonteCarloEstimate revenue;
    std::uint64_t replicas = 0;
    double alpha = 0.0;
    std::vector<double> type_freq;                 // Pr[Type(j)]
    std::vector<std::vector<Freq>> imatch;         // [j][i]: Pr[IMatch_j(i) | Type(j)]
    std::vector<Freq> seen;                        // [member]: Pr[Seen_S(i,j) | Type(j)]
    std::vector<Freq> timeout_cmatch;              // [entry]: Pr[Timeout_S(j) u CMatch_S(j) | Type(j)]
    std::vector<Freq> sold;                        // [i]: Pr[item i sold over the horizon]
    MonteCarloEstimate offers_per_customer;        // over customers that received the procedure
    double clamped = 0.0;                          // inclusion draws clamped at 1
};

// Minimum conditioning samples before a conditional event bound is checked;
// rarer events are reported as untested.
inline constexpr double kMinConditionSamples = 200.0;

NoRepeatEvaluation evaluate_norepeat(const Instance& inst, const NoRepeatPlan& plan, const NoRepeatOptions& opt,
                                     std::uint64_t replicas, std::uint64_t seed,
                                     ExecMode mode = ExecMode::Parallel);

// p_it = sum_j q_tj sum_{S containing i} x_j(S) p_j(i, S), summed over t.
std::vector<double> item_purchase_mass(const Instance& inst, const NoRepeatPlan& plan);

PolicyTrace run_algorithm3(const Instance& inst, const McdlpSolution& x, double alpha, std::uint64_t seed);
PolicyTrace run_modified_algorithm3(const Instance& inst, const McdlpSolution& x, double alpha, std::uint64_t seed);
PolicyTrace run_algorithm3_random_patience(const Instance& inst, const McdlpSolution& x, double alpha,
                                           std::uint64_t seed);

}  // namespace mcao
