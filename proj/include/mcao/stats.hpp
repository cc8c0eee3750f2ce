#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace mcao {

// Welford accumulator; merge() is associative so per-thread partials can be
// combined in any grouping.
struct RunningStat {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x);
    void merge(const RunningStat& o);
    double variance() const;  // unbiased, 0 when n < 2
    double se() const;        // standard error of the mean
};

struct MonteCarloEstimate {
    double mean = 0.0;
    double variance = 0.0;
    std::uint64_t n = 0;
    double se() const;
    static MonteCarloEstimate from(const RunningStat& s);
};

// Standard error of a Bernoulli frequency k/n, floored at the one-event level
// so that p-hat of 0 or 1 still gets a usable slack.
double bernoulli_se(double k, double n);

enum class ExecMode { Serial, Parallel };

// What one replica reports: a revenue figure and a policy-defined vector of
// counters (indicator sums, numerators and denominators).
struct ReplicaOutcome {
    double revenue = 0.0;
    std::vector<double> counters;
};

struct ReplicaSummary {
    RunningStat revenue;
    std::vector<double> counters;  // summed over replicas
    std::uint64_t replicas = 0;
};

using ReplicaFn = std::function<ReplicaOutcome(std::uint64_t replica)>;

// Runs replicas 0..count-1. The reduction is done in replica order after the
// kernel finishes, so the result does not depend on the mode.
ReplicaSummary run_replicas(std::uint64_t count, const ReplicaFn& fn,
                            ExecMode mode = ExecMode::Parallel);

}  // namespace mcao
