#include "mcao/stats.hpp"

#include <algorithm>
#include <cmath>

namespace mcao {

void RunningStat::add(double x) {
    ++n;
    double d = x - mean;
    mean += d / double(n);
    m2 += d * (x - mean);
}

void RunningStat::merge(const RunningStat& o) {
    if (o.n == 0) return;
    if (n == 0) {
        *this = o;
        return;
    }
    double na = double(n), nb = double(o.n), nt = na + nb;
    double d = o.mean - mean;
    mean += d * nb / nt;
    m2 += o.m2 + d * d * na * nb / nt;
    n += o.n;
}

double RunningStat::variance() const {
    return n < 2 ? 0.0 : m2 / double(n - 1);
}

double RunningStat::se() const {
    return n == 0 ? 0.0 : std::sqrt(variance() / double(n));
}

double MonteCarloEstimate::se() const {
    return n == 0 ? 0.0 : std::sqrt(variance / double(n));
}

MonteCarloEstimate MonteCarloEstimate::from(const RunningStat& s) {
    return {s.mean, s.variance(), s.n};
}

double bernoulli_se(double k, double n) {
    if (n <= 0) return 0.0;
    double p = std::clamp(k / n, 1.0 / n, 1.0 - 1.0 / n);
    if (n <= 1) p = 0.5;
    return std::sqrt(p * (1.0 - p) / n);
}

ReplicaSummary run_replicas(std::uint64_t count, const ReplicaFn& fn, ExecMode mode) {
    // Fixed-size blocks bound the memory held by per-replica counters.
    constexpr std::uint64_t kBlock = 1024;
    std::vector<ReplicaOutcome> out;
    ReplicaSummary s;
    s.replicas = count;
    for (std::uint64_t base = 0; base < count; base += kBlock) {
        const std::uint64_t len = std::min(kBlock, count - base);
        out.assign(len, ReplicaOutcome{});
        if (mode == ExecMode::Parallel) {
            const long long c = static_cast<long long>(len);
#pragma omp parallel for schedule(dynamic, 8)
            for (long long r = 0; r < c; ++r) out[r] = fn(base + std::uint64_t(r));
        } else {
            for (std::uint64_t r = 0; r < len; ++r) out[r] = fn(base + r);
        }
        for (auto& o : out) {
            s.revenue.add(o.revenue);
            if (s.counters.size() < o.counters.size()) s.counters.resize(o.counters.size(), 0.0);
            for (std::size_t k = 0; k < o.counters.size(); ++k) s.counters[k] += o.counters[k];
        }
    }
    return s;
}

}  // namespace mcao
