#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "mcao/norepeat.hpp"
#include "mcao/simlab.hpp"

namespace mcao {

const char* sweep_policy_name(SweepPolicy p) {
    switch (p) {
        case SweepPolicy::Greedy: return "greedy";
        case SweepPolicy::Conservative: return "conservative";
        case SweepPolicy::Norepeat: return "norepeat";
        case SweepPolicy::NorepeatHomog: return "norepeat-homog";
    }
    return "?";
}

std::vector<SweepRow> run_sweep(const HotelTemplate& tpl, const SweepSpec& spec,
                                const std::vector<SweepPolicy>& policies, ExecMode mode) {
    std::vector<SweepRow> rows;
    std::uint64_t cell_index = 0;
    for (double sf : spec.scale_factors)
        for (int pat : spec.patience)
            for (int cap : spec.caps)
                for (double lf : spec.loading_factors) {
                    HotelCell cell{lf, pat, cap, sf};
                    const std::uint64_t cell_seed = mix_seed(spec.seed, cell_index++);
                    Instance inst = build_hotel_instance(tpl, cell, spec.seed);
                    McdlpSolution lp;
                    bool lp_ok = true;
                    try {
                        lp = solve_mcdlp(inst, McdlpVariant::MmcdlpNr);
                    } catch (const std::exception&) {
                        lp_ok = false;
                    }
                    for (std::size_t pi = 0; pi < policies.size(); ++pi) {
                        SweepRow row;
                        row.cell = cell;
                        row.policy = sweep_policy_name(policies[pi]);
                        if (!lp_ok) {
                            row.status = "lp-failed";
                            rows.push_back(row);
                            continue;
                        }
                        row.lp_opt = lp.opt;
                        const std::uint64_t seed = mix_seed(cell_seed, pi);
                        MonteCarloEstimate est;
                        switch (policies[pi]) {
                            case SweepPolicy::Greedy:
                                est = evaluate_baseline(inst, BaselineKind::Greedy, spec.replicas, seed, mode).revenue;
                                break;
                            case SweepPolicy::Conservative:
                                est = evaluate_baseline(inst, BaselineKind::Conservative, spec.replicas, seed, mode)
                                          .revenue;
                                break;
                            case SweepPolicy::Norepeat:
                            case SweepPolicy::NorepeatHomog: {
                                NoRepeatOptions opt;
                                opt.alpha = spec.alpha;
                                if (policies[pi] == SweepPolicy::NorepeatHomog) {
                                    opt.variant = NoRepeatVariant::Modified;
                                    opt.enforce_preconditions = false;  // fares are heterogeneous here
                                }
                                NoRepeatPlan plan = NoRepeatPlan::from(inst, lp);
                                est = evaluate_norepeat(inst, plan, opt, spec.replicas, seed, mode).revenue;
                                break;
                            }
                        }
                        row.mean = est.mean;
                        row.se = est.se();
                        if (lp.opt > 0) {
                            row.pct = 100.0 * est.mean / lp.opt;
                            row.pct_se = 100.0 * row.se / lp.opt;
                        }
                        rows.push_back(row);
                    }
                }
    return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "loading_factor,patience,cap,scale_factor,policy,lp_opt,mean,se,pct,pct_se,status\n";
    char buf[512];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.6f,%d,%d,%.6f,%s,%.6f,%.6f,%.6f,%.6f,%.6f,%s\n", r.cell.loading_factor,
                      r.cell.patience, r.cell.cap, r.cell.scale_factor, r.policy.c_str(), r.lp_opt, r.mean, r.se,
                      r.pct, r.pct_se, r.status.c_str());
        os << buf;
    }
}

}  // namespace mcao
