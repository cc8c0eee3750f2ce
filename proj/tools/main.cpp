#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "mcao/attenuate.hpp"
#include "mcao/colgen.hpp"
#include "mcao/mcdlp.hpp"
#include "mcao/model_io.hpp"
#include "mcao/norepeat.hpp"
#include "mcao/simlab.hpp"

using namespace mcao;
using nlohmann::json;

namespace {

// stdout unless --out names a file.
struct Output {
    std::ofstream file;
    std::ostream* os = &std::cout;
    explicit Output(const std::string& path) {
        if (path.empty()) return;
        file.open(path);
        if (!file) throw std::runtime_error("cannot open " + path + " for writing");
        os = &file;
    }
    std::ostream& operator*() { return *os; }
};

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

std::string set_str(const Assortment& S) {
    std::string s;
    for (std::size_t u = 0; u < S.size(); ++u) s += (u ? " " : "") + std::to_string(S[u]);
    return s;
}

Instance load_checked(const std::string& path) {
    Instance inst = load_instance(path);
    ValidationReport rep = validate(inst);
    if (!rep.ok()) throw std::invalid_argument("invalid instance: " + rep.violations.front());
    return inst;
}

McdlpVariant default_variant(const Instance& inst, const std::string& policy) {
    if (policy == "attenuated") return McdlpVariant::SingleItemLP;
    if (policy == "attenuated-assort") return McdlpVariant::McdlpR;
    if (inst.price_levels >= 2) return McdlpVariant::MmcdlpNr;
    if (policy == "norepeat-homog") return McdlpVariant::McdlpNrs;
    if (policy.rfind("norepeat", 0) == 0) return McdlpVariant::McdlpNr;
    return McdlpVariant::McdlpR;
}

int cmd_gen_instance(const std::string& kind, int n, int M, const HotelCell& cell, int types, std::uint64_t seed,
                     const std::string& out) {
    Instance inst;
    if (kind == "hardness") {
        inst = gen_hardness_instance(n);
    } else if (kind == "gap") {
        inst = gen_gap_instance(M);
    } else if (kind == "hotel") {
        inst = build_hotel_instance(gen_hotel_like(seed, types), cell, seed);
    } else {
        throw std::invalid_argument("unknown instance kind " + kind);
    }
    Output o(out);
    *o << to_json(inst).dump(2) << "\n";
    return 0;
}

int cmd_solve_lp(const std::string& path, const std::string& variant, const std::string& out) {
    Instance inst = load_checked(path);
    McdlpSolution sol = solve_mcdlp(inst, parse_variant(variant));
    Output o(out);
    *o << "variant " << variant_name(sol.variant) << "\n";
    *o << "status " << (sol.lp.status == LpStatus::Optimal ? "optimal" : "not-optimal") << "\n";
    *o << "opt " << fmt(sol.opt) << "\n";
    for (int j = 0; j < int(sol.plan.size()); ++j)
        for (const auto& e : sol.plan[j]) *o << "x " << j << " {" << set_str(e.set) << "} " << fmt(e.x) << "\n";
    const auto& lp = sol.model.lp;
    for (int r = 0; r < lp.num_rows(); ++r)
        if (std::abs(sol.lp.y[r]) > 0) *o << "dual " << lp.rows[r].name << " " << fmt(sol.lp.y[r]) << "\n";
    return 0;
}

int cmd_simulate(const std::string& path, const std::string& policy, std::uint64_t replicas, std::size_t budget,
                 double alpha, std::string variant, std::uint64_t seed, bool per_replica, const std::string& out) {
    Instance inst = load_checked(path);
    if (policy == "attenuated" || policy == "attenuated-assort") {
        bool multi = false;
        for (const auto& it : inst.items) multi |= it.inventory > 1;
        if (multi) {
            std::cerr << "note: splitting multi-unit items into unit copies\n";
            inst = split_inventory(inst);
        }
    }
    McdlpVariant v = variant.empty() ? default_variant(inst, policy) : parse_variant(variant);
    McdlpSolution sol = solve_mcdlp(inst, v);
    MonteCarloEstimate est;
    std::function<double(std::uint64_t)> one;
    std::unique_ptr<AttenuationState> state;
    AttenPlan aplan;
    NoRepeatPlan nplan;
    NoRepeatOptions nopt;
    if (policy == "attenuated" || policy == "attenuated-assort") {
        aplan = AttenPlan::from(sol);
        AttenuationOptions ao;
        ao.budget = budget;
        state = std::make_unique<AttenuationState>(compute_attenuation(inst, aplan, ao, mix_seed(seed, 1)));
        for (const auto& d : state->diagnostics) std::cerr << "warning: " << d << "\n";
        one = [&](std::uint64_t r) { return simulate_attenuated(inst, aplan, *state, seed, r).revenue; };
    } else if (policy == "norepeat" || policy == "norepeat-homog" || policy == "norepeat-randpatience") {
        nplan = NoRepeatPlan::from(inst, sol);
        nopt.alpha = alpha;
        nopt.variant = policy == "norepeat"        ? NoRepeatVariant::FirstArrival
                       : policy == "norepeat-homog" ? NoRepeatVariant::Modified
                                                    : NoRepeatVariant::RandomPatience;
        check_norepeat(inst, nplan, nopt);
        one = [&](std::uint64_t r) { return simulate_norepeat(inst, nplan, nopt, seed, r).revenue; };
    } else {
        BaselineKind k = policy == "greedy"         ? BaselineKind::Greedy
                         : policy == "conservative" ? BaselineKind::Conservative
                         : policy == "offer-all"    ? BaselineKind::OfferAll
                                                    : throw std::invalid_argument("unknown policy " + policy);
        one = [&, k](std::uint64_t r) { return simulate_baseline(inst, k, seed, r).revenue; };
    }
    ReplicaSummary sum = run_replicas(replicas, [&](std::uint64_t r) {
        ReplicaOutcome o;
        o.revenue = one(r);
        return o;
    });
    est = MonteCarloEstimate::from(sum.revenue);
    Output o(out);
    if (per_replica) {
        *o << "replica,revenue\n";
        for (std::uint64_t r = 0; r < replicas; ++r) *o << r << "," << fmt(one(r)) << "\n";
    }
    *o << "policy,variant,lp_opt,mean,se,ratio,ratio_se,replicas,seed\n";
    double ratio = sol.opt > 0 ? est.mean / sol.opt : 0.0, ratio_se = sol.opt > 0 ? est.se() / sol.opt : 0.0;
    *o << policy << "," << variant_name(v) << "," << fmt(sol.opt) << "," << fmt(est.mean) << "," << fmt(est.se())
       << "," << fmt(ratio) << "," << fmt(ratio_se) << "," << replicas << "," << seed << "\n";
    return 0;
}

std::vector<double> parse_doubles(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

int cmd_sweep(const std::string& lfs, const std::string& pats, const std::string& caps, const std::string& sfs,
              std::uint64_t replicas, double alpha, int types, std::uint64_t seed, const std::string& policies,
              const std::string& out) {
    SweepSpec spec;
    spec.loading_factors = parse_doubles(lfs);
    spec.patience.clear();
    for (double p : parse_doubles(pats)) spec.patience.push_back(int(p));
    spec.caps.clear();
    for (double c : parse_doubles(caps)) spec.caps.push_back(int(c));
    spec.scale_factors = parse_doubles(sfs);
    spec.replicas = replicas;
    spec.seed = seed;
    spec.alpha = alpha;
    std::vector<SweepPolicy> pol;
    std::stringstream ss(policies);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        bool found = false;
        for (auto p : {SweepPolicy::Greedy, SweepPolicy::Conservative, SweepPolicy::Norepeat,
                       SweepPolicy::NorepeatHomog})
            if (tok == sweep_policy_name(p)) {
                pol.push_back(p);
                found = true;
            }
        if (!found) throw std::invalid_argument("unknown sweep policy " + tok);
    }
    auto rows = run_sweep(gen_hotel_like(seed, types), spec, pol);
    Output o(out);
    write_sweep_csv(*o, rows);
    return 0;
}

int cmd_colgen(const std::string& path, const std::string& variant, const std::string& oracle, double eps,
               const std::string& out) {
    Instance inst = load_checked(path);
    ColgenOptions opt;
    opt.variant = parse_variant(variant);
    opt.oracle = parse_oracle(oracle);
    opt.fptas.eps = eps;
    ColgenResult res = column_generate(inst, opt);
    Output o(out);
    *o << "variant " << variant_name(opt.variant) << "\n";
    *o << "oracle " << oracle_name(opt.oracle) << "\n";
    *o << "opt " << fmt(res.solution.opt) << "\n";
    *o << "rounds " << res.rounds << "\n";
    *o << "columns_added " << res.columns_added << "\n";
    *o << "alpha_hat " << (std::isnan(res.alpha_hat) ? std::string("nan") : fmt(res.alpha_hat)) << "\n";
    *o << "certified " << (res.certified ? "yes" : "no") << "\n";
    *o << "partial " << (res.partial ? "yes" : "no") << "\n";
    for (std::size_t r = 0; r < res.objectives.size(); ++r) *o << "round " << r + 1 << " " << fmt(res.objectives[r]) << "\n";
    for (const auto& d : res.diagnostics) *o << "diagnostic " << d << "\n";
    return res.partial ? 2 : 0;
}

int cmd_verify_gamma(int T, const std::string& out) {
    GammaSchedule g = gamma_schedule(T);
    const double h1 = h_limit(1.0);
    Output o(out);
    *o << "T " << T << "\n";
    *o << "gamma_T+1 " << fmt(g.last()) << "\n";
    *o << "h(1) " << fmt(h1) << "\n";
    *o << "ratio " << fmt(g.ratio()) << "\n";
    *o << "1-h(1) " << fmt(1.0 - h1) << "\n";
    const bool ok = g.last() <= h1 + 1e-12;
    *o << "gamma_T+1<=h(1) " << (ok ? "yes" : "no") << "\n";
    return ok ? 0 : 1;
}

int cmd_fit_mnl(const std::string& path, int P, double sf, bool no_shift, char delim, const std::string& out) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    auto records = read_transactions(in, delim);
    FitOptions opt;
    opt.scale_factor = sf;
    opt.shift_no_purchase = !no_shift;
    MnlFitResult res = fit_mnl(records, P, opt);
    json j = json::array();
    for (std::size_t t = 0; t < res.fits.size(); ++t) {
        const auto& f = res.fits[t];
        if (!f.warning.empty()) std::cerr << "warning: type " << t << ": " << f.warning << "\n";
        j.push_back({{"features", res.type_keys[t]},
                     {"weights", f.model.weights},
                     {"no_purchase", f.model.no_purchase},
                     {"utilities", f.utilities},
                     {"converged", f.converged},
                     {"regularized", f.regularized},
                     {"iterations", f.iterations}});
    }
    Output o(out);
    *o << j.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-stage choice-based assortment offering toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string out;
    app.add_option("--out", out, "Write output to this file instead of stdout");

    std::uint64_t seed = 0;
    auto add_seed = [&](CLI::App* sc) { sc->add_option("--seed", seed, "Random seed")->required(); };

    auto* gen = app.add_subcommand("gen-instance", "Generate an instance as JSON");
    std::string kind = "hardness";
    int n = 5, M = 4, types = 40;
    HotelCell cell;
    gen->add_option("--kind", kind, "hardness | gap | hotel")->check(CLI::IsMember({"hardness", "gap", "hotel"}));
    gen->add_option("--n", n, "Hardness instance size");
    gen->add_option("--M", M, "Gap instance base count (even, >= 4)");
    gen->add_option("--lf", cell.loading_factor, "Hotel loading factor");
    gen->add_option("--patience", cell.patience, "Hotel patience");
    gen->add_option("--cap", cell.cap, "Hotel assortment size cap");
    gen->add_option("--sf", cell.scale_factor, "Hotel scale factor");
    gen->add_option("--types", types, "Hotel customer types");
    add_seed(gen);

    auto* slp = app.add_subcommand("solve-lp", "Solve an MCDLP variant");
    std::string instance, variant = "mcdlp-nr";
    slp->add_option("--instance", instance)->required();
    slp->add_option("--variant", variant, "single | mcdlp-r | mcdlp-nr | mcdlp-nrs | mmcdlp-nr");

    auto* sim = app.add_subcommand("simulate", "Monte Carlo evaluation of a policy");
    std::string policy, sim_variant;
    std::uint64_t replicas = 1000;
    std::size_t budget = 2000;
    double alpha = 0.0;
    bool per_replica = false;
    sim->add_option("--instance", instance)->required();
    sim->add_option("--policy", policy)
        ->required()
        ->check(CLI::IsMember({"attenuated", "attenuated-assort", "norepeat", "norepeat-homog",
                               "norepeat-randpatience", "greedy", "conservative", "offer-all"}));
    sim->add_option("--replicas", replicas);
    sim->add_option("--mc-budget", budget, "Replicas per attenuation estimation step");
    sim->add_option("--alpha", alpha, "Inclusion scale for the no-repeat policies (0: default)");
    sim->add_option("--variant", sim_variant, "LP used for the plan and the bound");
    sim->add_flag("--per-replica", per_replica, "Emit one CSV row per replica");
    add_seed(sim);

    auto* sw = app.add_subcommand("sweep", "Hotel-like parameter sweep (CSV)");
    std::string lfs = "1,2,3,4,5,6,7", pats = "1", caps = "4", sfs = "2",
                policies = "greedy,conservative,norepeat,norepeat-homog";
    std::uint64_t sweep_replicas = 200;
    double sweep_alpha = 1.0;
    sw->add_option("--loading-factors", lfs);
    sw->add_option("--patience", pats);
    sw->add_option("--caps", caps);
    sw->add_option("--scale-factors", sfs);
    sw->add_option("--policies", policies);
    sw->add_option("--replicas", sweep_replicas);
    sw->add_option("--alpha", sweep_alpha);
    sw->add_option("--types", types);
    add_seed(sw);

    auto* cg = app.add_subcommand("colgen", "Column generation for MCDLP-NR or MCDLP-R");
    std::string oracle = "brute";
    double eps = 0.1;
    cg->add_option("--instance", instance)->required();
    cg->add_option("--variant", variant)->check(CLI::IsMember({"mcdlp-nr", "mcdlp-r", "mcdlp-nrs", "mmcdlp-nr"}));
    cg->add_option("--oracle", oracle)->check(CLI::IsMember({"brute", "mnl-exact", "mnl-fptas"}));
    cg->add_option("--eps", eps);

    auto* vg = app.add_subcommand("verify-gamma", "Check the gamma schedule against h(1)");
    int T = 100000;
    vg->add_option("--T", T)->check(CLI::PositiveNumber);

    auto* fm = app.add_subcommand("fit-mnl", "Fit per-type MNL weights from transactions");
    std::string transactions;
    int products = 0;
    double sf = 1.0;
    bool no_shift = false;
    char delim = ',';
    fm->add_option("--transactions", transactions)->required();
    fm->add_option("--products", products)->required()->check(CLI::PositiveNumber);
    fm->add_option("--scale-factor", sf);
    fm->add_flag("--no-shift", no_shift, "Keep v0 = 1 instead of the top weight");
    fm->add_option("--delim", delim);

    CLI11_PARSE(app, argc, argv);
    try {
        if (*gen) return cmd_gen_instance(kind, n, M, cell, types, seed, out);
        if (*slp) return cmd_solve_lp(instance, variant, out);
        if (*sim) return cmd_simulate(instance, policy, replicas, budget, alpha, sim_variant, seed, per_replica, out);
        if (*sw) return cmd_sweep(lfs, pats, caps, sfs, sweep_replicas, sweep_alpha, types, seed, policies, out);
        if (*cg) return cmd_colgen(instance, variant, oracle, eps, out);
        if (*vg) return cmd_verify_gamma(T, out);
        if (*fm) return cmd_fit_mnl(transactions, products, sf, no_shift, delim, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
