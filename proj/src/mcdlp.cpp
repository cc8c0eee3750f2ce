#include "mcao/mcdlp.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace mcao {

const char* variant_name(McdlpVariant v) {
    switch (v) {
        case McdlpVariant::SingleItemLP: return "single";
        case McdlpVariant::McdlpR: return "mcdlp-r";
        case McdlpVariant::McdlpNr: return "mcdlp-nr";
        case McdlpVariant::McdlpNrs: return "mcdlp-nrs";
        case McdlpVariant::MmcdlpNr: return "mmcdlp-nr";
    }
    return "?";
}

McdlpVariant parse_variant(const std::string& s) {
    for (auto v : {McdlpVariant::SingleItemLP, McdlpVariant::McdlpR, McdlpVariant::McdlpNr, McdlpVariant::McdlpNrs,
                   McdlpVariant::MmcdlpNr})
        if (s == variant_name(v)) return v;
    throw std::invalid_argument("unknown LP variant " + s);
}

bool has_overlap_rows(McdlpVariant v) {
    return v == McdlpVariant::McdlpNr || v == McdlpVariant::McdlpNrs || v == McdlpVariant::MmcdlpNr;
}

void check_variant(const Instance& inst, McdlpVariant v) {
    switch (v) {
        case McdlpVariant::SingleItemLP:
            if (inst.family.k > 1) throw std::invalid_argument("single-item LP needs a family with |S| <= 1");
            break;
        case McdlpVariant::McdlpNr:
            for (int j = 0; j < inst.m(); ++j)
                if (std::abs(inst.total_arrival(j) - 1.0) > 1e-9)
                    throw std::invalid_argument(
                        "mcdlp-nr needs integral arrivals (T q_j = 1); integralize first or use mcdlp-nrs");
            break;
        case McdlpVariant::McdlpNrs:
            for (int k = 0; k < inst.num_products(); ++k)
                for (int j = 1; j < inst.m(); ++j)
                    if (inst.types[j].revenue[k] != inst.types[0].revenue[k])
                        throw std::invalid_argument("mcdlp-nrs needs revenues that do not depend on the type");
            break;
        case McdlpVariant::MmcdlpNr:
            if (inst.price_levels < 2) throw std::invalid_argument("mmcdlp-nr needs at least two price levels");
            break;
        case McdlpVariant::McdlpR:
            break;
    }
}

namespace {

std::string ovl_name(int product, int type) {
    return "ovl[" + std::to_string(product) + "," + std::to_string(type) + "]";
}

void add_rows(const Instance& inst, McdlpModel& md) {
    auto& lp = md.lp;
    for (int i = 0; i < inst.n(); ++i) lp.add_row("inv[" + std::to_string(i) + "]", {}, inst.items[i].inventory);
    for (int j = 0; j < inst.m(); ++j) lp.add_row("sell[" + std::to_string(j) + "]", {}, 1.0);
    for (int j = 0; j < inst.m(); ++j) {
        const auto& ty = inst.types[j];
        // Geometric patience enters through its mean 1/p_out.
        double rhs = ty.random_patience() ? 1.0 / ty.leave_prob : double(ty.patience);
        lp.add_row("pat[" + std::to_string(j) + "]", {}, rhs);
    }
    if (has_overlap_rows(md.variant))
        for (int j = 0; j < inst.m(); ++j)
            for (int k = 0; k < inst.num_products(); ++k) lp.add_row(ovl_name(k, j), {}, 1.0);
}

}  // namespace

void add_column(const Instance& inst, McdlpModel& md, const Column& col, const BuildOptions& opt) {
    auto& lp = md.lp;
    const int j = col.type;
    const auto& ty = inst.types[j];
    const double Q = inst.total_arrival(j);
    std::vector<double> p;
    ty.choice.probs(col.set, p);
    double obj = 0.0, mass = 0.0;
    std::map<int, double> inv;
    for (std::size_t u = 0; u < col.set.size(); ++u) {
        int k = col.set[u];
        obj += Q * ty.revenue[k] * p[u];
        mass += p[u];
        inv[inst.products[k].item] += Q * p[u];
    }
    std::string name = "x[" + std::to_string(j) + ",";
    for (std::size_t u = 0; u < col.set.size(); ++u) name += (u ? "_" : "") + std::to_string(col.set[u]);
    name += "]";
    int var = lp.add_var(obj, 0.0, opt.upper, name);
    const int n = inst.n(), m = inst.m();
    for (auto [i, a] : inv) lp.rows[i].coefs.push_back({var, a});
    lp.rows[n + j].coefs.push_back({var, mass});
    lp.rows[n + m + j].coefs.push_back({var, 1.0});
    if (has_overlap_rows(md.variant)) {
        const int base = n + 2 * m + j * inst.num_products();
        for (int k : col.set) lp.rows[base + k].coefs.push_back({var, 1.0});
    }
    md.columns.push_back(col);
}

McdlpModel build_with_columns(const Instance& inst, McdlpVariant v, const std::vector<Column>& cols,
                              const BuildOptions& opt) {
    check_variant(inst, v);
    McdlpModel md;
    md.variant = v;
    add_rows(inst, md);
    for (const auto& c : cols) add_column(inst, md, c, opt);
    return md;
}

McdlpModel build(const Instance& inst, McdlpVariant v, const BuildOptions& opt) {
    check_variant(inst, v);
    std::vector<Assortment> fam = inst.enumerate_family(opt.family_limit);
    if (fam.size() * std::size_t(inst.m()) > opt.family_limit)
        throw std::length_error("family too large to enumerate; use colgen");
    std::vector<Column> cols;
    cols.reserve(fam.size() * inst.m());
    for (int j = 0; j < inst.m(); ++j)
        for (const auto& S : fam) cols.push_back({j, S});
    return build_with_columns(inst, v, cols, opt);
}

double McdlpSolution::x_single(int type, int product) const {
    for (const auto& e : plan[type])
        if (e.set.size() == 1 && e.set[0] == product) return e.x;
    return 0.0;
}

McdlpSolution solve_model(McdlpModel md) {
    McdlpSolution s;
    s.variant = md.variant;
    s.lp = solve(md.lp);
    if (s.lp.status != LpStatus::Optimal) throw std::runtime_error("MCDLP solve did not reach optimality");
    s.opt = s.lp.objective;
    int m = 0;
    for (const auto& c : md.columns) m = std::max(m, c.type + 1);
    for (int r = 0; r < md.lp.num_rows(); ++r) {
        const auto& nm = md.lp.rows[r].name;
        if (nm.rfind("sell[", 0) == 0) m = std::max(m, std::stoi(nm.substr(5)) + 1);
    }
    s.plan.assign(m, {});
    for (std::size_t k = 0; k < md.columns.size(); ++k)
        if (s.lp.x[k] > 1e-12) s.plan[md.columns[k].type].push_back({md.columns[k].set, s.lp.x[k]});
    s.model = std::move(md);
    return s;
}

McdlpSolution solve_mcdlp(const Instance& inst, McdlpVariant v, const BuildOptions& opt) {
    return solve_model(build(inst, v, opt));
}

Instance integralize(const Instance& inst) {
    if (!inst.stationary()) throw std::invalid_argument("integralize needs stationary arrivals");
    Instance out = inst;
    out.types.clear();
    for (const auto& ty : inst.types) {
        double copies = inst.T * ty.arrival;
        long c = std::lround(copies);
        if (std::abs(copies - double(c)) > 1e-9) throw std::invalid_argument("integralize: T q_j is not integral");
        for (long k = 0; k < c; ++k) {
            CustomerType t2 = ty;
            t2.arrival = 1.0 / inst.T;
            out.types.push_back(std::move(t2));
        }
    }
    return out;
}

Verdict verify_policy_upper_bound(double mcdlp_opt, const MonteCarloEstimate& revenue) {
    Verdict v;
    v.mean = revenue.mean;
    v.bound = mcdlp_opt + 3.0 * revenue.se();
    v.consistent = revenue.mean <= v.bound + 1e-12;
    return v;
}

}  // namespace mcao
