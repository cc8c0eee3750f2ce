#include "mcao/model_io.hpp"

#include <fstream>
#include <stdexcept>

namespace mcao {

using nlohmann::json;

json to_json(const Instance& inst) {
    json j;
    j["n"] = inst.n();
    j["T"] = inst.T;
    j["price_levels"] = inst.price_levels;
    j["repeated_offers_allowed"] = inst.repeated_offers_allowed;
    j["matching"] = inst.matching;
    j["items"] = json::array();
    for (int i = 0; i < inst.n(); ++i) {
        json it{{"inventory", inst.items[i].inventory}};
        if (inst.items[i].parent >= 0) it["parent"] = inst.items[i].parent;
        j["items"].push_back(it);
    }
    j["products"] = json::array();
    for (const auto& p : inst.products) j["products"].push_back({{"item", p.item}, {"level", p.level}});
    j["types"] = json::array();
    for (int t = 0; t < inst.m(); ++t) {
        const auto& ty = inst.types[t];
        json o;
        if (inst.stationary()) {
            o["arrival"] = ty.arrival;
        } else {
            json a = json::array();
            for (int s = 0; s < inst.T; ++s) a.push_back(inst.arrival_table[s][t]);
            o["arrival"] = a;
        }
        if (ty.random_patience())
            o["leave_prob"] = ty.leave_prob;
        else
            o["patience"] = ty.patience;
        o["revenues"] = ty.revenue;
        if (ty.choice.kind == ChoiceKind::Mnl) {
            o["mnl_weights"] = ty.choice.weights;
            o["no_purchase_weight"] = ty.choice.no_purchase;
        } else {
            json tab = json::array();
            for (const auto& [S, p] : ty.choice.table) tab.push_back({{"set", S}, {"probs", p}});
            o["tabular"] = tab;
        }
        j["types"].push_back(o);
    }
    if (inst.family.mode == Family::Mode::UpTo)
        j["family"] = {{"mode", "up_to"}, {"k", inst.family.k}};
    else
        j["family"] = {{"mode", "explicit"}, {"sets", inst.family.sets}};
    return j;
}

Instance instance_from_json(const json& j) {
    Instance inst;
    inst.T = j.at("T").get<int>();
    inst.price_levels = j.value("price_levels", 1);
    inst.repeated_offers_allowed = j.value("repeated_offers_allowed", false);
    inst.matching = j.value("matching", false);
    for (const auto& it : j.at("items")) inst.items.push_back({it.value("inventory", 1), it.value("parent", -1)});
    if (j.contains("n") && j["n"].get<int>() != inst.n()) throw std::runtime_error("instance: n disagrees with items");
    if (j.contains("products")) {
        for (const auto& p : j["products"]) inst.products.push_back({p.at("item").get<int>(), p.value("level", 0)});
    } else {
        make_unit_products(inst);
    }
    const auto& types = j.at("types");
    bool table = false;
    for (const auto& o : types) table = table || o.at("arrival").is_array();
    if (table) inst.arrival_table.assign(inst.T, std::vector<double>(types.size(), 0.0));
    for (std::size_t t = 0; t < types.size(); ++t) {
        const auto& o = types[t];
        CustomerType ty;
        if (o.at("arrival").is_array()) {
            auto a = o["arrival"].get<std::vector<double>>();
            if (int(a.size()) != inst.T) throw std::runtime_error("instance: arrival row must have T entries");
            for (int s = 0; s < inst.T; ++s) inst.arrival_table[s][t] = a[s];
        } else if (table) {
            double q = o["arrival"].get<double>();
            for (int s = 0; s < inst.T; ++s) inst.arrival_table[s][t] = q;
        } else {
            ty.arrival = o["arrival"].get<double>();
        }
        ty.patience = o.contains("patience") ? o["patience"].get<int>() : 0;
        ty.leave_prob = o.value("leave_prob", 0.0);
        ty.revenue = o.at("revenues").get<std::vector<double>>();
        if (o.contains("tabular")) {
            ty.choice.kind = ChoiceKind::Tabular;
            for (const auto& row : o["tabular"]) {
                Assortment S = row.at("set").get<Assortment>();
                std::vector<double> p = row.at("probs").get<std::vector<double>>();
                ty.choice.table.emplace(std::move(S), std::move(p));
            }
        } else {
            ty.choice.kind = ChoiceKind::Mnl;
            ty.choice.weights = o.at("mnl_weights").get<std::vector<double>>();
            ty.choice.no_purchase = o.value("no_purchase_weight", 1.0);
        }
        inst.types.push_back(std::move(ty));
    }
    const auto& f = j.at("family");
    const std::string mode = f.at("mode").get<std::string>();
    if (mode == "up_to")
        inst.family = Family::up_to(f.at("k").get<int>());
    else if (mode == "explicit")
        inst.family = Family::explicit_list(f.at("sets").get<std::vector<Assortment>>());
    else
        throw std::runtime_error("instance: unknown family mode " + mode);
    return inst;
}

Instance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    return instance_from_json(j);
}

void save_instance(const Instance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << to_json(inst).dump(2) << '\n';
}

}  // namespace mcao
