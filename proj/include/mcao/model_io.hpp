#pragma once

#include <string>

#include "json.hpp"
#include "mcao/model.hpp"

namespace mcao {

nlohmann::json to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& j);

Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path);

}  // namespace mcao
