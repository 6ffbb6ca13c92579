#pragma once

#include <json.hpp>

#include "sdlab/mlp.hpp"

namespace sdlab {

nlohmann::json mlp_to_json(const Mlp& m);
Mlp mlp_from_json(const nlohmann::json& j);

}  // namespace sdlab
