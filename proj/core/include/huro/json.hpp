#pragma once

#include <nlohmann/json.hpp>

namespace huro {

// Insertion-ordered JSON.
using Json = nlohmann::ordered_json;

}  // namespace huro
