#pragma once

#include <json.hpp>

#include "stiffjnd/session.hpp"

namespace stiffjnd::internal {

nlohmann::ordered_json protocol_to_json(const ProtocolConfig& config);
ProtocolConfig protocol_from_json(const nlohmann::ordered_json& j);

} // namespace stiffjnd::internal
