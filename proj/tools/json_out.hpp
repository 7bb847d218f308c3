#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

namespace biweb::cli {

/// Serializes with every real printed as %.17g so values round-trip exactly.
/// Non-finite reals become null.
void write_json(std::ostream& os, const nlohmann::json& v, int indent = 2);
std::string dump_json(const nlohmann::json& v, int indent = 2);

}  // namespace biweb::cli
