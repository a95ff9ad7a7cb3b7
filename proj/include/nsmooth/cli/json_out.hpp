#pragma once

#include <string>

#include "json.hpp"

namespace nsmooth::cli {

using Json = nlohmann::ordered_json;

/// Serialises with two-space indentation, floats as %.17g and non-finite floats as null,
/// so equal inputs give byte-identical text.
std::string dump(const Json& j);

/// A double formatted as %.17g.
std::string format_double(double x);

}  // namespace nsmooth::cli
