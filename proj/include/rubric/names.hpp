#pragma once

#include <string>
#include <string_view>

namespace rubric {

/// Concept, attribute and combiner names: non-empty runs of letters, digits
/// and hyphens.
bool is_valid_name(std::string_view name);

std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);

}  // namespace rubric
