#pragma once

#include <string_view>
#include <vector>

namespace writor::resources {

// Data files compiled into the library from data/. Names are paths relative
// to data/, e.g. "prompts/topics.txt". Throws NotFoundError on a bad name.
std::string_view get(std::string_view name);
std::vector<std::string_view> names();

}  // namespace writor::resources
