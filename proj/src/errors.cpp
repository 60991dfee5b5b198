#include "writor/errors.hpp"

namespace writor {

std::string SchemaError::build_message(const std::string& stage,
                                       const std::vector<std::string>& paths) {
  std::string msg = "schema error for stage '" + stage + "':";
  for (const auto& p : paths) {
    msg += " " + p + ";";
  }
  if (!paths.empty()) msg.pop_back();
  return msg;
}

}  // namespace writor
