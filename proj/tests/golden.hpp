#pragma once

#include "quasilat/io.hpp"

#include <nlohmann/json.hpp>

#include <string>

namespace quasilat::testing {

inline const nlohmann::json& golden() {
  static const nlohmann::json values =
      nlohmann::json::parse(read_text_file(std::string(QUASILAT_GOLDEN_DIR) + "/golden_values.json"));
  return values;
}

}  // namespace quasilat::testing
