#pragma once

#include <json.hpp>

#include <fstream>
#include <string>
#include <vector>

#include "squish/fcidump.hpp"

namespace testsupport {

inline const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names{"lih_sto3g", "h2_ccpvdz_6orb", "h3p_ccpvdz_6orb"};
  return names;
}

inline std::string fixture_path(const std::string& name, const std::string& ext = ".fcidump") {
  return std::string(SQUISH_FIXTURE_DIR) + "/" + name + ext;
}

inline squish::IntegralTable load_fixture(const std::string& name) { return squish::read_fcidump(fixture_path(name)); }

// Reference energies recorded when the fixtures were generated.
inline nlohmann::json fixture_sidecar(const std::string& name) {
  std::ifstream f(fixture_path(name, ".json"));
  return nlohmann::json::parse(f);
}

}  // namespace testsupport
