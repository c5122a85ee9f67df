#pragma once

// The fixture catalog: one JSON file per bundle, with an expected-results block.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "ptconn/cover.hpp"
#include "ptconn/io.hpp"

#ifndef PTCONN_DEFAULT_CATALOG_DIR
#define PTCONN_DEFAULT_CATALOG_DIR "fixtures"
#endif

namespace ptconn {

struct Fixture {
  std::string name;
  std::string description;
  TorsionBundle bundle;
  Json expected;  // empty object for user-supplied bundles
};

/// $PTCONN_CATALOG_DIR, else the directory compiled in.
inline std::string catalog_dir() {
  if (const char* env = std::getenv("PTCONN_CATALOG_DIR"); env && *env) return env;
  return PTCONN_DEFAULT_CATALOG_DIR;
}

inline Fixture fixture_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("bundle")) throw InvalidInput("fixture must be an object with a 'bundle' field");
  Fixture f{j.value("name", std::string("unnamed")), j.value("description", std::string()), bundle_from_json(j.at("bundle")),
            j.value("expected", Json::object())};
  return f;
}

/// Fixture names in the catalog, sorted.
inline std::vector<std::string> catalog_names(const std::string& dir = catalog_dir()) {
  namespace fs = std::filesystem;
  std::vector<std::string> out;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(dir, ec))
    if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(e.path().stem().string());
  if (ec) throw InvalidInput("cannot read catalog directory " + dir);
  std::sort(out.begin(), out.end());
  return out;
}

inline Fixture load_fixture(const std::string& name, const std::string& dir = catalog_dir()) {
  namespace fs = std::filesystem;
  fs::path path = fs::path(dir) / (name + ".json");
  if (!fs::exists(path)) throw InvalidInput("unknown fixture '" + name + "'");
  return fixture_from_json(read_json_file(path.string()));
}

}  // namespace ptconn
