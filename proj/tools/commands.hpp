#pragma once

// Subcommands of the refine tool. Each returns its text rendering, the JSON
// mirror and the exit code.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "workspace.hpp"

namespace refine::cli {

using Json = nlohmann::ordered_json;

struct Options {
  std::uint64_t seed = 0;
  RandomBounds bounds;
  std::size_t size_guard = kDefaultSizeGuard;
  bool cross_check = false;
  bool timing = false;
  unsigned jobs = 1;
  bool der_fault = false;
  std::string system;
};

struct Result {
  int code = 0;
  std::string text;
  Json json;
};

/// "T,D,hom", e.g. "3,6,3".
RandomBounds parse_bounds(const std::string& s);

std::vector<std::string> suite_names();

Result cmd_validate(const Workspace& ws, const Options& o);
Result cmd_derive(const Workspace& ws, const Options& o, const std::string& P, const std::string& c,
                  const std::string& Q);
Result cmd_slice(const Workspace& ws, const Options& o, const std::string& B, bool coslice);
Result cmd_represent(const Workspace& ws, const Options& o, const std::string& X, bool negative);
Result cmd_lift(const Workspace& ws, const Options& o, const std::string& c, const std::string& X, bool push);
/// `X` names a refinement (its representation is dualized) or a presheaf
/// declared over a slice (left) or coslice (right).
Result cmd_dual(const Workspace& ws, const Options& o, const std::string& X, bool left);
Result cmd_verify(const Workspace& ws, const Options& o, const std::string& suite);
Result cmd_fixtures_gen(const Options& o, const std::string& name);

Json report_json(const CheckReport& r, bool timing);

}  // namespace refine::cli
