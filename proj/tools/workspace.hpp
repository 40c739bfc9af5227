#pragma once

// Workspaces loaded from the line-oriented fixture format.
//
//   category NAME            object X | morphism f : X -> Y [identity] | compose f g = h
//   functor NAME : C -> D    object X -> Y | morphism f -> g
//   refsys NAME              functor F
//   presheaf NAME over C     elements X = x y ... | act f : y -> x
//                            (C may also be `slice SYS B` or `coslice SYS B`)
//   fixture NAME : KIND      builder parameters, see fixture_kinds()
//
// Every block ends with `end`. `#` starts a comment.

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "refine/fixtures.hpp"

namespace refine::cli {

/// Parse failure at a position, or a validation failure of a loaded value.
class LoadError : public std::runtime_error {
 public:
  LoadError(const std::string& file, std::size_t line, std::size_t column, const std::string& what);
  explicit LoadError(const std::string& what) : std::runtime_error(what) {}
};

struct Provenance {
  std::string file;
  std::size_t line = 0;
  std::string builder;  // empty for explicit blocks
};

struct SystemEntry {
  std::string name;
  SysPtr system;
  Provenance from;
  std::optional<MonoidalStructure> monoidal;
  std::vector<MonoidObject> monoids;
  std::shared_ptr<const LinctxFixture> linctx;
  std::shared_ptr<const HoareFixture> hoare;
  std::shared_ptr<const RefSysAdjunction> adjunction;
};

struct PresheafEntry {
  std::string name;
  Provenance from;
  std::string system;  // set when the base is a slice or coslice
  enum class Over { category, slice, coslice } over = Over::category;
  ObjId B = kNoObject;
  Presheaf presheaf;
};

struct Workspace {
  std::map<std::string, CatPtr> categories;
  std::map<std::string, FunctorData> functors;
  std::map<std::string, SystemEntry> systems;
  std::map<std::string, PresheafEntry> presheaves;
  std::vector<std::string> system_order;
  std::map<std::string, Provenance> provenance;

  /// The named system, or the first one declared.
  const SystemEntry& system(const std::string& name = {}) const;
};

/// Parses and validates `text`; the workspace is unchanged on error.
void load_text(Workspace& ws, const std::string& text, const std::string& file);
void load_file(Workspace& ws, const std::string& path);

std::vector<std::string> fixture_kinds();

/// Description file of a shipped fixture: hoare, linear, lattice, galois,
/// terminal, twoderiv, random.
std::string fixture_source(const std::string& name, std::uint64_t seed, const RandomBounds& bounds);
/// The system expanded into explicit category, functor and refsys blocks.
std::string emit_system(const SystemEntry& e);

}  // namespace refine::cli
