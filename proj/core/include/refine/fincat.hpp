#pragma once

// Finite categories, functors and natural transformations.
//
// Objects and morphisms are dense indices in definition order. Composition is
// written diagrammatically: compose(f, g) is "f;g", defined iff cod(f) == dom(g).

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace refine {

using ObjId = std::int32_t;
using MorId = std::int32_t;
inline constexpr MorId kNoMorphism = -1;
inline constexpr ObjId kNoObject = -1;

/// Out-of-range indices, non-composable lookups, missing table entries.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A construction refused because its estimated size exceeds the guard.
class SizeGuardExceeded : public std::runtime_error {
 public:
  SizeGuardExceeded(const std::string& what, std::uint64_t estimate)
      : std::runtime_error(what), estimate_(estimate) {}
  std::uint64_t estimate() const noexcept { return estimate_; }

 private:
  std::uint64_t estimate_;
};

/// List of violated laws; empty iff the checked structure is lawful.
struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const noexcept { return violations.empty(); }
  void add(std::string v) { violations.push_back(std::move(v)); }
};

struct Morphism {
  std::string name;
  ObjId dom = kNoObject;
  ObjId cod = kNoObject;
};

class FinCategory;
using CatPtr = std::shared_ptr<const FinCategory>;

class FinCategory {
 public:
  class Builder;

  std::size_t object_count() const noexcept { return object_names_.size(); }
  std::size_t morphism_count() const noexcept { return morphisms_.size(); }

  const std::string& object_name(ObjId a) const;
  const Morphism& morphism(MorId f) const;
  const std::string& morphism_name(MorId f) const { return morphism(f).name; }
  ObjId dom(MorId f) const { return morphism(f).dom; }
  ObjId cod(MorId f) const { return morphism(f).cod; }

  MorId identity(ObjId a) const;
  bool is_identity(MorId f) const { return identity(dom(f)) == f; }

  /// f;g. Throws StructuralError when cod(f) != dom(g).
  MorId compose(MorId f, MorId g) const;
  MorId compose(std::initializer_list<MorId> chain) const;

  /// Morphisms out of `a`, ordered by (cod, index).
  std::span<const MorId> outgoing(ObjId a) const;
  /// Morphisms into `b`, ordered by (dom, index).
  std::span<const MorId> incoming(ObjId b) const;
  /// hom(a, b) in index order.
  std::span<const MorId> hom(ObjId a, ObjId b) const;

  std::optional<ObjId> find_object(std::string_view name) const;
  std::optional<MorId> find_morphism(std::string_view name) const;

  /// Every hom-set has at most one element.
  bool is_thin() const;
  std::size_t max_hom_size() const;

  /// Identical tables (names ignored).
  bool same_structure(const FinCategory& other) const;

 private:
  friend class Builder;
  void check_object(ObjId a) const;
  void check_morphism(MorId f) const;

  std::vector<std::string> object_names_;
  std::vector<Morphism> morphisms_;
  std::vector<MorId> identities_;
  std::vector<std::vector<MorId>> outgoing_;
  std::vector<std::vector<MorId>> incoming_;
  std::vector<std::size_t> out_position_;
  // composite_[f][out_position_[g]] = f;g
  std::vector<std::vector<MorId>> composite_;
  std::unordered_map<std::string, ObjId> object_index_;
  std::unordered_map<std::string, MorId> morphism_index_;
};

/// Incremental construction. build() rejects missing identities and missing
/// composites; lawfulness is checked separately by validate_category().
class FinCategory::Builder {
 public:
  ObjId add_object(std::string name);
  /// Adds the object together with its identity morphism.
  ObjId add_object_with_identity(std::string name, std::string identity_name);
  MorId add_morphism(std::string name, ObjId dom, ObjId cod);
  void set_identity(ObjId a, MorId f);
  void set_composite(MorId f, MorId g, MorId h);

  std::size_t object_count() const { return cat_.object_names_.size(); }
  std::size_t morphism_count() const { return cat_.morphisms_.size(); }
  ObjId dom(MorId f) const { return cat_.morphisms_.at(f).dom; }
  ObjId cod(MorId f) const { return cat_.morphisms_.at(f).cod; }

  /// Composites missing from the explicit table are an error.
  CatPtr build();
  /// Fills every composable pair from `composite`, then builds.
  CatPtr build(const std::function<MorId(MorId, MorId)>& composite);

 private:
  void index();
  FinCategory cat_;
  std::map<std::pair<MorId, MorId>, MorId> table_;
  bool indexed_ = false;
};

ValidationReport validate_category(const FinCategory& c);

CatPtr opposite(const CatPtr& c);
CatPtr terminal_category();
CatPtr discrete_category(std::size_t n);

/// Product with pairwise indexing: object (a, b) has index a * |B| + b, and
/// likewise for morphisms.
struct ProductCategory {
  CatPtr category;
  CatPtr left;
  CatPtr right;

  ObjId object(ObjId a, ObjId b) const;
  MorId morphism(MorId f, MorId g) const;
  ObjId left_object(ObjId ab) const;
  ObjId right_object(ObjId ab) const;
  MorId left_morphism(MorId fg) const;
  MorId right_morphism(MorId fg) const;
};

ProductCategory product(const CatPtr& a, const CatPtr& b);

struct FunctorData {
  CatPtr source;
  CatPtr target;
  std::vector<ObjId> object_map;
  std::vector<MorId> morphism_map;

  ObjId on_object(ObjId a) const { return object_map.at(a); }
  MorId on_morphism(MorId f) const { return morphism_map.at(f); }
  bool same_tables(const FunctorData& other) const {
    return object_map == other.object_map && morphism_map == other.morphism_map;
  }
};

ValidationReport validate_functor(const FunctorData& f);
FunctorData identity_functor(const CatPtr& c);
/// Diagrammatic composite F;G.
FunctorData compose_functors(const FunctorData& f, const FunctorData& g);
/// The same tables read between opposite categories.
FunctorData opposite_functor(const FunctorData& f, const CatPtr& source_op, const CatPtr& target_op);
/// Constant functor at an object.
FunctorData constant_functor(const CatPtr& source, const CatPtr& target, ObjId value);

/// Components indexed by source object; component a : F(a) -> G(a).
struct NatTransData {
  FunctorData source_functor;
  FunctorData target_functor;
  std::vector<MorId> components;
};

ValidationReport validate_nat_trans(const NatTransData& n);

/// The full subcategory on the objects accepted by `keep`, with its inclusion.
struct Subcategory {
  CatPtr category;
  FunctorData inclusion;
  std::vector<ObjId> object_of;  // parent object -> sub object, or kNoObject
};
Subcategory full_subcategory(const CatPtr& c, const std::function<bool(ObjId)>& keep);

/// Backtracking enumeration of all functors A -> C in canonical order.
/// Objects are assigned first (index order), then morphisms, pruned by
/// endpoints, identities and every composite whose factors are assigned.
/// Stops after `limit` results; returns whether the enumeration completed.
bool enumerate_functors(const CatPtr& a, const CatPtr& c, std::size_t limit,
                        const std::function<void(const FunctorData&)>& visit);

/// Saturating upper bound on the number of functors A -> C.
std::uint64_t estimate_functor_count(const FinCategory& a, const FinCategory& c);

/// All natural transformations F => G, in canonical order.
std::vector<NatTransData> enumerate_nat_trans(const FunctorData& f, const FunctorData& g);

inline constexpr std::size_t kDefaultSizeGuard = 10000;

struct FunctorCategory {
  CatPtr category;
  CatPtr source;
  CatPtr target;
  std::vector<FunctorData> functors;          // indexed by object
  std::vector<NatTransData> transformations;  // indexed by morphism

  std::optional<ObjId> find(const FunctorData& f) const;
  std::optional<MorId> find(const NatTransData& n) const;

 private:
  friend FunctorCategory functor_category(const CatPtr&, const CatPtr&, std::size_t);
  std::map<std::vector<MorId>, ObjId> functor_index_;
  std::map<std::pair<ObjId, std::vector<MorId>>, MorId> nat_index_;
};

/// [A, C] with all functors as objects and all natural transformations as
/// morphisms. Refuses (SizeGuardExceeded) rather than producing partial output
/// when the functor count exceeds `size_guard`.
FunctorCategory functor_category(const CatPtr& a, const CatPtr& c,
                                 std::size_t size_guard = kDefaultSizeGuard);

/// F : A x B -> C  gives  A -> [B, C],  a |-> F(a, -).
FunctorData curry_right(const ProductCategory& ab, const FunctorData& f, const FunctorCategory& bc);
/// F : A x B -> C  gives  B -> [A, C],  b |-> F(-, b).
FunctorData curry_left(const ProductCategory& ab, const FunctorData& f, const FunctorCategory& ac);
/// Inverse of curry_right.
FunctorData uncurry_right(const ProductCategory& ab, const FunctorData& g, const FunctorCategory& bc);

}  // namespace refine
