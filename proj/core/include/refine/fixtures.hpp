#pragma once

// Builders for concrete refinement systems: Hoare logic over a finite state
// space, contexts over a thin multicategory, meet lattices, a Galois
// adjunction, and seeded random systems.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "refine/duality.hpp"
#include "refine/fincat.hpp"
#include "refine/refsys.hpp"
#include "refine/represent.hpp"

namespace refine {

// ---------------------------------------------------------------------------
// Hoare logic

struct HoareGenerator {
  std::string name;
  std::vector<std::size_t> map;  // state -> state
};

struct HoareSpec {
  std::vector<std::string> states;
  std::vector<HoareGenerator> generators;
  /// Predicates as state bitmasks; empty means every subset.
  std::vector<std::uint64_t> predicates;
  std::size_t monoid_bound = 4096;
};

struct HoareFixture {
  HoareSpec spec;
  SysPtr system;
  std::vector<std::vector<std::size_t>> commands;  // per T-morphism, state map
  std::vector<std::uint64_t> predicates;           // per D-object
};

/// One base object W whose morphisms are the transformer monoid generated by
/// the commands; predicates refine W with one derivation (P, c, Q) iff c(P) is
/// contained in Q. Throws StructuralError when the closure exceeds the bound.
HoareFixture build_hoare(const HoareSpec& spec);
/// The two-state fixture with commands swap and set0.
HoareSpec hoare_two_state();

/// Image and preimage, as D-objects; absent when the predicate is not listed.
std::optional<ObjId> hoare_sp(const HoareFixture& h, MorId c, ObjId P);
std::optional<ObjId> hoare_wp(const HoareFixture& h, MorId c, ObjId Q);
std::string predicate_name(const HoareSpec& spec, std::uint64_t mask);

// ---------------------------------------------------------------------------
// Contexts over a multicategory

struct Multimorphism {
  std::string name;
  std::vector<std::size_t> sources;  // formula indices, as a multiset
  std::size_t target = 0;
};

/// A declared tensor: formula `tensor` stands for (left, right), with the
/// left-rule table pairing proofs of (left, right, Gamma |- X) with proofs of
/// (tensor, Gamma |- X) by multimorphism name.
struct TensorDeclaration {
  std::size_t left = 0;
  std::size_t right = 0;
  std::size_t tensor = 0;
  std::vector<std::pair<std::string, std::string>> left_rule;
};

struct MulticategorySpec {
  std::vector<std::string> formulas;
  std::vector<Multimorphism> multimorphisms;
  std::vector<TensorDeclaration> tensors;
};

struct TruncationParams {
  std::size_t K = 3;
};

/// Formulas {A, B, A*B, C}; multimorphisms id_A, id_B, id_A*B, id_C,
/// tensR : A, B |- A*B and u : |- C.
MulticategorySpec linear_example();

/// Identities present, at most one multimorphism per source multiset and
/// target, and every multicomposite present.
ValidationReport validate_multicategory(const MulticategorySpec& mc);

struct LinctxFixture {
  MulticategorySpec spec;
  TruncationParams trunc;
  SysPtr system;
  std::vector<std::vector<std::size_t>> contexts;  // per D-object, sorted formulas
  MonoidalStructure monoidal;                      // merge of contexts over + on finite sets
  MonoidObject one;                                // 1 with 2 -> 1, when K >= 2

  std::optional<ObjId> context(std::vector<std::size_t> formulas) const;
  /// T-morphism for a function n -> m given as its values.
  MorId function(std::size_t n, std::size_t m, const std::vector<std::size_t>& values) const;
};

/// Contexts are sorted formula lists of length at most K; a morphism
/// Delta -> Gamma is a function on positions with one multimorphism per
/// target position from the formulas mapped onto it. The base is the skeleton
/// of finite sets {0..K}.
LinctxFixture build_linctx(const MulticategorySpec& mc, const TruncationParams& trunc);

/// Validates a declared left-rule table as a bijection between proofs.
ValidationReport validate_left_rule(const MulticategorySpec& mc, const TensorDeclaration& decl);

/// The context (tensor) is the pushforward of (left, right) along 2 -> 1, its
/// negative encodings hold, and at Gamma = (tensor) the single push of
/// <left, right> is empty while <tensor> and its double dual are not.
CheckReport tensor_left_check(const LinctxFixture& fx, const DualityContext& ctx, const TensorDeclaration& decl);

// ---------------------------------------------------------------------------
// Lattices

/// A finite poset by its order relation; leq[x][y] iff x <= y.
struct PosetSpec {
  std::vector<std::string> names;
  std::vector<std::vector<bool>> leq;
};

struct LatticeFixture {
  PosetSpec D;
  PosetSpec T;
  std::vector<std::size_t> map;
  SysPtr system;
  MonoidalStructure monoidal;  // meet, unit top
  std::vector<MonoidObject> monoids;  // every T-object with W meet W = W
};

/// Posetal system for a monotone meet-preserving map of finite meet
/// semilattices with top; throws StructuralError otherwise.
LatticeFixture build_lattice(const PosetSpec& D, const PosetSpec& T, const std::vector<std::size_t>& map);
PosetSpec powerset_poset(const std::vector<std::string>& atoms);
PosetSpec chain_poset(std::size_t n, const std::string& prefix);
/// Subsets of {a, b} into the 3-chain by x |-> 1 + [b in x].
LatticeFixture lattice_example();
CatPtr poset_category(const PosetSpec& p);

// ---------------------------------------------------------------------------
// Adjunction

/// f : 3 -> 2 and g : 2 -> 3 with f(x) <= y iff x <= g(y), lifted to the
/// projections 3 x 2 -> 3 and 2 x 2 -> 2.
RefSysAdjunction galois_adjunction();

// ---------------------------------------------------------------------------
// Random systems

struct RandomBounds {
  std::size_t max_T_objects = 3;
  std::size_t max_D_objects = 6;
  std::size_t max_hom = 3;
};

/// Categories of pairs (function, base morphism) closed under composition;
/// deterministic in the seed. Throws StructuralError when no sample fits the
/// bounds within the retry budget.
SysPtr random_refsys(std::uint64_t seed, const RandomBounds& bounds = {});

}  // namespace refine
