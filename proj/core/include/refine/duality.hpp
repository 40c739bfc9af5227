#pragma once

// Judgments and the presheaf of derivations, the bracket functors, the
// dualization operators between presheaves on slices and coslices, and the
// negative encodings of pushforwards and fiber tensors.

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "refine/fincat.hpp"
#include "refine/psh.hpp"
#include "refine/refsys.hpp"
#include "refine/report.hpp"
#include "refine/represent.hpp"

namespace refine {

/// (beta : P1 -> P2, gamma : Q2 -> Q1) : (P1, c1, Q1) -> (P2, c2, Q2) with
/// c1 = t(beta);c2;t(gamma).
struct JudgmentMorphism {
  MorId beta = kNoMorphism;
  MorId gamma = kNoMorphism;
  Judgment dom;
  Judgment cod;
  auto operator<=>(const JudgmentMorphism&) const = default;
};

/// Derivation sets per judgment, ordered by D-morphism index, and the action
/// alpha |-> beta;alpha;gamma. With `corrupt_action` every non-identity action
/// into a set of two or more derivations is rotated by one.
class DerivationTable {
 public:
  explicit DerivationTable(SysPtr t, bool corrupt_action = false);

  const RefinementSystem& system() const noexcept { return *t_; }
  const SysPtr& system_ptr() const noexcept { return t_; }
  bool corrupted() const noexcept { return corrupt_; }

  const std::vector<MorId>& derivations(const Judgment& j) const;
  std::size_t count(const Judgment& j) const { return derivations(j).size(); }
  /// Index of alpha in derivations(j); throws StructuralError when absent.
  Elem index_of(const Judgment& j, MorId alpha) const;

  bool valid(const JudgmentMorphism& m) const;
  JudgmentMorphism identity(const Judgment& j) const;
  /// f;g with cod f = dom g.
  JudgmentMorphism compose(const JudgmentMorphism& f, const JudgmentMorphism& g) const;
  /// Restriction of element y over m.cod to an element over m.dom.
  Elem act(const JudgmentMorphism& m, Elem y) const;

 private:
  std::uint64_t key(const Judgment& j) const;

  SysPtr t_;
  bool corrupt_;
  std::unordered_map<std::uint64_t, std::vector<MorId>> sets_;
};

/// The judgment category materialized, for small systems.
struct JudgmentCategory {
  CatPtr category;
  std::vector<Judgment> objects;
  std::vector<JudgmentMorphism> morphisms;

  ObjId find(const Judgment& j) const;
  MorId find_morphism(const JudgmentMorphism& m) const;

 private:
  friend JudgmentCategory judgment_category(const RefinementSystem& t, std::size_t size_guard);
  std::map<Judgment, ObjId> object_index_;
  std::map<JudgmentMorphism, MorId> morphism_index_;
};

/// Objects in (P, Q, c) order, morphisms by (beta, gamma, c2). Throws
/// SizeGuardExceeded when the morphism count would exceed `size_guard`.
JudgmentCategory judgment_category(const RefinementSystem& t, std::size_t size_guard = 200000);
/// Der over the materialized judgment category.
Presheaf der_presheaf(const JudgmentCategory& J, const DerivationTable& der);

/// Derivation table together with the slice caches of both sides.
class DualityContext {
 public:
  explicit DualityContext(SysPtr t, bool corrupt_action = false);
  const RefinementSystem& system() const noexcept { return der_.system(); }
  const SysPtr& system_ptr() const noexcept { return der_.system_ptr(); }
  const RepresentationContext& reps() const noexcept { return reps_; }
  const DerivationTable& der() const noexcept { return der_; }

  SlicePtr slice(ObjId B) const { return reps_.pos().slice(B); }
  SlicePtr coslice(ObjId B) const { return reps_.neg().slice(B); }

 private:
  DerivationTable der_;
  RepresentationContext reps_;
};

/// cut_B((P, c), (R, d)) = (P, c;d, R) read on the slice <B> and the coslice
/// [[B]]; on morphisms ((beta, _), (gamma, _)) |-> (beta, gamma).
Judgment bracket_object(const RefinementSystem& t, const SliceCategory& S, const SliceCategory& C, ObjId a, ObjId k);
JudgmentMorphism bracket_morphism(const RefinementSystem& t, const SliceCategory& S, const SliceCategory& C, MorId h,
                                  MorId g);
/// cut_B as a functor table on the materialized product <B> x [[B]].
FunctorData bracket(const DualityContext& ctx, ObjId B, const JudgmentCategory& J, const ProductCategory& SC);

/// cut_B is a bifunctor into judgments for every B (well-typed images,
/// identities, composition in each argument, interchange), and for every
/// c : A -> B the two composites <A> x [[B]] -> Jdg agree on objects and on
/// the generating morphisms (h, id) and (id, g).
CheckReport extranat_check(const DualityContext& ctx);

/// A dual presheaf with its elements as natural families.
struct Dual {
  Presheaf presheaf;
  std::vector<std::vector<Family>> elements;  // per object, lexicographic
};

/// Over [[B]]: (d, R) |-> natural families phi(P, c) -> Der(P, c;d, R),
/// restricted along coslice morphisms by postcomposition.
Dual dual_left(const DualityContext& ctx, ObjId B, const PresheafView& phi, unsigned jobs = 1);
/// Over <B>: (P, c) |-> natural families psi(d, R) -> Der(P, c;d, R),
/// restricted along slice morphisms by precomposition.
Dual dual_right(const DualityContext& ctx, ObjId B, const PresheafView& psi, unsigned jobs = 1);

/// The same duals through the end residual over [<B>, Jdg] (resp.
/// [[[B]], Jdg]) pulled back along the currying of cut_B. Throws
/// SizeGuardExceeded when a functor category is refused.
Presheaf dual_left_via_residual(const DualityContext& ctx, ObjId B, const Presheaf& phi,
                                std::size_t size_guard = kDefaultSizeGuard);
Presheaf dual_right_via_residual(const DualityContext& ctx, ObjId B, const Presheaf& psi,
                                 std::size_t size_guard = kDefaultSizeGuard);
/// Direct and residual duals of every representable agree table for table;
/// refusals are skips.
CheckReport dual_cross_check(const DualityContext& ctx, std::size_t size_guard = kDefaultSizeGuard);

/// For representables and constants over <B> and [[B]]: the two transposes
/// and the pairings agree, duals are antitone, units and counits are natural,
/// triangle identities hold and the triple dual collapses.
CheckReport dual_adjunction_check(const DualityContext& ctx, ObjId B);

/// <Q> = pull_{k_Q} Der, [[Q]] = pull_{v_Q} Der, and both duals of the
/// representations are the representations, by the transposition maps and
/// by vertical isomorphism.
CheckReport duality_check(const DualityContext& ctx, ObjId Q, unsigned jobs = 1);
CheckReport duality_check_all(const DualityContext& ctx, unsigned jobs = 1);

/// Inputs for one c : A -> B.
struct NotpushInputs {
  const PresheafView* phi = nullptr;    // over <A>
  const PresheafView* psi = nullptr;    // over [[B]]
  const PresheafView* rho = nullptr;    // over <B>
  const PresheafView* sigma = nullptr;  // over [[A]]
};
/// pull_[[c]] dual_left(phi) = dual_left(push_<c> phi) and
/// pull_<c> dual_right(psi) = dual_right(push_[[c]] psi) as isomorphisms;
/// push_[[c]] dual_left(rho) => dual_left(pull_<c> rho) and
/// push_<c> dual_right(sigma) => dual_right(pull_[[c]] sigma) as coercions,
/// with their invertibility noted.
CheckReport notpush_check(const DualityContext& ctx, MorId c, const NotpushInputs& in);
/// Every c with representables of the refinements of its endpoints.
CheckReport notpush_check_all(const DualityContext& ctx);

/// For a certified pushforward c!P: <c!P> = dual_right(pull_[[c]] [[P]]) and
/// <c!P> = dual_right(dual_left(push_<c> <P>)); whether the single push is
/// already <c!P> is noted.
CheckReport negative_encoding_check(const DualityContext& ctx, MorId c, ObjId P);
CheckReport negative_encoding_check_all(const DualityContext& ctx);

/// <P (x)_W Q> = dual_right(dual_left(<P> (x)_<W> <Q>)).
CheckReport notnottensor_check(const DualityContext& ctx, const MonoidalStructure& M, const MonoidObject& w, ObjId P,
                               ObjId Q);
CheckReport notnottensor_check_all(const DualityContext& ctx, const MonoidalStructure& M, const MonoidObject& w);

}  // namespace refine
