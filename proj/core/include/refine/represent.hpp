#pragma once

// Relative slices, the positive and negative representations, their
// factorizations and preservation properties, and the monoidal (Day-style)
// structure induced by a tensor on the refinement system.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "refine/fincat.hpp"
#include "refine/psh.hpp"
#include "refine/refsys.hpp"
#include "refine/report.hpp"

namespace refine {

/// Object (P, c : tP -> B).
struct SliceObject {
  ObjId P = kNoObject;
  MorId c = kNoMorphism;
};

/// Morphism (alpha, c2) : (P1, t(alpha);c2) -> (P2, c2).
struct SliceMorphism {
  MorId alpha = kNoMorphism;
  MorId c2 = kNoMorphism;
};

/// <B> over a refinement system. Objects are ordered by P then c, morphisms
/// by alpha then c2.
struct SliceCategory {
  CatPtr category;
  SysPtr system;
  ObjId B = kNoObject;
  std::vector<SliceObject> objects;
  std::vector<SliceMorphism> morphisms;

  /// kNoObject / kNoMorphism when absent.
  ObjId find(ObjId P, MorId c) const;
  MorId find_morphism(MorId alpha, MorId c2) const;

 private:
  friend std::shared_ptr<const SliceCategory> slice(const SysPtr& t, ObjId B);
  std::vector<std::size_t> object_offset_;    // per D-object
  std::vector<std::size_t> morphism_offset_;  // per D-morphism
};
using SlicePtr = std::shared_ptr<const SliceCategory>;

SlicePtr slice(const SysPtr& t, ObjId B);
/// [[A]] as the slice of the opposite system: objects (Q, c : A -> tQ).
SlicePtr coslice_dual(const SysPtr& t, ObjId A);

/// <c> : <A> -> <B>, postcomposition on tags. Works for coslices when both
/// slices come from the opposite system and c is read there.
FunctorData slice_action(const SliceCategory& from, const SliceCategory& to, MorId c);

/// A representation together with the element -> derivation table and the
/// representing object (Q, id).
struct Representation {
  SlicePtr slice;
  ObjId Q = kNoObject;
  Presheaf presheaf;
  std::vector<std::vector<MorId>> elements;  // per slice object
  ObjId point = kNoObject;

  /// Index of `alpha` among the elements over `object`.
  Elem element_of(ObjId object, MorId alpha) const;
};
using RepPtr = std::shared_ptr<const Representation>;

/// Thread-safe caches for one system: slices per base object and
/// representations per D-object.
class SliceCache {
 public:
  explicit SliceCache(SysPtr t) : t_(std::move(t)) {}
  const SysPtr& system_ptr() const noexcept { return t_; }
  const RefinementSystem& system() const noexcept { return *t_; }

  SlicePtr slice(ObjId B) const;
  RepPtr rep(ObjId Q) const;
  /// <c> : <dom c> -> <cod c>.
  FunctorData action(MorId c) const;

 private:
  SysPtr t_;
  mutable std::mutex mu_;
  mutable std::map<ObjId, SlicePtr> slices_;
  mutable std::map<ObjId, RepPtr> reps_;
};

/// Positive side over t and negative side over t^op.
class RepresentationContext {
 public:
  explicit RepresentationContext(SysPtr t);
  const RefinementSystem& system() const noexcept { return pos_.system(); }
  const SysPtr& system_ptr() const noexcept { return pos_.system_ptr(); }
  const SliceCache& pos() const noexcept { return pos_; }
  const SliceCache& neg() const noexcept { return neg_; }

 private:
  SliceCache pos_;
  SliceCache neg_;
};

/// <Q> over <tQ>: (P, c) |-> derivations(P, c, Q), restriction by precomposition.
Representation pos_rep(const SysPtr& t, ObjId Q);
/// [[P]] over [[tP]]: (Q, c) |-> derivations(P, c, Q), restriction by postcomposition.
Representation neg_rep(const SysPtr& t, ObjId P);

/// beta |-> beta;alpha, a derivation <P> => <Q> over <c>.
PshDerivation pos_rep_derivation(const RepresentationContext& ctx, const Derivation& d);
/// gamma |-> alpha;gamma, a derivation [[Q]] => [[P]] over [[c]].
PshDerivation neg_rep_derivation(const RepresentationContext& ctx, const Derivation& d);

/// For every judgment, the transport of derivations is a bijection onto the
/// natural families over <c> (and over [[c]] for the negative side).
CheckReport representation_ff_check(const RepresentationContext& ctx, unsigned jobs = 1);

/// Morphism (alpha, e) : (P1, c1) -> (P2, c2) with c1;e = t(alpha);c2.
struct CommaMorphism {
  MorId alpha = kNoMorphism;
  MorId e = kNoMorphism;
  ObjId dom = kNoObject;
  ObjId cod = kNoObject;
};

/// The comma category t/T: objects (P, c : tP -> B) for every B, ordered by
/// P then c in outgoing order, with the projection to T.
struct CommaCategory {
  CatPtr category;
  std::vector<SliceObject> objects;
  std::vector<CommaMorphism> morphisms;
  FunctorData cod;

  ObjId find(ObjId P, MorId c) const;

 private:
  friend CommaCategory comma_category(const RefinementSystem& t);
  std::map<std::pair<ObjId, MorId>, ObjId> index_;
};
CommaCategory comma_category(const RefinementSystem& t);

/// The cod projection is an opfibration, its fibers and reindexing agree with
/// the slices and <c>, and every <Q> is the representable at (Q, id); the
/// same for [[-]] through the opposite system.
CheckReport factorization_check(const RepresentationContext& ctx, unsigned jobs = 1);

/// Pullbacks go to pullbacks along <c>, pushforwards go to pullbacks along
/// [[c]] under the negative representation; the comparison
/// push_<c><P> => <c!P> is recorded with its invertibility.
CheckReport preservation_check(const RepresentationContext& ctx);

// ---------------------------------------------------------------------------
// Monoidal structure

/// Full subcategory of A x B on the accepted object pairs.
struct PairCategory {
  CatPtr category;
  CatPtr left;
  CatPtr right;
  std::vector<std::pair<ObjId, ObjId>> objects;
  std::vector<std::pair<MorId, MorId>> morphisms;

  ObjId find(ObjId a, ObjId b) const;
  MorId find_morphism(MorId f, MorId g) const;
  bool total() const;

 private:
  friend PairCategory pair_category(const CatPtr&, const CatPtr&, const std::function<bool(ObjId, ObjId)>&);
  std::map<std::pair<ObjId, ObjId>, ObjId> object_index_;
  std::map<std::pair<MorId, MorId>, MorId> morphism_index_;
};
PairCategory pair_category(const CatPtr& a, const CatPtr& b, const std::function<bool(ObjId, ObjId)>& keep = {});

/// phi(a) x psi(b) over a pair category; (x, y) has index x*|psi(b)|+y.
Presheaf pair_tensor(const PairCategory& base, const PresheafView& phi, const PresheafView& psi);

/// A possibly partial tensor on one category, defined on `domain`.
struct TensorTable {
  CatPtr category;
  PairCategory domain;
  FunctorData tensor;  // domain.category -> category
  ObjId unit = kNoObject;

  std::optional<ObjId> object(ObjId a, ObjId b) const;
  std::optional<MorId> morphism(MorId f, MorId g) const;
};

/// Tensors on D and T with comparison isomorphisms
/// kappa(P1, P2) : t(P1 (x) P2) -> tP1 (x) tP2, natural in both arguments.
/// Strict structures have identity comparisons.
struct MonoidalStructure {
  TensorTable D;
  TensorTable T;
  std::vector<MorId> comparison;  // per object of D.domain

  /// Throws StructuralError when P1 (x) P2 is undefined.
  MorId kappa(ObjId P1, ObjId P2) const;
  bool strict() const;
};

/// Tensor functoriality, associativity and unit laws where defined, and
/// compatibility of t with both tensors through the comparisons.
ValidationReport validate_monoidal(const RefinementSystem& t, const MonoidalStructure& M);
/// Fills identity comparisons; throws unless t(P1 (x) P2) = tP1 (x) tP2.
MonoidalStructure strict_monoidal(const RefinementSystem& t, TensorTable D, TensorTable T);
/// A tensor table from an object table and a morphism table over the pairs
/// accepted by `defined`.
TensorTable make_tensor(const CatPtr& C, ObjId unit, const std::function<bool(ObjId, ObjId)>& defined,
                        const std::function<ObjId(ObjId, ObjId)>& on_objects,
                        const std::function<MorId(MorId, MorId)>& on_morphisms);

struct MonoidObject {
  ObjId W = kNoObject;
  MorId multiplication = kNoMorphism;  // W (x) W -> W
  MorId unit = kNoMorphism;            // I -> W, optional
};
ValidationReport validate_monoid(const MonoidalStructure& M, const MonoidObject& w);

/// m_{B1,B2} : <B1> x <B2> -> <B1 (x) B2> on the pairs the tensor accepts.
struct DayProduct {
  SlicePtr left;
  SlicePtr right;
  SlicePtr target;
  PairCategory domain;
  FunctorData m;
};
DayProduct day_product(const SliceCache& pos, const MonoidalStructure& M, ObjId B1, ObjId B2);

/// (beta1, beta2) |-> beta1 (x) beta2, a derivation <P> x <Q> => <P (x) Q>
/// over m followed by <kappa(P,Q)^-1>. Returns the derivation restricted to
/// the pair domain and the pair tensor it starts from.
struct DayDerivation {
  Presheaf source;
  PshDerivation derivation;
  RepPtr target;
};
DayDerivation m_derivation(const SliceCache& pos, const MonoidalStructure& M, const DayProduct& day, ObjId P,
                           ObjId Q);

/// Residual object with its evaluation map. Left: plug : A (x) X -> C.
/// Right: plug : X (x) A -> C.
struct ResidualCert {
  ObjId object = kNoObject;
  MorId plug = kNoMorphism;
};
/// Search in a category with a total tensor: f |-> (id (x) f);plug is a
/// bijection hom(Y, X) -> hom(A (x) Y, C) for every Y (mirrored on the right).
std::optional<ResidualCert> find_residual(const TensorTable& T, Side side, ObjId A, ObjId C);
/// Refinement of a base residual: X over base.object and plug over base.plug
/// with delta |-> (id (x) delta);plug bijective onto derivations of
/// (P (x) Q, (id (x) d);plug_T, R) for every Q and d.
std::optional<ResidualCert> find_refined_residual(const RefinementSystem& t, const MonoidalStructure& M, Side side,
                                                  ObjId P, ObjId R, const ResidualCert& base);

/// costr : <A\C> -> [<A>, <C>] as the currying of m;<plug>, kept as its
/// object and morphism images.
struct Costr {
  ResidualCert base;
  DayProduct day;   // the tensor product feeding the plug
  FunctorData uncurried;  // day.domain -> <C>
  ProductCategory product;  // argument side x residual side, pair indexed
  std::vector<FunctorData> objects;
  std::vector<NatTransData> morphisms;
};
/// Absent when the residual does not exist; requires a strict total tensor.
std::optional<Costr> costr(const SliceCache& pos, const MonoidalStructure& M, Side side, ObjId A, ObjId C);

/// The end residual pulled back along costr, computed directly.
ResidualAlong costr_residual(const Costr& k, const PresheafView& phi, const PresheafView& omega);

/// The three Day-style clauses for P over A, Q over B, R over C.
CheckReport genday_check(const RepresentationContext& ctx, const MonoidalStructure& M, ObjId P, ObjId Q, ObjId R);
CheckReport genday_check_all(const RepresentationContext& ctx, const MonoidalStructure& M);

/// P (x)_W Q as the pushforward of P (x) Q along kappa;p.
std::optional<LiftCertificate> fiber_tensor(const RefinementSystem& t, const MonoidalStructure& M,
                                            const MonoidObject& w, ObjId P, ObjId Q);
/// The curried multiplication W -> W\W (left) or W -> W/W (right).
std::optional<MorId> curried_multiplication(const MonoidalStructure& M, const MonoidObject& w, Side side);
/// P -o_W R (left) or R o-_W P (right): the refined residual pulled back
/// along the curried multiplication.
struct FiberResidual {
  ResidualCert residual;
  LiftCertificate pullback;
};
std::optional<FiberResidual> fiber_residual(const RefinementSystem& t, const MonoidalStructure& M,
                                            const MonoidObject& w, Side side, ObjId P, ObjId R);

/// <P> (x)_<W> <Q>: the pair tensor pushed along m;<p>.
Pushforward day_tensor(const RepresentationContext& ctx, const MonoidalStructure& M, const MonoidObject& w, ObjId P,
                       ObjId Q);

/// Coercions <P> (x)_<W> <Q> => <P (x)_W Q> exist, and fiber residuals are
/// represented by the Day residuals.
CheckReport monoid_lax_check(const RepresentationContext& ctx, const MonoidalStructure& M, const MonoidObject& w);

std::string describe_slice_object(const SliceCategory& s, ObjId o);

}  // namespace refine
