#pragma once

// Refinement systems: validated functors t : D -> T, with judgments,
// derivations, lift search and morphisms/adjunctions of systems.

#include <compare>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "refine/fincat.hpp"
#include "refine/report.hpp"

namespace refine {

class RefinementSystem;
using SysPtr = std::shared_ptr<const RefinementSystem>;

class RefinementSystem {
 public:
  /// Validates `t` and indexes fibers; throws StructuralError with the first
  /// violated law on failure.
  explicit RefinementSystem(FunctorData t, std::string name = {});

  const std::string& name() const noexcept { return name_; }
  const FinCategory& D() const noexcept { return *t_.source; }
  const FinCategory& T() const noexcept { return *t_.target; }
  const CatPtr& D_ptr() const noexcept { return t_.source; }
  const CatPtr& T_ptr() const noexcept { return t_.target; }
  const FunctorData& functor() const noexcept { return t_; }

  ObjId over(ObjId P) const { return t_.on_object(P); }
  MorId image(MorId alpha) const { return t_.on_morphism(alpha); }
  /// D-objects refining `a`, in index order.
  std::span<const ObjId> fiber(ObjId a) const { return fibers_.at(a); }

  std::string object_label(ObjId P) const { return D().object_name(P); }

 private:
  std::string name_;
  FunctorData t_;
  std::vector<std::vector<ObjId>> fibers_;
};

SysPtr make_system(FunctorData t, std::string name = {});
/// t^op : D^op -> T^op. Indices are preserved.
SysPtr opposite_system(const RefinementSystem& t);
/// id_T : T -> T.
SysPtr identity_system(const CatPtr& T);
/// !_D : D -> 1.
SysPtr terminal_system(const CatPtr& D);

struct Judgment {
  ObjId P = kNoObject;
  MorId c = kNoMorphism;
  ObjId Q = kNoObject;
  auto operator<=>(const Judgment&) const = default;
};

struct Derivation {
  Judgment judgment;
  MorId alpha = kNoMorphism;
};

/// Throws StructuralError unless t(P) = dom(c) and t(Q) = cod(c).
void check_judgment(const RefinementSystem& t, const Judgment& j);
bool is_subtyping(const RefinementSystem& t, const Judgment& j);
std::string describe(const RefinementSystem& t, const Judgment& j);

/// D-morphisms P -> Q lying over c, in index order.
std::vector<MorId> derivations(const RefinementSystem& t, const Judgment& j);
std::size_t count_derivations(const RefinementSystem& t, const Judgment& j);
bool has_derivation(const RefinementSystem& t, const Judgment& j);

Derivation compose_rule(const RefinementSystem& t, const Derivation& d1, const Derivation& d2);

/// Mutually inverse subtyping derivations P -> Q and Q -> P.
std::optional<std::pair<MorId, MorId>> vertical_iso(const RefinementSystem& t, ObjId P, ObjId Q);

enum class LiftDirection { pullback, pushforward };

struct LiftCertificate {
  LiftDirection direction = LiftDirection::pullback;
  MorId c = kNoMorphism;
  ObjId subject = kNoObject;    // Q for a pullback, P for a pushforward
  ObjId candidate = kNoObject;  // c*Q, resp. c!P
  MorId structural = kNoMorphism;  // c*Q -> Q, resp. P -> c!P, over c
  std::size_t factorings = 0;   // test judgments checked for unique factoring
};

/// Checks that `structural : candidate -> Q` over c is cartesian: every
/// derivation of (R, d;c, Q) factors uniquely through it.
std::optional<LiftCertificate> certify_pullback(const RefinementSystem& t, MorId c, ObjId Q, MorId structural);
/// Dual of certify_pullback, read in the opposite system.
std::optional<LiftCertificate> certify_pushforward(const RefinementSystem& t, MorId c, ObjId P, MorId structural);
/// Replays the unique-factoring checks of a certificate.
bool replay(const RefinementSystem& t, const LiftCertificate& cert);

/// Least-index candidate in the fiber over dom(c) admitting a certified
/// structural derivation, or absence.
std::optional<LiftCertificate> find_pullback(const RefinementSystem& t, MorId c, ObjId Q);
std::optional<LiftCertificate> find_pushforward(const RefinementSystem& t, MorId c, ObjId P);

/// The unique factor of `beta : R -> Q` through the pullback certificate
/// (over `d` with beta over d;c). Absent if beta does not lie over a composite
/// ending in c.
std::optional<MorId> pullback_factor(const RefinementSystem& t, const LiftCertificate& cert, MorId beta, MorId d);
std::optional<MorId> pushforward_factor(const RefinementSystem& t, const LiftCertificate& cert, MorId gamma,
                                        MorId d);

CheckReport pullpush_laws_check(const RefinementSystem& t);
CheckReport is_fibration(const RefinementSystem& t);
CheckReport is_opfibration(const RefinementSystem& t);

struct RefSysMorphism {
  SysPtr source;
  SysPtr target;
  FunctorData FD;
  FunctorData FT;

  ObjId on_object(ObjId P) const { return FD.on_object(P); }
  MorId on_derivation(MorId a) const { return FD.on_morphism(a); }
  MorId on_term(MorId c) const { return FT.on_morphism(c); }
};

/// Functor validation at both levels plus the strict square t;F_T = F_D;b.
ValidationReport validate_morphism(const RefSysMorphism& m);
RefSysMorphism identity_morphism(const SysPtr& t);
RefSysMorphism opposite_morphism(const RefSysMorphism& m, const SysPtr& source_op, const SysPtr& target_op);

CheckReport fully_faithful_check(const RefSysMorphism& m);

/// F -| G at both levels. unit_D : id_D => F_D;G_D, counit_D : G_D;F_D => id_E,
/// and likewise over the bases.
struct RefSysAdjunction {
  RefSysMorphism F;
  RefSysMorphism G;
  NatTransData unit_D;
  NatTransData counit_D;
  NatTransData unit_T;
  NatTransData counit_T;
};

RefSysAdjunction identity_adjunction(const SysPtr& t);
/// G^op -| F^op between the opposite systems; unit and counit trade places.
RefSysAdjunction opposite_adjunction(const RefSysAdjunction& adj);

CheckReport adjunction_check(const RefSysAdjunction& adj);
/// Right adjoint G sends the b-pullback of Q along c to a t-pullback; the
/// right rule is built from unit, G F and counit, and both universal
/// equations are replayed as chains of equal D-morphisms.
CheckReport rapp_check(const RefSysAdjunction& adj, MorId c, ObjId Q);
CheckReport rapp_check_all(const RefSysAdjunction& adj);
/// Left adjoint F sends t-pushforwards to b-pushforwards; checked as
/// rapp_check on the opposite adjunction.
CheckReport lapp_check_all(const RefSysAdjunction& adj);

}  // namespace refine
