#pragma once

// Presheaves over finite categories and the refinement system Psh -> Cat:
// precomposition pullback, coend pushforward, external tensor, end residuals.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "refine/fincat.hpp"
#include "refine/report.hpp"

namespace refine {

using Elem = std::uint32_t;

/// Read-only contravariant set-valued functor; act(f, y) is the restriction
/// of y in X(cod f) along f, landing in X(dom f).
class PresheafView {
 public:
  virtual ~PresheafView() = default;
  virtual const FinCategory& base() const = 0;
  virtual std::size_t count(ObjId a) const = 0;
  virtual Elem act(MorId f, Elem y) const = 0;
};

class Presheaf final : public PresheafView {
 public:
  Presheaf() = default;
  /// action[f] maps indices of elements over cod(f) to indices over dom(f).
  /// Throws StructuralError on size or range mismatch; laws are checked by
  /// validate_presheaf.
  Presheaf(CatPtr base, std::vector<std::size_t> counts, std::vector<std::vector<Elem>> action,
           std::vector<std::vector<std::string>> labels = {});

  const FinCategory& base() const override { return *base_; }
  const CatPtr& base_ptr() const noexcept { return base_; }
  std::size_t count(ObjId a) const override { return counts_.at(a); }
  Elem act(MorId f, Elem y) const override { return action_[f][y]; }
  const std::vector<Elem>& action(MorId f) const { return action_.at(f); }
  const std::vector<std::size_t>& counts() const noexcept { return counts_; }
  std::size_t total() const;
  std::string label(ObjId a, Elem x) const;
  bool has_labels() const noexcept { return !labels_.empty(); }

  /// Same base tables, element counts and action tables (labels ignored).
  bool same_tables(const Presheaf& other) const;

 private:
  CatPtr base_;
  std::vector<std::size_t> counts_;
  std::vector<std::vector<Elem>> action_;
  std::vector<std::vector<std::string>> labels_;
};

ValidationReport validate_presheaf(const PresheafView& p);
/// Copies any view into a table-backed presheaf.
Presheaf materialize(const PresheafView& p, const CatPtr& base);

/// pull_F psi read lazily: a |-> psi(F a).
class PulledView final : public PresheafView {
 public:
  PulledView(const FunctorData& F, const PresheafView& psi) : F_(F), psi_(psi) {}
  const FinCategory& base() const override { return *F_.source; }
  std::size_t count(ObjId a) const override { return psi_.count(F_.on_object(a)); }
  Elem act(MorId f, Elem y) const override { return psi_.act(F_.on_morphism(f), y); }

 private:
  const FunctorData& F_;
  const PresheafView& psi_;
};

/// theta[a][x] is the image of x in phi(a).
using Family = std::vector<std::vector<Elem>>;

struct FamilyOptions {
  bool injective = false;  // per-object injective families only
};

/// Natural families phi => omega over a common base, by backtracking: the
/// element with the largest restriction closure is chosen first and each
/// choice is propagated along every morphism into its object. When every
/// target set is at most a singleton the answer is decided directly.
/// `visit` returns false to stop. Returns the number of families visited.
std::size_t enumerate_families(const PresheafView& phi, const PresheafView& omega,
                               const std::function<bool(const Family&)>& visit, FamilyOptions opts = {});
/// All families, in lexicographic order.
std::vector<Family> all_families(const PresheafView& phi, const PresheafView& omega);
std::optional<Family> some_family(const PresheafView& phi, const PresheafView& omega);
std::size_t count_families(const PresheafView& phi, const PresheafView& omega);
bool is_natural(const PresheafView& phi, const PresheafView& omega, const Family& theta);

/// A morphism of Psh: functor F between bases and theta : phi => pull_F psi.
struct PshDerivation {
  FunctorData F;
  Family theta;
};

ValidationReport validate_psh_derivation(const PresheafView& phi, const PshDerivation& d, const PresheafView& psi);
std::vector<PshDerivation> psh_derivations(const PresheafView& phi, const FunctorData& F, const PresheafView& psi);
/// Vertical composite (theta then F*sigma).
PshDerivation compose_psh(const PshDerivation& first, const PshDerivation& second);

Presheaf pull_psh(const FunctorData& F, const PresheafView& psi);

/// Coend pushforward together with its structural derivation phi => pull_F(push).
struct Pushforward {
  Presheaf presheaf;
  PshDerivation structural;
};

/// Elements over b are classes of pairs (h : b -> F a, x in phi(a)) under the
/// relation generated by (h;F(u), x) ~ (h, phi(u)(x)), merged by union-find.
/// Each class is named by its least pair in (a, h, x) order.
Pushforward push_psh(const FunctorData& F, const PresheafView& phi);

/// External tensor over the product base; element (x, y) has index x*|psi(b)|+y.
Presheaf tensor_psh(const ProductCategory& base, const PresheafView& phi, const PresheafView& psi);
/// Singleton over the terminal category.
Presheaf unit_psh();
/// Representable C(-, c).
Presheaf representable(const CatPtr& C, ObjId c);
/// Constant presheaf with n elements and identity restrictions.
Presheaf constant_psh(const CatPtr& C, std::size_t n);

enum class Side { left, right };

/// End residual over the functor category [A, C]: F |-> families
/// phi(a) -> omega(F a), acting along F => G by post-composition.
struct Residual {
  std::shared_ptr<const FunctorCategory> functors;
  Presheaf presheaf;
  std::vector<std::vector<Family>> elements;  // per functor
};
Residual residual_psh(Side side, const Presheaf& phi, const Presheaf& omega,
                      std::size_t size_guard = kDefaultSizeGuard);

/// The residual pulled back along the currying of G : A x X -> C, computed
/// directly over X without the functor category. `ax.left` is the base of phi.
struct ResidualAlong {
  Presheaf presheaf;
  std::vector<std::vector<Family>> elements;  // per X-object
};
ResidualAlong residual_along(const ProductCategory& ax, const FunctorData& G, const PresheafView& phi,
                             const PresheafView& omega);

struct NaturalIso {
  Family forward;
  Family backward;
};
/// Per-object bijections natural in the base, or definite absence.
std::optional<NaturalIso> vertical_iso_psh(const PresheafView& phi, const PresheafView& psi);

/// One universal-property test: a functor G out of the pushforward's base
/// and a presheaf over its target.
struct UniversalTest {
  FunctorData G;
  std::shared_ptr<const Presheaf> omega;
};

/// Checks that d : phi => psi over F is opcartesian against every test:
/// sigma |-> theta;F*sigma is a bijection from derivations psi => omega over G
/// onto derivations phi => omega over F;G.
CheckReport opcartesian_check(const PresheafView& phi, const PresheafView& psi, const PshDerivation& d,
                              const std::vector<UniversalTest>& tests);
/// Tests over the identity and the terminal functor with representables,
/// constant presheaves of size 0, 1, 2 and psi itself.
std::vector<UniversalTest> default_universal_tests(const CatPtr& B, const Presheaf& psi);

std::string describe_family(const Family& f);

}  // namespace refine
