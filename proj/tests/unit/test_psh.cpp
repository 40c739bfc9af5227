#include <doctest.h>

#include <map>

#include "oracles.hpp"
#include "refine/fixtures.hpp"
#include "refine/psh.hpp"

using namespace refine;

namespace {

CatPtr chain(std::size_t n) { return poset_category(chain_poset(n, "c")); }

CatPtr arrow() { return chain(2); }

// Morphisms named in `acts` take that table; the rest clamp indices into the
// domain, which is functorial when counts grow along morphisms.
Presheaf table(const CatPtr& C, std::vector<std::size_t> counts,
               const std::map<std::string, std::vector<Elem>>& acts) {
  std::vector<std::vector<Elem>> action(C->morphism_count());
  for (std::size_t f = 0; f < C->morphism_count(); ++f) {
    MorId m = static_cast<MorId>(f);
    auto it = acts.find(C->morphism_name(m));
    if (it != acts.end()) {
      action[f] = it->second;
    } else {
      for (std::size_t y = 0; y < counts[C->cod(m)]; ++y)
        action[f].push_back(static_cast<Elem>(std::min(y, counts[C->dom(m)] - 1)));
    }
  }
  return Presheaf(C, std::move(counts), std::move(action));
}

std::string arrow_name(const CatPtr& C) {
  for (std::size_t f = 0; f < C->morphism_count(); ++f)
    if (C->dom(static_cast<MorId>(f)) != C->cod(static_cast<MorId>(f))) return C->morphism_name(static_cast<MorId>(f));
  return {};
}

std::vector<Presheaf> corpus(const CatPtr& C) {
  std::vector<Presheaf> out;
  for (std::size_t a = 0; a < C->object_count(); ++a) out.push_back(representable(C, static_cast<ObjId>(a)));
  for (std::size_t n = 0; n < 3; ++n) out.push_back(constant_psh(C, n));
  return out;
}

FunctorData max_functor(const ProductCategory& ab, const CatPtr& c) {
  // chains: (i, j) |-> max(i, j)
  FunctorData F{ab.category, c, {}, {}};
  for (std::size_t o = 0; o < ab.category->object_count(); ++o) {
    ObjId i = ab.left_object(static_cast<ObjId>(o)), j = ab.right_object(static_cast<ObjId>(o));
    F.object_map.push_back(std::max(i, j));
  }
  for (std::size_t m = 0; m < ab.category->morphism_count(); ++m) {
    const auto& mm = ab.category->morphism(static_cast<MorId>(m));
    ObjId s = F.object_map[mm.dom], t = F.object_map[mm.cod];
    F.morphism_map.push_back(c->hom(s, t).front());
  }
  return F;
}

}  // namespace

TEST_SUITE("psh") {
  TEST_CASE("presheaf validation") {
    auto A = arrow();
    auto ok = table(A, {2, 1}, {{arrow_name(A), {1}}});
    CHECK(validate_presheaf(ok).ok());
    CHECK_THROWS_AS(table(A, {2, 1}, {{arrow_name(A), {5}}}), StructuralError);
  }

  TEST_CASE("pullback along functors") {
    auto A = arrow();
    auto C = chain(3);
    auto psi = table(C, {1, 2, 2}, {});
    CHECK(pull_psh(identity_functor(C), psi).same_tables(psi));
    // F : 2 -> 3, 0 |-> 0, 1 |-> 2
    FunctorData F{A, C, {0, 2}, {}};
    for (std::size_t m = 0; m < A->morphism_count(); ++m) {
      const auto& mm = A->morphism(static_cast<MorId>(m));
      F.morphism_map.push_back(C->hom(F.object_map[mm.dom], F.object_map[mm.cod]).front());
    }
    REQUIRE(validate_functor(F).ok());
    for (std::size_t b = 0; b < C->object_count(); ++b) {
      auto p = pull_psh(F, representable(C, static_cast<ObjId>(b)));
      for (std::size_t a = 0; a < A->object_count(); ++a)
        CHECK(p.count(static_cast<ObjId>(a)) == C->hom(F.on_object(static_cast<ObjId>(a)), static_cast<ObjId>(b)).size());
    }
    auto G = constant_functor(C, terminal_category(), 0);
    auto omega = constant_psh(terminal_category(), 3);
    auto once = pull_psh(compose_functors(F, G), omega);
    auto twice = pull_psh(F, pull_psh(G, omega));
    CHECK(once.same_tables(twice));
  }

  TEST_CASE("pushforward along the identity and along a point") {
    auto C = chain(3);
    for (const auto& phi : corpus(C)) {
      auto p = push_psh(identity_functor(C), phi);
      CHECK(validate_presheaf(p.presheaf).ok());
      CHECK(vertical_iso_psh(p.presheaf, phi).has_value());
    }
    for (std::size_t a = 0; a < C->object_count(); ++a) {
      auto pt = constant_functor(terminal_category(), C, static_cast<ObjId>(a));
      auto p = push_psh(pt, unit_psh());
      CHECK(vertical_iso_psh(p.presheaf, representable(C, static_cast<ObjId>(a))).has_value());
    }
  }

  TEST_CASE("canonical derivation into the pushforward is opcartesian on a 3-object base") {
    auto A = arrow();
    auto C = chain(3);
    FunctorData F = constant_functor(A, C, 1);
    auto phi = table(A, {2, 1}, {{arrow_name(A), {0}}});
    auto p = push_psh(F, phi);
    auto shared = std::make_shared<const Presheaf>(p.presheaf);
    CHECK(validate_psh_derivation(phi, p.structural, p.presheaf).ok());
    auto r = opcartesian_check(phi, p.presheaf, p.structural, default_universal_tests(C, p.presheaf));
    CHECK(r.ok());
    CHECK(r.passed > 0);
    // a derivation that is not the pushforward fails the check
    auto id = psh_derivations(phi, F, pull_psh(F, representable(C, 2)));
    REQUIRE(!id.empty());
    auto bad = opcartesian_check(phi, representable(C, 2), id.front(), default_universal_tests(C, representable(C, 2)));
    CHECK_FALSE(bad.ok());
  }

  TEST_CASE("adjoint correspondence between push and pull") {
    auto A = arrow();
    auto C = chain(3);
    std::vector<FunctorData> Fs{constant_functor(A, C, 0), constant_functor(A, C, 2)};
    for (const auto& F : Fs)
      for (const auto& phi : corpus(A))
        for (const auto& psi : corpus(C)) {
          auto p = push_psh(F, phi);
          CHECK(count_families(p.presheaf, psi) == count_families(phi, pull_psh(F, psi)));
        }
  }

  TEST_CASE("family counts agree with the brute-force oracle") {
    std::vector<CatPtr> bases{arrow(), chain(3), build_hoare(hoare_two_state()).system->T_ptr()};
    std::size_t compared = 0;
    for (const auto& C : bases) {
      auto ps = corpus(C);
      for (const auto& phi : ps)
        for (const auto& psi : ps) {
          auto expected = oracle::count_families(phi, psi);
          REQUIRE(expected);
          CHECK(count_families(phi, psi) == *expected);
          CHECK(all_families(phi, psi).size() == *expected);
          for (const auto& f : all_families(phi, psi)) CHECK(is_natural(phi, psi, f));
          ++compared;
        }
    }
    CHECK(compared == 5 * 5 + 6 * 6 + 4 * 4);
  }

  TEST_CASE("vertical isomorphism search") {
    auto A = arrow();
    auto phi = table(A, {2, 2}, {});
    CHECK(vertical_iso_psh(phi, phi).has_value());
    CHECK_FALSE(vertical_iso_psh(phi, table(A, {2, 1}, {{arrow_name(A), {0}}})).has_value());
    // same counts, but one action is injective and the other is not
    auto collapsed = table(A, {2, 2}, {{arrow_name(A), {0, 0}}});
    CHECK_FALSE(vertical_iso_psh(phi, collapsed).has_value());
    auto swapped = table(A, {2, 2}, {{arrow_name(A), {1, 0}}});
    auto iso = vertical_iso_psh(phi, swapped);
    REQUIRE(iso);
    CHECK(is_natural(phi, swapped, iso->forward));
    CHECK(is_natural(swapped, phi, iso->backward));
  }

  TEST_CASE("derivations enumerate natural families") {
    auto T = terminal_category();
    auto psi = constant_psh(T, 3);
    CHECK(psh_derivations(unit_psh(), identity_functor(T), psi).size() == 3);
    auto C = chain(3);
    auto A = arrow();
    FunctorData F = constant_functor(A, C, 1);
    for (std::size_t a = 0; a < A->object_count(); ++a)
      for (std::size_t b = 0; b < C->object_count(); ++b) {
        auto ds = psh_derivations(representable(A, static_cast<ObjId>(a)), F, representable(C, static_cast<ObjId>(b)));
        CHECK(ds.size() == C->hom(F.on_object(static_cast<ObjId>(a)), static_cast<ObjId>(b)).size());
      }
  }

  TEST_CASE("external tensor") {
    auto A = arrow();
    auto C = chain(3);
    auto AC = product(A, C);
    auto phi = table(A, {2, 1}, {{arrow_name(A), {1}}});
    auto psi = representable(C, 2);
    auto t = tensor_psh(AC, phi, psi);
    CHECK(validate_presheaf(t).ok());
    for (std::size_t a = 0; a < A->object_count(); ++a)
      for (std::size_t c = 0; c < C->object_count(); ++c)
        CHECK(t.count(AC.object(static_cast<ObjId>(a), static_cast<ObjId>(c))) ==
              phi.count(static_cast<ObjId>(a)) * psi.count(static_cast<ObjId>(c)));
    auto AT = product(A, terminal_category());
    auto u = tensor_psh(AT, phi, unit_psh());
    for (std::size_t a = 0; a < A->object_count(); ++a)
      CHECK(u.count(AT.object(static_cast<ObjId>(a), 0)) == phi.count(static_cast<ObjId>(a)));
  }

  TEST_CASE("residuals") {
    auto C = chain(3);
    auto omega = table(C, {1, 2, 3}, {});
    auto r = residual_psh(Side::left, unit_psh(), omega);
    CHECK(validate_presheaf(r.presheaf).ok());
    for (std::size_t i = 0; i < r.functors->functors.size(); ++i)
      CHECK(r.presheaf.count(static_cast<ObjId>(i)) == omega.count(r.functors->functors[i].on_object(0)));
    // tensor-residual adjunction along (i, j) |-> max(i, j)
    auto A = arrow();
    auto X = arrow();
    auto AX = product(A, X);
    auto G = max_functor(AX, C);
    REQUIRE(validate_functor(G).ok());
    for (const auto& phi : corpus(A))
      for (const auto& psi : corpus(X))
        for (const auto& w : corpus(C)) {
          auto along = residual_along(AX, G, phi, w);
          CHECK(count_families(psi, along.presheaf) ==
                count_families(tensor_psh(AX, phi, psi), pull_psh(G, w)));
        }
  }
}
