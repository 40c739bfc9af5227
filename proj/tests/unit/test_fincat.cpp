#include <doctest.h>

#include <array>

#include "oracles.hpp"
#include "refine/fincat.hpp"
#include "refine/fixtures.hpp"

using namespace refine;

namespace {

// One object with id, f, g and an arbitrary composition table on {f, g}.
CatPtr two_generator_monoid(const std::array<MorId, 4>& table) {
  FinCategory::Builder b;
  ObjId x = b.add_object_with_identity("x", "id");
  MorId f = b.add_morphism("f", x, x);
  MorId g = b.add_morphism("g", x, x);
  b.set_composite(f, f, table[0]);
  b.set_composite(f, g, table[1]);
  b.set_composite(g, f, table[2]);
  b.set_composite(g, g, table[3]);
  return b.build();
}

bool associative_by_triples(const FinCategory& C) {
  for (std::size_t f = 0; f < C.morphism_count(); ++f)
    for (std::size_t g = 0; g < C.morphism_count(); ++g)
      for (std::size_t h = 0; h < C.morphism_count(); ++h) {
        MorId a = static_cast<MorId>(f), b = static_cast<MorId>(g), c = static_cast<MorId>(h);
        if (C.cod(a) != C.dom(b) || C.cod(b) != C.dom(c)) continue;
        if (C.compose(C.compose(a, b), c) != C.compose(a, C.compose(b, c))) return false;
      }
  return true;
}

CatPtr arrow_category() {
  FinCategory::Builder b;
  ObjId x = b.add_object_with_identity("x", "1x");
  ObjId y = b.add_object_with_identity("y", "1y");
  b.add_morphism("u", x, y);
  return b.build();
}

}  // namespace

TEST_SUITE("fincat") {
  TEST_CASE("terminal category validates") {
    auto T = terminal_category();
    CHECK(T->object_count() == 1);
    CHECK(T->morphism_count() == 1);
    CHECK(validate_category(*T).ok());
  }

  TEST_CASE("associativity verdicts agree with the triple oracle on every two-generator table") {
    std::size_t lawful = 0, unlawful = 0;
    for (int code = 0; code < 81; ++code) {
      std::array<MorId, 4> table{};
      int c = code;
      for (auto& e : table) {
        e = static_cast<MorId>(c % 3);
        c /= 3;
      }
      auto C = two_generator_monoid(table);
      bool expected = associative_by_triples(*C);
      CHECK(validate_category(*C).ok() == expected);
      (expected ? lawful : unlawful) += 1;
    }
    CHECK(lawful > 0);
    CHECK(unlawful > 0);
  }

  TEST_CASE("missing composite is reported by name") {
    FinCategory::Builder b;
    ObjId x = b.add_object_with_identity("x", "id");
    MorId f = b.add_morphism("f", x, x);
    MorId g = b.add_morphism("g", x, x);
    b.set_composite(f, f, g);
    b.set_composite(g, g, g);
    b.set_composite(g, f, g);
    CHECK_THROWS_WITH_AS(b.build(), "missing composite f;g", StructuralError);
  }

  TEST_CASE("non-composable lookup throws") {
    auto A = arrow_category();
    MorId u = *A->find_morphism("u");
    CHECK_THROWS_AS(A->compose(u, u), StructuralError);
    CHECK_THROWS_AS(A->morphism(99), StructuralError);
  }

  TEST_CASE("Hoare base is the closed transformer monoid") {
    auto h = build_hoare(hoare_two_state());
    auto monoid = oracle::transformer_monoid(2, {{1, 0}, {0, 0}});
    CHECK(monoid.size() == 4);
    CHECK(h.system->T().object_count() == 1);
    CHECK(h.system->T().morphism_count() == monoid.size());
    CHECK(validate_category(h.system->T()).ok());
    std::set<oracle::StateMap> built(h.commands.begin(), h.commands.end());
    CHECK(built == monoid);
  }

  TEST_CASE("opposite and product units") {
    auto T = terminal_category();
    auto To = opposite(T);
    CHECK(To->object_count() == 1);
    CHECK(To->morphism_count() == 1);
    auto A = arrow_category();
    auto TA = product(T, A);
    CHECK(TA.category->object_count() == A->object_count());
    CHECK(TA.category->morphism_count() == A->morphism_count());
    CHECK(validate_category(*TA.category).ok());
    auto W = build_hoare(hoare_two_state()).system->T_ptr();
    auto WW = product(W, W);
    CHECK(WW.category->morphism_count() == W->morphism_count() * W->morphism_count());
    CHECK(validate_category(*WW.category).ok());
    auto Aop = opposite(A);
    MorId u = *Aop->find_morphism("u");
    CHECK(Aop->dom(u) == *Aop->find_object("y"));
  }

  TEST_CASE("functor categories at the terminal ends") {
    auto T = terminal_category();
    auto W = build_hoare(hoare_two_state()).system->T_ptr();
    auto TW = functor_category(T, W);
    CHECK(TW.category->object_count() == W->object_count());
    CHECK(TW.category->morphism_count() == W->morphism_count());
    auto WT = functor_category(W, T);
    CHECK(WT.category->object_count() == 1);
    auto D2 = functor_category(discrete_category(2), W);
    CHECK(D2.category->object_count() == 1);
    CHECK(D2.category->morphism_count() == 16);
    CHECK(validate_category(*D2.category).ok());
  }

  TEST_CASE("functor enumeration counts arrow-category functors") {
    auto A = arrow_category();
    std::size_t n = 0;
    CHECK(enumerate_functors(A, A, 100, [&](const FunctorData& F) {
      CHECK(validate_functor(F).ok());
      ++n;
    }));
    // x,y to (x,x), (y,y) or (x,y)
    CHECK(n == 3);
  }

  TEST_CASE("size guard refuses large functor categories") {
    auto W = build_hoare(hoare_two_state()).system->T_ptr();
    auto A = arrow_category();
    CHECK_THROWS_AS(functor_category(discrete_category(12), discrete_category(3), 1000), SizeGuardExceeded);
    CHECK_NOTHROW(functor_category(A, W, 1000));
  }

  TEST_CASE("curry and uncurry round-trip") {
    auto A = arrow_category();
    auto W = build_hoare(hoare_two_state()).system->T_ptr();
    auto AA = product(A, A);
    auto AW = product(A, W);
    auto AC = functor_category(A, A);
    auto WC = functor_category(W, A);
    std::size_t checked = 0;
    enumerate_functors(AA.category, A, 3, [&](const FunctorData& F) {
      auto G = curry_right(AA, F, AC);
      CHECK(validate_functor(G).ok());
      CHECK(uncurry_right(AA, G, AC).same_tables(F));
      ++checked;
    });
    // projection A x W -> A curries to constant functors
    FunctorData proj{AW.category, A, {}, {}};
    for (std::size_t o = 0; o < AW.category->object_count(); ++o)
      proj.object_map.push_back(AW.left_object(static_cast<ObjId>(o)));
    for (std::size_t m = 0; m < AW.category->morphism_count(); ++m)
      proj.morphism_map.push_back(AW.left_morphism(static_cast<MorId>(m)));
    auto P = curry_right(AW, proj, WC);
    for (std::size_t a = 0; a < A->object_count(); ++a) {
      const auto& Fa = WC.functors.at(P.on_object(static_cast<ObjId>(a)));
      for (auto b : Fa.object_map) CHECK(b == static_cast<ObjId>(a));
    }
    CHECK(checked == 3);
  }

  TEST_CASE("full subcategory keeps hom sets") {
    auto A = arrow_category();
    auto S = full_subcategory(A, [](ObjId o) { return o == 1; });
    CHECK(S.category->object_count() == 1);
    CHECK(S.category->morphism_count() == 1);
    CHECK(validate_functor(S.inclusion).ok());
  }
}
