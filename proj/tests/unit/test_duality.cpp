#include <doctest.h>

#include "oracles.hpp"
#include "refine/duality.hpp"
#include "refine/fixtures.hpp"

using namespace refine;

namespace {

struct Hoare {
  HoareFixture h = build_hoare(hoare_two_state());
  const RefinementSystem& t() const { return *h.system; }
  ObjId pred(const char* name) const { return *t().D().find_object(name); }
  MorId cmd(const char* name) const { return *t().T().find_morphism(name); }
};

// Two derivations P -> Q exchanged by an involution s of Q, over one type.
SysPtr two_derivations() {
  FinCategory::Builder db;
  ObjId P = db.add_object_with_identity("P", "1_P");
  ObjId Q = db.add_object_with_identity("Q", "1_Q");
  MorId a = db.add_morphism("a", P, Q);
  MorId b = db.add_morphism("b", P, Q);
  MorId s = db.add_morphism("s", Q, Q);
  db.set_composite(a, s, b);
  db.set_composite(b, s, a);
  db.set_composite(s, s, 1);
  auto D = db.build();
  auto T = terminal_category();
  return make_system(FunctorData{D, T, {0, 0}, {0, 0, 0, 0, 0}}, "twoderiv");
}

CatPtr arrow() { return poset_category(chain_poset(2, "c")); }

}  // namespace

TEST_SUITE("duality") {
  TEST_CASE("Der counts derivations") {
    Hoare H;
    auto J = judgment_category(H.t());
    DerivationTable der(H.h.system);
    auto Der = der_presheaf(J, der);
    CHECK(validate_presheaf(Der).ok());
    for (std::size_t o = 0; o < J.objects.size(); ++o) {
      const auto& j = J.objects[o];
      CHECK(Der.count(static_cast<ObjId>(o)) == oracle::count_derivations(H.t(), j.P, j.c, j.Q));
    }
  }

  TEST_CASE("bracket is extranatural") {
    Hoare H;
    CHECK(extranat_check(DualityContext(H.h.system)).ok());
    auto lin = build_linctx(linear_example(), {2});
    CHECK(extranat_check(DualityContext(lin.system)).ok());
  }

  TEST_CASE("dual of the empty presheaf is a single family everywhere") {
    Hoare H;
    DualityContext ctx(H.h.system);
    auto S = ctx.slice(0);
    auto C = ctx.coslice(0);
    auto left = dual_left(ctx, 0, constant_psh(S->category, 0));
    for (std::size_t k = 0; k < C->category->object_count(); ++k) CHECK(left.presheaf.count(static_cast<ObjId>(k)) == 1);
    auto right = dual_right(ctx, 0, constant_psh(C->category, 0));
    for (std::size_t k = 0; k < S->category->object_count(); ++k) CHECK(right.presheaf.count(static_cast<ObjId>(k)) == 1);
  }

  TEST_CASE("over a terminal base the duals are conjugates") {
    auto D = arrow();
    auto bang = terminal_system(D);
    DualityContext ctx(bang);
    auto S = ctx.slice(0);
    auto C = ctx.coslice(0);
    std::vector<Presheaf> phis;
    for (std::size_t o = 0; o < S->category->object_count(); ++o)
      phis.push_back(representable(S->category, static_cast<ObjId>(o)));
    for (std::size_t n = 0; n < 3; ++n) phis.push_back(constant_psh(S->category, n));
    for (const auto& phi : phis) {
      auto dl = dual_left(ctx, 0, phi);
      for (std::size_t k = 0; k < C->objects.size(); ++k) {
        ObjId R = C->objects[k].P;
        auto hom_R = representable(S->category, S->find(R, bang->T().identity(0)));
        auto expected = oracle::count_families(phi, hom_R);
        REQUIRE(expected);
        CHECK(dl.presheaf.count(static_cast<ObjId>(k)) == *expected);
      }
    }
  }

  TEST_CASE("Hoare right dual of a pulled continuation set") {
    Hoare H;
    DualityContext ctx(H.h.system);
    const auto& T = H.t().T();
    ObjId top = H.pred("{s0,s1}");
    MorId set0 = H.cmd("set0");
    auto neg_top = ctx.reps().neg().rep(top);
    auto along = ctx.reps().neg().action(set0);
    auto psi = pull_psh(along, neg_top->presheaf);
    auto dr = dual_right(ctx, 0, psi);
    auto S = ctx.slice(0);
    for (std::size_t o = 0; o < S->objects.size(); ++o) {
      auto [P, c] = S->objects[o];
      bool holds = true;
      for (std::size_t d = 0; d < T.morphism_count(); ++d)
        for (std::size_t R = 0; R < H.h.predicates.size(); ++R) {
          auto lhs = H.h.commands[T.compose(set0, static_cast<MorId>(d))];
          auto rhs = H.h.commands[T.compose(c, static_cast<MorId>(d))];
          if (oracle::triple(lhs, H.h.predicates[top], H.h.predicates[R]) &&
              !oracle::triple(rhs, H.h.predicates[P], H.h.predicates[R]))
            holds = false;
        }
      CHECK(dr.presheaf.count(static_cast<ObjId>(o)) == (holds ? 1u : 0u));
    }
    auto s0 = ctx.reps().pos().rep(H.pred("{s0}"));
    CHECK(vertical_iso_psh(dr.presheaf, s0->presheaf).has_value());
  }

  TEST_CASE("duality theorem on Hoare and the lattice") {
    Hoare H;
    auto r = duality_check_all(DualityContext(H.h.system));
    CHECK(r.ok());
    CHECK(r.passed > 0);
    CHECK(duality_check_all(DualityContext(lattice_example().system)).ok());
  }

  TEST_CASE("a corrupted Der action is caught") {
    auto t = two_derivations();
    CHECK(duality_check_all(DualityContext(t)).ok());
    auto bad = duality_check_all(DualityContext(t, true));
    CHECK_FALSE(bad.ok());
    REQUIRE(bad.counterexample);
    CHECK(bad.counterexample->find("along") != std::string::npos);
  }

  TEST_CASE("dual adjunction and double-dual closure") {
    Hoare H;
    DualityContext ctx(H.h.system);
    CHECK(dual_adjunction_check(ctx, 0).ok());
    auto S = ctx.slice(0);
    std::vector<Presheaf> phis;
    for (std::size_t o = 0; o < S->category->object_count(); ++o)
      phis.push_back(representable(S->category, static_cast<ObjId>(o)));
    phis.push_back(constant_psh(S->category, 1));
    for (const auto& phi : phis) {
      auto dl = dual_left(ctx, 0, phi);
      auto drl = dual_right(ctx, 0, dl.presheaf);
      CHECK(some_family(phi, drl.presheaf).has_value());
    }
  }

  TEST_CASE("direct and residual duals agree on the lattice") {
    auto r = dual_cross_check(DualityContext(lattice_example().system));
    CHECK(r.ok());
    CHECK(r.passed >= 10);
  }

  TEST_CASE("negative encodings") {
    Hoare H;
    DualityContext ctx(H.h.system);
    auto one = negative_encoding_check(ctx, H.cmd("set0"), H.pred("{s0,s1}"));
    CHECK(one.ok());
    CHECK(one.passed > 0);
    CHECK(negative_encoding_check_all(ctx).ok());
    auto s0 = ctx.reps().pos().rep(H.pred("{s0}"));
    auto sw = ctx.reps().neg().rep(H.pred("{s0,s1}"));
    NotpushInputs in{&s0->presheaf, &sw->presheaf, &s0->presheaf, &sw->presheaf};
    CHECK(notpush_check(ctx, H.cmd("set0"), in).ok());
    auto L = lattice_example();
    DualityContext lctx(L.system);
    CHECK(negative_encoding_check_all(lctx).ok());
    for (const auto& w : L.monoids) CHECK(notnottensor_check_all(lctx, L.monoidal, w).ok());
  }

  TEST_CASE("linear tensor is repaired by double dualization") {
    auto lin = build_linctx(linear_example(), {3});
    DualityContext ctx(lin.system);
    REQUIRE(!lin.spec.tensors.empty());
    auto r = tensor_left_check(lin, ctx, lin.spec.tensors.front());
    CHECK(r.ok());
    bool noted = false;
    for (const auto& n : r.notes) noted |= n.find("the push has 0 elements") != std::string::npos;
    CHECK(noted);
  }
}
