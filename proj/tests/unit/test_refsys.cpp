#include <doctest.h>

#include "oracles.hpp"
#include "refine/fixtures.hpp"
#include "refine/refsys.hpp"

using namespace refine;

namespace {

struct Hoare {
  HoareFixture h = build_hoare(hoare_two_state());
  const RefinementSystem& t() const { return *h.system; }
  ObjId pred(const char* name) const { return *t().D().find_object(name); }
  MorId cmd(const char* name) const { return *t().T().find_morphism(name); }
  std::uint64_t mask(ObjId P) const { return h.predicates.at(P); }
};

// x --u--> y with P over x, Q over y and no derivation between them.
SysPtr missing_lift_system() {
  FinCategory::Builder tb;
  ObjId x = tb.add_object_with_identity("x", "1x");
  ObjId y = tb.add_object_with_identity("y", "1y");
  tb.add_morphism("u", x, y);
  auto T = tb.build();
  FinCategory::Builder db;
  db.add_object_with_identity("P", "1P");
  db.add_object_with_identity("Q", "1Q");
  auto D = db.build();
  return make_system(FunctorData{D, T, {x, y}, {T->identity(x), T->identity(y)}}, "gap");
}

// Two refinements of one type, isomorphic through i and j.
SysPtr duplicated_system() {
  auto T = terminal_category();
  FinCategory::Builder db;
  ObjId P = db.add_object_with_identity("P", "1P");
  ObjId R = db.add_object_with_identity("R", "1R");
  MorId i = db.add_morphism("i", P, R);
  MorId j = db.add_morphism("j", R, P);
  db.set_composite(i, j, 0);
  db.set_composite(j, i, 1);
  auto D = db.build();
  return make_system(FunctorData{D, T, {0, 0}, {0, 0, 0, 0}}, "dup");
}

}  // namespace

TEST_SUITE("refsys") {
  TEST_CASE("derivation sets follow the triple oracle") {
    Hoare H;
    const auto& t = H.t();
    CHECK(derivations(t, {H.pred("{s0}"), t.T().identity(0), H.pred("{s0}")}) ==
          std::vector<MorId>{t.D().identity(H.pred("{s0}"))});
    CHECK(count_derivations(t, {H.pred("{s0}"), H.cmd("set0"), H.pred("{s0}")}) == 1);
    CHECK(count_derivations(t, {H.pred("{s0}"), H.cmd("swap"), H.pred("{s0}")}) == 0);
    for (std::size_t P = 0; P < t.D().object_count(); ++P)
      for (std::size_t c = 0; c < t.T().morphism_count(); ++c)
        for (std::size_t Q = 0; Q < t.D().object_count(); ++Q) {
          ObjId p = static_cast<ObjId>(P), q = static_cast<ObjId>(Q);
          MorId m = static_cast<MorId>(c);
          bool valid = oracle::triple(H.h.commands[c], H.mask(p), H.mask(q));
          CHECK(count_derivations(t, {p, m, q}) == (valid ? 1u : 0u));
          CHECK(count_derivations(t, {p, m, q}) == oracle::count_derivations(t, p, m, q));
        }
  }

  TEST_CASE("ill-typed judgment throws") {
    auto t = missing_lift_system();
    CHECK_THROWS_AS(check_judgment(*t, {0, t->T().identity(0), 1}), StructuralError);
  }

  TEST_CASE("composition rule on Hoare triples") {
    Hoare H;
    const auto& t = H.t();
    ObjId top = H.pred("{s0,s1}"), s0 = H.pred("{s0}"), s1 = H.pred("{s1}");
    Derivation d1{{top, H.cmd("set0"), s0}, derivations(t, {top, H.cmd("set0"), s0}).at(0)};
    Derivation d2{{s0, H.cmd("swap"), s1}, derivations(t, {s0, H.cmd("swap"), s1}).at(0)};
    auto d = compose_rule(t, d1, d2);
    CHECK(d.judgment.P == top);
    CHECK(d.judgment.Q == s1);
    CHECK(d.judgment.c == t.T().compose(H.cmd("set0"), H.cmd("swap")));
    CHECK(oracle::triple(H.h.commands[d.judgment.c], H.mask(top), H.mask(s1)));
    Derivation id{{s1, t.T().identity(0), s1}, t.D().identity(s1)};
    CHECK(compose_rule(t, d, id).alpha == d.alpha);
  }

  TEST_CASE("vertical isomorphisms") {
    Hoare H;
    const auto& t = H.t();
    for (std::size_t P = 0; P < t.D().object_count(); ++P) {
      auto self = vertical_iso(t, static_cast<ObjId>(P), static_cast<ObjId>(P));
      REQUIRE(self);
      CHECK(self->first == t.D().identity(static_cast<ObjId>(P)));
      for (std::size_t Q = 0; Q < t.D().object_count(); ++Q)
        if (P != Q) CHECK_FALSE(vertical_iso(t, static_cast<ObjId>(P), static_cast<ObjId>(Q)));
    }
    auto dup = duplicated_system();
    auto w = vertical_iso(*dup, 0, 1);
    REQUIRE(w);
    CHECK(dup->D().morphism_name(w->first) == "i");
    CHECK(dup->D().morphism_name(w->second) == "j");
  }

  TEST_CASE("Hoare lifts are images and preimages") {
    Hoare H;
    const auto& t = H.t();
    for (std::size_t c = 0; c < t.T().morphism_count(); ++c)
      for (std::size_t P = 0; P < t.D().object_count(); ++P) {
        MorId m = static_cast<MorId>(c);
        ObjId p = static_cast<ObjId>(P);
        auto push = find_pushforward(t, m, p);
        REQUIRE(push);
        CHECK(H.mask(push->candidate) == oracle::image(H.h.commands[c], H.mask(p)));
        CHECK(replay(t, *push));
        auto pull = find_pullback(t, m, p);
        REQUIRE(pull);
        CHECK(H.mask(pull->candidate) == oracle::preimage(H.h.commands[c], H.mask(p)));
        CHECK(replay(t, *pull));
      }
    auto sp = find_pushforward(t, H.cmd("set0"), H.pred("{s0,s1}"));
    CHECK(t.D().object_name(sp->candidate) == "{s0}");
    auto wp = find_pullback(t, H.cmd("set0"), H.pred("{s1}"));
    CHECK(t.D().object_name(wp->candidate) == "{}");
    auto same = find_pullback(t, t.T().identity(0), H.pred("{s1}"));
    CHECK(same->candidate == H.pred("{s1}"));
  }

  TEST_CASE("lift laws and fibration checks") {
    Hoare H;
    CHECK(pullpush_laws_check(H.t()).ok());
    CHECK(is_fibration(H.t()).ok());
    CHECK(is_opfibration(H.t()).ok());
    auto idT = identity_system(H.h.system->T_ptr());
    CHECK(pullpush_laws_check(*idT).ok());
    CHECK(is_fibration(*idT).ok());
    auto gap = missing_lift_system();
    auto r = is_fibration(*gap);
    CHECK_FALSE(r.ok());
    REQUIRE(r.counterexample);
    CHECK(r.counterexample->find("u") != std::string::npos);
    CHECK(pullpush_laws_check(*random_refsys(3)).ok());
  }

  TEST_CASE("fully faithful morphisms") {
    Hoare H;
    CHECK(fully_faithful_check(identity_morphism(H.h.system)).ok());
    // collapse two refinements of the terminal type onto one
    auto T = terminal_category();
    FinCategory::Builder db;
    db.add_object_with_identity("P", "1P");
    db.add_object_with_identity("R", "1R");
    auto src = make_system(FunctorData{db.build(), T, {0, 0}, {0, 0}}, "two");
    auto dst = terminal_system(T);
    RefSysMorphism m{src, dst, FunctorData{src->D_ptr(), dst->D_ptr(), {0, 0}, {0, 0}}, identity_functor(T)};
    CHECK(validate_morphism(m).ok());
    CHECK_FALSE(fully_faithful_check(m).ok());
  }

  TEST_CASE("adjunctions preserve lifts") {
    Hoare H;
    auto id = identity_adjunction(H.h.system);
    CHECK(adjunction_check(id).ok());
    CHECK(rapp_check_all(id).ok());
    auto g = galois_adjunction();
    CHECK(adjunction_check(g).ok());
    auto r = rapp_check_all(g);
    CHECK(r.ok());
    CHECK(r.passed > 0);
    auto l = lapp_check_all(g);
    CHECK(l.ok());
    CHECK(l.passed > 0);
  }

  TEST_CASE("opposite system keeps indices") {
    Hoare H;
    auto op = opposite_system(H.t());
    CHECK(op->D().object_count() == H.t().D().object_count());
    MorId a = derivations(H.t(), {H.pred("{s0}"), H.cmd("set0"), H.pred("{s0}")}).at(0);
    CHECK(op->D().dom(a) == H.t().D().cod(a));
    CHECK(op->image(a) == H.t().image(a));
  }
}
