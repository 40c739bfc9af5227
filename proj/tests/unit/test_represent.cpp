#include <doctest.h>

#include "oracles.hpp"
#include "refine/fixtures.hpp"
#include "refine/represent.hpp"

using namespace refine;

namespace {

struct Hoare {
  HoareFixture h = build_hoare(hoare_two_state());
  const RefinementSystem& t() const { return *h.system; }
  ObjId pred(const char* name) const { return *t().D().find_object(name); }
};

}  // namespace

TEST_SUITE("represent") {
  TEST_CASE("slice of a system over the terminal base is the total category") {
    Hoare H;
    auto bang = terminal_system(H.h.system->D_ptr());
    auto S = slice(bang, 0);
    CHECK(S->category->object_count() == H.t().D().object_count());
    CHECK(S->category->morphism_count() == H.t().D().morphism_count());
    CHECK(validate_category(*S->category).ok());
  }

  TEST_CASE("Hoare slice has one object per predicate and command") {
    Hoare H;
    auto S = slice(H.h.system, 0);
    CHECK(S->category->object_count() == 16);
    CHECK(validate_category(*S->category).ok());
  }

  TEST_CASE("positive representation of {s0} counts guarded commands") {
    Hoare H;
    auto rep = pos_rep(H.h.system, H.pred("{s0}"));
    std::size_t expected = 0;
    for (std::size_t o = 0; o < rep.slice->objects.size(); ++o) {
      const auto& so = rep.slice->objects[o];
      std::size_t n = oracle::triple(H.h.commands[so.c], H.h.predicates[so.P], H.h.predicates[H.pred("{s0}")]);
      CHECK(rep.presheaf.count(static_cast<ObjId>(o)) == n);
      expected += n;
    }
    CHECK(expected == 9);
    CHECK(rep.presheaf.total() == 9);
    CHECK(validate_presheaf(rep.presheaf).ok());
  }

  TEST_CASE("negative representation of {s0} counts continuations") {
    Hoare H;
    auto rep = neg_rep(H.h.system, H.pred("{s0}"));
    std::size_t expected = 0;
    for (std::size_t c = 0; c < H.h.commands.size(); ++c)
      for (std::size_t Q = 0; Q < H.h.predicates.size(); ++Q)
        expected += oracle::triple(H.h.commands[c], H.h.predicates[H.pred("{s0}")], H.h.predicates[Q]);
    CHECK(rep.presheaf.total() == expected);
    CHECK(validate_presheaf(rep.presheaf).ok());
  }

  TEST_CASE("derivations match natural families between representations") {
    Hoare H;
    RepresentationContext ctx(H.h.system);
    const auto& t = H.t();
    for (std::size_t c = 0; c < t.T().morphism_count(); ++c) {
      auto F = ctx.pos().action(static_cast<MorId>(c));
      for (std::size_t P = 0; P < t.D().object_count(); ++P)
        for (std::size_t Q = 0; Q < t.D().object_count(); ++Q) {
          auto rp = ctx.pos().rep(static_cast<ObjId>(P));
          auto rq = ctx.pos().rep(static_cast<ObjId>(Q));
          PulledView pulled(F, rq->presheaf);
          auto fams = oracle::count_families(rp->presheaf, pulled);
          REQUIRE(fams);
          CHECK(*fams == oracle::count_derivations(t, static_cast<ObjId>(P), static_cast<MorId>(c), static_cast<ObjId>(Q)));
        }
    }
    CHECK(representation_ff_check(ctx).ok());
  }

  TEST_CASE("representation derivations transport by composition") {
    Hoare H;
    RepresentationContext ctx(H.h.system);
    const auto& t = H.t();
    ObjId top = H.pred("{s0,s1}"), s0 = H.pred("{s0}");
    MorId set0 = *t.T().find_morphism("set0");
    Derivation d{{top, set0, s0}, derivations(t, {top, set0, s0}).at(0)};
    auto pd = pos_rep_derivation(ctx, d);
    auto rp = ctx.pos().rep(top);
    auto rq = ctx.pos().rep(s0);
    CHECK(validate_psh_derivation(rp->presheaf, pd, rq->presheaf).ok());
    auto nd = neg_rep_derivation(ctx, d);
    CHECK(validate_psh_derivation(ctx.neg().rep(s0)->presheaf, nd, ctx.neg().rep(top)->presheaf).ok());
    // the identity derivation gives the identity family
    Derivation id{{s0, t.T().identity(0), s0}, t.D().identity(s0)};
    auto pid = pos_rep_derivation(ctx, id);
    for (std::size_t o = 0; o < pid.theta.size(); ++o)
      for (std::size_t x = 0; x < pid.theta[o].size(); ++x) CHECK(pid.theta[o][x] == x);
  }

  TEST_CASE("full faithfulness on fixtures") {
    CHECK(representation_ff_check(RepresentationContext(lattice_example().system)).ok());
    auto lin = build_linctx(linear_example(), {3});
    auto r = representation_ff_check(RepresentationContext(lin.system));
    CHECK(r.ok());
    CHECK(r.passed > 0);
  }

  TEST_CASE("linear slice over one is the context category") {
    auto lin = build_linctx(linear_example(), {3});
    ObjId one = lin.system->T().cod(lin.function(1, 1, {0}));
    auto S = slice(lin.system, one);
    CHECK(S->category->object_count() == lin.system->D().object_count());
    CHECK(S->category->morphism_count() == lin.system->D().morphism_count());
  }

  TEST_CASE("factorization and preservation") {
    Hoare H;
    RepresentationContext ctx(H.h.system);
    CHECK(factorization_check(ctx).ok());
    auto p = preservation_check(ctx);
    CHECK(p.ok());
    CHECK(p.passed > 0);
    CHECK(factorization_check(RepresentationContext(identity_system(H.h.system->T_ptr()))).ok());
    CHECK(factorization_check(RepresentationContext(random_refsys(7))).ok());
  }

  TEST_CASE("Day embedding on the lattice") {
    auto L = lattice_example();
    RepresentationContext ctx(L.system);
    REQUIRE(validate_monoidal(*L.system, L.monoidal).ok());
    auto g = genday_check_all(ctx, L.monoidal);
    CHECK(g.ok());
    CHECK(g.passed > 0);
    for (const auto& w : L.monoids) {
      CHECK(validate_monoid(L.monoidal, w).ok());
      CHECK(monoid_lax_check(ctx, L.monoidal, w).ok());
    }
  }
}
