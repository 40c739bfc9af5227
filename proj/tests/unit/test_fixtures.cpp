#include <doctest.h>

#include "oracles.hpp"
#include "refine/fixtures.hpp"

using namespace refine;

TEST_SUITE("fixtures") {
  TEST_CASE("two-state Hoare fixture") {
    auto h = build_hoare(hoare_two_state());
    CHECK(h.system->T().morphism_count() == 4);
    CHECK(h.system->D().object_count() == 4);
    ObjId empty = *h.system->D().find_object("{}");
    for (std::size_t c = 0; c < h.commands.size(); ++c)
      for (std::size_t Q = 0; Q < h.predicates.size(); ++Q)
        CHECK(count_derivations(*h.system, {empty, static_cast<MorId>(c), static_cast<ObjId>(Q)}) == 1);
    for (std::size_t P = 0; P < h.predicates.size(); ++P)
      CHECK(hoare_sp(h, h.system->T().identity(0), static_cast<ObjId>(P)) == static_cast<ObjId>(P));
    MorId set0 = *h.system->T().find_morphism("set0");
    CHECK(h.system->D().object_name(*hoare_sp(h, set0, *h.system->D().find_object("{s0,s1}"))) == "{s0}");
    CHECK(h.system->D().object_name(*hoare_wp(h, set0, *h.system->D().find_object("{s1}"))) == "{}");
    CHECK(predicate_name(h.spec, 0b11) == "{s0,s1}");
  }

  TEST_CASE("Hoare fixture with listed predicates and a closure bound") {
    auto spec = hoare_two_state();
    spec.predicates = {0b01, 0b11};
    auto h = build_hoare(spec);
    CHECK(h.system->D().object_count() == 2);
    MorId set0 = *h.system->T().find_morphism("set0");
    ObjId top = *h.system->D().find_object("{s0,s1}");
    CHECK(hoare_sp(h, set0, top).has_value());
    CHECK(hoare_wp(h, set0, top) == top);
    MorId swap = *h.system->T().find_morphism("swap");
    CHECK_FALSE(hoare_sp(h, swap, *h.system->D().find_object("{s0}")).has_value());
    auto three = spec;
    three.states = {"s0", "s1", "s2"};
    three.predicates = {};
    three.generators = {{"rot", {1, 2, 0}}, {"set0", {0, 0, 0}}};
    auto monoid = oracle::transformer_monoid(3, {{1, 2, 0}, {0, 0, 0}});
    CHECK(build_hoare(three).system->T().morphism_count() == monoid.size());
    three.monoid_bound = 2;
    CHECK_THROWS_AS(build_hoare(three), StructuralError);
  }

  TEST_CASE("random systems are deterministic and bounded") {
    RandomBounds b;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      auto x = random_refsys(seed, b);
      auto y = random_refsys(seed, b);
      CHECK(x->D().same_structure(y->D()));
      CHECK(x->T().same_structure(y->T()));
      CHECK(x->functor().same_tables(y->functor()));
      CHECK(x->T().object_count() <= b.max_T_objects);
      CHECK(x->D().object_count() <= b.max_D_objects);
      CHECK(x->D().max_hom_size() <= b.max_hom);
      CHECK(x->T().max_hom_size() <= b.max_hom);
      CHECK(validate_category(x->D()).ok());
      CHECK(validate_category(x->T()).ok());
      CHECK(validate_functor(x->functor()).ok());
    }
  }

  TEST_CASE("lattice builder") {
    auto L = lattice_example();
    CHECK(L.system->D().object_count() == 4);
    CHECK(L.system->T().object_count() == 3);
    CHECK(validate_monoidal(*L.system, L.monoidal).ok());
    CHECK(L.monoids.size() == 3);
    auto two = chain_poset(2, "c");
    CHECK(validate_category(*poset_category(powerset_poset({"a", "b", "c"}))).ok());
    // order-reversing map into a chain
    CHECK_THROWS_AS(build_lattice(two, two, {1, 0}), StructuralError);
    auto id = build_lattice(two, two, {0, 1});
    CHECK(representation_ff_check(RepresentationContext(id.system)).ok());
    CHECK(genday_check_all(RepresentationContext(id.system), id.monoidal).ok());
  }

  TEST_CASE("multicategory of the linear fixture") {
    auto mc = linear_example();
    CHECK(validate_multicategory(mc).ok());
    REQUIRE(mc.tensors.size() == 1);
    CHECK(validate_left_rule(mc, mc.tensors.front()).ok());
    auto broken = mc;
    broken.multimorphisms.erase(broken.multimorphisms.begin());
    CHECK_FALSE(validate_multicategory(broken).ok());
    auto bad_rule = mc;
    bad_rule.tensors.front().left_rule.clear();
    CHECK_FALSE(validate_left_rule(bad_rule, bad_rule.tensors.front()).ok());
  }

  TEST_CASE("linear contexts up to a bound") {
    auto mc = linear_example();
    for (std::size_t K = 0; K <= 3; ++K) {
      auto fx = build_linctx(mc, {K});
      // sorted lists of at most K of 4 formulas
      std::size_t expected = 0, multisets = 1;
      for (std::size_t n = 0; n <= K; ++n) {
        expected += multisets;
        multisets = multisets * (4 + n) / (n + 1);
      }
      CHECK(fx.system->D().object_count() == expected);
      CHECK(fx.system->T().object_count() == K + 1);
      CHECK(validate_monoidal(*fx.system, fx.monoidal).ok());
      CHECK(validate_category(fx.system->D()).ok());
    }
    auto fx = build_linctx(mc, {3});
    CHECK(fx.context({0, 1}).has_value());
    CHECK(fx.context({}).has_value());
    CHECK_FALSE(fx.context({0, 0, 0, 0}).has_value());
  }

  TEST_CASE("Galois adjunction fixture") {
    auto adj = galois_adjunction();
    CHECK(validate_morphism(adj.F).ok());
    CHECK(validate_morphism(adj.G).ok());
    CHECK(adjunction_check(adj).ok());
  }
}
