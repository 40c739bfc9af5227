#include <doctest.h>

#include "commands.hpp"
#include "workspace.hpp"

using namespace refine;
using namespace refine::cli;

namespace {

const char* kLoop =
    "category loop\n"
    "  object x\n"
    "  morphism id : x -> x identity\n"
    "  morphism f : x -> x\n"
    "  morphism g : x -> x\n"
    "  compose f f = g\n"
    "  compose g f = g\n"
    "  compose g g = g\n"
    "end\n";

std::string load_error(const std::string& text) {
  Workspace ws;
  try {
    load_text(ws, text, "t.rfs");
  } catch (const LoadError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("terminal category file loads") {
    Workspace ws;
    load_text(ws,
              "category one\n  object *\n  morphism id : * -> * identity\nend\n"
              "fixture bang : terminal\n  category one\nend\n",
              "t.rfs");
    CHECK(ws.categories.at("one")->morphism_count() == 1);
    CHECK(ws.system().system->D().object_count() == 1);
  }

  TEST_CASE("missing composite is a positioned load error") {
    auto what = load_error(kLoop);
    CHECK(what.find("t.rfs:1:") == 0);
    CHECK(what.find("missing composite f;g") != std::string::npos);
  }

  TEST_CASE("unknown names carry line and column") {
    CHECK(load_error("category c\n  object x\n  morphism id : x -> y identity\nend\n") ==
          "t.rfs:3:22: unknown object 'y'");
    CHECK(load_error("category c\n  object x\n").find("block without 'end'") != std::string::npos);
    CHECK(load_error("widget w\nend\n").find("unknown block 'widget'") != std::string::npos);
  }

  TEST_CASE("failed loads leave the workspace unchanged") {
    Workspace ws;
    load_text(ws, "category one\n  object *\n  morphism id : * -> * identity\nend\n", "a.rfs");
    CHECK_THROWS_AS(load_text(ws, "category two\n  object *\nend\n# no identity\n", "b.rfs"), LoadError);
    CHECK(ws.categories.size() == 1);
    CHECK(ws.provenance.count("two") == 0);
  }

  TEST_CASE("presheaf blocks") {
    std::string base =
        "category arrow\n  object x\n  object y\n  morphism 1x : x -> x identity\n"
        "  morphism 1y : y -> y identity\n  morphism u : x -> y\nend\n";
    Workspace ws;
    load_text(ws, base + "presheaf p over arrow\n  elements x = a b\n  elements y = c\n  act u : c -> b\nend\n", "p.rfs");
    const auto& p = ws.presheaves.at("p").presheaf;
    CHECK(p.total() == 3);
    CHECK(p.act(*p.base().find_morphism("u"), 0) == 1);
    auto what = load_error(base + "presheaf p over arrow\n  elements x = a\n  elements y = c\nend\n");
    CHECK(what.find("missing action u") != std::string::npos);
  }

  TEST_CASE("Hoare fixture loads with the closed monoid") {
    Workspace ws;
    load_text(ws, fixture_source("hoare", 0, {}), "hoare.rfs");
    const auto& e = ws.system();
    CHECK(e.system->D().object_count() == 4);
    CHECK(e.system->T().morphism_count() == 4);
    REQUIRE(e.hoare);
  }

  TEST_CASE("generated fixtures round-trip through explicit blocks") {
    for (const char* name : {"hoare", "linear", "lattice", "galois", "terminal", "twoderiv", "random"}) {
      CAPTURE(name);
      Workspace a;
      load_text(a, fixture_source(name, 5, {}), name);
      const auto& ea = a.system();
      Workspace b;
      load_text(b, emit_system(ea), "emitted");
      const auto& eb = b.system();
      CHECK(ea.system->D().same_structure(eb.system->D()));
      CHECK(ea.system->T().same_structure(eb.system->T()));
      CHECK(ea.system->functor().same_tables(eb.system->functor()));
      CHECK(emit_system(eb) == emit_system(ea));
    }
  }

  TEST_CASE("commands") {
    Workspace ws;
    load_text(ws, fixture_source("hoare", 0, {}), "hoare.rfs");
    Options o;
    CHECK(cmd_derive(ws, o, "{s0}", "swap", "{s0}").text == "no derivations\n");
    CHECK(cmd_derive(ws, o, "{s0}", "set0", "{s0}").text.find("1 derivation of") == 0);
    CHECK_THROWS_AS(cmd_derive(ws, o, "{s9}", "swap", "{s0}"), LoadError);
    auto rep = cmd_represent(ws, o, "{s0}", false);
    CHECK(rep.text.find("total 9") != std::string::npos);
    auto v = cmd_verify(ws, o, "all");
    CHECK(v.code == 0);
    Options many = o;
    many.jobs = 4;
    CHECK(cmd_verify(ws, many, "all").text == v.text);
    CHECK(cmd_verify(ws, many, "all").json.dump() == v.json.dump());
    CHECK(parse_bounds("2,5,3").max_D_objects == 5);
    CHECK_THROWS(parse_bounds("2,5"));
  }

  TEST_CASE("fault injection fails the duality suite") {
    Workspace ws;
    load_text(ws, fixture_source("twoderiv", 0, {}), "twoderiv.rfs");
    Options o;
    CHECK(cmd_verify(ws, o, "duality").code == 0);
    o.der_fault = true;
    auto r = cmd_verify(ws, o, "duality");
    CHECK(r.code == 1);
    CHECK(r.text.find("counterexample") != std::string::npos);
  }
}
