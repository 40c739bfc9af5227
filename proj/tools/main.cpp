#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace refine;
using namespace refine::cli;

int main(int argc, char** argv) {
  CLI::App app{"Finite refinement systems: queries and verification suites"};
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  bool json = false;
  std::string bounds;
  std::string fault;
  std::vector<std::string> files;
  app.add_option("--seed", o.seed, "Seed for generated fixtures");
  app.add_option("--bounds", bounds, "Random fixture bounds T,D,hom");
  app.add_option("--size-guard", o.size_guard, "Largest functor category the residual path may build");
  app.add_flag("--json", json, "Emit JSON instead of text");
  app.add_flag("--cross-check", o.cross_check, "Compare direct duals with the residual path");
  app.add_flag("--timing", o.timing, "Include wall-clock time in reports");
  app.add_option("--jobs", o.jobs, "Worker threads for suite checks")->check(CLI::Range(1u, 256u));
  app.add_option("--inject-fault", fault, "Corrupt a table before checking")->check(CLI::IsMember({"der-action"}));
  app.add_option("--system", o.system, "Refinement system to use when several are loaded");

  auto with_files = [&](CLI::App* sub) {
    sub->add_option("-f,--file", files, "Fixture file to load; repeatable")->required()->expected(1)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  };

  std::string a1, a2, a3;
  bool pos = false, neg = false, left = false, right = false;

  auto* validate = app.add_subcommand("validate", "Load and validate files");
  with_files(validate);
  auto* derive = app.add_subcommand("derive", "List derivations of P --c--> Q");
  with_files(derive);
  derive->add_option("P", a1)->required();
  derive->add_option("c", a2)->required();
  derive->add_option("Q", a3)->required();
  auto* slice = app.add_subcommand("slice", "The relative slice over B");
  with_files(slice);
  slice->add_option("B", a1)->required();
  auto* coslice = app.add_subcommand("coslice", "The relative coslice under A");
  with_files(coslice);
  coslice->add_option("A", a1)->required();
  auto* represent = app.add_subcommand("represent", "Positive or negative representation of X");
  with_files(represent);
  auto* side = represent->add_option_group("side");
  side->add_flag("--pos", pos);
  side->add_flag("--neg", neg);
  side->require_option(1);
  represent->add_option("X", a1)->required();
  auto* pushforward = app.add_subcommand("pushforward", "Certified pushforward of P along c");
  with_files(pushforward);
  pushforward->add_option("c", a1)->required();
  pushforward->add_option("P", a2)->required();
  auto* pullback = app.add_subcommand("pullback", "Certified pullback of Q along c");
  with_files(pullback);
  pullback->add_option("c", a1)->required();
  pullback->add_option("Q", a2)->required();
  auto* dual = app.add_subcommand("dual", "Dual of a representation or of a declared presheaf");
  with_files(dual);
  auto* dside = dual->add_option_group("side");
  dside->add_flag("--left", left);
  dside->add_flag("--right", right);
  dside->require_option(1);
  dual->add_option("X", a1)->required();
  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  with_files(verify);
  std::vector<std::string> suites = suite_names();
  suites.push_back("all");
  verify->add_option("suite", a1)->required()->check(CLI::IsMember(suites));
  auto* fixtures = app.add_subcommand("fixtures", "Shipped fixtures");
  fixtures->require_subcommand(1);
  auto* gen = fixtures->add_subcommand("gen", "Emit a fixture as explicit blocks");
  gen->add_option("name", a1)->required()->check(
      CLI::IsMember({"hoare", "linear", "lattice", "galois", "terminal", "twoderiv", "random"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!bounds.empty()) o.bounds = parse_bounds(bounds);
    o.der_fault = fault == "der-action";
    Workspace ws;
    for (const auto& f : files) load_file(ws, f);
    Result r;
    if (*validate) r = cmd_validate(ws, o);
    else if (*derive) r = cmd_derive(ws, o, a1, a2, a3);
    else if (*slice) r = cmd_slice(ws, o, a1, false);
    else if (*coslice) r = cmd_slice(ws, o, a1, true);
    else if (*represent) r = cmd_represent(ws, o, a1, neg);
    else if (*pushforward) r = cmd_lift(ws, o, a1, a2, true);
    else if (*pullback) r = cmd_lift(ws, o, a1, a2, false);
    else if (*dual) r = cmd_dual(ws, o, a1, left);
    else if (*verify) r = cmd_verify(ws, o, a1);
    else if (*gen) r = cmd_fixtures_gen(o, a1);
    if (json)
      std::cout << r.json.dump(2) << "\n";
    else
      std::cout << r.text;
    return r.code;
  } catch (const LoadError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const StructuralError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const SizeGuardExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
