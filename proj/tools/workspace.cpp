#include "workspace.hpp"

#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace refine::cli {

LoadError::LoadError(const std::string& file, std::size_t line, std::size_t column, const std::string& what)
    : std::runtime_error(file + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + what) {}

const SystemEntry& Workspace::system(const std::string& name) const {
  if (name.empty()) {
    if (system_order.empty()) throw LoadError("no refinement system loaded");
    return systems.at(system_order.front());
  }
  auto it = systems.find(name);
  if (it == systems.end()) throw LoadError("unknown system '" + name + "'");
  return it->second;
}

namespace {

struct Token {
  std::string text;
  std::size_t column = 0;
};

struct Line {
  std::size_t number = 0;
  std::vector<Token> tokens;
};

std::vector<Line> tokenize(const std::string& text) {
  std::vector<Line> out;
  std::istringstream in(text);
  std::string raw;
  std::size_t n = 0;
  while (std::getline(in, raw)) {
    ++n;
    Line line{n, {}};
    std::size_t i = 0;
    while (i < raw.size()) {
      while (i < raw.size() && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
      if (i >= raw.size() || raw[i] == '#') break;
      std::size_t j = i;
      while (j < raw.size() && !std::isspace(static_cast<unsigned char>(raw[j]))) ++j;
      line.tokens.push_back({raw.substr(i, j - i), i + 1});
      i = j;
    }
    if (!line.tokens.empty()) out.push_back(std::move(line));
  }
  return out;
}

class Parser {
 public:
  Parser(Workspace& ws, std::string file) : ws_(ws), file_(std::move(file)) {}

  void run(const std::vector<Line>& lines) {
    std::size_t i = 0;
    while (i < lines.size()) {
      const Line& head = lines[i];
      std::size_t j = i + 1;
      while (j < lines.size() && lines[j].tokens[0].text != "end") ++j;
      if (j == lines.size()) fail(head, 0, "block without 'end'");
      if (lines[j].tokens.size() != 1) fail(lines[j], 1, "unexpected tokens after 'end'");
      std::vector<Line> body(lines.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                             lines.begin() + static_cast<std::ptrdiff_t>(j));
      const std::string& kind = head.tokens[0].text;
      if (kind == "category") {
        category(head, body);
      } else if (kind == "functor") {
        functor(head, body);
      } else if (kind == "refsys") {
        refsys(head, body);
      } else if (kind == "presheaf") {
        presheaf(head, body);
      } else if (kind == "fixture") {
        fixture(head, body);
      } else {
        fail(head, 0, "unknown block '" + kind + "'");
      }
      i = j + 1;
    }
  }

 private:
  [[noreturn]] void fail(const Line& l, std::size_t tok, const std::string& what) const {
    std::size_t col = tok < l.tokens.size() ? l.tokens[tok].column : (l.tokens.empty() ? 1 : l.tokens.back().column);
    throw LoadError(file_, l.number, col, what);
  }

  void expect_shape(const Line& l, std::size_t n, const std::string& shape) const {
    if (l.tokens.size() != n) fail(l, std::min(n, l.tokens.size()), "expected '" + shape + "'");
  }

  void keyword(const Line& l, std::size_t tok, const std::string& kw, const std::string& shape) const {
    if (tok >= l.tokens.size() || l.tokens[tok].text != kw) fail(l, tok, "expected '" + shape + "'");
  }

  void fresh(const Line& l, std::size_t tok) {
    const std::string& name = l.tokens.at(tok).text;
    if (ws_.provenance.count(name)) fail(l, tok, "name '" + name + "' already defined");
    ws_.provenance[name] = {file_, l.number, {}};
  }

  CatPtr lookup_category(const Line& l, std::size_t tok) const {
    auto it = ws_.categories.find(l.tokens.at(tok).text);
    if (it == ws_.categories.end()) fail(l, tok, "unknown category '" + l.tokens[tok].text + "'");
    return it->second;
  }

  const SystemEntry& lookup_system(const Line& l, std::size_t tok) const {
    auto it = ws_.systems.find(l.tokens.at(tok).text);
    if (it == ws_.systems.end()) fail(l, tok, "unknown refsys '" + l.tokens[tok].text + "'");
    return it->second;
  }

  static ObjId object_in(const FinCategory& C, const std::string& name) {
    auto o = C.find_object(name);
    return o ? *o : kNoObject;
  }
  static MorId morphism_in(const FinCategory& C, const std::string& name) {
    auto m = C.find_morphism(name);
    return m ? *m : kNoMorphism;
  }

  void category(const Line& head, const std::vector<Line>& body) {
    expect_shape(head, 2, "category NAME");
    const std::string name = head.tokens[1].text;
    fresh(head, 1);
    FinCategory::Builder b;
    std::map<std::string, ObjId> objects;
    std::map<std::string, MorId> morphisms;
    std::vector<std::tuple<const Line*, MorId, MorId, MorId>> composites;
    for (const auto& l : body) {
      const std::string& kw = l.tokens[0].text;
      if (kw == "object") {
        expect_shape(l, 2, "object X");
        if (objects.count(l.tokens[1].text)) fail(l, 1, "duplicate object '" + l.tokens[1].text + "'");
        objects[l.tokens[1].text] = b.add_object(l.tokens[1].text);
      } else if (kw == "morphism") {
        if (l.tokens.size() != 6 && l.tokens.size() != 7) fail(l, 0, "expected 'morphism f : X -> Y [identity]'");
        keyword(l, 2, ":", "morphism f : X -> Y");
        keyword(l, 4, "->", "morphism f : X -> Y");
        if (morphisms.count(l.tokens[1].text)) fail(l, 1, "duplicate morphism '" + l.tokens[1].text + "'");
        auto d = objects.find(l.tokens[3].text);
        if (d == objects.end()) fail(l, 3, "unknown object '" + l.tokens[3].text + "'");
        auto c = objects.find(l.tokens[5].text);
        if (c == objects.end()) fail(l, 5, "unknown object '" + l.tokens[5].text + "'");
        MorId f = b.add_morphism(l.tokens[1].text, d->second, c->second);
        morphisms[l.tokens[1].text] = f;
        if (l.tokens.size() == 7) {
          keyword(l, 6, "identity", "morphism f : X -> X identity");
          if (d->second != c->second) fail(l, 6, "identity must be an endomorphism");
          b.set_identity(d->second, f);
        }
      } else if (kw == "compose") {
        expect_shape(l, 5, "compose f g = h");
        keyword(l, 3, "=", "compose f g = h");
        MorId fgh[3];
        std::size_t pos[3] = {1, 2, 4};
        for (int k = 0; k < 3; ++k) {
          auto it = morphisms.find(l.tokens[pos[k]].text);
          if (it == morphisms.end()) fail(l, pos[k], "unknown morphism '" + l.tokens[pos[k]].text + "'");
          fgh[k] = it->second;
        }
        composites.emplace_back(&l, fgh[0], fgh[1], fgh[2]);
      } else {
        fail(l, 0, "unknown category entry '" + kw + "'");
      }
    }
    for (auto& [l, f, g, h] : composites) {
      try {
        if (b.dom(h) != b.dom(f) || b.cod(h) != b.cod(g)) fail(*l, 4, "composite has the wrong endpoints");
        b.set_composite(f, g, h);
      } catch (const StructuralError& e) {
        fail(*l, 0, e.what());
      }
    }
    CatPtr C;
    try {
      C = b.build();
    } catch (const StructuralError& e) {
      fail(head, 1, "category " + name + ": " + e.what());
    }
    auto v = validate_category(*C);
    if (!v.ok()) fail(head, 1, "category " + name + ": " + v.violations.front());
    ws_.categories[name] = C;
  }

  void functor(const Line& head, const std::vector<Line>& body) {
    expect_shape(head, 6, "functor NAME : C -> D");
    keyword(head, 2, ":", "functor NAME : C -> D");
    keyword(head, 4, "->", "functor NAME : C -> D");
    const std::string name = head.tokens[1].text;
    CatPtr S = lookup_category(head, 3);
    CatPtr T = lookup_category(head, 5);
    fresh(head, 1);
    FunctorData F{S, T, std::vector<ObjId>(S->object_count(), kNoObject),
                  std::vector<MorId>(S->morphism_count(), kNoMorphism)};
    for (const auto& l : body) {
      const std::string& kw = l.tokens[0].text;
      expect_shape(l, 4, kw + " x -> y");
      keyword(l, 2, "->", kw + " x -> y");
      if (kw == "object") {
        ObjId a = object_in(*S, l.tokens[1].text);
        ObjId b = object_in(*T, l.tokens[3].text);
        if (a == kNoObject) fail(l, 1, "unknown object '" + l.tokens[1].text + "'");
        if (b == kNoObject) fail(l, 3, "unknown object '" + l.tokens[3].text + "'");
        F.object_map[a] = b;
      } else if (kw == "morphism") {
        MorId f = morphism_in(*S, l.tokens[1].text);
        MorId g = morphism_in(*T, l.tokens[3].text);
        if (f == kNoMorphism) fail(l, 1, "unknown morphism '" + l.tokens[1].text + "'");
        if (g == kNoMorphism) fail(l, 3, "unknown morphism '" + l.tokens[3].text + "'");
        F.morphism_map[f] = g;
      } else {
        fail(l, 0, "unknown functor entry '" + kw + "'");
      }
    }
    for (std::size_t a = 0; a < S->object_count(); ++a)
      if (F.object_map[a] == kNoObject)
        fail(head, 1, "functor " + name + ": missing image of object " + S->object_name(static_cast<ObjId>(a)));
    for (std::size_t f = 0; f < S->morphism_count(); ++f) {
      if (F.morphism_map[f] != kNoMorphism) continue;
      if (S->is_identity(static_cast<MorId>(f)))
        F.morphism_map[f] = T->identity(F.object_map[S->dom(static_cast<MorId>(f))]);
      else
        fail(head, 1, "functor " + name + ": missing image of morphism " + S->morphism_name(static_cast<MorId>(f)));
    }
    auto v = validate_functor(F);
    if (!v.ok()) fail(head, 1, "functor " + name + ": " + v.violations.front());
    ws_.functors[name] = std::move(F);
  }

  void add_system(const Line& head, SystemEntry e) {
    e.from = {file_, head.number, e.from.builder};
    ws_.system_order.push_back(e.name);
    ws_.systems[e.name] = std::move(e);
  }

  void refsys(const Line& head, const std::vector<Line>& body) {
    expect_shape(head, 2, "refsys NAME");
    const std::string name = head.tokens[1].text;
    fresh(head, 1);
    if (body.size() != 1) fail(head, 0, "refsys block must contain exactly one 'functor F' line");
    const Line& l = body[0];
    expect_shape(l, 2, "functor F");
    keyword(l, 0, "functor", "functor F");
    auto it = ws_.functors.find(l.tokens[1].text);
    if (it == ws_.functors.end()) fail(l, 1, "unknown functor '" + l.tokens[1].text + "'");
    SystemEntry e;
    e.name = name;
    try {
      e.system = make_system(it->second, name);
    } catch (const StructuralError& err) {
      fail(l, 1, err.what());
    }
    add_system(head, std::move(e));
  }

  void presheaf(const Line& head, const std::vector<Line>& body) {
    if (head.tokens.size() < 4) fail(head, head.tokens.size(), "expected 'presheaf NAME over C'");
    keyword(head, 2, "over", "presheaf NAME over C");
    const std::string name = head.tokens[1].text;
    PresheafEntry e;
    e.name = name;
    CatPtr C;
    if (head.tokens.size() == 4) {
      C = lookup_category(head, 3);
    } else {
      expect_shape(head, 6, "presheaf NAME over slice|coslice SYS B");
      const std::string& side = head.tokens[3].text;
      if (side != "slice" && side != "coslice") fail(head, 3, "expected 'slice' or 'coslice'");
      const auto& sys = lookup_system(head, 4);
      ObjId B = object_in(sys.system->T(), head.tokens[5].text);
      if (B == kNoObject) fail(head, 5, "unknown base object '" + head.tokens[5].text + "'");
      RepresentationContext ctx(sys.system);
      C = side == "slice" ? ctx.pos().slice(B)->category : ctx.neg().slice(B)->category;
      e.system = sys.name;
      e.over = side == "slice" ? PresheafEntry::Over::slice : PresheafEntry::Over::coslice;
      e.B = B;
    }
    fresh(head, 1);
    std::vector<std::vector<std::string>> labels(C->object_count());
    std::vector<std::map<std::string, Elem>> index(C->object_count());
    std::vector<bool> seen(C->object_count(), false);
    std::vector<const Line*> acts;
    for (const auto& l : body) {
      const std::string& kw = l.tokens[0].text;
      if (kw == "elements") {
        if (l.tokens.size() < 3) fail(l, l.tokens.size(), "expected 'elements X = x ...'");
        keyword(l, 2, "=", "elements X = x ...");
        ObjId a = object_in(*C, l.tokens[1].text);
        if (a == kNoObject) fail(l, 1, "unknown object '" + l.tokens[1].text + "'");
        if (seen[a]) fail(l, 1, "elements of " + l.tokens[1].text + " listed twice");
        seen[a] = true;
        for (std::size_t k = 3; k < l.tokens.size(); ++k) {
          if (index[a].count(l.tokens[k].text)) fail(l, k, "duplicate element '" + l.tokens[k].text + "'");
          index[a][l.tokens[k].text] = static_cast<Elem>(labels[a].size());
          labels[a].push_back(l.tokens[k].text);
        }
      } else if (kw == "act") {
        acts.push_back(&l);
      } else {
        fail(l, 0, "unknown presheaf entry '" + kw + "'");
      }
    }
    std::vector<std::size_t> counts;
    for (const auto& v : labels) counts.push_back(v.size());
    constexpr Elem kUnset = static_cast<Elem>(-1);
    std::vector<std::vector<Elem>> action(C->morphism_count());
    for (std::size_t f = 0; f < C->morphism_count(); ++f) {
      MorId ff = static_cast<MorId>(f);
      action[f].assign(counts[C->cod(ff)], kUnset);
      if (C->is_identity(ff))
        for (std::size_t y = 0; y < action[f].size(); ++y) action[f][y] = static_cast<Elem>(y);
    }
    for (const Line* l : acts) {
      expect_shape(*l, 6, "act f : y -> x");
      keyword(*l, 2, ":", "act f : y -> x");
      keyword(*l, 4, "->", "act f : y -> x");
      MorId f = morphism_in(*C, l->tokens[1].text);
      if (f == kNoMorphism) fail(*l, 1, "unknown morphism '" + l->tokens[1].text + "'");
      auto y = index[C->cod(f)].find(l->tokens[3].text);
      if (y == index[C->cod(f)].end()) fail(*l, 3, "'" + l->tokens[3].text + "' is not an element over the codomain");
      auto x = index[C->dom(f)].find(l->tokens[5].text);
      if (x == index[C->dom(f)].end()) fail(*l, 5, "'" + l->tokens[5].text + "' is not an element over the domain");
      if (action[f][y->second] != kUnset && !C->is_identity(f)) fail(*l, 1, "action listed twice");
      action[f][y->second] = x->second;
    }
    for (std::size_t f = 0; f < C->morphism_count(); ++f)
      for (std::size_t y = 0; y < action[f].size(); ++y)
        if (action[f][y] == kUnset)
          fail(head, 1, "presheaf " + name + ": missing action " + C->morphism_name(static_cast<MorId>(f)) + " on " +
                            labels[C->cod(static_cast<MorId>(f))][y]);
    e.presheaf = Presheaf(C, std::move(counts), std::move(action), std::move(labels));
    auto v = validate_presheaf(e.presheaf);
    if (!v.ok()) fail(head, 1, "presheaf " + name + ": " + v.violations.front());
    e.from = {file_, head.number, {}};
    ws_.presheaves[name] = std::move(e);
  }

  // -- fixtures

  using Params = std::map<std::string, std::vector<const Line*>>;

  Params params(const std::vector<Line>& body, const std::set<std::string>& allowed) const {
    Params p;
    for (const auto& l : body) {
      if (!allowed.count(l.tokens[0].text)) fail(l, 0, "unknown fixture parameter '" + l.tokens[0].text + "'");
      p[l.tokens[0].text].push_back(&l);
    }
    return p;
  }

  std::size_t number(const Line& l, std::size_t tok) const {
    if (tok >= l.tokens.size()) fail(l, tok, "expected a number");
    const std::string& s = l.tokens[tok].text;
    std::size_t v = 0;
    try {
      std::size_t used = 0;
      v = std::stoull(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      fail(l, tok, "expected a number, found '" + s + "'");
    }
    return v;
  }

  void fixture(const Line& head, const std::vector<Line>& body) {
    expect_shape(head, 4, "fixture NAME : KIND");
    keyword(head, 2, ":", "fixture NAME : KIND");
    const std::string name = head.tokens[1].text;
    const std::string kind = head.tokens[3].text;
    SystemEntry e;
    e.name = name;
    e.from.builder = kind;
    try {
      if (kind == "hoare") {
        hoare(head, body, e);
      } else if (kind == "linctx") {
        linctx(head, body, e);
      } else if (kind == "lattice") {
        lattice(head, body, e);
      } else if (kind == "galois") {
        params(body, {});
        auto adj = std::make_shared<RefSysAdjunction>(galois_adjunction());
        e.system = adj->G.target;
        e.adjunction = adj;
      } else if (kind == "random") {
        auto p = params(body, {"seed", "bounds"});
        std::uint64_t seed = 0;
        RandomBounds bounds;
        if (p.count("seed")) seed = number(*p["seed"].back(), 1);
        if (p.count("bounds")) {
          const Line& l = *p["bounds"].back();
          expect_shape(l, 4, "bounds T D hom");
          bounds = {number(l, 1), number(l, 2), number(l, 3)};
        }
        e.system = random_refsys(seed, bounds);
      } else if (kind == "terminal") {
        auto p = params(body, {"category"});
        if (!p.count("category")) fail(head, 3, "terminal fixture needs 'category C'");
        e.system = terminal_system(lookup_category(*p["category"].back(), 1));
      } else {
        fail(head, 3, "unknown fixture kind '" + kind + "'");
      }
    } catch (const StructuralError& err) {
      fail(head, 1, "fixture " + name + ": " + err.what());
    }
    fresh(head, 1);
    add_system(head, std::move(e));
  }

  void hoare(const Line& head, const std::vector<Line>& body, SystemEntry& e) {
    auto p = params(body, {"states", "generator", "predicate", "bound"});
    HoareSpec spec;
    if (!p.count("states")) fail(head, 3, "hoare fixture needs 'states ...'");
    std::map<std::string, std::size_t> state;
    for (std::size_t k = 1; k < p["states"].back()->tokens.size(); ++k) {
      state[p["states"].back()->tokens[k].text] = spec.states.size();
      spec.states.push_back(p["states"].back()->tokens[k].text);
    }
    for (const Line* l : p["generator"]) {
      if (l->tokens.size() != 3 + spec.states.size()) fail(*l, 0, "expected 'generator NAME = image per state'");
      keyword(*l, 2, "=", "generator NAME = ...");
      HoareGenerator g{l->tokens[1].text, {}};
      for (std::size_t k = 3; k < l->tokens.size(); ++k) {
        auto it = state.find(l->tokens[k].text);
        if (it == state.end()) fail(*l, k, "unknown state '" + l->tokens[k].text + "'");
        g.map.push_back(it->second);
      }
      spec.generators.push_back(std::move(g));
    }
    for (const Line* l : p["predicate"]) {
      std::uint64_t mask = 0;
      for (std::size_t k = 1; k < l->tokens.size(); ++k) {
        auto it = state.find(l->tokens[k].text);
        if (it == state.end()) fail(*l, k, "unknown state '" + l->tokens[k].text + "'");
        mask |= std::uint64_t{1} << it->second;
      }
      spec.predicates.push_back(mask);
    }
    if (p.count("bound")) spec.monoid_bound = number(*p["bound"].back(), 1);
    auto h = std::make_shared<HoareFixture>(build_hoare(spec));
    e.system = h->system;
    e.hoare = h;
  }

  void linctx(const Line& head, const std::vector<Line>& body, SystemEntry& e) {
    auto p = params(body, {"formula", "multimorphism", "tensor", "leftrule", "bound"});
    MulticategorySpec mc;
    std::map<std::string, std::size_t> formula;
    for (const Line* l : p["formula"])
      for (std::size_t k = 1; k < l->tokens.size(); ++k) {
        if (formula.count(l->tokens[k].text)) fail(*l, k, "duplicate formula");
        formula[l->tokens[k].text] = mc.formulas.size();
        mc.formulas.push_back(l->tokens[k].text);
      }
    auto find_formula = [&](const Line& l, std::size_t k) {
      auto it = formula.find(l.tokens[k].text);
      if (it == formula.end()) fail(l, k, "unknown formula '" + l.tokens[k].text + "'");
      return it->second;
    };
    for (const Line* l : p["multimorphism"]) {
      if (l->tokens.size() < 5) fail(*l, 0, "expected 'multimorphism NAME : X ... |- Y'");
      keyword(*l, 2, ":", "multimorphism NAME : X ... |- Y");
      keyword(*l, l->tokens.size() - 2, "|-", "multimorphism NAME : X ... |- Y");
      Multimorphism m{l->tokens[1].text, {}, find_formula(*l, l->tokens.size() - 1)};
      for (std::size_t k = 3; k + 2 < l->tokens.size(); ++k) m.sources.push_back(find_formula(*l, k));
      std::sort(m.sources.begin(), m.sources.end());
      mc.multimorphisms.push_back(std::move(m));
    }
    // `leftrule` lines attach to the nearest preceding `tensor` line.
    for (const auto& l : body) {
      if (l.tokens[0].text == "tensor") {
        expect_shape(l, 4, "tensor X Y X*Y");
        mc.tensors.push_back({find_formula(l, 1), find_formula(l, 2), find_formula(l, 3), {}});
      } else if (l.tokens[0].text == "leftrule") {
        expect_shape(l, 4, "leftrule a = b");
        keyword(l, 2, "=", "leftrule a = b");
        if (mc.tensors.empty()) fail(l, 0, "leftrule before any tensor");
        mc.tensors.back().left_rule.emplace_back(l.tokens[1].text, l.tokens[3].text);
      }
    }
    TruncationParams trunc;
    if (p.count("bound")) trunc.K = number(*p["bound"].back(), 1);
    auto v = validate_multicategory(mc);
    if (!v.ok()) fail(head, 1, "fixture " + head.tokens[1].text + ": " + v.violations.front());
    auto fx = std::make_shared<LinctxFixture>(build_linctx(mc, trunc));
    e.system = fx->system;
    e.monoidal = fx->monoidal;
    if (fx->one.multiplication != kNoMorphism) e.monoids = {fx->one};
    e.linctx = fx;
  }

  PosetSpec poset(const Line& l) const {
    if (l.tokens.size() >= 2 && l.tokens[1].text == "powerset") {
      std::vector<std::string> atoms;
      for (std::size_t k = 2; k < l.tokens.size(); ++k) atoms.push_back(l.tokens[k].text);
      if (atoms.size() > 6) fail(l, 8, "at most 6 atoms");
      return powerset_poset(atoms);
    }
    if (l.tokens.size() == 4 && l.tokens[1].text == "chain") return chain_poset(number(l, 2), l.tokens[3].text);
    fail(l, 1, "expected 'powerset a ...' or 'chain N prefix'");
  }

  void lattice(const Line& head, const std::vector<Line>& body, SystemEntry& e) {
    auto p = params(body, {"domain", "codomain", "map"});
    if (!p.count("domain") || !p.count("codomain")) fail(head, 3, "lattice fixture needs 'domain' and 'codomain'");
    PosetSpec D = poset(*p["domain"].back());
    PosetSpec T = poset(*p["codomain"].back());
    std::vector<std::size_t> map(D.names.size(), T.names.size());
    for (const Line* l : p["map"]) {
      expect_shape(*l, 4, "map x = y");
      keyword(*l, 2, "=", "map x = y");
      auto x = std::find(D.names.begin(), D.names.end(), l->tokens[1].text);
      auto y = std::find(T.names.begin(), T.names.end(), l->tokens[3].text);
      if (x == D.names.end()) fail(*l, 1, "unknown domain element '" + l->tokens[1].text + "'");
      if (y == T.names.end()) fail(*l, 3, "unknown codomain element '" + l->tokens[3].text + "'");
      map[static_cast<std::size_t>(x - D.names.begin())] = static_cast<std::size_t>(y - T.names.begin());
    }
    for (std::size_t i = 0; i < map.size(); ++i)
      if (map[i] == T.names.size()) fail(head, 1, "lattice map misses " + D.names[i]);
    auto fx = build_lattice(D, T, map);
    e.system = fx.system;
    e.monoidal = fx.monoidal;
    e.monoids = fx.monoids;
  }

  Workspace& ws_;
  std::string file_;
};

}  // namespace

void load_text(Workspace& ws, const std::string& text, const std::string& file) {
  Workspace next = ws;
  Parser(next, file).run(tokenize(text));
  ws = std::move(next);
}

void load_file(Workspace& ws, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  load_text(ws, ss.str(), path);
}

std::vector<std::string> fixture_kinds() { return {"hoare", "linctx", "lattice", "galois", "random", "terminal"}; }

std::string fixture_source(const std::string& name, std::uint64_t seed, const RandomBounds& bounds) {
  if (name == "hoare")
    return "# Two states with commands swap and set0; every predicate.\n"
           "fixture hoare : hoare\n"
           "  states s0 s1\n"
           "  generator swap = s1 s0\n"
           "  generator set0 = s0 s0\n"
           "end\n";
  if (name == "linear")
    return "# Contexts of at most three formulas over a thin multicategory.\n"
           "fixture linear : linctx\n"
           "  formula A B A*B C\n"
           "  multimorphism id_A : A |- A\n"
           "  multimorphism id_B : B |- B\n"
           "  multimorphism id_A*B : A*B |- A*B\n"
           "  multimorphism id_C : C |- C\n"
           "  multimorphism tensR : A B |- A*B\n"
           "  multimorphism u : |- C\n"
           "  tensor A B A*B\n"
           "  leftrule tensR = id_A*B\n"
           "  bound 3\n"
           "end\n";
  if (name == "lattice")
    return "# Subsets of {a,b} onto the 3-chain, forgetting a.\n"
           "fixture lattice : lattice\n"
           "  domain powerset a b\n"
           "  codomain chain 3 c\n"
           "  map {} = c1\n"
           "  map {a} = c1\n"
           "  map {b} = c2\n"
           "  map {a,b} = c2\n"
           "end\n";
  if (name == "galois") return "fixture galois : galois\nend\n";
  if (name == "random" || name == "terminal" || name == "twoderiv") {
    if (name == "random") {
      std::ostringstream os;
      os << "fixture random : random\n  seed " << seed << "\n  bounds " << bounds.max_T_objects << " "
         << bounds.max_D_objects << " " << bounds.max_hom << "\nend\n";
      return os.str();
    }
    if (name == "terminal")
      return "# The terminal category over itself.\n"
             "category one\n"
             "  object *\n"
             "  morphism id : * -> * identity\n"
             "end\n"
             "\n"
             "functor one.t : one -> one\n"
             "  object * -> *\n"
             "end\n"
             "\n"
             "refsys terminal\n"
             "  functor one.t\n"
             "end\n";
    return "# Two derivations P -> Q exchanged by an involution of Q.\n"
           "category twoderiv.D\n"
           "  object P\n"
           "  object Q\n"
           "  morphism 1_P : P -> P identity\n"
           "  morphism 1_Q : Q -> Q identity\n"
           "  morphism a : P -> Q\n"
           "  morphism b : P -> Q\n"
           "  morphism s : Q -> Q\n"
           "  compose a s = b\n"
           "  compose b s = a\n"
           "  compose s s = 1_Q\n"
           "end\n"
           "\n"
           "category twoderiv.T\n"
           "  object *\n"
           "  morphism id : * -> * identity\n"
           "end\n"
           "\n"
           "functor twoderiv.t : twoderiv.D -> twoderiv.T\n"
           "  object P -> *\n"
           "  object Q -> *\n"
           "  morphism a -> id\n"
           "  morphism b -> id\n"
           "  morphism s -> id\n"
           "end\n"
           "\n"
           "refsys twoderiv\n"
           "  functor twoderiv.t\n"
           "end\n";
  }
  throw LoadError("unknown fixture '" + name + "'");
}

namespace {

void emit_category(std::ostream& os, const std::string& name, const FinCategory& C) {
  os << "category " << name << "\n";
  for (std::size_t a = 0; a < C.object_count(); ++a) os << "  object " << C.object_name(static_cast<ObjId>(a)) << "\n";
  for (std::size_t f = 0; f < C.morphism_count(); ++f) {
    MorId ff = static_cast<MorId>(f);
    os << "  morphism " << C.morphism_name(ff) << " : " << C.object_name(C.dom(ff)) << " -> "
       << C.object_name(C.cod(ff)) << (C.is_identity(ff) ? " identity" : "") << "\n";
  }
  for (std::size_t f = 0; f < C.morphism_count(); ++f) {
    MorId ff = static_cast<MorId>(f);
    if (C.is_identity(ff)) continue;
    for (MorId g : C.outgoing(C.cod(ff))) {
      if (C.is_identity(g)) continue;
      os << "  compose " << C.morphism_name(ff) << " " << C.morphism_name(g) << " = "
         << C.morphism_name(C.compose(ff, g)) << "\n";
    }
  }
  os << "end\n";
}

}  // namespace

std::string emit_system(const SystemEntry& e) {
  const auto& t = *e.system;
  std::ostringstream os;
  auto n = [](std::size_t k, const char* w) { return std::to_string(k) + " " + w + (k == 1 ? "" : "s"); };
  os << "# " << e.name << ": " << n(t.D().object_count(), "refinement") << " over " << n(t.T().object_count(), "type")
     << "\n";
  emit_category(os, e.name + ".D", t.D());
  os << "\n";
  emit_category(os, e.name + ".T", t.T());
  os << "\nfunctor " << e.name << ".t : " << e.name << ".D -> " << e.name << ".T\n";
  for (std::size_t P = 0; P < t.D().object_count(); ++P)
    os << "  object " << t.D().object_name(static_cast<ObjId>(P)) << " -> "
       << t.T().object_name(t.over(static_cast<ObjId>(P))) << "\n";
  for (std::size_t a = 0; a < t.D().morphism_count(); ++a) {
    MorId aa = static_cast<MorId>(a);
    if (t.D().is_identity(aa)) continue;
    os << "  morphism " << t.D().morphism_name(aa) << " -> " << t.T().morphism_name(t.image(aa)) << "\n";
  }
  os << "end\n\nrefsys " << e.name << "\n  functor " << e.name << ".t\nend\n";
  return os.str();
}

}  // namespace refine::cli
