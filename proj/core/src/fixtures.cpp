#include "refine/fixtures.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>

namespace refine {

namespace {

// Fills every composite from `comp` and builds.
CatPtr build_with(FinCategory::Builder& b, const std::function<MorId(MorId, MorId)>& comp) {
  std::vector<std::vector<MorId>> by_dom(b.object_count());
  for (std::size_t f = 0; f < b.morphism_count(); ++f) by_dom[b.dom(static_cast<MorId>(f))].push_back(static_cast<MorId>(f));
  for (std::size_t f = 0; f < b.morphism_count(); ++f)
    for (MorId g : by_dom[b.cod(static_cast<MorId>(f))]) b.set_composite(static_cast<MorId>(f), g, comp(static_cast<MorId>(f), g));
  return b.build();
}

}  // namespace

// ---------------------------------------------------------------------------
// Hoare logic

std::string predicate_name(const HoareSpec& spec, std::uint64_t mask) {
  std::string s = "{";
  bool first = true;
  for (std::size_t i = 0; i < spec.states.size(); ++i) {
    if (!(mask >> i & 1)) continue;
    if (!first) s += ",";
    s += spec.states[i];
    first = false;
  }
  return s + "}";
}

HoareSpec hoare_two_state() {
  HoareSpec s;
  s.states = {"s0", "s1"};
  s.generators = {{"swap", {1, 0}}, {"set0", {0, 0}}};
  return s;
}

namespace {

std::uint64_t image_of(const std::vector<std::size_t>& f, std::uint64_t mask) {
  std::uint64_t out = 0;
  for (std::size_t s = 0; s < f.size(); ++s)
    if (mask >> s & 1) out |= std::uint64_t{1} << f[s];
  return out;
}

std::uint64_t preimage_of(const std::vector<std::size_t>& f, std::uint64_t mask) {
  std::uint64_t out = 0;
  for (std::size_t s = 0; s < f.size(); ++s)
    if (mask >> f[s] & 1) out |= std::uint64_t{1} << s;
  return out;
}

}  // namespace

HoareFixture build_hoare(const HoareSpec& spec) {
  const std::size_t n = spec.states.size();
  if (n == 0 || n > 20) throw StructuralError("hoare: state count must be in 1..20");
  for (const auto& g : spec.generators) {
    if (g.map.size() != n) throw StructuralError("hoare: command " + g.name + " is not total");
    for (auto v : g.map)
      if (v >= n) throw StructuralError("hoare: command " + g.name + " leaves the state space");
  }
  HoareFixture h;
  h.spec = spec;
  std::vector<std::string> names;
  std::map<std::vector<std::size_t>, std::size_t> index;
  std::vector<std::size_t> id(n);
  for (std::size_t s = 0; s < n; ++s) id[s] = s;
  h.commands.push_back(id);
  names.push_back("id");
  index.emplace(id, 0);
  for (std::size_t i = 0; i < h.commands.size(); ++i) {
    for (const auto& g : spec.generators) {
      std::vector<std::size_t> next(n);
      for (std::size_t s = 0; s < n; ++s) next[s] = g.map[h.commands[i][s]];
      if (index.count(next)) continue;
      if (h.commands.size() >= spec.monoid_bound) throw StructuralError("hoare: transformer monoid exceeds bound");
      index.emplace(next, h.commands.size());
      names.push_back(i == 0 ? g.name : names[i] + ";" + g.name);
      h.commands.push_back(std::move(next));
    }
  }
  const std::size_t m = h.commands.size();
  FinCategory::Builder tb;
  tb.add_object("W");
  for (std::size_t c = 0; c < m; ++c) tb.add_morphism(names[c], 0, 0);
  tb.set_identity(0, 0);
  auto compose_cmd = [&](std::size_t c, std::size_t d) {
    std::vector<std::size_t> out(n);
    for (std::size_t s = 0; s < n; ++s) out[s] = h.commands[d][h.commands[c][s]];
    return index.at(out);
  };
  auto T = build_with(tb, [&](MorId f, MorId g) { return static_cast<MorId>(compose_cmd(f, g)); });

  if (spec.predicates.empty()) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) h.predicates.push_back(mask);
  } else {
    h.predicates = spec.predicates;
  }
  std::map<std::uint64_t, ObjId> pred_index;
  FinCategory::Builder db;
  for (auto mask : h.predicates) {
    if (pred_index.count(mask)) throw StructuralError("hoare: duplicate predicate");
    pred_index.emplace(mask, db.add_object(predicate_name(spec, mask)));
  }
  std::map<std::tuple<ObjId, std::size_t, ObjId>, MorId> triples;
  std::vector<std::tuple<ObjId, std::size_t, ObjId>> by_id;
  for (std::size_t P = 0; P < h.predicates.size(); ++P) {
    for (std::size_t Q = 0; Q < h.predicates.size(); ++Q) {
      for (std::size_t c = 0; c < m; ++c) {
        std::uint64_t img = image_of(h.commands[c], h.predicates[P]);
        if ((img & ~h.predicates[Q]) != 0) continue;
        auto key = std::tuple{static_cast<ObjId>(P), c, static_cast<ObjId>(Q)};
        MorId id_m = db.add_morphism(predicate_name(spec, h.predicates[P]) + "-" + names[c] + "->" +
                                         predicate_name(spec, h.predicates[Q]),
                                     static_cast<ObjId>(P), static_cast<ObjId>(Q));
        triples.emplace(key, id_m);
        by_id.push_back(key);
      }
    }
  }
  for (std::size_t P = 0; P < h.predicates.size(); ++P) {
    db.set_identity(static_cast<ObjId>(P), triples.at({static_cast<ObjId>(P), 0, static_cast<ObjId>(P)}));
  }
  auto D = build_with(db, [&](MorId f, MorId g) {
    auto [P, c, Q] = by_id[f];
    auto [Q2, d, R] = by_id[g];
    (void)Q;
    (void)Q2;
    return triples.at({P, compose_cmd(c, d), R});
  });
  FunctorData t{D, T, std::vector<ObjId>(D->object_count(), 0), {}};
  for (const auto& [P, c, Q] : by_id) t.morphism_map.push_back(static_cast<MorId>(c));
  h.system = make_system(std::move(t), "hoare");
  return h;
}

std::optional<ObjId> hoare_sp(const HoareFixture& h, MorId c, ObjId P) {
  std::uint64_t img = image_of(h.commands.at(c), h.predicates.at(P));
  for (std::size_t i = 0; i < h.predicates.size(); ++i)
    if (h.predicates[i] == img) return static_cast<ObjId>(i);
  return std::nullopt;
}

std::optional<ObjId> hoare_wp(const HoareFixture& h, MorId c, ObjId Q) {
  std::uint64_t pre = preimage_of(h.commands.at(c), h.predicates.at(Q));
  for (std::size_t i = 0; i < h.predicates.size(); ++i)
    if (h.predicates[i] == pre) return static_cast<ObjId>(i);
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Contexts

MulticategorySpec linear_example() {
  MulticategorySpec mc;
  mc.formulas = {"A", "B", "A*B", "C"};
  mc.multimorphisms = {{"id_A", {0}, 0},   {"id_B", {1}, 1},       {"id_A*B", {2}, 2},
                       {"id_C", {3}, 3},   {"tensR", {0, 1}, 2},   {"u", {}, 3}};
  mc.tensors = {{0, 1, 2, {{"tensR", "id_A*B"}}}};
  return mc;
}

namespace {

using Multiset = std::vector<std::size_t>;

std::map<std::pair<Multiset, std::size_t>, std::size_t> proof_index(const MulticategorySpec& mc) {
  std::map<std::pair<Multiset, std::size_t>, std::size_t> idx;
  for (std::size_t i = 0; i < mc.multimorphisms.size(); ++i) {
    auto src = mc.multimorphisms[i].sources;
    std::sort(src.begin(), src.end());
    idx.emplace(std::pair{src, mc.multimorphisms[i].target}, i);
  }
  return idx;
}

std::string context_name(const MulticategorySpec& mc, const Multiset& ctx) {
  if (ctx.empty()) return "()";
  std::string s;
  for (std::size_t i = 0; i < ctx.size(); ++i) {
    if (i) s += ",";
    s += mc.formulas[ctx[i]];
  }
  return s;
}

std::string function_name(std::size_t n, std::size_t m, const std::vector<std::size_t>& f) {
  std::string s = std::to_string(n) + ">" + std::to_string(m) + ":";
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (m > 10 && i) s += ".";
    s += std::to_string(f[i]);
  }
  return s;
}

// Every function n -> m in lexicographic order of values.
std::vector<std::vector<std::size_t>> all_functions(std::size_t n, std::size_t m) {
  std::vector<std::vector<std::size_t>> out;
  if (m == 0 && n > 0) return out;
  std::vector<std::size_t> f(n, 0);
  while (true) {
    out.push_back(f);
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (++f[i] < m) break;
      f[i] = 0;
      if (i == 0) return out;
    }
    if (n == 0) return out;
  }
}

// Stable merge of two sorted contexts: merged position of (side, index).
struct Merge {
  Multiset merged;
  std::vector<std::size_t> left;
  std::vector<std::size_t> right;
};

Merge merge(const Multiset& a, const Multiset& b) {
  std::vector<std::tuple<std::size_t, int, std::size_t>> items;
  for (std::size_t i = 0; i < a.size(); ++i) items.emplace_back(a[i], 0, i);
  for (std::size_t i = 0; i < b.size(); ++i) items.emplace_back(b[i], 1, i);
  std::sort(items.begin(), items.end());
  Merge m;
  m.left.resize(a.size());
  m.right.resize(b.size());
  for (std::size_t p = 0; p < items.size(); ++p) {
    auto [f, side, i] = items[p];
    m.merged.push_back(f);
    (side == 0 ? m.left : m.right)[i] = p;
  }
  return m;
}

}  // namespace

ValidationReport validate_multicategory(const MulticategorySpec& mc) {
  ValidationReport r;
  const std::size_t nf = mc.formulas.size();
  std::set<std::string> names;
  std::map<std::pair<Multiset, std::size_t>, std::size_t> seen;
  for (std::size_t i = 0; i < mc.multimorphisms.size(); ++i) {
    const auto& m = mc.multimorphisms[i];
    if (!names.insert(m.name).second) r.add("duplicate multimorphism name " + m.name);
    bool in_range = m.target < nf;
    for (auto s : m.sources) in_range = in_range && s < nf;
    if (!in_range) {
      r.add("multimorphism " + m.name + " mentions an unknown formula");
      continue;
    }
    auto src = m.sources;
    std::sort(src.begin(), src.end());
    if (!seen.emplace(std::pair{src, m.target}, i).second)
      r.add("two multimorphisms " + context_name(mc, src) + " |- " + mc.formulas[m.target]);
  }
  if (!r.ok()) return r;
  for (std::size_t f = 0; f < nf; ++f)
    if (!seen.count({{f}, f})) r.add("no identity on " + mc.formulas[f]);
  std::vector<std::vector<std::size_t>> into(nf);
  for (std::size_t i = 0; i < mc.multimorphisms.size(); ++i) into[mc.multimorphisms[i].target].push_back(i);
  for (const auto& g : mc.multimorphisms) {
    const std::size_t n = g.sources.size();
    std::vector<std::size_t> choice(n, 0);
    bool empty = false;
    for (auto s : g.sources) empty = empty || into[s].empty();
    if (empty) continue;
    while (true) {
      Multiset src;
      for (std::size_t k = 0; k < n; ++k) {
        const auto& f = mc.multimorphisms[into[g.sources[k]][choice[k]]];
        src.insert(src.end(), f.sources.begin(), f.sources.end());
      }
      std::sort(src.begin(), src.end());
      if (!seen.count({src, g.target}))
        r.add("missing multicomposite " + context_name(mc, src) + " |- " + mc.formulas[g.target] + " through " +
              g.name);
      std::size_t k = 0;
      while (k < n && ++choice[k] == into[g.sources[k]].size()) choice[k++] = 0;
      if (k == n) break;
    }
  }
  for (const auto& decl : mc.tensors) {
    auto v = validate_left_rule(mc, decl);
    for (auto& x : v.violations) r.add(x);
  }
  return r;
}

ValidationReport validate_left_rule(const MulticategorySpec& mc, const TensorDeclaration& decl) {
  ValidationReport r;
  const std::size_t nf = mc.formulas.size();
  if (decl.left >= nf || decl.right >= nf || decl.tensor >= nf) {
    r.add("tensor declaration mentions an unknown formula");
    return r;
  }
  std::map<std::string, std::size_t> by_name;
  for (std::size_t i = 0; i < mc.multimorphisms.size(); ++i) by_name.emplace(mc.multimorphisms[i].name, i);
  // Proofs of (left, right, Gamma |- X) and of (tensor, Gamma |- X), by (Gamma, X).
  std::map<std::pair<Multiset, std::size_t>, std::vector<std::size_t>> split;
  std::map<std::pair<Multiset, std::size_t>, std::vector<std::size_t>> packed;
  auto remove_one = [](Multiset s, std::size_t f, bool& ok) {
    auto it = std::find(s.begin(), s.end(), f);
    ok = it != s.end();
    if (ok) s.erase(it);
    return s;
  };
  for (std::size_t i = 0; i < mc.multimorphisms.size(); ++i) {
    auto src = mc.multimorphisms[i].sources;
    std::sort(src.begin(), src.end());
    bool ok1 = false;
    bool ok2 = false;
    auto rest = remove_one(remove_one(src, decl.left, ok1), decl.right, ok2);
    if (ok1 && ok2) split[{rest, mc.multimorphisms[i].target}].push_back(i);
    bool ok3 = false;
    auto rest2 = remove_one(src, decl.tensor, ok3);
    if (ok3) packed[{rest2, mc.multimorphisms[i].target}].push_back(i);
  }
  std::set<std::size_t> used_split;
  std::set<std::size_t> used_packed;
  for (const auto& [a, b] : decl.left_rule) {
    auto ia = by_name.find(a);
    auto ib = by_name.find(b);
    if (ia == by_name.end() || ib == by_name.end()) {
      r.add("left-rule table names an unknown multimorphism " + (ia == by_name.end() ? a : b));
      continue;
    }
    bool found = false;
    for (const auto& [key, v] : split) {
      if (std::find(v.begin(), v.end(), ia->second) == v.end()) continue;
      auto jt = packed.find(key);
      found = jt != packed.end() && std::find(jt->second.begin(), jt->second.end(), ib->second) != jt->second.end();
    }
    if (!found) r.add("left-rule pair (" + a + ", " + b + ") does not share context and conclusion");
    if (!used_split.insert(ia->second).second || !used_packed.insert(ib->second).second)
      r.add("left-rule table is not injective at (" + a + ", " + b + ")");
  }
  std::size_t total_split = 0;
  std::size_t total_packed = 0;
  for (const auto& [k, v] : split) total_split += v.size();
  for (const auto& [k, v] : packed) total_packed += v.size();
  if (used_split.size() != total_split || used_packed.size() != total_packed)
    r.add("left-rule table does not cover every proof");
  return r;
}

std::optional<ObjId> LinctxFixture::context(std::vector<std::size_t> formulas) const {
  std::sort(formulas.begin(), formulas.end());
  for (std::size_t i = 0; i < contexts.size(); ++i)
    if (contexts[i] == formulas) return static_cast<ObjId>(i);
  return std::nullopt;
}

MorId LinctxFixture::function(std::size_t n, std::size_t m, const std::vector<std::size_t>& values) const {
  auto f = system->T().find_morphism(function_name(n, m, values));
  if (!f) throw StructuralError("linctx: no such function");
  return *f;
}

LinctxFixture build_linctx(const MulticategorySpec& mc, const TruncationParams& trunc) {
  auto v = validate_multicategory(mc);
  if (!v.ok()) throw StructuralError("multicategory invalid: " + v.violations.front());
  const std::size_t K = trunc.K;
  const std::size_t nf = mc.formulas.size();
  if (K > 6) throw StructuralError("linctx: truncation bound too large");
  LinctxFixture fx;
  fx.spec = mc;
  fx.trunc = trunc;

  // Base: finite sets 0..K and all functions.
  FinCategory::Builder tb;
  std::map<std::vector<std::size_t>, MorId> fn_index[8][8];
  std::vector<std::tuple<std::size_t, std::size_t, std::vector<std::size_t>>> fns;
  for (std::size_t n = 0; n <= K; ++n) tb.add_object(std::to_string(n));
  for (std::size_t n = 0; n <= K; ++n) {
    for (std::size_t m = 0; m <= K; ++m) {
      for (auto& f : all_functions(n, m)) {
        MorId id = tb.add_morphism(function_name(n, m, f), static_cast<ObjId>(n), static_cast<ObjId>(m));
        fn_index[n][m].emplace(f, id);
        fns.emplace_back(n, m, f);
      }
    }
  }
  auto fn_id = [&](std::size_t n, std::size_t m, const std::vector<std::size_t>& f) { return fn_index[n][m].at(f); };
  for (std::size_t n = 0; n <= K; ++n) {
    std::vector<std::size_t> id(n);
    for (std::size_t i = 0; i < n; ++i) id[i] = i;
    tb.set_identity(static_cast<ObjId>(n), fn_id(n, n, id));
  }
  auto T = build_with(tb, [&](MorId f, MorId g) {
    const auto& [n, m, a] = fns[f];
    const auto& [m2, k, b] = fns[g];
    (void)m;
    (void)m2;
    std::vector<std::size_t> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = b[a[i]];
    return fn_id(n, k, c);
  });

  // Contexts by length, then lexicographically.
  std::vector<Multiset> level{{}};
  fx.contexts.push_back({});
  for (std::size_t len = 1; len <= K; ++len) {
    std::vector<Multiset> next;
    for (const auto& c : level) {
      for (std::size_t f = c.empty() ? 0 : c.back(); f < nf; ++f) {
        auto d = c;
        d.push_back(f);
        next.push_back(d);
      }
    }
    std::sort(next.begin(), next.end());
    for (const auto& c : next) fx.contexts.push_back(c);
    level = std::move(next);
  }
  std::map<Multiset, ObjId> ctx_index;
  FinCategory::Builder db;
  for (const auto& c : fx.contexts) ctx_index.emplace(c, db.add_object(context_name(mc, c)));

  auto proofs = proof_index(mc);
  std::map<std::tuple<ObjId, ObjId, std::vector<std::size_t>>, MorId> mor_index;
  std::vector<std::tuple<ObjId, ObjId, std::vector<std::size_t>>> mors;
  auto valid = [&](const Multiset& from, const Multiset& to, const std::vector<std::size_t>& f) {
    for (std::size_t j = 0; j < to.size(); ++j) {
      Multiset src;
      for (std::size_t i = 0; i < from.size(); ++i)
        if (f[i] == j) src.push_back(from[i]);
      if (!proofs.count({src, to[j]})) return false;
    }
    return true;
  };
  for (std::size_t a = 0; a < fx.contexts.size(); ++a) {
    for (std::size_t b = 0; b < fx.contexts.size(); ++b) {
      const auto& from = fx.contexts[a];
      const auto& to = fx.contexts[b];
      for (auto& f : all_functions(from.size(), to.size())) {
        if (!valid(from, to, f)) continue;
        std::string name = context_name(mc, from) + ">" + context_name(mc, to) + ":";
        for (auto x : f) name += std::to_string(x);
        MorId id = db.add_morphism(name, static_cast<ObjId>(a), static_cast<ObjId>(b));
        mor_index.emplace(std::tuple{static_cast<ObjId>(a), static_cast<ObjId>(b), f}, id);
        mors.emplace_back(static_cast<ObjId>(a), static_cast<ObjId>(b), f);
      }
    }
  }
  for (std::size_t a = 0; a < fx.contexts.size(); ++a) {
    std::vector<std::size_t> id(fx.contexts[a].size());
    for (std::size_t i = 0; i < id.size(); ++i) id[i] = i;
    db.set_identity(static_cast<ObjId>(a), mor_index.at({static_cast<ObjId>(a), static_cast<ObjId>(a), id}));
  }
  auto D = build_with(db, [&](MorId f, MorId g) {
    const auto& [a, b, x] = mors[f];
    const auto& [b2, c, y] = mors[g];
    (void)b;
    (void)b2;
    std::vector<std::size_t> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = y[x[i]];
    auto it = mor_index.find({a, c, z});
    if (it == mor_index.end()) {
      throw StructuralError("linctx: composite missing; the multicategory is not closed");
    }
    return it->second;
  });
  FunctorData t{D, T, {}, {}};
  for (const auto& c : fx.contexts) t.object_map.push_back(static_cast<ObjId>(c.size()));
  for (const auto& [a, b, f] : mors) t.morphism_map.push_back(fn_id(fx.contexts[a].size(), fx.contexts[b].size(), f));
  fx.system = make_system(std::move(t), "linctx");

  // Tensor: stable merge of contexts over block sums of functions.
  auto in_bound_D = [&](ObjId a, ObjId b) { return fx.contexts[a].size() + fx.contexts[b].size() <= K; };
  auto merge_obj = [&](ObjId a, ObjId b) { return ctx_index.at(merge(fx.contexts[a], fx.contexts[b]).merged); };
  auto merge_mor = [&](MorId f, MorId g) {
    const auto& [a1, b1, x] = mors[f];
    const auto& [a2, b2, y] = mors[g];
    auto md = merge(fx.contexts[a1], fx.contexts[a2]);
    auto mc2 = merge(fx.contexts[b1], fx.contexts[b2]);
    std::vector<std::size_t> z(md.merged.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[md.left[i]] = mc2.left[x[i]];
    for (std::size_t i = 0; i < y.size(); ++i) z[md.right[i]] = mc2.right[y[i]];
    return mor_index.at({ctx_index.at(md.merged), ctx_index.at(mc2.merged), z});
  };
  auto in_bound_T = [&](ObjId a, ObjId b) { return static_cast<std::size_t>(a + b) <= K; };
  auto sum_obj = [&](ObjId a, ObjId b) { return static_cast<ObjId>(a + b); };
  auto sum_mor = [&](MorId f, MorId g) {
    const auto& [n1, m1, x] = fns[f];
    const auto& [n2, m2, y] = fns[g];
    std::vector<std::size_t> z;
    for (auto v1 : x) z.push_back(v1);
    for (auto v2 : y) z.push_back(m1 + v2);
    return fn_id(n1 + n2, m1 + m2, z);
  };
  fx.monoidal.D = make_tensor(D, ctx_index.at({}), in_bound_D, merge_obj, merge_mor);
  fx.monoidal.T = make_tensor(T, 0, in_bound_T, sum_obj, sum_mor);
  for (auto [a, b] : fx.monoidal.D.domain.objects) {
    auto md = merge(fx.contexts[a], fx.contexts[b]);
    std::vector<std::size_t> k(md.merged.size());
    for (std::size_t i = 0; i < md.left.size(); ++i) k[md.left[i]] = i;
    for (std::size_t i = 0; i < md.right.size(); ++i) k[md.right[i]] = md.left.size() + i;
    fx.monoidal.comparison.push_back(fn_id(k.size(), k.size(), k));
  }
  if (K >= 1) fx.one = MonoidObject{1, K >= 2 ? fn_id(2, 1, {0, 0}) : kNoMorphism, fn_id(0, 1, {})};
  return fx;
}

// ---------------------------------------------------------------------------
// Lattices

CatPtr poset_category(const PosetSpec& p) {
  const std::size_t n = p.names.size();
  FinCategory::Builder b;
  for (const auto& s : p.names) b.add_object(s);
  std::vector<std::vector<MorId>> le(n, std::vector<MorId>(n, kNoMorphism));
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      if (p.leq[x][y])
        le[x][y] = b.add_morphism(p.names[x] + "<=" + p.names[y], static_cast<ObjId>(x), static_cast<ObjId>(y));
  for (std::size_t x = 0; x < n; ++x) b.set_identity(static_cast<ObjId>(x), le[x][x]);
  return build_with(b, [&](MorId f, MorId g) {
    MorId r = le[b.dom(f)][b.cod(g)];
    if (r == kNoMorphism) throw StructuralError("poset: order is not transitive");
    return r;
  });
}

namespace {

void check_poset(const PosetSpec& p, const char* what) {
  const std::size_t n = p.names.size();
  if (p.leq.size() != n) throw StructuralError(std::string(what) + ": order table size mismatch");
  for (std::size_t x = 0; x < n; ++x) {
    if (p.leq[x].size() != n) throw StructuralError(std::string(what) + ": order table size mismatch");
    if (!p.leq[x][x]) throw StructuralError(std::string(what) + ": order is not reflexive");
    for (std::size_t y = 0; y < n; ++y) {
      if (x != y && p.leq[x][y] && p.leq[y][x]) throw StructuralError(std::string(what) + ": order is not antisymmetric");
      for (std::size_t z = 0; z < n; ++z)
        if (p.leq[x][y] && p.leq[y][z] && !p.leq[x][z])
          throw StructuralError(std::string(what) + ": order is not transitive");
    }
  }
}

std::optional<std::size_t> meet(const PosetSpec& p, std::size_t x, std::size_t y) {
  const std::size_t n = p.names.size();
  for (std::size_t m = 0; m < n; ++m) {
    if (!p.leq[m][x] || !p.leq[m][y]) continue;
    bool greatest = true;
    for (std::size_t z = 0; z < n && greatest; ++z)
      if (p.leq[z][x] && p.leq[z][y] && !p.leq[z][m]) greatest = false;
    if (greatest) return m;
  }
  return std::nullopt;
}

std::optional<std::size_t> top(const PosetSpec& p) {
  for (std::size_t m = 0; m < p.names.size(); ++m) {
    bool all = true;
    for (std::size_t z = 0; z < p.names.size(); ++z) all = all && p.leq[z][m];
    if (all) return m;
  }
  return std::nullopt;
}

FunctorData monotone_functor(const CatPtr& from, const CatPtr& to, const std::vector<std::size_t>& map) {
  FunctorData F{from, to, {}, {}};
  for (auto v : map) F.object_map.push_back(static_cast<ObjId>(v));
  for (std::size_t f = 0; f < from->morphism_count(); ++f) {
    auto hom = to->hom(F.object_map[from->dom(static_cast<MorId>(f))], F.object_map[from->cod(static_cast<MorId>(f))]);
    if (hom.empty()) throw StructuralError("map is not monotone");
    F.morphism_map.push_back(hom.front());
  }
  return F;
}

TensorTable meet_tensor(const CatPtr& C, const PosetSpec& p) {
  const std::size_t n = p.names.size();
  std::vector<std::vector<std::size_t>> mt(n, std::vector<std::size_t>(n));
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) {
      auto m = meet(p, x, y);
      if (!m) throw StructuralError("poset lacks the meet of " + p.names[x] + " and " + p.names[y]);
      mt[x][y] = *m;
    }
  auto t = top(p);
  if (!t) throw StructuralError("poset lacks a top element");
  return make_tensor(
      C, static_cast<ObjId>(*t), {}, [&](ObjId a, ObjId b) { return static_cast<ObjId>(mt[a][b]); },
      [&](MorId f, MorId g) {
        return C->hom(static_cast<ObjId>(mt[C->dom(f)][C->dom(g)]), static_cast<ObjId>(mt[C->cod(f)][C->cod(g)])).front();
      });
}

}  // namespace

PosetSpec powerset_poset(const std::vector<std::string>& atoms) {
  PosetSpec p;
  const std::size_t n = std::size_t{1} << atoms.size();
  for (std::size_t m = 0; m < n; ++m) {
    std::string s = "{";
    bool first = true;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (!(m >> i & 1)) continue;
      if (!first) s += ",";
      s += atoms[i];
      first = false;
    }
    p.names.push_back(s + "}");
  }
  p.leq.assign(n, std::vector<bool>(n, false));
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y) p.leq[x][y] = (x & ~y) == 0;
  return p;
}

PosetSpec chain_poset(std::size_t n, const std::string& prefix) {
  PosetSpec p;
  for (std::size_t i = 0; i < n; ++i) p.names.push_back(prefix + std::to_string(i));
  p.leq.assign(n, std::vector<bool>(n, false));
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x; y < n; ++y) p.leq[x][y] = true;
  return p;
}

LatticeFixture build_lattice(const PosetSpec& D, const PosetSpec& T, const std::vector<std::size_t>& map) {
  check_poset(D, "lattice source");
  check_poset(T, "lattice target");
  if (map.size() != D.names.size()) throw StructuralError("lattice: map size mismatch");
  for (auto v : map)
    if (v >= T.names.size()) throw StructuralError("lattice: map leaves the target");
  for (std::size_t x = 0; x < D.names.size(); ++x)
    for (std::size_t y = 0; y < D.names.size(); ++y) {
      if (D.leq[x][y] && !T.leq[map[x]][map[y]]) throw StructuralError("lattice: map is not monotone");
      auto mD = meet(D, x, y);
      auto mT = meet(T, map[x], map[y]);
      if (!mD || !mT || map[*mD] != *mT)
        throw StructuralError("lattice: map does not preserve the meet of " + D.names[x] + " and " + D.names[y]);
    }
  auto tD = top(D);
  auto tT = top(T);
  if (!tD || !tT || map[*tD] != *tT) throw StructuralError("lattice: map does not preserve top");
  LatticeFixture fx;
  fx.D = D;
  fx.T = T;
  fx.map = map;
  auto cD = poset_category(D);
  auto cT = poset_category(T);
  fx.system = make_system(monotone_functor(cD, cT, map), "lattice");
  fx.monoidal = strict_monoidal(*fx.system, meet_tensor(cD, D), meet_tensor(cT, T));
  for (std::size_t w = 0; w < T.names.size(); ++w) {
    ObjId W = static_cast<ObjId>(w);
    auto up = cT->hom(static_cast<ObjId>(*tT), W);
    fx.monoids.push_back({W, cT->identity(W), up.empty() ? kNoMorphism : up.front()});
  }
  return fx;
}

LatticeFixture lattice_example() {
  auto D = powerset_poset({"a", "b"});
  auto T = chain_poset(3, "c");
  std::vector<std::size_t> map(D.names.size());
  for (std::size_t m = 0; m < map.size(); ++m) map[m] = 1 + (m >> 1 & 1);
  return build_lattice(D, T, map);
}

// ---------------------------------------------------------------------------
// Adjunction

namespace {

PosetSpec product_poset(const PosetSpec& a, const PosetSpec& b) {
  PosetSpec p;
  const std::size_t n = a.names.size() * b.names.size();
  for (const auto& x : a.names)
    for (const auto& y : b.names) p.names.push_back("(" + x + "," + y + ")");
  p.leq.assign(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      p.leq[i][j] = a.leq[i / b.names.size()][j / b.names.size()] && b.leq[i % b.names.size()][j % b.names.size()];
  return p;
}

NatTransData poset_nat(const FunctorData& F, const FunctorData& G) {
  NatTransData n{F, G, {}};
  const auto& C = *F.target;
  for (std::size_t a = 0; a < F.source->object_count(); ++a) {
    auto hom = C.hom(F.on_object(static_cast<ObjId>(a)), G.on_object(static_cast<ObjId>(a)));
    if (hom.empty()) throw StructuralError("poset transformation component missing");
    n.components.push_back(hom.front());
  }
  return n;
}

}  // namespace

RefSysAdjunction galois_adjunction() {
  auto three = chain_poset(3, "x");
  auto two = chain_poset(2, "y");
  auto fiber = chain_poset(2, "s");
  auto D = product_poset(three, fiber);
  auto E = product_poset(two, fiber);
  auto cT = poset_category(three);
  auto cB = poset_category(two);
  auto cD = poset_category(D);
  auto cE = poset_category(E);
  std::vector<std::size_t> projD(D.names.size());
  std::vector<std::size_t> projE(E.names.size());
  for (std::size_t i = 0; i < projD.size(); ++i) projD[i] = i / 2;
  for (std::size_t i = 0; i < projE.size(); ++i) projE[i] = i / 2;
  auto t = make_system(monotone_functor(cD, cT, projD), "galois-t");
  auto b = make_system(monotone_functor(cE, cB, projE), "galois-b");
  std::vector<std::size_t> f{0, 1, 1};
  std::vector<std::size_t> g{0, 2};
  std::vector<std::size_t> fD(D.names.size());
  std::vector<std::size_t> gE(E.names.size());
  for (std::size_t i = 0; i < fD.size(); ++i) fD[i] = f[i / 2] * 2 + i % 2;
  for (std::size_t i = 0; i < gE.size(); ++i) gE[i] = g[i / 2] * 2 + i % 2;
  RefSysAdjunction adj;
  adj.F = RefSysMorphism{t, b, monotone_functor(cD, cE, fD), monotone_functor(cT, cB, f)};
  adj.G = RefSysMorphism{b, t, monotone_functor(cE, cD, gE), monotone_functor(cB, cT, g)};
  adj.unit_D = poset_nat(identity_functor(cD), compose_functors(adj.F.FD, adj.G.FD));
  adj.counit_D = poset_nat(compose_functors(adj.G.FD, adj.F.FD), identity_functor(cE));
  adj.unit_T = poset_nat(identity_functor(cT), compose_functors(adj.F.FT, adj.G.FT));
  adj.counit_T = poset_nat(compose_functors(adj.G.FT, adj.F.FT), identity_functor(cB));
  return adj;
}

// ---------------------------------------------------------------------------
// Random systems

namespace {

using Fn = std::vector<std::size_t>;

struct Sample {
  std::vector<std::size_t> sizes;
  // (dom, cod, function, base morphism or -1)
  std::vector<std::tuple<std::size_t, std::size_t, Fn, MorId>> mors;
};

Fn compose_fn(const Fn& a, const Fn& b) {
  Fn c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) c[i] = b[a[i]];
  return c;
}

// Closes `s` under composition; false when some hom-set outgrows `max_hom`.
bool close(Sample& s, std::size_t max_hom, const std::function<MorId(MorId, MorId)>& base_compose) {
  std::set<std::tuple<std::size_t, std::size_t, Fn, MorId>> seen(s.mors.begin(), s.mors.end());
  for (bool grew = true; grew;) {
    grew = false;
    const std::size_t n = s.mors.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const auto [a, b, f, c] = s.mors[i];
        const auto [b2, d, g, e] = s.mors[j];
        if (b != b2) continue;
        auto m = std::tuple{a, d, compose_fn(f, g), c < 0 ? MorId{-1} : base_compose(c, e)};
        if (seen.insert(m).second) {
          s.mors.push_back(m);
          grew = true;
        }
      }
    }
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> hom;
    for (const auto& [a, b, f, c] : s.mors)
      if (++hom[{a, b}] > max_hom) return false;
  }
  return true;
}

}  // namespace

SysPtr random_refsys(std::uint64_t seed, const RandomBounds& bounds) {
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  auto random_fn = [&](std::size_t n, std::size_t m) {
    Fn f(n);
    for (auto& v : f) v = pick(m);
    return f;
  };
  for (int attempt = 0; attempt < 500; ++attempt) {
    Sample base;
    const std::size_t nT = 1 + pick(bounds.max_T_objects);
    for (std::size_t i = 0; i < nT; ++i) base.sizes.push_back(1 + pick(2));
    for (std::size_t i = 0; i < nT; ++i) {
      Fn id(base.sizes[i]);
      for (std::size_t k = 0; k < id.size(); ++k) id[k] = k;
      base.mors.emplace_back(i, i, id, -1);
    }
    for (std::size_t k = pick(4); k > 0; --k) {
      std::size_t a = pick(nT);
      std::size_t b = pick(nT);
      auto m = std::tuple{a, b, random_fn(base.sizes[a], base.sizes[b]), MorId{-1}};
      if (std::find(base.mors.begin(), base.mors.end(), m) == base.mors.end()) base.mors.push_back(m);
    }
    if (!close(base, bounds.max_hom, {})) continue;
    std::map<std::tuple<std::size_t, std::size_t, Fn>, MorId> tidx;
    for (std::size_t i = 0; i < base.mors.size(); ++i) {
      const auto& [a, b, f, c] = base.mors[i];
      tidx.emplace(std::tuple{a, b, f}, static_cast<MorId>(i));
    }
    auto tcomp = [&](MorId f, MorId g) {
      const auto& [a, b, x, c1] = base.mors[f];
      const auto& [b2, d, y, c2] = base.mors[g];
      return tidx.at({a, d, compose_fn(x, y)});
    };

    Sample top;
    const std::size_t nD = 1 + pick(bounds.max_D_objects);
    std::vector<std::size_t> over(nD);
    for (std::size_t i = 0; i < nD; ++i) {
      over[i] = pick(nT);
      top.sizes.push_back(1 + pick(2));
    }
    for (std::size_t i = 0; i < nD; ++i) {
      Fn id(top.sizes[i]);
      for (std::size_t k = 0; k < id.size(); ++k) id[k] = k;
      top.mors.emplace_back(i, i, id, static_cast<MorId>(over[i]));  // identities come first in the base
    }
    for (std::size_t k = pick(6); k > 0; --k) {
      std::size_t a = pick(nD);
      std::size_t b = pick(nD);
      std::vector<MorId> hom;
      for (std::size_t i = 0; i < base.mors.size(); ++i)
        if (std::get<0>(base.mors[i]) == over[a] && std::get<1>(base.mors[i]) == over[b]) hom.push_back(static_cast<MorId>(i));
      if (hom.empty()) continue;
      auto m = std::tuple{a, b, random_fn(top.sizes[a], top.sizes[b]), hom[pick(hom.size())]};
      if (std::find(top.mors.begin(), top.mors.end(), m) == top.mors.end()) top.mors.push_back(m);
    }
    if (!close(top, bounds.max_hom, tcomp)) continue;

    FinCategory::Builder tb;
    for (std::size_t i = 0; i < nT; ++i) tb.add_object("A" + std::to_string(i));
    for (std::size_t i = 0; i < base.mors.size(); ++i) {
      const auto& [a, b, f, c] = base.mors[i];
      tb.add_morphism(i < nT ? "1_A" + std::to_string(i) : "a" + std::to_string(i), static_cast<ObjId>(a),
                      static_cast<ObjId>(b));
    }
    for (std::size_t i = 0; i < nT; ++i) tb.set_identity(static_cast<ObjId>(i), static_cast<MorId>(i));
    auto T = build_with(tb, tcomp);

    std::map<std::tuple<std::size_t, std::size_t, Fn, MorId>, MorId> didx;
    for (std::size_t i = 0; i < top.mors.size(); ++i) didx.emplace(top.mors[i], static_cast<MorId>(i));
    FinCategory::Builder db;
    for (std::size_t i = 0; i < nD; ++i) db.add_object("P" + std::to_string(i));
    for (std::size_t i = 0; i < top.mors.size(); ++i) {
      const auto& [a, b, f, c] = top.mors[i];
      db.add_morphism(i < nD ? "1_P" + std::to_string(i) : "p" + std::to_string(i), static_cast<ObjId>(a),
                      static_cast<ObjId>(b));
    }
    for (std::size_t i = 0; i < nD; ++i) db.set_identity(static_cast<ObjId>(i), static_cast<MorId>(i));
    auto D = build_with(db, [&](MorId f, MorId g) {
      const auto& [a, b, x, c1] = top.mors[f];
      const auto& [b2, d, y, c2] = top.mors[g];
      return didx.at({a, d, compose_fn(x, y), tcomp(c1, c2)});
    });
    FunctorData t{D, T, {}, {}};
    for (std::size_t i = 0; i < nD; ++i) t.object_map.push_back(static_cast<ObjId>(over[i]));
    for (const auto& m : top.mors) t.morphism_map.push_back(std::get<3>(m));
    return make_system(std::move(t), "random-" + std::to_string(seed));
  }
  throw StructuralError("random_refsys: no sample within bounds");
}

CheckReport tensor_left_check(const LinctxFixture& fx, const DualityContext& ctx, const TensorDeclaration& decl) {
  CheckReport r("tensor left rule", "context tensors are pushforwards, represented after double dualization");
  const auto& t = *fx.system;
  auto v = validate_left_rule(fx.spec, decl);
  r.expect(v.ok(), [&] { return "left rule: " + (v.ok() ? std::string() : v.violations.front()); });
  auto pair = fx.context({decl.left, decl.right});
  auto single = fx.context({decl.tensor});
  if (!pair || !single || fx.one.multiplication == kNoMorphism) {
    r.skip("hypothesis unmet: contexts exceed the truncation");
    return r;
  }
  MorId mu = fx.one.multiplication;
  ObjId one = t.T().cod(mu);
  auto cert = find_pushforward(t, mu, *pair);
  r.expect(cert && vertical_iso(t, cert->candidate, *single).has_value(), [&] {
    return "(" + t.D().object_name(*single) + ") is not the pushforward of " + t.D().object_name(*pair);
  });
  r.absorb(negative_encoding_check(ctx, mu, *pair));

  auto S = ctx.slice(one);
  ObjId gamma = S->find(*single, t.T().identity(one));
  auto pushed = push_psh(ctx.reps().pos().action(mu), ctx.reps().pos().rep(*pair)->presheaf);
  const auto& rep = ctx.reps().pos().rep(*single)->presheaf;
  auto dd = dual_right(ctx, one, dual_left(ctx, one, pushed.presheaf).presheaf);
  std::size_t n_push = pushed.presheaf.count(gamma);
  std::size_t n_rep = rep.count(gamma);
  std::size_t n_dd = dd.presheaf.count(gamma);
  r.expect(n_push == 0 && n_rep > 0 && n_dd == n_rep, [&] {
    return "at " + S->category->object_name(gamma) + ": push " + std::to_string(n_push) + ", representation " +
           std::to_string(n_rep) + ", double dual " + std::to_string(n_dd);
  });
  r.note("at " + S->category->object_name(gamma) + " the push has " + std::to_string(n_push) +
         " elements, the representation " + std::to_string(n_rep) + " and the double dual " + std::to_string(n_dd));
  return r;
}

}  // namespace refine
