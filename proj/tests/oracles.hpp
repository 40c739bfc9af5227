#pragma once

// Brute-force reference computations used to check the library.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "refine/psh.hpp"
#include "refine/refsys.hpp"

namespace oracle {

using refine::Elem;
using refine::MorId;
using refine::ObjId;
using refine::PresheafView;

/// Number of natural families phi => psi, found by trying every assignment
/// object by object and checking naturality once both ends are fixed.
/// Absent when more than `budget` partial assignments would be visited.
inline std::optional<std::uint64_t> count_families(const PresheafView& phi, const PresheafView& psi,
                                                   std::uint64_t budget = 2000000) {
  const auto& C = phi.base();
  const std::size_t n = C.object_count();
  std::vector<std::vector<Elem>> theta(n);
  std::uint64_t visited = 0;
  std::uint64_t found = 0;
  bool blown = false;

  auto consistent = [&](std::size_t upto) {
    for (std::size_t f = 0; f < C.morphism_count(); ++f) {
      MorId m = static_cast<MorId>(f);
      auto a = static_cast<std::size_t>(C.morphism(m).dom);
      auto b = static_cast<std::size_t>(C.morphism(m).cod);
      if (a > upto || b > upto || (a != upto && b != upto)) continue;
      for (std::size_t y = 0; y < phi.count(static_cast<ObjId>(b)); ++y) {
        Elem lhs = theta[a][phi.act(m, static_cast<Elem>(y))];
        Elem rhs = psi.act(m, theta[b][y]);
        if (lhs != rhs) return false;
      }
    }
    return true;
  };

  auto rec = [&](auto&& self, std::size_t a) -> void {
    if (blown) return;
    if (a == n) {
      ++found;
      return;
    }
    ObjId o = static_cast<ObjId>(a);
    std::size_t k = phi.count(o);
    std::size_t m = psi.count(o);
    if (k > 0 && m == 0) return;
    theta[a].assign(k, 0);
    while (true) {
      if (++visited > budget) {
        blown = true;
        return;
      }
      if (consistent(a)) self(self, a + 1);
      std::size_t i = 0;
      while (i < k && ++theta[a][i] == m) theta[a][i++] = 0;
      if (i == k) break;
    }
  };
  rec(rec, 0);
  if (blown) return std::nullopt;
  return found;
}

/// D-morphisms P -> Q whose image is c, by scanning the whole table.
inline std::size_t count_derivations(const refine::RefinementSystem& t, ObjId P, MorId c, ObjId Q) {
  std::size_t n = 0;
  for (std::size_t a = 0; a < t.D().morphism_count(); ++a) {
    const auto& m = t.D().morphism(static_cast<MorId>(a));
    if (m.dom == P && m.cod == Q && t.image(static_cast<MorId>(a)) == c) ++n;
  }
  return n;
}

// ---------------------------------------------------------------------------
// State transformers

using StateMap = std::vector<std::size_t>;

/// Closure of the generators under composition, identity included.
inline std::set<StateMap> transformer_monoid(std::size_t states, const std::vector<StateMap>& gens) {
  StateMap id(states);
  for (std::size_t s = 0; s < states; ++s) id[s] = s;
  std::set<StateMap> seen{id};
  std::vector<StateMap> frontier{id};
  while (!frontier.empty()) {
    std::vector<StateMap> next;
    for (const auto& f : frontier)
      for (const auto& g : gens) {
        StateMap h(states);
        for (std::size_t s = 0; s < states; ++s) h[s] = g[f[s]];
        if (seen.insert(h).second) next.push_back(h);
      }
    frontier = std::move(next);
  }
  return seen;
}

inline std::uint64_t image(const StateMap& f, std::uint64_t mask) {
  std::uint64_t out = 0;
  for (std::size_t s = 0; s < f.size(); ++s)
    if (mask >> s & 1) out |= std::uint64_t{1} << f[s];
  return out;
}

inline std::uint64_t preimage(const StateMap& f, std::uint64_t mask) {
  std::uint64_t out = 0;
  for (std::size_t s = 0; s < f.size(); ++s)
    if (mask >> f[s] & 1) out |= std::uint64_t{1} << s;
  return out;
}

inline bool triple(const StateMap& f, std::uint64_t P, std::uint64_t Q) { return (image(f, P) & ~Q) == 0; }

}  // namespace oracle
