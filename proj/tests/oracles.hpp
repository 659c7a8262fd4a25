#pragma once

// Independent reference implementations used as oracles by the tests. They
// share no code with the library beyond the data types: truth of basic
// sentences by brute force over tuples, and enumeration of partial structures.

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "finprin/encoding.hpp"
#include "finprin/partial.hpp"

namespace oracle {

using finprin::BasicSentence;
using finprin::Literal;
using finprin::PartialStructure;

// Literal true under values, reading cells directly; undefined cells are
// never true.
inline bool literal_true(const PartialStructure& a, const Literal& l, const std::vector<unsigned>& v) {
  std::vector<unsigned> args;
  for (unsigned i : l.args) args.push_back(v[i]);
  switch (l.kind) {
    case Literal::Kind::Rel: {
      int x = a.get(l.symbol, args);
      return x != finprin::kUndef && (x == 1) == l.positive;
    }
    case Literal::Kind::Fun: {
      int x = a.get(l.symbol, args);
      return x != finprin::kUndef && static_cast<unsigned>(x) == v[l.out];
    }
    case Literal::Kind::Eq:
      return (v[l.args[0]] == v[l.args[1]]) == l.positive;
    case Literal::Kind::Less:
      return v[l.args[0]] < v[l.args[1]];
    case Literal::Kind::Numeral:
      return l.numeral < a.n() && v[l.out] == l.numeral;
  }
  return false;
}

// Some tuple over [n] makes a whole disjunct true.
inline bool verifies(const PartialStructure& a, const BasicSentence& s) {
  unsigned n = a.n(), k = static_cast<unsigned>(s.vars.size());
  if (n == 0) return false;
  std::vector<unsigned> v(k, 0);
  while (true) {
    for (const auto& d : s.matrix) {
      bool all = true;
      for (const auto& l : d)
        if (!literal_true(a, l, v)) {
          all = false;
          break;
        }
      if (all) return true;
    }
    unsigned i = 0;
    while (i < k && ++v[i] == n) v[i++] = 0;
    if (i == k) return false;
  }
}

// Calls fn on every partial structure of the language on [n].
inline void for_each_partial(const finprin::Language& lang, unsigned n,
                             const std::function<void(const PartialStructure&)>& fn) {
  PartialStructure a(lang, n);
  std::size_t cells = a.cell_count();
  std::vector<int> range(cells);
  for (std::size_t c = 0; c < cells; ++c) range[c] = lang[a.symbol_of(c)].is_function() ? static_cast<int>(n) : 2;
  std::vector<int> cur(cells, finprin::kUndef);
  while (true) {
    for (std::size_t c = 0; c < cells; ++c) a.set_unchecked(c, cur[c]);
    fn(a);
    std::size_t c = 0;
    while (c < cells) {
      if (++cur[c] < range[c]) break;
      cur[c] = finprin::kUndef;
      ++c;
    }
    if (c == cells) return;
  }
}

// Calls fn on every total structure of the language on [n].
inline void for_each_total(const finprin::Language& lang, unsigned n,
                           const std::function<void(const PartialStructure&)>& fn) {
  PartialStructure a(lang, n);
  std::size_t cells = a.cell_count();
  std::vector<int> range(cells);
  for (std::size_t c = 0; c < cells; ++c) range[c] = lang[a.symbol_of(c)].is_function() ? static_cast<int>(n) : 2;
  std::vector<int> cur(cells, 0);
  while (true) {
    for (std::size_t c = 0; c < cells; ++c) a.set_unchecked(c, cur[c]);
    fn(a);
    std::size_t c = 0;
    while (c < cells) {
      if (++cur[c] < range[c]) break;
      cur[c] = 0;
      ++c;
    }
    if (c == cells) return;
  }
}

// Largest non-verifying partial structure on [n] plus one (0 when the empty
// structure verifies), by enumerating all of them.
inline std::uint64_t determinacy(const BasicSentence& s, unsigned n) {
  std::uint64_t best = 0;
  bool any = false;
  for_each_partial(s.language, n, [&](const PartialStructure& a) {
    if (oracle::verifies(a, s)) return;
    any = true;
    best = std::max<std::uint64_t>(best, a.size());
  });
  return any ? best + 1 : 0;
}

// Each cell undefined with probability 1/3, else uniform.
inline PartialStructure random_partial(const finprin::Language& lang, unsigned n, std::mt19937_64& rng,
                                       unsigned undef_in_3 = 1) {
  PartialStructure a(lang, n);
  for (std::size_t c = 0; c < a.cell_count(); ++c) {
    if (rng() % 3 < undef_in_3) continue;
    int range = lang[a.symbol_of(c)].is_function() ? static_cast<int>(n) : 2;
    a.set_unchecked(c, static_cast<int>(rng() % range));
  }
  return a;
}

// Uniform random full oracle.
inline finprin::FullOracle random_oracle(const finprin::Language& lang, unsigned n, std::mt19937_64& rng) {
  finprin::FullOracle a(lang, n);
  for (auto& b : a.bits) b = rng() & 1;
  return a;
}

}  // namespace oracle
