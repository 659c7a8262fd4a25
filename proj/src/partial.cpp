#include "finprin/partial.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

namespace finprin {

using ojson = nlohmann::ordered_json;

PartialStructure::PartialStructure(Language lang, unsigned n) : lang_(std::move(lang)), n_(n) {
  offsets_.reserve(lang_.size() + 1);
  std::size_t off = 0;
  for (const auto& s : lang_.symbols()) {
    offsets_.push_back(off);
    off += ipow(n, s.arity);
  }
  offsets_.push_back(off);
  cells_.assign(off, kUndef);
}

std::size_t PartialStructure::tuple_index(std::span<const unsigned> args) const {
  std::size_t idx = 0;
  for (auto a : args) {
    if (a >= n_) throw ContractError("tuple component " + std::to_string(a) + " outside [" + std::to_string(n_) + "]");
    idx = idx * n_ + a;
  }
  return idx;
}

std::vector<unsigned> PartialStructure::tuple_of(std::size_t sym, std::size_t index) const {
  std::vector<unsigned> out(lang_[sym].arity);
  for (std::size_t i = out.size(); i-- > 0;) {
    out[i] = static_cast<unsigned>(index % n_);
    index /= n_;
  }
  return out;
}

std::size_t PartialStructure::symbol_of(std::size_t cell) const {
  auto it = std::upper_bound(offsets_.begin(), offsets_.end(), cell);
  return static_cast<std::size_t>(it - offsets_.begin()) - 1;
}

void PartialStructure::set(std::size_t cell, int value) {
  if (cell >= cells_.size()) throw ContractError("cell index out of range");
  if (value != kUndef) {
    int limit = lang_[symbol_of(cell)].is_function() ? static_cast<int>(n_) : 2;
    if (value < 0 || value >= limit) throw ContractError("cell value " + std::to_string(value) + " out of range");
  }
  cells_[cell] = value;
}

std::size_t PartialStructure::size() const {
  return static_cast<std::size_t>(std::count_if(cells_.begin(), cells_.end(), [](int v) { return v != kUndef; }));
}

bool PartialStructure::is_total() const {
  return std::none_of(cells_.begin(), cells_.end(), [](int v) { return v == kUndef; });
}

bool PartialStructure::extends(const PartialStructure& smaller) const {
  if (smaller.n_ != n_ || !(smaller.lang_ == lang_)) return false;
  for (std::size_t i = 0; i < cells_.size(); ++i)
    if (smaller.cells_[i] != kUndef && smaller.cells_[i] != cells_[i]) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Evaluation

std::string to_string(Truth t) {
  switch (t) {
    case Truth::False:
      return "0";
    case Truth::Half:
      return "1/2";
    case Truth::True:
      return "1";
  }
  return "?";
}

namespace {

using Env = std::vector<std::pair<std::string, unsigned>>;

int eval_term(const PartialStructure& a, const Term& t, const Env& env) {
  switch (t.kind) {
    case Term::Kind::Variable:
      for (auto it = env.rbegin(); it != env.rend(); ++it)
        if (it->first == t.name) return static_cast<int>(it->second);
      throw ContractError("free variable '" + t.name + "' in evaluated formula");
    case Term::Kind::Parameter:
      if (t.value >= a.n()) throw ContractError("parameter outside the universe");
      return static_cast<int>(t.value);
    case Term::Kind::Numeral:
      return t.value < a.n() ? static_cast<int>(t.value) : kUndef;
    case Term::Kind::Apply: {
      std::vector<unsigned> args;
      args.reserve(t.args.size());
      // any undefined argument makes the whole term undefined
      for (const auto& s : t.args) {
        int v = eval_term(a, s, env);
        if (v == kUndef) return kUndef;
        args.push_back(static_cast<unsigned>(v));
      }
      if (!a.language()[t.symbol].is_function()) throw ContractError("relation symbol used as a term");
      return a.get(t.symbol, args);
    }
  }
  return kUndef;
}

Truth eval_rec(const PartialStructure& a, const Formula& f, Env& env) {
  using K = Formula::Kind;
  switch (f.kind) {
    case K::True:
      return Truth::True;
    case K::False:
      return Truth::False;
    case K::Relation: {
      std::vector<unsigned> args;
      for (const auto& s : f.terms) {
        int v = eval_term(a, s, env);
        if (v == kUndef) return Truth::Half;
        args.push_back(static_cast<unsigned>(v));
      }
      int v = a.get(f.symbol, args);
      return v == kUndef ? Truth::Half : (v ? Truth::True : Truth::False);
    }
    case K::Equal:
    case K::Less: {
      int x = eval_term(a, f.terms[0], env);
      int y = eval_term(a, f.terms[1], env);
      if (x == kUndef || y == kUndef) return Truth::Half;
      bool r = f.kind == K::Equal ? x == y : x < y;
      return r ? Truth::True : Truth::False;
    }
    case K::Not:
      return t_not(eval_rec(a, f.children[0], env));
    case K::And: {
      Truth r = Truth::True;
      for (const auto& c : f.children) {
        r = t_and(r, eval_rec(a, c, env));
        if (r == Truth::False) break;
      }
      return r;
    }
    case K::Or: {
      Truth r = Truth::False;
      for (const auto& c : f.children) {
        r = t_or(r, eval_rec(a, c, env));
        if (r == Truth::True) break;
      }
      return r;
    }
    case K::Forall:
    case K::Exists: {
      bool all = f.kind == K::Forall;
      Truth r = all ? Truth::True : Truth::False;
      env.emplace_back(f.var, 0);
      for (unsigned x = 0; x < a.n(); ++x) {
        env.back().second = x;
        Truth v = eval_rec(a, f.children[0], env);
        r = all ? t_and(r, v) : t_or(r, v);
        if (r == (all ? Truth::False : Truth::True)) break;
      }
      env.pop_back();
      return r;
    }
  }
  return Truth::Half;
}

}  // namespace

Truth eval3(const PartialStructure& a, const Formula& f) {
  Env env;
  return eval_rec(a, f, env);
}

Truth eval3(const PartialStructure& a, const Formula& f, const Env& env) {
  Env e = env;
  return eval_rec(a, f, e);
}

Truth literal_value(const PartialStructure& a, const Literal& l, std::span<const unsigned> values) {
  auto args = [&]() {
    std::vector<unsigned> out;
    out.reserve(l.args.size());
    for (auto v : l.args) out.push_back(values[v]);
    return out;
  };
  Truth t = Truth::Half;
  switch (l.kind) {
    case Literal::Kind::Rel: {
      int v = a.get(l.symbol, args());
      if (v == kUndef) return Truth::Half;
      t = v ? Truth::True : Truth::False;
      break;
    }
    case Literal::Kind::Fun: {
      int v = a.get(l.symbol, args());
      if (v == kUndef) return Truth::Half;
      t = static_cast<unsigned>(v) == values[l.out] ? Truth::True : Truth::False;
      break;
    }
    case Literal::Kind::Eq:
      t = values[l.args[0]] == values[l.args[1]] ? Truth::True : Truth::False;
      break;
    case Literal::Kind::Less:
      t = values[l.args[0]] < values[l.args[1]] ? Truth::True : Truth::False;
      break;
    case Literal::Kind::Numeral:
      if (l.numeral >= a.n()) return Truth::Half;
      t = l.numeral == values[l.out] ? Truth::True : Truth::False;
      break;
  }
  return l.positive ? t : t_not(t);
}

Truth eval3(const PartialStructure& a, const BasicSentence& s) {
  Matcher m(s);
  if (m.verifies(a)) return Truth::True;
  if (a.n() == 0) return Truth::False;
  // Value 1/2 iff some disjunct has no literal of value 0 under some tuple.
  const auto k = s.vars.size();
  std::vector<unsigned> vals(k, 0);
  while (true) {
    for (const auto& conj : s.matrix) {
      bool zero = false;
      for (const auto& l : conj)
        if (literal_value(a, l, vals) == Truth::False) {
          zero = true;
          break;
        }
      if (!zero) return Truth::Half;
    }
    std::size_t i = k;
    while (i > 0 && ++vals[i - 1] == a.n()) vals[--i] = 0;
    if (i == 0) break;
  }
  return Truth::False;
}

bool verifies(const PartialStructure& a, const BasicSentence& s) { return Matcher(s).verifies(a); }
bool falsifies(const PartialStructure& a, const BasicSentence& s) { return eval3(a, s) == Truth::False; }
bool verifies(const PartialStructure& a, const Formula& f) { return eval3(a, f) == Truth::True; }
bool falsifies(const PartialStructure& a, const Formula& f) { return eval3(a, f) == Truth::False; }

// ---------------------------------------------------------------------------
// Matcher

Matcher::Matcher(const BasicSentence& s) : s_(s) {
  for (std::size_t d = 0; d < s_.matrix.size(); ++d) plans_.push_back(compile(d, SIZE_MAX));
  seeded_.resize(s_.language.size());
  for (std::size_t d = 0; d < s_.matrix.size(); ++d)
    for (std::size_t li = 0; li < s_.matrix[d].size(); ++li) {
      const auto& l = s_.matrix[d][li];
      if (l.kind == Literal::Kind::Rel || l.kind == Literal::Kind::Fun) seeded_[l.symbol].push_back(compile(d, li));
    }
}

Matcher::Plan Matcher::compile(std::size_t disjunct, std::size_t seed_lit) const {
  const auto& conj = s_.matrix[disjunct];
  Plan plan;
  plan.disjunct = disjunct;
  plan.seed_lit = seed_lit;
  std::vector<bool> bound(s_.vars.size(), false);
  std::vector<bool> done(conj.size(), false);
  auto vars_of = [](const Literal& l) {
    std::vector<unsigned> vs = l.args;
    if (l.kind == Literal::Kind::Fun || l.kind == Literal::Kind::Numeral) vs.push_back(l.out);
    return vs;
  };
  if (seed_lit != SIZE_MAX)
    for (auto v : vars_of(conj[seed_lit])) bound[v] = true;
  while (true) {
    bool progress = false;
    for (std::size_t i = 0; i < conj.size(); ++i) {
      if (done[i]) continue;
      auto vs = vars_of(conj[i]);
      if (std::all_of(vs.begin(), vs.end(), [&](unsigned v) { return bound[v]; })) {
        plan.ops.push_back({Op::Kind::Check, 0, i});
        done[i] = true;
        progress = true;
      }
    }
    if (progress) continue;
    for (std::size_t i = 0; i < conj.size() && !progress; ++i) {
      if (done[i]) continue;
      const auto& l = conj[i];
      if (l.kind == Literal::Kind::Fun &&
          std::all_of(l.args.begin(), l.args.end(), [&](unsigned v) { return bound[v]; })) {
        plan.ops.push_back({Op::Kind::Derive, l.out, i});
        bound[l.out] = true;
        done[i] = progress = true;
      } else if (l.kind == Literal::Kind::Numeral) {
        plan.ops.push_back({Op::Kind::Derive, l.out, i});
        bound[l.out] = true;
        done[i] = progress = true;
      } else if (l.kind == Literal::Kind::Eq && l.positive && bound[l.args[0]] != bound[l.args[1]]) {
        unsigned target = bound[l.args[0]] ? l.args[1] : l.args[0];
        plan.ops.push_back({Op::Kind::Derive, target, i});
        bound[target] = true;
        done[i] = progress = true;
      }
    }
    if (progress) continue;
    std::size_t open = conj.size();
    for (std::size_t i = 0; i < conj.size(); ++i)
      if (!done[i]) {
        open = i;
        break;
      }
    if (open == conj.size()) break;
    // enumerate the first unbound argument of the first open literal
    auto vs = vars_of(conj[open]);
    for (auto v : vs)
      if (!bound[v]) {
        plan.ops.push_back({Op::Kind::Enum, v, 0});
        bound[v] = true;
        break;
      }
  }
  return plan;
}

namespace {

constexpr unsigned kNone = ~0u;

// Strict truth (value 1) of a literal whose variables are all bound.
bool holds(const PartialStructure& a, const Literal& l, const std::vector<unsigned>& val) {
  bool t = false;
  switch (l.kind) {
    case Literal::Kind::Rel:
    case Literal::Kind::Fun: {
      std::size_t idx = 0;
      for (auto u : l.args) idx = idx * a.n() + val[u];
      int v = a.get(a.offset(l.symbol) + idx);
      if (v == kUndef) return false;
      t = l.kind == Literal::Kind::Rel ? v == 1 : static_cast<unsigned>(v) == val[l.out];
      break;
    }
    case Literal::Kind::Eq:
      t = val[l.args[0]] == val[l.args[1]];
      break;
    case Literal::Kind::Less:
      t = val[l.args[0]] < val[l.args[1]];
      break;
    case Literal::Kind::Numeral:
      if (l.numeral >= a.n()) return false;
      t = l.numeral == val[l.out];
      break;
  }
  return t == l.positive;
}

}  // namespace

bool Matcher::run(const PartialStructure& a, const Plan& plan, std::size_t k, std::vector<unsigned>& val,
                  const std::vector<unsigned>* domain) const {
  if (k == plan.ops.size()) return true;
  const Op& op = plan.ops[k];
  const auto& conj = s_.matrix[plan.disjunct];
  switch (op.kind) {
    case Op::Kind::Enum: {
      if (domain) {
        for (auto x : *domain) {
          val[op.var] = x;
          if (run(a, plan, k + 1, val, domain)) return true;
        }
      } else {
        for (unsigned x = 0; x < a.n(); ++x) {
          val[op.var] = x;
          if (run(a, plan, k + 1, val, domain)) return true;
        }
      }
      val[op.var] = kNone;
      return false;
    }
    case Op::Kind::Derive: {
      const auto& l = conj[op.lit];
      unsigned v = kNone;
      if (l.kind == Literal::Kind::Fun) {
        std::size_t idx = 0;
        for (auto u : l.args) idx = idx * a.n() + val[u];
        int w = a.get(a.offset(l.symbol) + idx);
        if (w != kUndef) v = static_cast<unsigned>(w);
      } else if (l.kind == Literal::Kind::Numeral) {
        if (l.numeral < a.n()) v = l.numeral;
      } else {
        v = val[l.args[0]] != kNone ? val[l.args[0]] : val[l.args[1]];
      }
      if (v == kNone) return false;
      val[op.var] = v;
      bool ok = run(a, plan, k + 1, val, domain);
      if (!ok) val[op.var] = kNone;
      return ok;
    }
    case Op::Kind::Check:
      if (!holds(a, conj[op.lit], val)) return false;
      return run(a, plan, k + 1, val, domain);
  }
  return false;
}

namespace {

Witness make_witness(std::size_t d, const std::vector<unsigned>& val, const std::vector<unsigned>* domain) {
  Witness w;
  w.disjunct = d;
  unsigned fill = domain && !domain->empty() ? (*domain)[0] : 0;
  for (auto v : val) w.values.push_back(v == kNone ? fill : v);
  return w;
}

}  // namespace

std::optional<Witness> Matcher::find(const PartialStructure& a, const std::vector<unsigned>* domain) const {
  std::vector<unsigned> val(s_.vars.size(), kNone);
  for (const auto& plan : plans_) {
    std::fill(val.begin(), val.end(), kNone);
    if (run(a, plan, 0, val, domain)) return make_witness(plan.disjunct, val, domain);
  }
  return std::nullopt;
}

std::optional<Witness> Matcher::find_in(const PartialStructure& a, std::size_t disjunct) const {
  std::vector<unsigned> val(s_.vars.size(), kNone);
  if (run(a, plans_.at(disjunct), 0, val, nullptr)) return make_witness(disjunct, val, nullptr);
  return std::nullopt;
}

std::optional<Witness> Matcher::find_touching(const PartialStructure& a, std::size_t cell) const {
  int value = a.get(cell);
  if (value == kUndef) return std::nullopt;
  std::size_t sym = a.symbol_of(cell);
  if (sym >= seeded_.size()) return std::nullopt;
  auto tuple = a.tuple_of(sym, cell - a.offset(sym));
  std::vector<unsigned> val(s_.vars.size());
  for (const auto& plan : seeded_[sym]) {
    const auto& l = s_.matrix[plan.disjunct][plan.seed_lit];
    if (l.kind == Literal::Kind::Rel && (value == 1) != l.positive) continue;
    std::fill(val.begin(), val.end(), kNone);
    bool ok = true;
    for (std::size_t i = 0; i < l.args.size() && ok; ++i) {
      unsigned& slot = val[l.args[i]];
      if (slot != kNone && slot != tuple[i]) ok = false;
      slot = tuple[i];
    }
    if (ok && l.kind == Literal::Kind::Fun) {
      unsigned& slot = val[l.out];
      if (slot != kNone && slot != static_cast<unsigned>(value)) ok = false;
      slot = static_cast<unsigned>(value);
    }
    if (ok && run(a, plan, 0, val, nullptr)) return make_witness(plan.disjunct, val, nullptr);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Substructures and embeddings

PartialStructure induced_substructure(const PartialStructure& a, const std::vector<unsigned>& points) {
  std::vector<int> pos(a.n(), kUndef);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i] >= a.n()) throw ContractError("point " + std::to_string(points[i]) + " outside the universe");
    if (pos[points[i]] != kUndef) throw ContractError("duplicate point " + std::to_string(points[i]));
    pos[points[i]] = static_cast<int>(i);
  }
  PartialStructure b(a.language(), static_cast<unsigned>(points.size()));
  const auto& lang = a.language();
  for (std::size_t s = 0; s < lang.size(); ++s) {
    for (std::size_t t = 0; t < b.block_size(s); ++t) {
      auto tb = b.tuple_of(s, t);
      std::vector<unsigned> ta(tb.size());
      for (std::size_t i = 0; i < tb.size(); ++i) ta[i] = points[tb[i]];
      int v = a.get(s, ta);
      if (v == kUndef) continue;
      if (lang[s].is_function()) v = pos[static_cast<unsigned>(v)];
      b.set_unchecked(b.offset(s) + t, v);
    }
  }
  return b;
}

bool is_embedding(const PartialStructure& b, const PartialStructure& a, const Embedding& map) {
  if (!(b.language() == a.language())) throw ContractError("embedding between different languages");
  if (map.size() != b.n()) return false;
  std::vector<bool> used(a.n(), false);
  for (auto x : map) {
    if (x >= a.n() || used[x]) return false;
    used[x] = true;
  }
  const auto& lang = b.language();
  if (lang.builtin_order())
    for (std::size_t i = 1; i < map.size(); ++i)
      if (map[i - 1] >= map[i]) return false;
  for (auto k : lang.numerals())
    if (k < b.n() && map[k] != k) return false;
  for (std::size_t s = 0; s < lang.size(); ++s)
    for (std::size_t t = 0; t < b.block_size(s); ++t) {
      int v = b.get(b.offset(s) + t);
      if (v == kUndef) continue;
      auto tb = b.tuple_of(s, t);
      for (auto& x : tb) x = map[x];
      int w = a.get(s, tb);
      if (w == kUndef) return false;
      if (lang[s].is_function() ? static_cast<unsigned>(w) != map[static_cast<unsigned>(v)] : w != v) return false;
    }
  return true;
}

std::vector<unsigned> active_points(const PartialStructure& a) {
  std::vector<bool> act(a.n(), false);
  const auto& lang = a.language();
  for (std::size_t s = 0; s < lang.size(); ++s)
    for (std::size_t t = 0; t < a.block_size(s); ++t) {
      int v = a.get(a.offset(s) + t);
      if (v == kUndef) continue;
      for (auto x : a.tuple_of(s, t)) act[x] = true;
      if (lang[s].is_function()) act[static_cast<unsigned>(v)] = true;
    }
  std::vector<unsigned> out;
  for (unsigned i = 0; i < a.n(); ++i)
    if (act[i]) out.push_back(i);
  return out;
}

namespace {

class EmbeddingSearch {
 public:
  EmbeddingSearch(const PartialStructure& b, const PartialStructure& a, const std::vector<int>* hint)
      : b_(b), a_(a), hint_(hint), img_(b.n(), kUndef), used_(a.n(), false), cells_of_(b.n()) {
    const auto& lang = b.language();
    for (std::size_t s = 0; s < lang.size(); ++s)
      for (std::size_t t = 0; t < b.block_size(s); ++t) {
        int v = b.get(b.offset(s) + t);
        if (v == kUndef) continue;
        Cell c{s, b.tuple_of(s, t), lang[s].is_function() ? v : kUndef, lang[s].is_function() ? kUndef : v};
        std::size_t id = cells_.size();
        cells_.push_back(c);
        std::vector<unsigned> pts = c.args;
        if (c.value != kUndef) pts.push_back(static_cast<unsigned>(c.value));
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        for (auto p : pts) cells_of_[p].push_back(id);
      }
  }

  std::optional<Embedding> solve() {
    const auto& lang = b_.language();
    for (auto k : lang.numerals())
      if (k < b_.n()) {
        if (k >= a_.n() || !assign(k, k)) return std::nullopt;
      }
    if (lang.builtin_order()) {
      // Order-preserving: plain increasing search over all points.
      order_.resize(b_.n());
      for (unsigned i = 0; i < b_.n(); ++i) order_[i] = i;
    } else {
      order_ = search_order();
    }
    if (!extend(0)) return std::nullopt;
    // Remaining (inactive) points take the unused images in increasing order.
    unsigned next = 0;
    for (unsigned p = 0; p < b_.n(); ++p) {
      if (img_[p] != kUndef) continue;
      while (next < a_.n() && used_[next]) ++next;
      if (next == a_.n()) return std::nullopt;
      img_[p] = static_cast<int>(next);
      used_[next] = true;
    }
    Embedding e(img_.begin(), img_.end());
    return e;
  }

 private:
  struct Cell {
    std::size_t sym;
    std::vector<unsigned> args;
    int value;  // function value point, or kUndef
    int bit;    // relation bit, or kUndef
  };

  std::vector<unsigned> search_order() const {
    std::vector<unsigned> pts;
    for (unsigned p = 0; p < b_.n(); ++p)
      if (!cells_of_[p].empty()) pts.push_back(p);
    std::stable_sort(pts.begin(), pts.end(),
                     [&](unsigned x, unsigned y) { return cells_of_[x].size() > cells_of_[y].size(); });
    // breadth-first through shared cells, seeded by high degree
    std::vector<unsigned> out;
    std::vector<bool> seen(b_.n(), false);
    for (auto root : pts) {
      if (seen[root]) continue;
      std::vector<unsigned> queue{root};
      seen[root] = true;
      for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        unsigned p = queue[qi];
        out.push_back(p);
        for (auto c : cells_of_[p]) {
          const Cell& cell = cells_[c];
          auto visit = [&](unsigned x) {
            if (!seen[x]) {
              seen[x] = true;
              queue.push_back(x);
            }
          };
          for (auto x : cell.args) visit(x);
          if (cell.value != kUndef) visit(static_cast<unsigned>(cell.value));
        }
      }
    }
    return out;
  }

  // Assigns p -> x and propagates forced function values.
  bool assign(unsigned p, unsigned x) {
    if (img_[p] != kUndef) return img_[p] == static_cast<int>(x);
    if (used_[x]) return false;
    img_[p] = static_cast<int>(x);
    used_[x] = true;
    trail_.push_back(p);
    for (auto id : cells_of_[p]) {
      const Cell& c = cells_[id];
      std::vector<unsigned> ta;
      ta.reserve(c.args.size());
      bool ready = true;
      for (auto y : c.args) {
        if (img_[y] == kUndef) {
          ready = false;
          break;
        }
        ta.push_back(static_cast<unsigned>(img_[y]));
      }
      if (!ready) continue;
      int w = a_.get(c.sym, ta);
      if (w == kUndef) return false;
      if (c.value == kUndef) {
        if (w != c.bit) return false;
      } else if (!assign(static_cast<unsigned>(c.value), static_cast<unsigned>(w))) {
        return false;
      }
    }
    return true;
  }

  void undo(std::size_t mark) {
    while (trail_.size() > mark) {
      unsigned p = trail_.back();
      trail_.pop_back();
      used_[static_cast<unsigned>(img_[p])] = false;
      img_[p] = kUndef;
    }
  }

  bool extend(std::size_t k) {
    while (k < order_.size() && img_[order_[k]] != kUndef) ++k;
    if (k == order_.size()) return true;
    unsigned p = order_[k];
    unsigned lo = 0;
    if (b_.language().builtin_order() && p > 0) lo = static_cast<unsigned>(img_[p - 1]) + 1;
    auto attempt = [&](unsigned x) {
      std::size_t mark = trail_.size();
      if (assign(p, x) && extend(k + 1)) return true;
      undo(mark);
      return false;
    };
    int h = hint_ && p < hint_->size() ? (*hint_)[p] : kUndef;
    if (h != kUndef && static_cast<unsigned>(h) < a_.n() && static_cast<unsigned>(h) >= lo && !used_[h] &&
        attempt(static_cast<unsigned>(h)))
      return true;
    for (unsigned x = lo; x < a_.n(); ++x) {
      if (static_cast<int>(x) == h || used_[x]) continue;
      if (attempt(x)) return true;
    }
    return false;
  }

  const PartialStructure& b_;
  const PartialStructure& a_;
  const std::vector<int>* hint_;
  std::vector<int> img_;
  std::vector<bool> used_;
  std::vector<Cell> cells_;
  std::vector<std::vector<std::size_t>> cells_of_;
  std::vector<unsigned> order_;
  std::vector<unsigned> trail_;
};

}  // namespace

std::optional<Embedding> find_embedding(const PartialStructure& b, const PartialStructure& a,
                                        const std::vector<int>* hint) {
  if (!(b.language() == a.language())) throw ContractError("embedding between different languages");
  if (b.n() > a.n()) return std::nullopt;
  return EmbeddingSearch(b, a, hint).solve();
}

// ---------------------------------------------------------------------------
// Text forms

std::string to_json(const PartialStructure& a, int indent) {
  ojson j;
  j["n"] = a.n();
  ojson fun = ojson::object();
  ojson rel = ojson::object();
  const auto& lang = a.language();
  for (std::size_t s = 0; s < lang.size(); ++s) {
    ojson arr = ojson::array();
    for (std::size_t t = 0; t < a.block_size(s); ++t) {
      int v = a.get(a.offset(s) + t);
      if (v == kUndef) arr.push_back(nullptr);
      else arr.push_back(v);
    }
    (lang[s].is_function() ? fun : rel)[lang[s].name] = arr;
  }
  j["fun"] = fun;
  j["rel"] = rel;
  return j.dump(indent);
}

PartialStructure structure_from_json(std::string_view text, const Language& lang) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const std::exception& e) {
    throw SyntaxError(std::string("invalid JSON: ") + e.what(), 1, 1);
  }
  try {
    PartialStructure a(lang, j.at("n").get<unsigned>());
    for (const char* group : {"fun", "rel"}) {
      if (!j.contains(group)) continue;
      for (const auto& [name, arr] : j.at(group).items()) {
        auto sym = lang.find(name);
        if (!sym) throw ContractError("structure mentions unknown symbol '" + name + "'");
        bool want_fun = std::string(group) == "fun";
        if (lang[*sym].is_function() != want_fun)
          throw ContractError("symbol '" + name + "' listed under the wrong kind");
        if (arr.size() != a.block_size(*sym))
          throw ContractError("symbol '" + name + "' needs " + std::to_string(a.block_size(*sym)) + " entries");
        for (std::size_t t = 0; t < arr.size(); ++t)
          a.set(a.offset(*sym) + t, arr[t].is_null() ? kUndef : arr[t].get<int>());
      }
    }
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw SyntaxError(std::string("malformed structure JSON: ") + e.what(), 1, 1);
  }
}

std::string render_structure(const PartialStructure& a) {
  std::ostringstream os;
  const auto& lang = a.language();
  bool first = true;
  for (std::size_t s = 0; s < lang.size(); ++s)
    for (std::size_t t = 0; t < a.block_size(s); ++t) {
      int v = a.get(a.offset(s) + t);
      if (v == kUndef) continue;
      if (!first) os << ' ';
      first = false;
      os << lang[s].name << '(';
      auto tup = a.tuple_of(s, t);
      for (std::size_t i = 0; i < tup.size(); ++i) os << (i ? "," : "") << tup[i];
      os << ")=" << v;
    }
  return os.str();
}

}  // namespace finprin
