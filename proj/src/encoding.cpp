#include "finprin/encoding.hpp"

#include <bit>
#include <cctype>
#include <sstream>

namespace finprin {

unsigned len(unsigned n) { return static_cast<unsigned>(std::bit_width(n)); }

KeySpace::KeySpace(Language lang, unsigned n) : lang_(std::move(lang)), n_(n), len_(len(n)) {
  if (n == 0) throw ContractError("oracle codings need n >= 1");
  rel_off_.push_back(0);
  un_off_.push_back(0);
  for (const auto& s : lang_.symbols()) {
    std::uint64_t c = ipow(n, s.arity);
    cells_.push_back(c);
    rel_off_.push_back(rel_off_.back() + c * (s.is_function() ? len_ : 1));
    un_off_.push_back(un_off_.back() + c * (s.is_function() ? n : 1));
  }
}

namespace {

std::size_t tuple_rank(const std::vector<unsigned>& t, unsigned n) {
  std::size_t r = 0;
  for (unsigned a : t) r = r * n + a;
  return r;
}

std::vector<unsigned> tuple_unrank(std::size_t r, unsigned arity, unsigned n) {
  std::vector<unsigned> t(arity);
  for (unsigned i = arity; i-- > 0;) {
    t[i] = static_cast<unsigned>(r % n);
    r /= n;
  }
  return t;
}

bool tuple_in_range(const std::vector<unsigned>& t, unsigned arity, unsigned n) {
  if (t.size() != arity) return false;
  for (unsigned a : t)
    if (a >= n) return false;
  return true;
}

std::string render_tuple(const std::string& name, const std::vector<unsigned>& t) {
  std::string s = name + "(";
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + std::to_string(t[i]);
  return s + ")";
}

// Reads NAME(a,b,...) and an optional suffix starting at `pos`.
struct KeyText {
  std::string name;
  std::vector<unsigned> tuple;
  std::size_t pos = 0;
};

[[noreturn]] void key_error(const std::string& text, std::size_t pos, const std::string& what) {
  throw SyntaxError(what + " in key '" + text + "'", 1, pos + 1);
}

unsigned read_nat(const std::string& text, std::size_t& pos) {
  if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos]))) key_error(text, pos, "expected a number");
  unsigned long long v = 0;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
    v = v * 10 + static_cast<unsigned>(text[pos] - '0');
    if (v > 0xffffffffULL) key_error(text, pos, "number too large");
    ++pos;
  }
  return static_cast<unsigned>(v);
}

KeyText read_key_head(const std::string& text) {
  KeyText k;
  std::size_t& p = k.pos;
  while (p < text.size() && (std::isalnum(static_cast<unsigned char>(text[p])) || text[p] == '_' || text[p] == '\''))
    ++p;
  if (p == 0) key_error(text, 0, "expected a symbol name");
  k.name = text.substr(0, p);
  if (p >= text.size() || text[p] != '(') key_error(text, p, "expected '('");
  ++p;
  if (p < text.size() && text[p] == ')') {
    ++p;
    return k;
  }
  for (;;) {
    k.tuple.push_back(read_nat(text, p));
    if (p < text.size() && text[p] == ',') {
      ++p;
      continue;
    }
    if (p < text.size() && text[p] == ')') {
      ++p;
      return k;
    }
    key_error(text, p, "expected ',' or ')'");
  }
}

}  // namespace

bool KeySpace::is_relevant(const RelevantKey& k) const {
  if (k.symbol >= lang_.size()) return false;
  const Symbol& s = lang_[k.symbol];
  if (s.is_function() != (k.kind == RelevantKey::Kind::FunBit)) return false;
  if (!tuple_in_range(k.tuple, s.arity, n_)) return false;
  return !s.is_function() || k.bit < len_;
}

std::size_t KeySpace::index(const RelevantKey& k) const {
  if (!is_relevant(k)) throw ContractError("key " + render(k) + " is not relevant for n=" + std::to_string(n_));
  std::size_t t = tuple_rank(k.tuple, n_);
  return k.kind == RelevantKey::Kind::Rel ? rel_off_[k.symbol] + t : rel_off_[k.symbol] + t * len_ + k.bit;
}

std::pair<std::size_t, std::size_t> KeySpace::cell_of(std::size_t index) const {
  if (index >= size()) throw ContractError("key index out of range");
  std::size_t sym = 0;
  while (rel_off_[sym + 1] <= index) ++sym;
  std::size_t local = index - rel_off_[sym];
  return {sym, lang_[sym].is_function() ? local / len_ : local};
}

RelevantKey KeySpace::key(std::size_t index) const {
  auto [sym, t] = cell_of(index);
  RelevantKey k;
  k.symbol = sym;
  k.tuple = tuple_unrank(t, lang_[sym].arity, n_);
  if (lang_[sym].is_function()) {
    k.kind = RelevantKey::Kind::FunBit;
    k.bit = static_cast<unsigned>((index - rel_off_[sym]) % len_);
  }
  return k;
}

std::size_t KeySpace::block(std::size_t sym, std::size_t tuple_index) const {
  return rel_off_[sym] + tuple_index * block_width(sym);
}

std::size_t KeySpace::block_width(std::size_t sym) const { return lang_[sym].is_function() ? len_ : 1; }

bool KeySpace::is_valid(const UnaryKey& k) const {
  if (k.symbol >= lang_.size()) return false;
  const Symbol& s = lang_[k.symbol];
  if (s.is_function() != (k.kind == UnaryKey::Kind::FunGraph)) return false;
  if (!tuple_in_range(k.tuple, s.arity, n_)) return false;
  return !s.is_function() || k.value < n_;
}

std::size_t KeySpace::unary_index(const UnaryKey& k) const {
  if (!is_valid(k)) throw ContractError("unary key " + render(k) + " out of range for n=" + std::to_string(n_));
  std::size_t t = tuple_rank(k.tuple, n_);
  return k.kind == UnaryKey::Kind::Rel ? un_off_[k.symbol] + t : un_off_[k.symbol] + t * n_ + k.value;
}

UnaryKey KeySpace::unary_key(std::size_t index) const {
  if (index >= unary_size()) throw ContractError("unary index out of range");
  std::size_t sym = 0;
  while (un_off_[sym + 1] <= index) ++sym;
  std::size_t local = index - un_off_[sym];
  UnaryKey k;
  k.symbol = sym;
  if (lang_[sym].is_function()) {
    k.kind = UnaryKey::Kind::FunGraph;
    k.value = static_cast<unsigned>(local % n_);
    local /= n_;
  }
  k.tuple = tuple_unrank(local, lang_[sym].arity, n_);
  return k;
}

std::string KeySpace::render(const RelevantKey& k) const {
  std::string name = k.symbol < lang_.size() ? lang_[k.symbol].name : "?" + std::to_string(k.symbol);
  std::string s = render_tuple(name, k.tuple);
  if (k.kind == RelevantKey::Kind::FunBit) s += "[" + std::to_string(k.bit) + "]";
  return s;
}

std::string KeySpace::render(const UnaryKey& k) const {
  std::string name = k.symbol < lang_.size() ? lang_[k.symbol].name : "?" + std::to_string(k.symbol);
  std::string s = render_tuple(name, k.tuple);
  if (k.kind == UnaryKey::Kind::FunGraph) s += "=" + std::to_string(k.value);
  return s;
}

RelevantKey KeySpace::parse_key(const std::string& text) const {
  KeyText h = read_key_head(text);
  auto sym = lang_.find(h.name);
  if (!sym) key_error(text, 0, "unknown symbol '" + h.name + "'");
  RelevantKey k;
  k.symbol = *sym;
  k.tuple = std::move(h.tuple);
  std::size_t p = h.pos;
  if (lang_[*sym].is_function()) {
    k.kind = RelevantKey::Kind::FunBit;
    if (p >= text.size() || text[p] != '[') key_error(text, p, "function key needs a bit index '[i]'");
    ++p;
    k.bit = read_nat(text, p);
    if (p >= text.size() || text[p] != ']') key_error(text, p, "expected ']'");
    ++p;
  }
  if (p != text.size()) key_error(text, p, "trailing characters");
  return k;
}

UnaryKey KeySpace::parse_unary(const std::string& text) const {
  KeyText h = read_key_head(text);
  auto sym = lang_.find(h.name);
  if (!sym) key_error(text, 0, "unknown symbol '" + h.name + "'");
  UnaryKey k;
  k.symbol = *sym;
  k.tuple = std::move(h.tuple);
  std::size_t p = h.pos;
  if (lang_[*sym].is_function()) {
    k.kind = UnaryKey::Kind::FunGraph;
    if (p >= text.size() || text[p] != '=') key_error(text, p, "function graph key needs '=value'");
    ++p;
    k.value = read_nat(text, p);
  }
  if (p != text.size()) key_error(text, p, "trailing characters");
  if (!is_valid(k)) key_error(text, 0, "key out of range for n=" + std::to_string(n_));
  return k;
}

std::vector<RelevantKey> relevant_elements(const Language& lang, unsigned n) {
  KeySpace ks(lang, n);
  std::vector<RelevantKey> out;
  out.reserve(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) out.push_back(ks.key(i));
  return out;
}

std::vector<UnaryKey> UnaryCode::keys() const {
  std::vector<UnaryKey> out;
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) out.push_back(space.unary_key(i));
  return out;
}

std::size_t PartialOracle::norm() const {
  std::size_t total = 0;
  const Language& L = space.language();
  for (std::size_t s = 0; s < L.size(); ++s) {
    std::size_t w = space.block_width(s);
    std::uint64_t cells = ipow(space.n(), L[s].arity);
    for (std::size_t t = 0; t < cells; ++t) {
      std::size_t b = space.block(s, t);
      bool all = true;
      for (std::size_t i = 0; i < w && all; ++i) all = state[b + i] >= 0;
      total += all;
    }
  }
  return total;
}

bool PartialOracle::well_formed() const {
  const Language& L = space.language();
  for (std::size_t s = 0; s < L.size(); ++s) {
    std::size_t w = space.block_width(s);
    std::uint64_t cells = ipow(space.n(), L[s].arity);
    for (std::size_t t = 0; t < cells; ++t) {
      std::size_t b = space.block(s, t);
      std::size_t known = 0;
      for (std::size_t i = 0; i < w; ++i) known += state[b + i] >= 0;
      if (known != 0 && known != w) return false;
    }
  }
  return true;
}

std::vector<RelevantKey> PartialOracle::p0() const {
  std::vector<RelevantKey> out;
  for (std::size_t i = 0; i < state.size(); ++i)
    if (state[i] == 0) out.push_back(space.key(i));
  return out;
}

std::vector<RelevantKey> PartialOracle::p1() const {
  std::vector<RelevantKey> out;
  for (std::size_t i = 0; i < state.size(); ++i)
    if (state[i] == 1) out.push_back(space.key(i));
  return out;
}

PartialStructure decode_binary(const FullOracle& alpha) {
  const KeySpace& ks = alpha.space;
  PartialStructure a(ks.language(), ks.n());
  for (std::size_t s = 0; s < ks.language().size(); ++s) {
    std::size_t w = ks.block_width(s);
    bool fun = ks.language()[s].is_function();
    for (std::size_t t = 0; t < a.block_size(s); ++t) {
      std::size_t b = ks.block(s, t);
      if (!fun) {
        a.set_unchecked(a.offset(s) + t, alpha.bits[b] ? 1 : 0);
        continue;
      }
      std::uint64_t v = 0;
      for (std::size_t i = 0; i < w; ++i)
        if (alpha.bits[b + i]) v |= std::uint64_t{1} << i;
      a.set_unchecked(a.offset(s) + t, static_cast<int>(std::min<std::uint64_t>(v, ks.n() - 1)));
    }
  }
  return a;
}

namespace {

// Writes the defined cells of `a` into a dense bit/state vector.
template <class Vec>
void write_cells(const PartialStructure& a, const KeySpace& ks, Vec& out) {
  for (std::size_t s = 0; s < ks.language().size(); ++s) {
    std::size_t w = ks.block_width(s);
    bool fun = ks.language()[s].is_function();
    for (std::size_t t = 0; t < a.block_size(s); ++t) {
      int v = a.get(a.offset(s) + t);
      if (v == kUndef) continue;
      std::size_t b = ks.block(s, t);
      if (!fun) {
        out[b] = static_cast<typename Vec::value_type>(v);
        continue;
      }
      if (static_cast<unsigned>(v) >= ks.n())
        throw ContractError("function value " + std::to_string(v) + " has no exact binary code for n=" +
                            std::to_string(ks.n()));
      for (std::size_t i = 0; i < w; ++i) out[b + i] = static_cast<typename Vec::value_type>((v >> i) & 1);
    }
  }
}

}  // namespace

FullOracle encode_binary(const PartialStructure& total) {
  if (!total.is_total()) throw ContractError("encode_binary needs a total structure");
  FullOracle f(total.language(), total.n());
  write_cells(total, f.space, f.bits);
  return f;
}

UnaryCode encode_unary(const PartialStructure& total) {
  if (!total.is_total()) throw ContractError("encode_unary needs a total structure");
  UnaryCode code(total.language(), total.n());
  const Language& L = total.language();
  for (std::size_t s = 0; s < L.size(); ++s)
    for (std::size_t t = 0; t < total.block_size(s); ++t) {
      int v = total.get(total.offset(s) + t);
      UnaryKey k;
      k.symbol = s;
      k.tuple = total.tuple_of(s, t);
      if (L[s].is_function()) {
        k.kind = UnaryKey::Kind::FunGraph;
        k.value = static_cast<unsigned>(v);
        code.bits[code.space.unary_index(k)] = 1;
      } else if (v) {
        code.bits[code.space.unary_index(k)] = 1;
      }
    }
  return code;
}

UnaryDecode decode_unary(const UnaryCode& code) {
  const KeySpace& ks = code.space;
  const Language& L = ks.language();
  PartialStructure a(L, ks.n());
  for (std::size_t s = 0; s < L.size(); ++s)
    for (std::size_t t = 0; t < a.block_size(s); ++t) {
      UnaryKey k;
      k.symbol = s;
      k.tuple = a.tuple_of(s, t);
      if (!L[s].is_function()) {
        a.set_unchecked(a.offset(s) + t, code.bits[ks.unary_index(k)] ? 1 : 0);
        continue;
      }
      k.kind = UnaryKey::Kind::FunGraph;
      int found = kUndef;
      for (unsigned b = 0; b < ks.n(); ++b) {
        k.value = b;
        if (!code.bits[ks.unary_index(k)]) continue;
        if (found != kUndef) {
          return {std::nullopt, render_tuple(L[s].name, k.tuple) + " has values " + std::to_string(found) +
                                    " and " + std::to_string(b)};
        }
        found = static_cast<int>(b);
      }
      if (found == kUndef) return {std::nullopt, render_tuple(L[s].name, k.tuple) + " has no value"};
      a.set_unchecked(a.offset(s) + t, found);
    }
  return {std::move(a), {}};
}

UnaryCode unary_from_binary(const FullOracle& alpha) { return encode_unary(decode_binary(alpha)); }

std::optional<FullOracle> binary_from_unary(const UnaryCode& code) {
  auto d = decode_unary(code);
  if (!d.structure) return std::nullopt;
  return encode_binary(*d.structure);
}

PartialOracle oracle_of_partial(const PartialStructure& a) {
  PartialOracle p(a.language(), a.n());
  write_cells(a, p.space, p.state);
  return p;
}

PartialStructure partial_of_oracle(const PartialOracle& p) {
  const KeySpace& ks = p.space;
  PartialStructure a(ks.language(), ks.n());
  for (std::size_t s = 0; s < ks.language().size(); ++s) {
    std::size_t w = ks.block_width(s);
    bool fun = ks.language()[s].is_function();
    for (std::size_t t = 0; t < a.block_size(s); ++t) {
      std::size_t b = ks.block(s, t);
      bool all = true;
      std::uint64_t v = 0;
      for (std::size_t i = 0; i < w; ++i) {
        if (p.state[b + i] < 0) all = false;
        else if (p.state[b + i]) v |= std::uint64_t{1} << i;
      }
      if (!all) continue;
      a.set_unchecked(a.offset(s) + t, fun ? static_cast<int>(std::min<std::uint64_t>(v, ks.n() - 1)) : static_cast<int>(v));
    }
  }
  return a;
}

bool extends(const PartialOracle& q, const PartialOracle& p) {
  if (!(q.space == p.space)) throw ContractError("oracles over different (L, n)");
  for (std::size_t i = 0; i < p.state.size(); ++i)
    if (p.state[i] >= 0 && q.state[i] != p.state[i]) return false;
  return true;
}

bool is_b_extension(const PartialOracle& q, const PartialOracle& p, std::size_t b) {
  return extends(q, p) && q.norm() <= p.norm() + b;
}

FullOracle complete(const PartialOracle& p, bool fill) {
  FullOracle f;
  f.space = p.space;
  f.bits.resize(p.state.size());
  for (std::size_t i = 0; i < p.state.size(); ++i) f.bits[i] = p.state[i] >= 0 ? p.state[i] : fill;
  return f;
}

bool consistent(const FullOracle& alpha, const PartialOracle& p) {
  if (!(alpha.space == p.space)) throw ContractError("oracles over different (L, n)");
  for (std::size_t i = 0; i < p.state.size(); ++i)
    if (p.state[i] >= 0 && alpha.bits[i] != p.state[i]) return false;
  return true;
}

std::string dump(const PartialOracle& p) {
  std::string out;
  for (std::size_t i = 0; i < p.state.size(); ++i) {
    if (p.state[i] < 0) continue;
    out += p.state[i] ? '+' : '-';
    out += p.space.render(p.space.key(i));
    out += '\n';
  }
  return out;
}

PartialOracle parse_dump(const std::string& text, const Language& lang, unsigned n) {
  PartialOracle p(lang, n);
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    if (line.empty()) continue;
    if (line[0] != '+' && line[0] != '-') throw SyntaxError("expected '+' or '-'", lineno, 1);
    RelevantKey k;
    try {
      k = p.space.parse_key(line.substr(1));
    } catch (const SyntaxError& e) {
      throw SyntaxError(e.what(), lineno, e.column() + 1);
    }
    if (!p.space.is_relevant(k)) throw SyntaxError("key " + line.substr(1) + " is not relevant", lineno, 2);
    std::size_t i = p.space.index(k);
    std::int8_t v = line[0] == '+' ? 1 : 0;
    if (p.state[i] >= 0 && p.state[i] != v) throw SyntaxError("key listed in both p0 and p1", lineno, 1);
    p.state[i] = v;
  }
  return p;
}

}  // namespace finprin
