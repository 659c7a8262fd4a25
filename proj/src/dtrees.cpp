#include "finprin/dtrees.hpp"

#include <cctype>

namespace finprin {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

TreePtr TreeNode::out(std::uint64_t v) {
  auto n = std::make_shared<TreeNode>();
  n->label = Label::output(v);
  return n;
}

TreePtr TreeNode::ask(RelevantKey k, TreePtr zero, TreePtr one) {
  if (!zero || !one) throw ContractError("query node needs both branches");
  auto n = std::make_shared<TreeNode>();
  n->label = Label::query(std::move(k));
  n->zero = std::move(zero);
  n->one = std::move(one);
  return n;
}

DecisionTree DecisionTree::constant(unsigned arity, std::uint64_t value) {
  return DecisionTree(arity, 0, [value](std::span<const unsigned>, const std::vector<bool>&) {
    return Label::output(value);
  });
}

DecisionTree DecisionTree::explicit_tree(unsigned arity, TreePtr root) {
  if (!root) throw ContractError("empty tree");
  unsigned h = finprin::height(root);
  return DecisionTree(arity, h, [root](std::span<const unsigned>, const std::vector<bool>& answers) {
    const TreeNode* n = root.get();
    for (bool a : answers) {
      if (n->label.kind == Label::Kind::Output) break;
      n = a ? n->one.get() : n->zero.get();
    }
    return n->label;
  });
}

unsigned height(const TreePtr& t) {
  if (t->label.kind == Label::Kind::Output) return 0;
  return 1 + std::max(height(t->zero), height(t->one));
}

namespace {

TreePtr tabulate_at(const DecisionTree& t, std::span<const unsigned> input, std::vector<bool>& z) {
  Label l = t.label(input, z);
  if (l.kind == Label::Kind::Output) return TreeNode::out(l.value);
  if (z.size() >= t.height()) throw ContractError("malformed tree: query beyond the declared height");
  z.push_back(false);
  TreePtr zero = tabulate_at(t, input, z);
  z.back() = true;
  TreePtr one = tabulate_at(t, input, z);
  z.pop_back();
  return TreeNode::ask(l.key, zero, one);
}

}  // namespace

TreePtr tabulate(const DecisionTree& t, std::span<const unsigned> input) {
  std::vector<bool> z;
  return tabulate_at(t, input, z);
}

std::string to_sexpr(const TreePtr& t, const KeySpace& keys) {
  if (t->label.kind == Label::Kind::Output) return "(out " + std::to_string(t->label.value) + ")";
  return "(query " + keys.render(t->label.key) + " " + to_sexpr(t->zero, keys) + " " + to_sexpr(t->one, keys) + ")";
}

namespace {

struct SexprReader {
  const std::string& s;
  const KeySpace& keys;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(what, 1, pos + 1); }
  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  void expect(char c) {
    skip();
    if (pos >= s.size() || s[pos] != c) fail(std::string("expected '") + c + "'");
    ++pos;
  }
  // Keys contain parentheses, so they run to the next whitespace.
  std::string key_word() {
    skip();
    std::size_t start = pos;
    while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    return s.substr(start, pos - start);
  }
  TreePtr node() {
    expect('(');
    skip();
    std::size_t start = pos;
    while (pos < s.size() && std::isalpha(static_cast<unsigned char>(s[pos]))) ++pos;
    std::string head = s.substr(start, pos - start);
    if (head == "out") {
      skip();
      std::size_t d = pos;
      std::uint64_t v = 0;
      while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) v = v * 10 + (s[pos++] - '0');
      if (d == pos) fail("expected an output value");
      expect(')');
      return TreeNode::out(v);
    }
    if (head == "query") {
      std::size_t kpos = pos;
      std::string k = key_word();
      RelevantKey key;
      try {
        key = keys.parse_key(k);
      } catch (const SyntaxError& e) {
        pos = kpos;
        fail(e.what());
      }
      TreePtr zero = node();
      TreePtr one = node();
      expect(')');
      return TreeNode::ask(key, zero, one);
    }
    fail("expected 'out' or 'query'");
  }
};

}  // namespace

TreePtr parse_sexpr(const std::string& text, const KeySpace& keys) {
  SexprReader r{text, keys};
  TreePtr t = r.node();
  r.skip();
  if (r.pos != text.size()) r.fail("trailing characters");
  return t;
}

namespace {

// lookup: -1 blocked, else the bit.
template <class Lookup>
Run run_with(const DecisionTree& t, std::span<const unsigned> input, Lookup lookup) {
  if (input.size() != t.arity()) throw ContractError("tree input has the wrong arity");
  Run r;
  for (;;) {
    Label l = t.label(input, r.answers);
    if (l.kind == Label::Kind::Output) {
      for (bool b : {false, true}) {
        std::vector<bool> ext = r.answers;
        ext.push_back(b);
        Label e = t.label(input, ext);
        if (e.kind != Label::Kind::Output || e.value != l.value)
          throw ContractError("malformed tree: output changes on an extended answer string");
      }
      r.output = l.value;
      r.status = Run::Status::Complete;
      return r;
    }
    if (r.answers.size() >= t.height())
      throw ContractError("malformed tree: query after " + std::to_string(t.height()) + " answers");
    r.queries.push_back(l.key);
    int bit = lookup(l.key);
    if (bit < 0) {
      r.status = Run::Status::Blocked;
      return r;
    }
    r.answers.push_back(bit != 0);
  }
}

}  // namespace

Run run_full(const DecisionTree& t, std::span<const unsigned> input, const FullOracle& alpha) {
  return run_with(t, input, [&](const RelevantKey& k) { return alpha.get(k) ? 1 : 0; });
}

Run run_partial(const DecisionTree& t, std::span<const unsigned> input, const PartialOracle& p) {
  return run_with(t, input, [&](const RelevantKey& k) -> int {
    if (!p.space.is_relevant(k)) return 0;
    return p.state[p.space.index(k)];
  });
}

void TreeFamily::validate() const {
  if (trees.size() != target.size()) throw ContractError("tree family needs one tree per target symbol");
  if (m == 0) throw ContractError("tree family needs m >= 1");
  for (std::size_t s = 0; s < trees.size(); ++s) {
    if (trees[s].arity() != target[s].arity)
      throw ContractError("tree for " + target[s].name + " has arity " + std::to_string(trees[s].arity()));
    if (trees[s].height() > b0)
      throw ContractError("tree for " + target[s].name + " exceeds the height bound " + std::to_string(b0));
  }
}

namespace {

template <class RunFn>
PartialStructure build_with(const TreeFamily& f, RunFn run) {
  f.validate();
  PartialStructure c(f.target, f.m);
  for (std::size_t s = 0; s < f.target.size(); ++s) {
    bool fun = f.target[s].is_function();
    for (std::size_t t = 0; t < c.block_size(s); ++t) {
      auto args = c.tuple_of(s, t);
      Run r = run(f.trees[s], args);
      if (!r.complete()) continue;
      std::uint64_t cap = fun ? f.m - 1 : 1;
      c.set_unchecked(c.offset(s) + t, static_cast<int>(std::min(*r.output, cap)));
    }
  }
  return c;
}

}  // namespace

PartialStructure build_C(const TreeFamily& f, const PartialOracle& p) {
  if (!(p.space.language() == f.source)) throw ContractError("oracle language differs from the family's source");
  return build_with(f, [&](const DecisionTree& t, std::span<const unsigned> a) { return run_partial(t, a, p); });
}

PartialStructure build_C(const TreeFamily& f, const FullOracle& alpha) {
  if (!(alpha.space.language() == f.source)) throw ContractError("oracle language differs from the family's source");
  return build_with(f, [&](const DecisionTree& t, std::span<const unsigned> a) { return run_full(t, a, alpha); });
}

TreeFamily bit_probe_family(const Language& lang, unsigned n) {
  TreeFamily f;
  f.source = lang;
  f.target = lang;
  f.m = n;
  const unsigned bits = len(n);
  for (std::size_t s = 0; s < lang.size(); ++s) {
    bool fun = lang[s].is_function();
    unsigned h = fun ? bits : 1;
    f.b0 = std::max(f.b0, h);
    f.trees.emplace_back(lang[s].arity, h, [s, fun, h](std::span<const unsigned> in, const std::vector<bool>& z) {
      if (z.size() >= h) {
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < h; ++i)
          if (z[i]) v |= std::uint64_t{1} << i;
        return Label::output(v);
      }
      RelevantKey k;
      k.kind = fun ? RelevantKey::Kind::FunBit : RelevantKey::Kind::Rel;
      k.symbol = s;
      k.tuple.assign(in.begin(), in.end());
      k.bit = static_cast<unsigned>(z.size());
      return Label::query(std::move(k));
    });
  }
  return f;
}

TreeFamily random_family(const Language& source, unsigned n, const Language& target, unsigned m, unsigned b0,
                         std::uint64_t seed, const std::vector<RelevantKey>& hot) {
  TreeFamily f;
  f.source = source;
  f.target = target;
  f.m = m;
  f.b0 = b0;
  auto space = std::make_shared<KeySpace>(source, n);
  auto hot_keys = std::make_shared<std::vector<RelevantKey>>(hot);
  for (std::size_t s = 0; s < target.size(); ++s) {
    std::uint64_t cap = target[s].is_function() ? m : 2;
    f.trees.emplace_back(target[s].arity, b0,
                         [space, hot_keys, s, seed, b0, cap](std::span<const unsigned> in, const std::vector<bool>& z) {
                           std::uint64_t h = splitmix64(seed ^ splitmix64(s + 1));
                           for (unsigned a : in) h = splitmix64(h ^ a);
                           unsigned depth = static_cast<unsigned>(h % (b0 + 1));
                           std::uint64_t hz = h;
                           for (std::size_t i = 0; i < z.size() && i < depth; ++i) hz = splitmix64(hz ^ (z[i] ? 3 : 2));
                           if (z.size() >= depth) return Label::output(splitmix64(hz ^ 0x5bd1e995) % cap);
                           std::uint64_t pick = splitmix64(hz ^ 0x2545f491);
                           if (!hot_keys->empty() && pick % 4 != 0)
                             return Label::query((*hot_keys)[(pick >> 2) % hot_keys->size()]);
                           return Label::query(space->key(pick % space->size()));
                         });
  }
  return f;
}

}  // namespace finprin
