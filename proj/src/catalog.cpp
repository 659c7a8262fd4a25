#include "finprin/catalog.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace finprin {

PartialStructure induced_substructure(const ComputableModel& m, const std::vector<Point>& points) {
  std::map<Point, unsigned> pos;
  for (std::size_t i = 0; i < points.size(); ++i)
    if (!pos.emplace(points[i], static_cast<unsigned>(i)).second)
      throw ContractError("duplicate point in induced substructure");
  const auto& lang = m.language;
  PartialStructure b(lang, static_cast<unsigned>(points.size()));
  std::vector<Point> args;
  for (std::size_t s = 0; s < lang.size(); ++s) {
    for (std::size_t t = 0; t < b.block_size(s); ++t) {
      auto tb = b.tuple_of(s, t);
      args.assign(tb.size(), 0);
      for (std::size_t i = 0; i < tb.size(); ++i) args[i] = points[tb[i]];
      if (lang[s].is_function()) {
        auto it = pos.find(m.fun(s, args));
        if (it != pos.end()) b.set_unchecked(b.offset(s) + t, static_cast<int>(it->second));
      } else {
        b.set_unchecked(b.offset(s) + t, m.rel(s, args) ? 1 : 0);
      }
    }
  }
  return b;
}

std::vector<Point> overflow_set(const ComputableModel& m, const std::vector<Point>& b0) {
  std::set<Point> inside(b0.begin(), b0.end());
  std::set<Point> out;
  const auto& lang = m.language;
  for (std::size_t s = 0; s < lang.size(); ++s) {
    if (!lang[s].is_function()) continue;
    unsigned k = lang[s].arity;
    std::vector<std::size_t> idx(k, 0);
    std::vector<Point> args(k);
    if (k > 0 && b0.empty()) continue;
    while (true) {
      for (unsigned i = 0; i < k; ++i) args[i] = b0[idx[i]];
      Point v = m.fun(s, args);
      if (!inside.count(v)) out.insert(v);
      std::size_t i = k;
      while (i > 0 && ++idx[i - 1] == b0.size()) idx[--i] = 0;
      if (i == 0) break;
    }
  }
  return {out.begin(), out.end()};
}

LargenessReport check_largeness(const ComputableModel& m, unsigned n, std::size_t samples, std::mt19937_64& rng) {
  if (n == 0) throw ContractError("largeness needs n >= 1");
  LargenessReport r;
  r.n = n;
  r.bound = m.g(n);
  r.overflow = overflow_set(m, m.canonical_slice(n)).size();
  auto pool = m.sample_pool(n);
  if (pool.size() < n) throw ContractError("sample pool smaller than n");
  for (std::size_t k = 0; k < samples; ++k) {
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<Point> a0(pool.begin(), pool.begin() + n);
    auto images = m.large_host(a0);
    std::vector<Point> host = images;
    std::sort(host.begin(), host.end());
    host.erase(std::unique(host.begin(), host.end()), host.end());
    r.max_host_overflow = std::max(r.max_host_overflow, overflow_set(m, host).size());
    std::vector<int> hint(n);
    for (unsigned i = 0; i < n; ++i)
      hint[i] = static_cast<int>(std::lower_bound(host.begin(), host.end(), images[i]) - host.begin());
    auto src = induced_substructure(m, a0);
    auto dst = induced_substructure(m, host);
    ++r.samples;
    if (find_embedding(src, dst, &hint)) ++r.embedded;
  }
  return r;
}

namespace {

// Rank of each point among a0, as host images [0, |a0|).
std::vector<Point> compress(const std::vector<Point>& a0) {
  std::vector<Point> sorted = a0;
  std::sort(sorted.begin(), sorted.end());
  std::vector<Point> out;
  out.reserve(a0.size());
  for (auto p : a0) out.push_back(static_cast<Point>(std::lower_bound(sorted.begin(), sorted.end(), p) - sorted.begin()));
  return out;
}

std::vector<Point> range(unsigned n) {
  std::vector<Point> v(n);
  for (unsigned i = 0; i < n; ++i) v[i] = i;
  return v;
}

ComputableModel base_model(std::string name, Language lang, std::string description) {
  ComputableModel m;
  m.name = std::move(name);
  m.language = std::move(lang);
  m.canonical_slice = range;
  m.g = [](unsigned) { return 1u; };
  m.large_host = compress;
  m.sample_pool = [](unsigned n) { return range(3 * n); };
  m.fun = [](std::size_t, std::span<const Point>) -> Point { throw ContractError("model has no function symbols"); };
  m.rel = [](std::size_t, std::span<const Point>) -> bool { throw ContractError("model has no relation symbols"); };
  m.description = std::move(description);
  return m;
}

ComputableModel successor_model(const Language& lang) {
  auto m = base_model("successor", lang, "universe N; f is the successor, c is 0");
  std::size_t f = lang.index_of("f");
  m.fun = [f](std::size_t s, std::span<const Point> a) -> Point { return s == f ? a[0] + 1 : 0; };
  return m;
}

ComputableModel successor_predecessor_model(const Language& lang) {
  auto m = base_model("successor-predecessor", lang,
                      "universe N; f is the successor, g the predecessor with g(0)=0, c is 0");
  std::size_t f = lang.index_of("f"), g = lang.index_of("g");
  m.fun = [f, g](std::size_t s, std::span<const Point> a) -> Point {
    if (s == f) return a[0] + 1;
    if (s == g) return a[0] == 0 ? 0 : a[0] - 1;
    return 0;
  };
  return m;
}

ComputableModel pair_swap_model(const Language& lang) {
  auto m = base_model("pair-swap", lang, "universe N; f swaps 2k and 2k+1");
  m.fun = [](std::size_t, std::span<const Point> a) -> Point { return a[0] ^ 1u; };
  // Complete pairs go to the first pairs of [n], in order; lone points after.
  m.large_host = [](const std::vector<Point>& a0) {
    std::set<Point> in(a0.begin(), a0.end());
    std::vector<Point> sorted(in.begin(), in.end());
    std::map<Point, Point> img;
    Point next = 0;
    for (auto p : sorted)
      if ((p & 1u) == 0 && in.count(p + 1)) {
        img[p] = next++;
        img[p + 1] = next++;
      }
    for (auto p : sorted)
      if (!img.count(p)) img[p] = next++;
    std::vector<Point> out;
    for (auto p : a0) out.push_back(img[p]);
    return out;
  };
  return m;
}

ComputableModel inverse_order_model(const Language& lang) {
  auto m = base_model("inverse-order", lang, "universe N; prec is the inverse natural order, f the successor");
  m.fun = [](std::size_t, std::span<const Point> a) -> Point { return a[0] + 1; };
  m.rel = [](std::size_t, std::span<const Point> a) -> bool { return a[1] < a[0]; };
  return m;
}

ComputableModel induction_model(const Language& lang) {
  auto m = base_model("naturals-plus-infinity", lang,
                      "universe N plus a top point inf; prec is the natural order with inf on top, P is N, "
                      "s the successor with s(inf)=inf, min is 0, max is inf");
  std::size_t P = lang.index_of("P"), s = lang.index_of("s"), prec = lang.index_of("prec"),
              mn = lang.index_of("min");
  (void)prec;
  m.fun = [s, mn](std::size_t sym, std::span<const Point> a) -> Point {
    if (sym == s) return a[0] == kInfinity ? kInfinity : a[0] + 1;
    if (sym == mn) return 0;
    return kInfinity;  // max
  };
  m.rel = [P](std::size_t sym, std::span<const Point> a) -> bool {
    if (sym == P) return a[0] != kInfinity;
    return a[0] < a[1];
  };
  m.g = [](unsigned) { return 2u; };
  // Finite part onto [k] in order; inf stays.
  m.large_host = [](const std::vector<Point>& a0) {
    std::vector<Point> finite;
    for (auto p : a0)
      if (p != kInfinity) finite.push_back(p);
    auto ranks = compress(finite);
    std::vector<Point> out;
    std::size_t j = 0;
    for (auto p : a0) out.push_back(p == kInfinity ? kInfinity : ranks[j++]);
    return out;
  };
  m.sample_pool = [](unsigned n) {
    auto v = range(3 * n);
    v.push_back(kInfinity);
    return v;
  };
  return m;
}

const char* kPHP = R"(principle PHP {
  language { f/1 fun, c/0 fun }
  exists x y u .
      (f(x)=u & f(y)=u & x!=y)
    | (f(x)=u & c()=u)
})";

const char* kOPHP = R"(principle OPHP {
  language { f/1 fun, g/1 fun, c/0 fun }
  exists x u v w .
      (c()=u & g(u)=v & v!=u)
    | (f(x)=v & c()=v)
    | (f(x)=v & g(v)=w & w!=x)
    | (c()=u & u!=x & g(x)=v & f(v)=w & w!=x)
})";

const char* kLPHP = R"(principle LPHP {
  language { f/1 fun, g/1 fun, c/0 fun }
  exists x u v w .
      (c()=u & g(u)=v & v!=u)
    | (f(x)=v & c()=v)
    | (f(x)=v & g(v)=w & w!=x)
})";

const char* kWPHP = R"(principle WPHP {
  language { f/2 fun }
  exists x y x' y' z .
      (f(x,y)=z & f(x',y')=z & x!=x')
    | (f(x,y)=z & f(x',y')=z & y!=y')
})";

const char* kWPHP2 = R"(principle WPHP' {
  language { f/1 fun, g/1 fun }
  exists x y u .
      (f(x)=u & f(y)=u & x!=y)
    | (g(x)=u & g(y)=u & x!=y)
    | (f(x)=u & g(y)=u)
})";

const char* kRPHP = R"(principle rPHP {
  language { g/2 fun, f0/1 fun, f1/1 fun }
  exists x y u v .
      (g(x,y)=u & f0(u)=v & v!=x)
    | (g(x,y)=u & f1(u)=v & v!=y)
})";

const char* kPAR = R"(principle PAR {
  language { f/1 fun }
  exists x u v .
      (f(x)=u & f(u)=v & v!=x)
    | f(x)=x
})";

const char* kHOP = R"(principle HOP {
  language { f/1 fun, prec/2 rel }
  exists x y z u .
      prec(x,x)
    | (prec(x,y) & prec(y,z) & !prec(x,z))
    | (f(x)=u & !prec(u,x))
})";

const char* kIND = R"(principle IND {
  language { P/1 rel, s/1 fun, prec/2 rel, min/0 fun, max/0 fun }
  exists x y z u v .
      prec(x,x)
    | (prec(x,y) & prec(y,z) & !prec(x,z))
    | (!prec(x,y) & !prec(y,x) & x!=y)
    | (min()=u & prec(x,u))
    | (max()=u & prec(u,x))
    | (s(x)=u & prec(x,y) & prec(y,u))
    | (max()=u & u!=x & s(x)=v & !prec(x,v))
    | (min()=u & !P(u))
    | (max()=u & P(u))
    | (P(x) & s(x)=u & !P(u))
})";

// Boolean algebra equations: commutativity and associativity of join and
// meet, both absorption laws, distributivity of meet over join, and the two
// complement laws.
const char* kHAP = R"(principle HAP {
  language { join/2 fun, meet/2 fun, comp/1 fun, f/1 fun, c0/0 fun, c1/0 fun }
  exists x y z u v w t r .
      (join(x,y)=u & join(y,x)=v & u!=v)
    | (meet(x,y)=u & meet(y,x)=v & u!=v)
    | (join(y,z)=u & join(x,u)=v & join(x,y)=w & join(w,z)=t & v!=t)
    | (meet(y,z)=u & meet(x,u)=v & meet(x,y)=w & meet(w,z)=t & v!=t)
    | (meet(x,y)=u & join(x,u)=v & v!=x)
    | (join(x,y)=u & meet(x,u)=v & v!=x)
    | (join(y,z)=u & meet(x,u)=v & meet(x,y)=w & meet(x,z)=t & join(w,t)=r & v!=r)
    | (comp(x)=u & join(x,u)=v & c1()=w & v!=w)
    | (comp(x)=u & meet(x,u)=v & c0()=w & v!=w)
    | (c0()=u & f(u)=v & v!=u)
    | (f(x)=u & meet(u,x)=v & v!=u)
    | (f(x)=x & c0()=u & x!=u)
    | (f(x)=u & c0()=u & x!=u)
})";

const char* kHDP = R"(principle HDP {
  language { prec/2 rel, b/2 fun, c0/0 fun, c1/0 fun }
  exists x y z u v .
      prec(x,x)
    | (prec(x,y) & prec(y,z) & !prec(x,z))
    | (prec(x,y) & b(x,y)=u & !prec(u,y))
    | (prec(x,y) & b(x,y)=u & !prec(x,u))
    | (c0()=u & c1()=v & !prec(u,v))
})";

const char* kITER = R"(principle ITER {
  language { f/1 fun, builtin <, builtin 0 }
  exists y u v .
      (0()=u & f(u)=u)
    | (f(y)=v & v<y)
    | (f(y)=v & y<v & f(v)=v)
})";

std::function<std::optional<std::uint64_t>(unsigned)> closed(std::function<std::uint64_t(std::uint64_t)> f) {
  return [f](unsigned n) -> std::optional<std::uint64_t> { return f(n); };
}

std::vector<PrincipleEntry> make_catalog() {
  std::vector<PrincipleEntry> out;
  auto add = [&](const char* src, std::string title) -> PrincipleEntry& {
    PrincipleEntry e;
    e.sentence = parse_principle(src);
    e.name = e.sentence.name;
    e.title = std::move(title);
    out.push_back(std::move(e));
    return out.back();
  };
  {
    auto& e = add(kPHP, "pigeonhole principle, n to n-1");
    e.model = successor_model(e.sentence.language);
    e.weak = false;
    e.strong = true;
    e.determinacy = closed([](std::uint64_t n) { return n + 1; });
    e.determinacy_text = "n+1 = s_L(n)";
    e.notes = "negation has a 1-large model";
  }
  for (const char* src : {kOPHP, kLPHP}) {
    auto& e = add(src, src == kOPHP ? "onto pigeonhole principle" : "left pigeonhole principle");
    e.model = successor_predecessor_model(e.sentence.language);
    e.weak = false;
    e.strong = true;
    e.determinacy = closed([](std::uint64_t n) { return 2 * n + 1; });
    e.determinacy_text = "2n+1 = s_L(n)";
    e.notes = "negation has a 1-large model";
  }
  {
    auto& e = add(kWPHP, "weak pigeonhole principle, n^2 to n");
    e.weak = true;
    e.strong = false;
    e.determinacy = closed([](std::uint64_t n) { return n + 1; });
    e.determinacy_text = "n+1 = sqrt(s_L(n)) + 1";
    e.notes = "any model of the negation overflows by at least n^2-n values on n points";
  }
  {
    auto& e = add(kWPHP2, "weak pigeonhole principle, 2n to n");
    e.weak = false;
    e.strong = false;
    e.determinacy = closed([](std::uint64_t n) { return n + 1; });
    e.determinacy_text = "n+1 = s_L(n)/2 + 1";
  }
  {
    auto& e = add(kRPHP, "retraction pigeonhole principle, n to n^2");
    e.weak = false;
    e.strong = false;
    e.validity = "n >= 2";
    e.notes = "false on [1]: the one-point structure has a retraction";
  }
  {
    auto& e = add(kPAR, "parity principle");
    e.model = pair_swap_model(e.sentence.language);
    e.weak = false;
    e.strong = true;
    e.validity = "odd n only";
    e.valid_in_finite = false;
    e.determinacy = [](unsigned n) -> std::optional<std::uint64_t> {
      if (n % 2 == 1) return n;
      return std::nullopt;
    };
    e.determinacy_text = "n for odd n; recorded as 0 for even n, where the principle is not valid";
    e.notes = "negation has a 1-large model";
  }
  {
    auto& e = add(kHOP, "Herbrandized ordering principle");
    e.model = inverse_order_model(e.sentence.language);
    e.weak = false;
    e.strong = true;
    e.determinacy = closed([](std::uint64_t n) { return n * n + n; });
    e.determinacy_text = "n^2+n = s_L(n)";
    e.notes = "negation has a 1-large model; the constants 0,1 sometimes listed with this language do not "
              "occur in the sentence and are omitted";
  }
  {
    auto& e = add(kIND, "induction principle");
    e.model = induction_model(e.sentence.language);
    e.weak = false;
    e.strong = true;
    e.determinacy = [](unsigned n) -> std::optional<std::uint64_t> {
      if (n <= 1) return std::nullopt;
      return std::uint64_t{n} * n + 2 * n + 2;
    };
    e.determinacy_text = "n^2+2n+2 = s_L(n) for n > 1";
    e.notes = "negation has a 2-large model";
  }
  {
    auto& e = add(kHAP, "Herbrandized atomicity principle");
    e.weak = false;
    e.strong = false;
    e.validity = "n >= 2";
    e.determinacy_text = "> s_L(n) - log2(n) for n a power of 2";
    e.notes = "false on [1], the one-point Boolean algebra; includes the disjunct f(x)=0 & x!=0: without it every finite Boolean algebra with f "
              "constantly 0 falsifies the sentence";
  }
  {
    auto& e = add(kHDP, "Herbrandized discreteness principle");
    e.weak = false;
    e.strong = false;
    e.determinacy_text = "> 2n^2 - 2n for n > 1";
  }
  {
    auto& e = add(kITER, "iteration principle");
    e.weak = false;
    e.determinacy = closed([](std::uint64_t n) { return n; });
    e.determinacy_text = "n = s_L(n)";
    e.notes = "uses the built-in order and numeral 0; no model registered";
  }
  return out;
}

const std::vector<PrincipleEntry>& catalog() {
  static const std::vector<PrincipleEntry> c = make_catalog();
  return c;
}

std::string flag(const std::optional<bool>& b) { return b ? (*b ? "yes" : "no") : "unknown"; }

}  // namespace

std::vector<std::string> builtin_names() {
  std::vector<std::string> out;
  for (const auto& e : catalog()) out.push_back(e.name);
  return out;
}

const PrincipleEntry& builtin(const std::string& name) {
  for (const auto& e : catalog())
    if (e.name == name) return e;
  throw ContractError("unknown principle '" + name + "'");
}

std::string describe(const PrincipleEntry& e) {
  std::ostringstream os;
  os << render_principle(e.sentence) << "\n";
  os << "# " << e.title << "\n";
  os << "# valid in the finite: " << (e.validity.empty() ? "yes" : e.validity) << "\n";
  os << "# weak: " << flag(e.weak) << ", strong: " << flag(e.strong) << "\n";
  if (!e.determinacy_text.empty()) os << "# determinacy: " << e.determinacy_text << "\n";
  os << "# formula size: " << formula_size(e.sentence) << ", r_L: " << e.sentence.language.r() << "\n";
  if (e.model) os << "# model: " << e.model->name << " (" << e.model->description << ")\n";
  if (!e.notes.empty()) os << "# " << e.notes << "\n";
  return os.str();
}

}  // namespace finprin
