#include "finprin/density.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"

namespace finprin {

DensityContext make_context(const ComputableModel& model, unsigned n) {
  if (n == 0) throw ContractError("density context needs n >= 1");
  DensityContext ctx;
  ctx.model = model;
  ctx.n = n;
  ctx.r_L = model.language.r();
  ctx.e = model.canonical_slice(n);
  if (ctx.e.size() != n) throw ContractError("canonical slice has the wrong size");
  return ctx;
}

namespace {

std::vector<Point> images_of(const std::vector<Point>& e, const std::vector<unsigned>& args) {
  std::vector<Point> out(args.size());
  for (std::size_t i = 0; i < args.size(); ++i) out[i] = e[args[i]];
  return out;
}

std::unordered_map<Point, unsigned> inverse(const std::vector<Point>& e) {
  std::unordered_map<Point, unsigned> inv;
  inv.reserve(e.size() * 2);
  for (std::size_t i = 0; i < e.size(); ++i)
    if (!inv.emplace(e[i], static_cast<unsigned>(i)).second) throw ContractError("embedding is not injective");
  return inv;
}

std::string fmt(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

bool embeds(const DensityContext& ctx, const PartialOracle& p) {
  if (ctx.e.size() != p.space.n()) return false;
  std::unordered_map<Point, unsigned> inv;
  try {
    inv = inverse(ctx.e);
  } catch (const ContractError&) {
    return false;
  }
  PartialStructure b = partial_of_oracle(p);
  const Language& L = b.language();
  for (std::size_t s = 0; s < L.size(); ++s)
    for (std::size_t t = 0; t < b.block_size(s); ++t) {
      int v = b.get(b.offset(s) + t);
      if (v == kUndef) continue;
      auto args = images_of(ctx.e, b.tuple_of(s, t));
      if (L[s].is_function()) {
        if (ctx.model.fun(s, args) != ctx.e[v]) return false;
      } else if (ctx.model.rel(s, args) != (v == 1)) {
        return false;
      }
    }
  return true;
}

bool embeds_by_search(const DensityContext& ctx, const PartialOracle& p) {
  PartialStructure b = partial_of_oracle(p);
  std::vector<unsigned> act = active_points(b);
  PartialStructure src = induced_substructure(b, act);
  std::vector<Point> pts;
  for (unsigned a : act) pts.push_back(ctx.e[a]);
  PartialStructure dst = induced_substructure(ctx.model, pts);
  std::vector<int> hint(act.size());
  for (std::size_t i = 0; i < act.size(); ++i) hint[i] = static_cast<int>(i);
  return find_embedding(src, dst, &hint).has_value();
}

PartialStructure pullback(const ComputableModel& model, const std::vector<Point>& e) {
  auto inv = inverse(e);
  const Language& L = model.language;
  PartialStructure b(L, static_cast<unsigned>(e.size()));
  std::vector<Point> args;
  for (std::size_t s = 0; s < L.size(); ++s)
    for (std::size_t t = 0; t < b.block_size(s); ++t) {
      auto tb = b.tuple_of(s, t);
      args.resize(tb.size());
      for (std::size_t i = 0; i < tb.size(); ++i) args[i] = e[tb[i]];
      if (L[s].is_function()) {
        auto it = inv.find(model.fun(s, args));
        if (it != inv.end()) b.set_unchecked(b.offset(s) + t, static_cast<int>(it->second));
      } else {
        b.set_unchecked(b.offset(s) + t, model.rel(s, args) ? 1 : 0);
      }
    }
  return b;
}

PartialOracle extend_define(DensityContext& ctx, const PartialOracle& p, std::size_t sym,
                            const std::vector<unsigned>& args) {
  const Language& L = p.space.language();
  if (!(L == ctx.model.language)) throw ContractError("oracle language differs from the model's");
  if (p.space.n() != ctx.n) throw ContractError("oracle universe differs from the context's");
  if (sym >= L.size() || args.size() != L[sym].arity) throw ContractError("bad symbol or arity");
  for (unsigned a : args)
    if (a >= ctx.n) throw ContractError("argument " + std::to_string(a) + " outside [n]");

  std::size_t tuple = 0;
  for (unsigned a : args) tuple = tuple * ctx.n + a;
  const std::size_t b = p.space.block(sym, tuple);
  if (p.known(b)) return p;

  const std::size_t norm = p.norm();
  if (!(static_cast<std::uint64_t>(ctx.n) > static_cast<std::uint64_t>(norm) * ctx.r_L))
    throw HypothesisError("n > |p| * r_L fails: " + std::to_string(ctx.n) + " <= " + std::to_string(norm) + " * " +
                          std::to_string(ctx.r_L));

  PartialOracle q = p;
  auto img = images_of(ctx.e, args);
  if (!L[sym].is_function()) {
    q.state[b] = ctx.model.rel(sym, img) ? 1 : 0;
    return q;
  }
  Point v = ctx.model.fun(sym, img);
  auto it = std::find(ctx.e.begin(), ctx.e.end(), v);
  unsigned pre;
  if (it != ctx.e.end()) {
    pre = static_cast<unsigned>(it - ctx.e.begin());
  } else {
    // A point inactive in B(p) and not among the arguments takes value v.
    std::vector<unsigned> w = active_points(partial_of_oracle(p));
    std::vector<char> busy(ctx.n, 0);
    for (unsigned a : w) busy[a] = 1;
    for (unsigned a : args) busy[a] = 1;
    auto fresh = std::find(busy.begin(), busy.end(), 0);
    if (fresh == busy.end())
      throw HypothesisError("no point outside the active set and the arguments is left (n=" + std::to_string(ctx.n) +
                            ", |p|=" + std::to_string(norm) + ")");
    pre = static_cast<unsigned>(fresh - busy.begin());
    ctx.e[pre] = v;
  }
  for (std::size_t i = 0; i < p.space.bits(); ++i) q.state[b + i] = static_cast<std::int8_t>((pre >> i) & 1u);
  return q;
}

namespace {

std::uint64_t family_bound(const TreeFamily& f) {
  return static_cast<std::uint64_t>(f.b0) * f.target.size() * ipow(f.m, f.target.r() - 1);
}

}  // namespace

PartialOracle complete_trees_small(DensityContext& ctx, const PartialOracle& p, const TreeFamily& f) {
  f.validate();
  if (!(f.source == p.space.language())) throw ContractError("family source differs from the oracle language");
  const std::uint64_t bound = family_bound(f);
  const std::size_t norm = p.norm();
  if (!(ctx.n > ctx.r_L * (norm + bound)))
    throw HypothesisError("n > r_L * (|p| + b0*|L~|*m^(r_L~ - 1)) fails: " + std::to_string(ctx.n) + " <= " +
                          std::to_string(ctx.r_L) + " * (" + std::to_string(norm) + " + " + std::to_string(bound) +
                          ")");
  PartialOracle q = p;
  PartialStructure shape(f.target, f.m);
  for (std::size_t s = 0; s < f.target.size(); ++s)
    for (std::size_t t = 0; t < shape.block_size(s); ++t) {
      auto in = shape.tuple_of(s, t);
      for (;;) {
        Run r = run_partial(f.trees[s], in, q);
        if (r.complete()) break;
        const RelevantKey& k = r.queries.back();
        q = extend_define(ctx, q, k.symbol, k.tuple);
      }
    }
  return q;
}

PartialOracle prune_to_witness(const PartialOracle& q, const PartialOracle& p, const TreeFamily& f,
                               const BasicSentence& phi_t) {
  if (!extends(q, p)) throw ContractError("prune_to_witness: q does not extend p");
  if (!(phi_t.language == f.target)) throw ContractError("principle language differs from the family's target");
  PartialStructure c = build_C(f, q);
  Matcher mt(phi_t);
  auto w = mt.find(c);
  if (!w) throw ContractError("prune_to_witness: C(q) does not verify the principle");

  std::vector<char> keep(q.state.size(), 0);
  for (std::size_t i = 0; i < q.state.size(); ++i) keep[i] = p.known(i);
  for (const Literal& l : phi_t.matrix[w->disjunct]) {
    if (l.kind != Literal::Kind::Rel && l.kind != Literal::Kind::Fun) continue;
    std::vector<unsigned> in;
    for (unsigned v : l.args) in.push_back(w->values[v]);
    Run r = run_partial(f.trees[l.symbol], in, q);
    for (const RelevantKey& k : r.queries) {
      if (!q.space.is_relevant(k)) continue;
      auto [sym, t] = q.space.cell_of(q.space.index(k));
      std::size_t b = q.space.block(sym, t);
      for (std::size_t i = 0; i < q.space.block_width(sym); ++i) keep[b + i] = 1;
    }
  }
  PartialOracle out = q;
  for (std::size_t i = 0; i < out.state.size(); ++i)
    if (!keep[i]) out.state[i] = -1;
  if (!mt.verifies(build_C(f, out))) throw std::logic_error("pruned oracle lost the witness");
  return out;
}

CoreResult core_extend(DensityContext& ctx, const PartialOracle& p, const TreeFamily& f, const BasicSentence& phi_t,
                       std::uint64_t d_t, const TraceSink& trace) {
  f.validate();
  if (!(f.source == p.space.language())) throw ContractError("family source differs from the oracle language");
  if (!(phi_t.language == f.target)) throw ContractError("principle language differs from the family's target");
  if (!embeds(ctx, p)) throw ContractError("B(p) does not embed into the model under the context's embedding");
  if (!ctx.model.g) throw HypothesisError("(i) fails: the model declares no largeness bound g");

  const std::uint64_t n = ctx.n, b0 = f.b0, r = ctx.r_L, g = ctx.model.g(ctx.n);
  const std::uint64_t norm_p = p.norm();
  const std::uint64_t s_t = s_L(f.target, f.m);
  const std::uint64_t need = (2 * b0 * b0 * r + 1) * g + r * norm_p;
  if (n < need)
    throw HypothesisError("(ii) n >= (2*b0^2*r_L + 1)*g(n) + r_L*|p| fails: " + std::to_string(n) + " < (2*" +
                          std::to_string(b0) + "^2*" + std::to_string(r) + " + 1)*" + std::to_string(g) + " + " +
                          std::to_string(r) + "*" + std::to_string(norm_p) + " = " + std::to_string(need));
  if (s_t < 2 * b0 * d_t)
    throw HypothesisError("(iii) s_L~(m) >= 2*b0*d~(m) fails: " + std::to_string(s_t) + " < 2*" + std::to_string(b0) +
                          "*" + std::to_string(d_t) + " = " + std::to_string(2 * b0 * d_t));

  Matcher mt(phi_t);
  PartialStructure shape(f.target, f.m);
  std::vector<std::pair<std::size_t, std::size_t>> X;
  for (std::size_t s = 0; s < f.target.size(); ++s)
    for (std::size_t t = 0; t < shape.block_size(s); ++t) X.emplace_back(s, t);

  const std::vector<unsigned> w_n = active_points(partial_of_oracle(p));
  std::vector<char> in_w(n, 0);
  for (unsigned a : w_n) in_w[a] = 1;
  const double slack = b0 * static_cast<double>(g) * static_cast<double>(s_t) * r /
                       (static_cast<double>(n) - static_cast<double>(norm_p) * r - static_cast<double>(g));

  std::vector<Point> e = ctx.e;
  PartialOracle q = p;
  for (std::size_t iter = 0; iter <= b0; ++iter) {
    // Re-embed B(q) into an n-point host of bounded overflow.
    std::vector<Point> e_star = ctx.model.large_host(e);
    PartialOracle q_star;
    bool ok = std::set<Point>(e_star.begin(), e_star.end()).size() == n;
    if (ok) {
      q_star = oracle_of_partial(pullback(ctx.model, e_star));
      ok = extends(q_star, q);
    }
    if (!ok) {
      std::vector<Point> slice = ctx.model.canonical_slice(ctx.n);
      auto emb = find_embedding(partial_of_oracle(q), induced_substructure(ctx.model, slice));
      if (!emb) throw std::logic_error("no embedding of B(q) into the canonical slice");
      for (std::size_t i = 0; i < n; ++i) e_star[i] = slice[(*emb)[i]];
      q_star = oracle_of_partial(pullback(ctx.model, e_star));
    }

    PartialStructure c = build_C(f, q_star);
    nlohmann::ordered_json line;
    line["iteration"] = iter;
    line["X"] = X.size();
    line["norm_q_star"] = q_star.norm();
    line["C_size"] = c.size();
    if (mt.verifies(c)) {
      CoreResult res;
      res.q = prune_to_witness(q_star, p, f, phi_t);
      res.iterations = iter;
      res.unpruned_norm = q_star.norm();
      ctx.e = e_star;
      line["verified"] = true;
      line["norm_q"] = res.q.norm();
      if (trace) trace(line.dump());
      return res;
    }
    if (c.size() >= d_t)
      throw HypothesisError("supplied determinacy " + std::to_string(d_t) + " is too small: C has size " +
                            std::to_string(c.size()) + " but does not verify");

    std::vector<Point> host(e_star.begin(), e_star.end());
    std::sort(host.begin(), host.end());
    std::vector<Point> V = overflow_set(ctx.model, host);
    if (V.size() > g)
      throw HypothesisError("(i) fails: host overflow " + std::to_string(V.size()) + " exceeds g(n) = " +
                            std::to_string(g));

    PartialStructure b_star = partial_of_oracle(q_star);
    std::vector<Run> runs;
    std::vector<std::size_t> Y;
    for (std::size_t x = 0; x < X.size(); ++x) {
      auto [s, t] = X[x];
      runs.push_back(run_partial(f.trees[s], shape.tuple_of(s, t), q_star));
      if (!runs.back().complete()) Y.push_back(x);
    }
    // Points of [n] each pair of Y touches.
    std::vector<std::vector<unsigned>> touched(X.size());
    std::vector<std::size_t> count(n, 0);
    for (std::size_t x : Y) {
      std::set<unsigned> pts;
      for (const RelevantKey& k : runs[x].queries) {
        if (!q_star.space.is_relevant(k)) continue;
        pts.insert(k.tuple.begin(), k.tuple.end());
        if (k.kind == RelevantKey::Kind::FunBit) {
          int v = b_star.get(k.symbol, k.tuple);
          if (v != kUndef) pts.insert(static_cast<unsigned>(v));
        }
      }
      touched[x].assign(pts.begin(), pts.end());
      for (unsigned a : pts) ++count[a];
    }
    std::vector<unsigned> R;
    for (unsigned a = 0; a < n; ++a)
      if (!in_w[a]) R.push_back(a);
    if (R.size() < V.size()) throw std::logic_error("fewer free points than overflow values");
    std::stable_sort(R.begin(), R.end(), [&](unsigned a, unsigned b) { return count[a] < count[b]; });
    std::vector<unsigned> chosen(R.begin(), R.begin() + static_cast<std::ptrdiff_t>(V.size()));
    std::vector<char> is_chosen(n, 0);
    for (unsigned a : chosen) is_chosen[a] = 1;

    std::vector<std::pair<std::size_t, std::size_t>> X_next;
    std::vector<std::size_t> prev_len;
    for (std::size_t x : Y) {
      bool hit = std::any_of(touched[x].begin(), touched[x].end(), [&](unsigned a) { return is_chosen[a]; });
      if (!hit) {
        X_next.push_back(X[x]);
        prev_len.push_back(runs[x].answers.size());
      }
    }
    const double bound = static_cast<double>(X.size()) - static_cast<double>(d_t) - slack;
    line["Y"] = Y.size();
    line["V"] = V;
    line["r"] = chosen;
    line["X_next"] = X_next.size();
    line["shrink_bound"] = bound;
    if (trace) trace(line.dump());
    if (!(static_cast<double>(X_next.size()) > bound))
      throw std::logic_error("shrink inequality violated: |X'| = " + std::to_string(X_next.size()) + " <= " + fmt(bound));

    std::vector<Point> e_next = e_star;
    for (std::size_t j = 0; j < V.size(); ++j) e_next[chosen[j]] = V[j];
    PartialOracle q_next = oracle_of_partial(pullback(ctx.model, e_next));
    if (!extends(q_next, p)) throw std::logic_error("rewired oracle does not extend p");
    for (std::size_t i = 0; i < X_next.size(); ++i) {
      auto [s, t] = X_next[i];
      Run rr = run_partial(f.trees[s], shape.tuple_of(s, t), q_next);
      if (rr.answers.size() <= prev_len[i] && !rr.complete())
        throw std::logic_error("rewiring did not prolong a surviving run");
    }
    X = std::move(X_next);
    q = std::move(q_next);
    e = std::move(e_next);
  }
  throw std::logic_error("core extension did not reach a verifying structure within b0 + 1 rounds");
}

}  // namespace finprin
