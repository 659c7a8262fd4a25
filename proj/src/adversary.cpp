#include "finprin/adversary.hpp"

#include <algorithm>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "finprin/determinacy.hpp"

namespace finprin {

std::string to_string(FamilyReceipt::Branch b) { return b == FamilyReceipt::Branch::Core ? "core" : "small"; }

Session::Session(const BasicSentence& phi, const ComputableModel& model, unsigned n, std::optional<std::size_t> budget)
    : phi_(phi) {
  if (!(phi.language == model.language)) throw ContractError("model language differs from the principle's");
  const unsigned r = phi.language.r();
  if (n < r) throw ContractError("session needs n >= r_L = " + std::to_string(r));
  ctx_ = make_context(model, n);
  p_ = PartialOracle(phi.language, n);
  budget_ = budget ? *budget : n / r - 1;
}

namespace {

const ComputableModel& model_of(const PrincipleEntry& e) {
  if (!e.model) throw ContractError("no model registered for " + e.name);
  return *e.model;
}

}  // namespace

Session::Session(const PrincipleEntry& entry, unsigned n, std::optional<std::size_t> budget)
    : Session(entry.sentence, model_of(entry), n, budget) {}

bool Session::answer(const RelevantKey& k) {
  if (!p_.space.is_relevant(k)) return false;
  const std::size_t i = p_.space.index(k);
  if (p_.known(i)) return p_.state[i] == 1;
  if (used_ >= budget_) throw BudgetExhausted("budget of " + std::to_string(budget_) + " point queries exhausted");
  if (!(static_cast<std::uint64_t>(ctx_.n) > static_cast<std::uint64_t>(norm_) * ctx_.r_L))
    throw BudgetExhausted("no room to define another cell: n=" + std::to_string(ctx_.n) + " <= |p|*r_L = " +
                          std::to_string(norm_ * ctx_.r_L));
  p_ = extend_define(ctx_, p_, k.symbol, k.tuple);
  ++used_;
  ++norm_;
  return p_.state[i] == 1;
}

FamilyReceipt Session::register_family(const TreeFamily& f, const BasicSentence& phi_t,
                                       std::optional<std::uint64_t> d_t) {
  FamilyReceipt rec;
  rec.norm_before = norm_;
  const std::uint64_t s_t = s_L(f.target, f.m);
  if (!d_t) {
    for (const auto& name : builtin_names()) {
      const auto& e = builtin(name);
      if (e.sentence == phi_t && e.determinacy) {
        d_t = e.determinacy(f.m);
        if (d_t) break;
      }
    }
  }
  if (!d_t) d_t = determinacy(phi_t, f.m).d;
  if (s_t >= 2ull * f.b0 * *d_t) {
    CoreResult r = core_extend(ctx_, p_, f, phi_t, *d_t);
    p_ = std::move(r.q);
    rec.branch = FamilyReceipt::Branch::Core;
    rec.iterations = r.iterations;
  } else {
    p_ = complete_trees_small(ctx_, p_, f);
    rec.branch = FamilyReceipt::Branch::Small;
  }
  norm_ = p_.norm();
  rec.norm_after = norm_;
  families_.emplace_back(f, phi_t);
  return rec;
}

Refutation Session::refute(const SolverClaim& c) {
  if (c.disjunct >= phi_.matrix.size()) throw ContractError("claimed disjunct out of range");
  if (c.values.size() != phi_.vars.size())
    throw ContractError("claim needs " + std::to_string(phi_.vars.size()) + " values");
  for (unsigned v : c.values)
    if (v >= ctx_.n) throw ContractError("claimed value " + std::to_string(v) + " outside [n]");
  const auto& lits = phi_.matrix[c.disjunct];
  const std::size_t J = lits.size();
  if (!(static_cast<std::uint64_t>(ctx_.n) > (norm_ + J - 1) * ctx_.r_L))
    throw HypothesisError("n > (|p| + |J| - 1) * r_L fails: " + std::to_string(ctx_.n) + " <= (" +
                          std::to_string(norm_) + " + " + std::to_string(J) + " - 1) * " + std::to_string(ctx_.r_L));
  for (const Literal& l : lits) {
    if (l.kind != Literal::Kind::Rel && l.kind != Literal::Kind::Fun) continue;
    std::vector<unsigned> args;
    for (unsigned v : l.args) args.push_back(c.values[v]);
    p_ = extend_define(ctx_, p_, l.symbol, args);
  }
  norm_ = p_.norm();
  PartialStructure b = partial_of_oracle(p_);
  for (std::size_t j = 0; j < J; ++j) {
    if (literal_value(b, lits[j], c.values) != Truth::False) continue;
    std::string text = render_literal(lits[j], phi_) + " with";
    for (std::size_t v = 0; v < phi_.vars.size(); ++v) text += " " + phi_.vars[v] + "=" + std::to_string(c.values[v]);
    return {j, text};
  }
  throw std::logic_error("claimed disjunct holds in a structure embedding into a falsifying model");
}

bool Session::invariants_hold() const {
  return embeds(ctx_, p_) && embeds_by_search(ctx_, p_) && !verifies(partial_of_oracle(p_), phi_);
}

// ---------------------------------------------------------------------------
// Solver fixtures

namespace {

enum class Strategy { Greedy, Random, BitProbe };

struct SolverState {
  BasicSentence phi;
  PartialOracle view;
  std::size_t max_cells = 0;
  std::size_t cells = 0;
  bool exhausted = false;
  Strategy strategy = Strategy::Greedy;
  std::mt19937_64 rng;
  std::vector<RelevantKey> pending;
  std::optional<RelevantKey> outstanding;

  // Best claim against the current view: no false literal, most true ones.
  struct Candidate {
    SolverClaim claim;
    std::size_t score = 0;
    bool found = false;
  };

  Candidate best() {
    PartialStructure b = partial_of_oracle(view);
    const unsigned n = view.space.n();
    std::vector<unsigned> dom = active_points(b);
    for (int extra = 0; extra < 2; ++extra) dom.push_back(static_cast<unsigned>(rng() % n));
    std::sort(dom.begin(), dom.end());
    dom.erase(std::unique(dom.begin(), dom.end()), dom.end());
    const std::size_t k = phi.vars.size();
    Candidate best;
    std::vector<unsigned> vals(k);
    auto consider = [&](std::size_t d) {
      std::size_t score = 0;
      for (const Literal& l : phi.matrix[d]) {
        Truth t = literal_value(b, l, vals);
        if (t == Truth::False) return;
        score += t == Truth::True;
      }
      if (!best.found || score > best.score) best = {{d, vals}, score, true};
    };
    const std::uint64_t total = ipow(dom.size(), static_cast<unsigned>(k));
    for (std::size_t d = 0; d < phi.matrix.size(); ++d) {
      if (total <= 2000) {
        for (std::uint64_t code = 0; code < total; ++code) {
          std::uint64_t c = code;
          for (std::size_t i = 0; i < k; ++i) {
            vals[i] = dom[c % dom.size()];
            c /= dom.size();
          }
          consider(d);
        }
      } else {
        for (int s = 0; s < 300; ++s) {
          for (std::size_t i = 0; i < k; ++i) vals[i] = dom[rng() % dom.size()];
          consider(d);
        }
      }
    }
    if (!best.found) {
      best.claim.disjunct = rng() % phi.matrix.size();
      best.claim.values.resize(k);
      for (auto& v : best.claim.values) v = static_cast<unsigned>(rng() % n);
    }
    return best;
  }

  std::vector<RelevantKey> cell_keys(std::size_t sym, const std::vector<unsigned>& args) const {
    std::vector<RelevantKey> out;
    const Symbol& s = phi.language[sym];
    if (!s.is_function()) {
      out.push_back({RelevantKey::Kind::Rel, sym, args, 0});
      return out;
    }
    const unsigned w = strategy == Strategy::BitProbe ? 1 : view.space.bits();
    for (unsigned i = 0; i < w; ++i) out.push_back({RelevantKey::Kind::FunBit, sym, args, i});
    return out;
  }

  bool cell_known(std::size_t sym, const std::vector<unsigned>& args) const {
    RelevantKey k{phi.language[sym].is_function() ? RelevantKey::Kind::FunBit : RelevantKey::Kind::Rel, sym, args, 0};
    return view.known(view.space.index(k));
  }

  std::optional<std::pair<std::size_t, std::vector<unsigned>>> next_cell() {
    const unsigned n = view.space.n();
    if (strategy == Strategy::Greedy) {
      Candidate c = best();
      for (const Literal& l : phi.matrix[c.claim.disjunct]) {
        if (l.kind != Literal::Kind::Rel && l.kind != Literal::Kind::Fun) continue;
        std::vector<unsigned> args;
        for (unsigned v : l.args) args.push_back(c.claim.values[v]);
        if (!cell_known(l.symbol, args)) return std::make_pair(l.symbol, args);
      }
    }
    for (int tries = 0; tries < 64; ++tries) {
      std::size_t sym = rng() % phi.language.size();
      std::vector<unsigned> args(phi.language[sym].arity);
      for (auto& a : args) a = static_cast<unsigned>(rng() % n);
      if (!cell_known(sym, args)) return std::make_pair(sym, args);
    }
    return std::nullopt;
  }

  SolverMove move(std::optional<bool> last) {
    if (outstanding) {
      if (last) {
        view.state[view.space.index(*outstanding)] = *last ? 1 : 0;
      } else {
        exhausted = true;
        pending.clear();
      }
      outstanding.reset();
    }
    if (pending.empty() && !exhausted && cells < max_cells) {
      if (auto c = next_cell()) {
        pending = cell_keys(c->first, c->second);
        std::reverse(pending.begin(), pending.end());
        ++cells;
      }
    }
    if (!pending.empty()) {
      SolverMove m;
      m.key = pending.back();
      pending.pop_back();
      outstanding = m.key;
      return m;
    }
    SolverMove m;
    m.is_claim = true;
    m.claim = best().claim;
    return m;
  }
};

Solver make_solver(Strategy st, const BasicSentence& phi, unsigned n, std::size_t max_cells, std::uint64_t seed) {
  auto s = std::make_shared<SolverState>();
  s->phi = phi;
  s->view = PartialOracle(phi.language, n);
  s->max_cells = max_cells;
  s->strategy = st;
  s->rng.seed(seed);
  return [s](std::optional<bool> last) { return s->move(last); };
}

}  // namespace

Solver greedy_solver(const BasicSentence& phi, unsigned n, std::size_t max_cells, std::uint64_t seed) {
  return make_solver(Strategy::Greedy, phi, n, max_cells, seed);
}

Solver random_solver(const BasicSentence& phi, unsigned n, std::size_t max_cells, std::uint64_t seed) {
  return make_solver(Strategy::Random, phi, n, max_cells, seed);
}

Solver bit_probe_solver(const BasicSentence& phi, unsigned n, std::size_t max_cells, std::uint64_t seed) {
  return make_solver(Strategy::BitProbe, phi, n, max_cells, seed);
}

PlayResult play(Session& s, const Solver& solver) {
  PlayResult r;
  std::optional<bool> last;
  bool budget_hit = false;
  for (std::size_t step = 0; step < 1'000'000; ++step) {
    SolverMove m = solver(last);
    if (m.is_claim) {
      r.refutation = s.refute(m.claim);
      r.outcome = PlayResult::Outcome::Refuted;
      return r;
    }
    ++r.queries;
    if (budget_hit) {
      r.outcome = PlayResult::Outcome::Budget;
      return r;
    }
    try {
      last = s.answer(m.key);
    } catch (const BudgetExhausted&) {
      budget_hit = true;
      last.reset();
    }
  }
  throw std::logic_error("solver neither claimed nor stopped");
}

int serve(Session& s, std::istream& in, std::ostream& out) {
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string cmd;
    if (!(ls >> cmd) || cmd[0] == '#') continue;
    try {
      if (cmd == "Q") {
        std::string key, extra;
        if (!(ls >> key) || (ls >> extra)) throw ContractError("usage: Q <key>");
        RelevantKey k = s.oracle().space.parse_key(key);
        try {
          bool bit = s.answer(k);
          out << "A " << (bit ? 1 : 0) << "\n";
        } catch (const BudgetExhausted&) {
          out << "BUDGET\n";
        }
      } else if (cmd == "CLAIM") {
        SolverClaim c;
        long long v;
        if (!(ls >> v) || v < 0) throw ContractError("usage: CLAIM i a0 a1 ...");
        c.disjunct = static_cast<std::size_t>(v);
        while (ls >> v) {
          if (v < 0) throw ContractError("claimed values must be natural numbers");
          c.values.push_back(static_cast<unsigned>(v));
        }
        if (!ls.eof()) throw ContractError("claimed values must be natural numbers");
        Refutation r = s.refute(c);
        out << "REFUTED " << r.literal << "\n";
        out.flush();
        return 0;
      } else {
        throw ContractError("unknown command '" + cmd + "'");
      }
    } catch (const Error& e) {
      out << "ERROR " << e.what() << "\n";
    }
    out.flush();
  }
  return 1;
}

}  // namespace finprin
