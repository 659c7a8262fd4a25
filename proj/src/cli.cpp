#include "finprin/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "finprin/adversary.hpp"
#include "finprin/catalog.hpp"
#include "finprin/density.hpp"
#include "finprin/determinacy.hpp"
#include "finprin/reduce.hpp"
#include "finprin/translate.hpp"

namespace finprin {

namespace {

using ojson = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ContractError("cannot read '" + path + "'");
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

/// Catalog name, or a file holding a principle in the DSL.
BasicSentence resolve_principle(const std::string& name) {
  for (const auto& b : builtin_names())
    if (b == name) return builtin(name).sentence;
  if (std::filesystem::exists(name)) return parse_principle(read_file(name));
  throw ContractError("unknown principle '" + name + "' (not in the catalog and no such file)");
}

const PrincipleEntry& catalog_entry(const std::string& name) { return builtin(name); }

/// "3", "2..5" or "2,3,7".
std::vector<unsigned> parse_range(const std::string& text) {
  std::vector<unsigned> out;
  auto num = [&](const std::string& s) -> unsigned {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
      throw ContractError("bad number '" + s + "' in range '" + text + "'");
    unsigned long v = std::stoul(s);
    if (v == 0) throw ContractError("universe sizes start at 1");
    return static_cast<unsigned>(v);
  };
  if (auto dots = text.find(".."); dots != std::string::npos) {
    unsigned a = num(text.substr(0, dots)), b = num(text.substr(dots + 2));
    if (a > b) throw ContractError("empty range '" + text + "'");
    for (unsigned k = a; k <= b; ++k) out.push_back(k);
    return out;
  }
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) out.push_back(num(part));
  if (out.empty()) throw ContractError("empty range");
  return out;
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ContractError("cannot write '" + path + "'");
  f << text;
}

ojson witness_json(const BasicSentence& s, const Witness& w) {
  ojson j;
  j["disjunct"] = w.disjunct;
  ojson vals = ojson::object();
  for (std::size_t i = 0; i < s.vars.size(); ++i) vals[s.vars[i]] = w.values[i];
  j["values"] = vals;
  ojson lits = ojson::array();
  for (const Literal& l : s.matrix[w.disjunct]) lits.push_back(render_literal(l, s));
  j["literals"] = lits;
  return j;
}

Witness parse_witness(const std::string& text, const BasicSentence& s) {
  std::istringstream is(text);
  Witness w;
  if (!(is >> w.disjunct)) throw ContractError("witness must start with a disjunct index");
  unsigned v;
  while (is >> v) w.values.push_back(v);
  if (!is.eof()) throw ContractError("witness values must be numbers");
  if (w.disjunct >= s.matrix.size() || w.values.size() != s.vars.size())
    throw ContractError("witness needs a disjunct index below " + std::to_string(s.matrix.size()) + " and " +
                        std::to_string(s.vars.size()) + " values");
  return w;
}

Solver make_solver(const std::string& kind, const BasicSentence& phi, unsigned n, std::size_t cells,
                   std::uint64_t seed) {
  if (kind == "greedy") return greedy_solver(phi, n, cells, seed);
  if (kind == "random") return random_solver(phi, n, cells, seed);
  if (kind == "bitprobe") return bit_probe_solver(phi, n, cells, seed);
  throw ContractError("unknown solver '" + kind + "'");
}

struct Options {
  std::string principle, format = "tsv", mode = "bnb", out_path, cnf, structure, witness, solver = "all", trace;
  std::string n_range = "2";
  unsigned n = 2, m = 16, b0 = 4;
  unsigned core_n = 256, check_n = 3, sample_n = 8;
  std::optional<std::size_t> budget;
  std::size_t samples = 100, plays = 100, families = 100, cells = 0;
  std::uint64_t seed = 1;
  bool unary = false, binary = false, simplify = false, expand = false, check = false;
  std::string target = "WPHP";
};

int cmd_principle_list(std::ostream& out) {
  out << "name\tvalid_in_finite\tweak\tstrong\ttitle\n";
  for (const auto& name : builtin_names()) {
    const auto& e = builtin(name);
    auto flag = [](const std::optional<bool>& b) { return b ? (*b ? "yes" : "no") : "unknown"; };
    out << name << '\t' << (e.valid_in_finite ? "yes" : "no") << '\t' << flag(e.weak) << '\t' << flag(e.strong)
        << '\t' << e.title << '\n';
  }
  return 0;
}

int cmd_principle_show(const Options& o, std::ostream& out) {
  BasicSentence s = resolve_principle(o.principle);
  if (o.format == "json") {
    out << to_json(s) << '\n';
    return 0;
  }
  bool known = false;
  for (const auto& b : builtin_names()) known |= b == o.principle;
  if (known)
    out << describe(builtin(o.principle));
  else
    out << render_principle(s) << "\n# formula size: " << formula_size(s) << ", r_L: " << s.language.r() << "\n";
  return 0;
}

int cmd_determinacy(const Options& o, std::ostream& out) {
  BasicSentence s = resolve_principle(o.principle);
  SearchOptions opt;
  if (o.mode == "exhaustive") opt.mode = SearchMode::Exhaustive;
  else if (o.mode != "bnb") throw ContractError("--mode is exhaustive or bnb");
  if (o.format == "tsv") out << "n\td\ts_L\n";
  for (unsigned n : parse_range(o.n_range)) {
    DeterminacyResult r = determinacy(s, n, opt);
    if (o.format == "json") {
      ojson j;
      j["n"] = n;
      j["d"] = r.d;
      j["s_L"] = r.s_L;
      j["degenerate"] = r.degenerate;
      j["nodes"] = r.nodes;
      j["mode"] = to_string(r.mode);
      if (r.witness) j["witness"] = ojson::parse(to_json(*r.witness));
      out << j.dump() << '\n';
    } else {
      out << n << '\t' << r.d << '\t' << r.s_L << '\n';
    }
  }
  return 0;
}

int cmd_largeness(const Options& o, std::ostream& out) {
  const auto& e = catalog_entry(o.principle);
  if (!e.model) throw ContractError(o.principle + " has no registered model");
  std::mt19937_64 rng(o.seed);
  out << "n\toverflow\tbound\tsamples\tembedded\tmax_host_overflow\tok\n";
  bool all = true;
  for (unsigned n : parse_range(o.n_range)) {
    LargenessReport r = check_largeness(*e.model, n, o.samples, rng);
    all &= r.ok();
    out << n << '\t' << r.overflow << '\t' << r.bound << '\t' << r.samples << '\t' << r.embedded << '\t'
        << r.max_host_overflow << '\t' << (r.ok() ? "yes" : "no") << '\n';
  }
  return all ? 0 : 1;
}

int cmd_translate(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.unary == o.binary) throw ContractError("choose exactly one of --unary and --binary");
  BasicSentence s = resolve_principle(o.principle);
  Translation t = o.unary ? unary_translation(s, o.n) : binary_translation(s, o.n);
  PropFormula f = o.simplify ? simplify_constants(t.formula) : t.formula;
  if (o.expand) f = to_dnf(f);
  const unsigned vars = t.num_vars();
  std::string text;
  if (!o.cnf.empty()) {
    CnfMode mode;
    if (o.cnf == "direct") mode = CnfMode::Direct;
    else if (o.cnf == "tseitin") mode = CnfMode::Tseitin;
    else throw ContractError("--cnf is direct or tseitin");
    Cnf cnf = negation_cnf(f, vars, mode);
    std::vector<std::string> comments{
        "negation of the " + std::string(o.unary ? "unary" : "binary") + " translation of " + s.name + " on [" +
            std::to_string(o.n) + "]",
        "refutation convention: UNSAT iff the translation is a tautology",
        std::string("mode ") + o.cnf + (o.simplify ? ", constants simplified" : "") + (o.expand ? ", expanded" : ""),
        "variables 1.." + std::to_string(vars) + " are keys; " + std::to_string(cnf.num_vars - vars) +
            " auxiliaries above"};
    for (unsigned v = 1; v <= vars; ++v) comments.push_back("var " + std::to_string(v) + " " + t.var_name(v));
    text = to_dimacs(cnf, comments);
    if (o.check) {
      bool sat = cnf.num_vars <= 30 ? satisfiable_exhaustive(cnf) : dpll(cnf).has_value();
      err << (sat ? "SAT" : "UNSAT") << " (" << (cnf.num_vars <= 30 ? "exhaustive" : "dpll") << ")\n";
    }
  } else {
    Metrics m = metrics(f);
    text = "# " + s.name + " n=" + std::to_string(o.n) + " vars=" + std::to_string(vars) +
           " depth=" + std::to_string(m.depth) + " size=" + std::to_string(m.size) + "\n" + render(f, &t) + "\n";
    if (o.check) {
      auto r = check_tautology(f, vars);
      err << (r.tautology ? "tautology" : "not a tautology") << " (" << r.nodes << " nodes)\n";
    }
  }
  write_output(o.out_path, text, out);
  return 0;
}

int cmd_adversary_serve(const Options& o, std::istream& in, std::ostream& out) {
  Session s(catalog_entry(o.principle), o.n, o.budget);
  serve(s, in, out);
  return 0;
}

int cmd_adversary_play(const Options& o, std::ostream& out) {
  const auto& e = catalog_entry(o.principle);
  Session base(e, o.n, o.budget);
  const std::size_t cells = o.cells ? o.cells : base.budget();
  const std::vector<std::string> kinds =
      o.solver == "all" ? std::vector<std::string>{"greedy", "random", "bitprobe"} : std::vector<std::string>{o.solver};
  std::size_t refuted = 0, invariant = 0;
  out << "play\tsolver\toutcome\tqueries\tused\trefutation\n";
  for (std::size_t k = 0; k < o.plays; ++k) {
    Session s = base;
    const std::string& kind = kinds[k % kinds.size()];
    PlayResult r = play(s, make_solver(kind, e.sentence, o.n, cells, o.seed + k));
    bool ok = r.outcome == PlayResult::Outcome::Refuted;
    refuted += ok;
    invariant += s.invariants_hold();
    out << k << '\t' << kind << '\t' << (ok ? "refuted" : "budget") << '\t' << r.queries << '\t' << s.used() << '\t'
        << (r.refutation ? r.refutation->text : "") << '\n';
  }
  out << "# refuted " << refuted << "/" << o.plays << ", invariants held " << invariant << "/" << o.plays << "\n";
  return refuted == o.plays && invariant == o.plays ? 0 : 1;
}

int cmd_core_lemma(const Options& o, std::ostream& out) {
  const auto& host = catalog_entry(o.principle.empty() ? "HOP" : o.principle);
  const auto& weak = catalog_entry(o.target);
  if (!host.model) throw ContractError(host.name + " has no registered model");
  std::uint64_t d_t;
  if (weak.determinacy && weak.determinacy(o.m)) d_t = *weak.determinacy(o.m);
  else d_t = determinacy(weak.sentence, o.m).d;
  const std::size_t bound = o.b0 * formula_size(weak.sentence);
  std::ofstream trace_file;
  TraceSink sink;
  if (!o.trace.empty()) {
    trace_file.open(o.trace);
    if (!trace_file) throw ContractError("cannot write '" + o.trace + "'");
    sink = [&](const std::string& line) { trace_file << line << '\n'; };
  }
  out << "family\titerations\tnorm\tunpruned\tverifies\tembeds\n";
  std::size_t good = 0;
  for (std::size_t k = 0; k < o.families; ++k) {
    DensityContext ctx = make_context(*host.model, o.core_n);
    PartialOracle p(host.sentence.language, o.core_n);
    TreeFamily F = random_family(host.sentence.language, o.core_n, weak.sentence.language, o.m, o.b0, o.seed + k);
    CoreResult r = core_extend(ctx, p, F, weak.sentence, d_t, sink);
    bool v = verifies(build_C(F, r.q), weak.sentence);
    bool emb = embeds(ctx, r.q) && embeds_by_search(ctx, r.q);
    bool ok = v && emb && r.q.norm() <= p.norm() + bound;
    good += ok;
    out << k << '\t' << r.iterations << '\t' << r.q.norm() << '\t' << r.unpruned_norm << '\t' << (v ? "yes" : "no")
        << '\t' << (emb ? "yes" : "no") << '\n';
  }
  out << "# " << good << "/" << o.families << " runs succeeded; norm bound " << bound << "\n";
  return good == o.families ? 0 : 1;
}

int cmd_reduce_list(std::ostream& out) {
  for (const auto& name : builtin_interpretation_names()) {
    const auto& I = builtin_interpretation(name);
    out << name << '\t' << I.source.name << '\t' << I.target.name << '\n';
  }
  return 0;
}

const Interpretation& resolve_interpretation(const std::string& name, Interpretation& storage) {
  for (const auto& b : builtin_interpretation_names())
    if (b == name) return builtin_interpretation(name);
  if (std::filesystem::exists(name)) {
    storage = parse_interpretation(read_file(name));
    return storage;
  }
  throw ContractError("unknown interpretation '" + name + "'");
}

int cmd_reduce(const std::string& action, const Options& o, std::ostream& out) {
  Interpretation storage;
  const Interpretation& I = resolve_interpretation(o.principle, storage);
  if (action == "show") {
    out << render_interpretation(I);
    return 0;
  }
  if (action == "check") {
    ValidityReport r = check_validity_exhaustive(I, o.check_n);
    out << "exhaustive\tn=" << r.n << "\tcases=" << r.cases << "\t" << (r.ok ? "ok" : "FAIL " + r.problem) << "\n";
    if (!r.ok) return 1;
    if (o.samples) {
      ValidityReport s = check_validity_sampled(I, o.sample_n, o.samples, o.seed);
      out << "sampled\tn=" << s.n << "\tcases=" << s.cases << "\t" << (s.ok ? "ok" : "FAIL " + s.problem) << "\n";
      if (!s.ok) return 1;
    }
    return 0;
  }
  if (o.structure.empty()) throw ContractError("--structure is required");
  PartialStructure b = structure_from_json(read_file(o.structure), I.source.language);
  if (action == "apply") {
    out << to_json(apply_interpretation(I, b), 2) << '\n';
    return 0;
  }
  // pullback
  PartialStructure ib = apply_interpretation(I, b);
  Witness w;
  if (o.witness.empty()) {
    auto found = Matcher(I.target).find(ib);
    if (!found) throw Error("the interpreted structure has no " + I.target.name + " witness");
    w = *found;
  } else {
    w = parse_witness(o.witness, I.target);
  }
  Witness back = pullback_solution(I, b, w);
  ojson j;
  j["target"] = witness_json(I.target, w);
  j["source"] = witness_json(I.source, back);
  out << j.dump(2) << '\n';
  return 0;
}

int cmd_solve(const Options& o, std::ostream& out) {
  BasicSentence s = resolve_principle(o.principle);
  if (o.structure.empty()) throw ContractError("--structure is required");
  PartialStructure a = structure_from_json(read_file(o.structure), s.language);
  ojson j;
  auto w = Matcher(s).find(a);
  j["value"] = to_string(eval3(a, s));
  j["verified"] = w.has_value();
  if (w) j["witness"] = witness_json(s, *w);
  out << j.dump(2) << '\n';
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite combinatorial principles: determinacy, translations, adversaries and reductions", "finprin"};
  app.require_subcommand(1);
  Options o;

  auto* principle = app.add_subcommand("principle", "Catalog of principles");
  principle->require_subcommand(1);
  auto* plist = principle->add_subcommand("list", "List catalog principles");
  auto* pshow = principle->add_subcommand("show", "Show a principle (catalog name or DSL file)");
  pshow->add_option("name", o.principle)->required();
  pshow->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json", "tsv"}));

  auto* det = app.add_subcommand("determinacy", "Compute d(n) by complete search");
  det->add_option("name", o.principle)->required();
  det->add_option("--n", o.n_range, "size, range a..b, or list")->required();
  det->add_option("--mode", o.mode, "bnb or exhaustive");
  det->add_option("--format", o.format, "tsv or json")->check(CLI::IsMember({"tsv", "json"}));

  auto* large = app.add_subcommand("largeness", "Overflow and embedding checks of the registered model");
  large->add_option("name", o.principle)->required();
  large->add_option("--n", o.n_range)->required();
  large->add_option("--samples", o.samples);
  large->add_option("--seed", o.seed);

  auto* tr = app.add_subcommand("translate", "Propositional translation on [n]");
  tr->add_option("name", o.principle)->required();
  tr->add_option("--n", o.n)->required()->check(CLI::PositiveNumber);
  tr->add_flag("--unary", o.unary);
  tr->add_flag("--binary", o.binary);
  tr->add_flag("--simplify", o.simplify, "eliminate constants");
  tr->add_flag("--expand", o.expand, "distribute into a disjunction of conjunctions");
  tr->add_option("--cnf", o.cnf, "direct or tseitin: DIMACS of the negation");
  tr->add_flag("--check", o.check, "report tautology / satisfiability on stderr");
  tr->add_option("-o,--out", o.out_path);

  auto* adv = app.add_subcommand("adversary", "Oracle adversary");
  adv->require_subcommand(1);
  auto* serve_cmd = adv->add_subcommand("serve", "Line protocol on stdin/stdout");
  auto* play_cmd = adv->add_subcommand("play", "Run bundled solvers against the adversary");
  for (auto* c : {serve_cmd, play_cmd}) {
    c->add_option("name", o.principle)->required();
    c->add_option("--n", o.n)->required()->check(CLI::PositiveNumber);
    c->add_option("--budget", o.budget);
  }
  play_cmd->add_option("--solver", o.solver)->check(CLI::IsMember({"all", "greedy", "random", "bitprobe"}));
  play_cmd->add_option("--plays", o.plays);
  play_cmd->add_option("--cells", o.cells, "cells each solver reads (default: the budget)");
  play_cmd->add_option("--seed", o.seed);

  auto* demo = app.add_subcommand("demo", "Demonstrations");
  demo->require_subcommand(1);
  auto* core = demo->add_subcommand("core-lemma", "Core extensions against random tree families");
  core->add_option("--model", o.principle, "principle with a registered model (default HOP)");
  core->add_option("--target", o.target, "principle computed by the trees (default WPHP)");
  core->add_option("--n", o.core_n);
  core->add_option("--m", o.m);
  core->add_option("--b0", o.b0);
  core->add_option("--families", o.families);
  core->add_option("--seed", o.seed);
  core->add_option("--trace", o.trace, "write JSON lines per round");

  auto* red = app.add_subcommand("reduce", "Interpretations between principles");
  red->require_subcommand(1);
  auto* rlist = red->add_subcommand("list", "List built-in interpretations");
  auto* rshow = red->add_subcommand("show", "Print an interpretation");
  auto* rcheck = red->add_subcommand("check", "Validity: exhaustive at --n, sampled at --sample-n");
  auto* rapply = red->add_subcommand("apply", "I(B) of a JSON structure");
  auto* rpull = red->add_subcommand("pullback", "Pull a target witness back to a source witness");
  for (auto* c : {rshow, rcheck, rapply, rpull}) c->add_option("name", o.principle)->required();
  rcheck->add_option("--n", o.check_n);
  rcheck->add_option("--samples", o.samples);
  rcheck->add_option("--sample-n", o.sample_n);
  rcheck->add_option("--seed", o.seed);
  for (auto* c : {rapply, rpull}) c->add_option("--structure", o.structure)->required();
  rpull->add_option("--witness", o.witness, "\"DISJUNCT V0 V1 ...\"; searched when omitted");

  auto* solve = app.add_subcommand("solve", "Find a witness in a JSON structure");
  solve->add_option("name", o.principle)->required();
  solve->add_option("--structure", o.structure)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (plist->parsed()) return cmd_principle_list(out);
    if (pshow->parsed()) return cmd_principle_show(o, out);
    if (det->parsed()) return cmd_determinacy(o, out);
    if (large->parsed()) return cmd_largeness(o, out);
    if (tr->parsed()) return cmd_translate(o, out, err);
    if (serve_cmd->parsed()) return cmd_adversary_serve(o, in, out);
    if (play_cmd->parsed()) return cmd_adversary_play(o, out);
    if (core->parsed()) return cmd_core_lemma(o, out);
    if (rlist->parsed()) return cmd_reduce_list(out);
    if (rshow->parsed()) return cmd_reduce("show", o, out);
    if (rcheck->parsed()) return cmd_reduce("check", o, out);
    if (rapply->parsed()) return cmd_reduce("apply", o, out);
    if (rpull->parsed()) return cmd_reduce("pullback", o, out);
    if (solve->parsed()) return cmd_solve(o, out);
  } catch (const HypothesisError& e) {
    err << "hypothesis violated: " << e.what() << '\n';
    return 3;
  } catch (const CapExceeded& e) {
    err << "search cap exceeded: " << e.what() << '\n';
    return 4;
  } catch (const SyntaxError& e) {
    err << "syntax error: " << e.what() << '\n';
    return 2;
  } catch (const ContractError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace finprin
