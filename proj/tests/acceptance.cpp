// Acceptance gate: one numbered property per criterion, each printing a
// single [PASS]/[FAIL] line. Run with no arguments for the full gate or
// with a criterion number to run just that one. The exit status is the
// number of failed criteria.
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "generators.hpp"
#include "heaplog/algebra.hpp"
#include "heaplog/env.hpp"
#include "heaplog/graph.hpp"
#include "heaplog/parser.hpp"
#include "heaplog/term.hpp"
#include "oracles.hpp"

#ifndef HEAPLOG_CLI_PATH
#error "HEAPLOG_CLI_PATH must point at the built binary"
#endif
#ifndef HEAPLOG_CORPUS_DIR
#error "HEAPLOG_CORPUS_DIR must point at the corpus directory"
#endif

namespace {

using namespace heaplog;

struct Ctx {
  long long checks = 0;
  long long failed = 0;
  std::vector<std::string> details;

  void check(bool ok, const std::string& msg) {
    ++checks;
    if (ok) return;
    ++failed;
    if (details.size() < 6) details.push_back(msg);
  }
};

HeapTerm parse_heap(const std::string& s) {
  ExtTerm t = parse_term(s);
  if (t.kind() != ExtTerm::Kind::heap)
    throw std::runtime_error("not a spatial term: " + s);
  return t.heap_term();
}

std::string nf_key(const NormalForm& nf) {
  return nf.satisfiable ? nf.to_term().str() : std::string("UNSAT");
}

std::string norm_key(const HeapTerm& t) { return nf_key(normalize(t)); }

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string corpus(const std::string& name) {
  return std::string(HEAPLOG_CORPUS_DIR) + "/" + name;
}

// --- 1: the worked cancellation example ------------------------------------

void crit1(Ctx& c) {
  NormalForm nf =
      normalize(parse_heap("d |-> a * a |-> b * c |-> b * inv(a |-> b)"));
  c.check(nf.satisfiable, "normal form should be satisfiable");
  c.check(nf.to_term().str() == "c |-> b || d |-> a",
          "got '" + nf.to_term().str() + "' instead of 'c |-> b || d |-> a'");
}

// --- 2: canonical contradiction shapes --------------------------------------

void crit2(Ctx& c) {
  auto verdict = [](const std::string& s) {
    NormalForm nf = normalize(parse_heap(s));
    return nf.satisfiable ? std::string("SAT") : nf.reason->str();
  };
  c.check(verdict("a |-> b * a |-> d") == "duplicate source: a",
          "a|->b * a|->d: " + verdict("a |-> b * a |-> d"));
  c.check(verdict("a |-> b * a |-> b") == "duplicate heaplet: a |-> b",
          "a|->b * a|->b: " + verdict("a |-> b * a |-> b"));
  c.check(verdict("a |-> 5 * b |-> 5") ==
              "'*'-operands share no vertex: b |-> 5",
          "a|->5 * b|->5: " + verdict("a |-> 5 * b |-> 5"));
  c.check(verdict("a |-> b * c |-> d") ==
              "'*'-operands share no vertex: c |-> d",
          "a|->b * c|->d: " + verdict("a |-> b * c |-> d"));
  c.check(verdict("x |-> z * y |-> z") == "SAT",
          "x|->z * y|->z: " + verdict("x |-> z * y |-> z"));
}

// --- 3: group laws of the connecting conjunction -----------------------------

void crit3(Ctx& c) {
  gen::Rng rng(1003);
  long long terms = 0;
  for (int it = 0; it < 450; ++it) {
    int n = 1 + rng.pick(8);
    std::vector<oracle::Cell> cells =
        (it % 2 == 0) ? gen::arbitrary_cells(rng, n, 4)
                      : gen::connected_cells(rng, n, "s");
    HeapTerm t1 = gen::random_conj_tree(rng, cells);
    HeapTerm t2 = gen::random_conj_tree(rng, cells);
    terms += 2;
    std::string k1 = norm_key(t1);
    // Associativity + commutativity: any reassociation/reordering of one
    // '*'-scope normalizes identically (unsatisfiable stays unsatisfiable).
    c.check(k1 == norm_key(t2),
            "reassociation changed the normal form of " + t1.str());
    // emp is the neutral element on either side.
    c.check(norm_key(HeapTerm::conj(t1, HeapTerm::emp())) == k1,
            "right emp-identity failed on " + t1.str());
    c.check(norm_key(HeapTerm::conj(HeapTerm::emp(), t1)) == k1,
            "left emp-identity failed on " + t1.str());

    // Inverse cancellation on satisfiable heaps.
    if (it % 2 == 1) {
      NormalForm gone = normalize(HeapTerm::conj(t1, invert(t1)));
      c.check(gone.satisfiable && gone.disjuncts.empty() &&
                  nf_key(gone) == norm_key(HeapTerm::emp()),
              "H * inv(H) did not normalize to emp for " + t1.str());
    }

    // The separating disjunction is associative and commutative too.
    if (it % 3 == 0) {
      std::vector<HeapTerm> gs;
      const char* prefixes[] = {"p", "q", "r"};
      for (int g = 0; g < 3; ++g)
        gs.push_back(gen::random_conj_tree(
            rng, gen::connected_cells(rng, 1 + rng.pick(3), prefixes[g])));
      HeapTerm d1 = HeapTerm::disj(HeapTerm::disj(gs[0], gs[1]), gs[2]);
      HeapTerm d2 = HeapTerm::disj(gs[0], HeapTerm::disj(gs[1], gs[2]));
      HeapTerm d3 = HeapTerm::disj(gs[2], HeapTerm::disj(gs[1], gs[0]));
      terms += 3;
      std::string dk = norm_key(d1);
      c.check(dk == norm_key(d2), "'||' reassociation changed " + d1.str());
      c.check(dk == norm_key(d3), "'||' reordering changed " + d1.str());
    }
  }
  c.check(terms >= 1000, "generator produced too few terms");
}

// --- 4: distributivity of '*' over '||' --------------------------------------

void crit4(Ctx& c) {
  gen::Rng rng(1004);
  for (int it = 0; it < 600; ++it) {
    gen::DistInstance di = gen::dist_instance(rng);
    HeapTerm lhs1 = HeapTerm::conj(di.a, HeapTerm::disj(di.b, di.c));
    HeapTerm rhs1 = HeapTerm::disj(HeapTerm::conj(di.a, di.b),
                                   HeapTerm::conj(di.a, di.c));
    NormalForm nl = normalize(lhs1);
    c.check(nl.satisfiable, "instance should be satisfiable: " + lhs1.str());
    c.check(nf_key(nl) == norm_key(rhs1),
            "a*(b||c) vs (a*b)||(a*c) differ on " + lhs1.str());

    HeapTerm lhs2 = HeapTerm::conj(HeapTerm::disj(di.b, di.c), di.a);
    HeapTerm rhs2 = HeapTerm::disj(HeapTerm::conj(di.b, di.a),
                                   HeapTerm::conj(di.c, di.a));
    c.check(norm_key(lhs2) == norm_key(rhs2),
            "(b||c)*a vs (b*a)||(c*a) differ on " + lhs2.str());
    c.check(norm_key(lhs2) == nf_key(nl),
            "the two orientations disagree on " + lhs1.str());
  }
}

// --- 5: the inverse is a homomorphism ----------------------------------------

HeapTerm inv_mirror(const HeapTerm& t) {
  switch (t.kind()) {
    case HeapTerm::Kind::conj:
      return HeapTerm::conj(inv_mirror(t.left()), inv_mirror(t.right()));
    case HeapTerm::Kind::disj:
      return HeapTerm::disj(inv_mirror(t.left()), inv_mirror(t.right()));
    default:
      return HeapTerm::inv(t);
  }
}

void crit5(Ctx& c) {
  gen::Rng rng(1005);
  for (int it = 0; it < 400; ++it) {
    int n = 1 + rng.pick(8);
    std::vector<oracle::Cell> cells = gen::arbitrary_cells(rng, n, 4);
    HeapTerm g = gen::random_conj_tree(rng, cells);
    // Structural distribution over '*': inverting the scope inverts every
    // heaplet in place.
    c.check(invert(g).str() == inv_mirror(g).str(),
            "invert did not distribute over " + g.str());
    // Involution.
    c.check(invert(invert(g)).str() == g.str(),
            "double inversion changed " + g.str());
    // Cancellation is pure rewriting: G * inv(G) rewrites to emp whether or
    // not G is satisfiable.
    c.check(cancel(HeapTerm::conj(g, invert(g))).str() == "emp",
            "cancel left residue for " + g.str());

    HeapTerm m = gen::random_mixed_tree(rng, cells);
    c.check(invert(m).str() == inv_mirror(m).str(),
            "invert did not distribute over " + m.str());
  }
}

// --- 6: the division rules are self-inverse ----------------------------------

void crit6(Ctx& c) {
  gen::Rng rng(1006);
  for (int it = 0; it < 250; ++it) {
    gen::Triple tr = gen::rule_triple(rng);
    HeapTerm direct_join = HeapTerm::conj(
        HeapTerm::conj(tr.u, HeapTerm::points_to(tr.b)),
        HeapTerm::points_to(tr.c));
    try {
      HeapTerm j1 = join_rule(tr.u, tr.b, tr.c);
      HeapTerm s1 = split_rule(tr.u, tr.b, tr.c);

      // Sequence ||;*;|| — split, join back, split again.
      HeapTerm a1 = split_rule(tr.u, tr.b, tr.c);
      HeapTerm a2 = join_rule(tr.u, tr.b, tr.c);
      HeapTerm a3 = split_rule(tr.u, tr.b, tr.c);
      c.check(a3.str() == s1.str() && normalize(a3) == normalize(s1),
              "||;*;|| drifted from a single split on " + tr.u.str());
      c.check(normalize(a2) == normalize(j1),
              "the middle join disagrees with a single join on " + tr.u.str());

      // Sequence *;||;* — join, split, join again.
      HeapTerm b1 = join_rule(tr.u, tr.b, tr.c);
      HeapTerm b2 = split_rule(tr.u, tr.b, tr.c);
      HeapTerm b3 = join_rule(tr.u, tr.b, tr.c);
      c.check(b3.str() == j1.str() && normalize(b3) == normalize(b1),
              "*;||;* drifted from a single join on " + tr.u.str());
      c.check(b2.str() == s1.str(), "the middle split drifted");

      // Rejoining the split parts restores the full conjunction.
      c.check(equiv(j1, HeapTerm::conj(s1.left(), HeapTerm::points_to(tr.c))),
              "join does not invert split on " + tr.u.str());
      c.check(normalize(j1) == normalize(direct_join),
              "join_rule differs from the direct conjunction on " + tr.u.str());
      c.check(normalize(j1).satisfiable,
              "joined term should be satisfiable: " + j1.str());
    } catch (const RuleInapplicableError& e) {
      c.check(false, std::string("rule unexpectedly inapplicable: ") +
                         e.what() + " on " + direct_join.str());
    }
  }
}

// --- 7: exhaustive agreement with the brute-force oracle ---------------------

std::vector<oracle::OTermPtr> shapes_with_all_ops(int n) {
  std::vector<oracle::OTermPtr> out;
  for (const auto& s : oracle::all_shapes(n)) {
    unsigned patterns = n > 1 ? (1u << (n - 1)) : 1u;
    for (unsigned p = 0; p < patterns; ++p)
      out.push_back(oracle::with_ops(s, p));
  }
  return out;
}

void crit7(Ctx& c) {
  std::map<std::string, std::string> impl_to_oracle, oracle_to_impl;
  long long count = 0;

  auto run_family = [&](const std::vector<oracle::OTermPtr>& shaped,
                        const std::vector<std::string>& names) {
    std::vector<oracle::Cell> alphabet;
    for (const auto& s : names)
      for (const auto& d : names) alphabet.push_back(oracle::Cell{s, d});
    const int k = static_cast<int>(alphabet.size());
    for (const auto& shape : shaped) {
      const int n = oracle::leaf_count(shape);
      std::vector<int> idx(static_cast<size_t>(n), 0);
      std::vector<oracle::Cell> table(static_cast<size_t>(n));
      bool more = true;
      while (more) {
        for (int i = 0; i < n; ++i)
          table[static_cast<size_t>(i)] =
              alphabet[static_cast<size_t>(idx[static_cast<size_t>(i)])];
        oracle::Eval ev = oracle::evaluate(shape, table);
        HeapTerm ht = gen::to_heap_term(shape, table);
        NormalForm nf = normalize(ht);
        ++count;

        if (nf.satisfiable != ev.sat) {
          c.check(false, "sat disagreement on " + ht.str());
        } else {
          std::string ik = nf_key(nf);
          std::string ok = ev.sat ? ev.key() : std::string("UNSAT");
          auto [i1, fresh1] = impl_to_oracle.emplace(ik, ok);
          c.check(fresh1 || i1->second == ok,
                  "equiv coarser than the oracle near " + ht.str());
          auto [i2, fresh2] = oracle_to_impl.emplace(ok, ik);
          c.check(fresh2 || i2->second == ik,
                  "equiv finer than the oracle near " + ht.str());
        }

        BuildResult built = build_graph(ht);
        c.check(std::holds_alternative<HeapGraph>(built) == ev.sat,
                "graph construction disagreed on " + ht.str());

        int p = 0;
        while (p < n) {
          if (++idx[static_cast<size_t>(p)] < k) break;
          idx[static_cast<size_t>(p)] = 0;
          ++p;
        }
        more = p < n;
      }
    }
  };

  const std::vector<std::string> four{"a", "b", "c", "d"};
  const std::vector<std::string> three{"a", "b", "c"};
  const std::vector<std::string> two{"a", "b"};

  // Every shape, every operator pattern, every cell assignment.
  for (int n = 1; n <= 3; ++n) run_family(shapes_with_all_ops(n), four);
  run_family(shapes_with_all_ops(4), three);
  // Width 5: both uniform-operator chains over three names, and every
  // operator pattern over two names.
  run_family({oracle::chain(5, 0u), oracle::chain(5, 15u)}, three);
  {
    std::vector<oracle::OTermPtr> chains;
    for (unsigned p = 0; p < 16; ++p) chains.push_back(oracle::chain(5, p));
    run_family(chains, two);
  }

  c.check(count >= 400000, "family unexpectedly small: " +
                               std::to_string(count) + " terms");
}

// --- 8: partial-constant comparisons -----------------------------------------

void crit8(Ctx& c) {
  Workspace ws = parse_workspace(
      "class C { f1, g1, g2 }\n"
      "obj a : C;\n"
      "pred p(o) := true(o);\n");
  const Env& env = ws.env;
  auto cmp = [&](const std::string& x, const std::string& y) {
    return compare_denotation(parse_term(x), parse_term(y), env, 4);
  };

  // One named field plus the rest of the object, written four ways.
  c.check(cmp("a.f1 |-> x * true(a)", "a.f1 |-> x * a.g1 * a.g2"),
          "field+rest vs explicit fields");
  c.check(cmp("a.f1 |-> x * true(a)", "true(a) * a.f1 |-> x"),
          "rest-constant placement must not matter");
  c.check(!cmp("a.f1 |-> x * true(a)", "p(a) * a.f1 |-> x"),
          "a leading predicate call duplicates the field");
  c.check(cmp("a.f1 |-> x * true(a)", "a.f1 |-> x * p(a)"),
          "a trailing predicate call shares the scope");
  c.check(cmp("a.f1 |-> x * a.g1 * a.g2", "a.f1 |-> x * true(a)"),
          "comparison must be symmetric");

  // A second rest-constant denotes the empty rest.
  c.check(cmp("true(a) * true(a)", "a.f1 * a.g1 * a.g2 * emp(a)"),
          "true(a)*true(a) vs fields + emp(a)");
  c.check(cmp("true(a) * true(a)", "a.f1 * a.g1 * a.g2"),
          "true(a)*true(a) vs the fields alone");
  c.check(!cmp("true(a) * true(a)", "a.f1 * a.g1 * emp(a)"),
          "a missing field must be detected");
}

// --- 9: unfolding counts match bounded-height tree counts --------------------

void crit9(Ctx& c) {
  Workspace ws = parse_workspace(
      "pred tree(l) := emp \\/ exists x, y: l |-> (left: x, right: y) * "
      "tree(x) * tree(y);\n");
  PredCall call{"tree", {PredArg::of_value(Value::of_sym("l"))}};
  for (int depth = 0; depth <= 2; ++depth) {
    UnfoldResult r = unfold_predicate(call, ws.env, depth);
    long long want = oracle::trees_of_height(depth);
    c.check(static_cast<long long>(r.disjuncts.size()) == want,
            "depth " + std::to_string(depth) + ": " +
                std::to_string(r.disjuncts.size()) + " disjuncts, expected " +
                std::to_string(want));
    for (const auto& d : r.disjuncts)
      c.check(!detect_repetition(d).has_value(),
              "unfolded disjunct repeats a heaplet: " + d.str());
  }
}

// --- 10: midpoint duality and reachability ------------------------------------

void crit10(Ctx& c) {
  gen::Rng rng(1010);
  for (int it = 0; it < 300; ++it) {
    gen::FnGraph fg = gen::fn_graph(rng, 1 + rng.pick(8));
    auto built =
        build_heaplets(gen::fn_graph_heaplets(fg), /*require_connected=*/false);
    const auto* g = std::get_if<HeapGraph>(&built);
    c.check(g != nullptr, "function graph failed to build");
    if (!g) continue;

    // Round-trip through the edge-centric dual.
    MidpointGraph mid = to_vertex_centric(*g);
    HeapGraph back = from_vertex_centric(mid);
    c.check(back.same_shape(*g), "midpoint round-trip changed the graph");
    auto key = [](const HeapGraph& h) {
      std::vector<std::string> ss;
      for (const auto& hp : h.heaplets()) ss.push_back(hp.str());
      std::sort(ss.begin(), ss.end());
      std::string out;
      for (const auto& s : ss) out += s + ";";
      return out;
    };
    c.check(key(back) == key(*g), "midpoint round-trip changed the heaplets");

    // Reachability against the transitive closure.
    auto closed = oracle::closure(fg.names.size(), fg.edges);
    for (size_t i = 0; i < fg.names.size(); ++i) {
      if (!g->find(fg.names[i])) continue;
      for (size_t j = 0; j < fg.names.size(); ++j) {
        if (!g->find(fg.names[j])) continue;
        bool got = reaches(*g, VertexSel(fg.names[i]), VertexSel(fg.names[j]));
        c.check(got == static_cast<bool>(closed[i][j]),
                "reaches(" + fg.names[i] + ", " + fg.names[j] +
                    ") disagrees with the closure oracle");
      }
    }
  }

  // The ring-and-tail example from the corpus.
  Workspace ws = parse_workspace(slurp(corpus("cactus.heap")));
  const Goal* goal = ws.find_goal("cactus");
  c.check(goal != nullptr, "corpus goal 'cactus' missing");
  if (!goal) return;
  BuildResult built = build_graph(goal->term.heap_term(), ws.env);
  const auto* g = std::get_if<HeapGraph>(&built);
  c.check(g != nullptr, "cactus should build");
  if (!g) return;
  std::vector<std::string> names{"x1", "x2", "x3", "x4", "x5", "x6", "x7"};
  std::vector<std::pair<size_t, size_t>> edges{{0, 1}, {1, 2}, {2, 3},
                                               {3, 6}, {4, 5}, {5, 6}};
  auto closed = oracle::closure(names.size(), edges);
  for (size_t i = 0; i < names.size(); ++i)
    for (size_t j = 0; j < names.size(); ++j)
      c.check(reaches(*g, VertexSel(names[i]), VertexSel(names[j])) ==
                  static_cast<bool>(closed[i][j]),
              "cactus reaches(" + names[i] + ", " + names[j] + ") is wrong");
  c.check(reaches(*g, VertexSel("x1"), VertexSel("x7")),
          "x1 must reach the sink x7");
  for (const auto& other : names)
    if (other != "x7")
      c.check(!reaches(*g, VertexSel("x7"), VertexSel(other)),
              "the sink x7 must reach nothing but itself");
}

// --- 11: idempotence and run-to-run determinism -------------------------------

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  std::string base = "/tmp/heaplog_acc_" + std::to_string(getpid()) + "_" +
                     std::to_string(counter++);
  std::string cmd = std::string(HEAPLOG_CLI_PATH) + " " + args + " >" + base +
                    ".out 2>" + base + ".err";
  int rc = std::system(cmd.c_str());
  RunResult r;
  r.code = (rc >= 0 && WIFEXITED(rc)) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(base + ".out");
  r.err = slurp(base + ".err");
  std::remove((base + ".out").c_str());
  std::remove((base + ".err").c_str());
  return r;
}

void crit11(Ctx& c) {
  gen::Rng rng(1011);
  for (int it = 0; it < 400; ++it) {
    int n = 1 + rng.pick(8);
    HeapTerm t = (it % 2 == 0)
                     ? gen::random_mixed_tree(rng, gen::arbitrary_cells(rng, n, 4))
                     : gen::random_conj_tree(rng,
                                             gen::connected_cells(rng, n, "s"));
    // Inverses need partners in their own '*'-scope, so only wrap the
    // single-scope trees.
    if (it % 2 == 1 && it % 5 == 0) t = HeapTerm::conj(t, invert(t));
    NormalForm once = normalize(t);
    NormalForm twice = normalize(once.to_term());
    c.check(once == twice, "normalize is not idempotent on " + t.str());
    c.check(nf_key(once) == nf_key(twice),
            "printed forms differ after renormalizing " + t.str());
  }

  const std::vector<std::string> invocations = {
      "check --format json " + corpus("counterexamples.heap") + " alias_ok",
      "normalize " + corpus("cancel.heap") + " cancel_demo",
      "normalize " + corpus("cancel.heap") + " drop_demo",
      "unfold --depth 2 " + corpus("tree.heap") + " 'tree(l)'",
  };
  for (const auto& inv : invocations) {
    RunResult a = run_cli(inv);
    RunResult b = run_cli(inv);
    c.check(a.code == b.code && a.out == b.out && a.err == b.err,
            "repeated run diverged: " + inv);
    c.check(a.code == 0, "expected success from: " + inv);
  }
}

}  // namespace

int main(int argc, char** argv) {
  int only = argc > 1 ? std::atoi(argv[1]) : 0;
  struct Row {
    int id;
    const char* label;
    std::function<void(Ctx&)> fn;
  };
  const std::vector<Row> rows = {
      {1, "cancellation canonizes to c |-> b || d |-> a", crit1},
      {2, "contradiction counterexamples report their reasons", crit2},
      {3, "group laws over random scopes", crit3},
      {4, "distributivity of '*' over '||'", crit4},
      {5, "inversion distributes and cancels", crit5},
      {6, "division rules are self-inverse", crit6},
      {7, "exhaustive oracle agreement", crit7},
      {8, "partial-constant denotation comparisons", crit8},
      {9, "unfolding counts match bounded tree counts", crit9},
      {10, "midpoint duality and reachability", crit10},
      {11, "normalization is idempotent and deterministic", crit11},
  };

  int failed_criteria = 0;
  for (const auto& row : rows) {
    if (only != 0 && row.id != only) continue;
    Ctx ctx;
    try {
      row.fn(ctx);
    } catch (const std::exception& e) {
      ctx.check(false, std::string("unexpected exception: ") + e.what());
    }
    if (ctx.failed == 0) {
      std::printf("[PASS] criterion %d: %s (%lld checks)\n", row.id, row.label,
                  ctx.checks);
    } else {
      ++failed_criteria;
      std::printf("[FAIL] criterion %d: %s (%lld of %lld checks failed)\n",
                  row.id, row.label, ctx.failed, ctx.checks);
      for (const auto& d : ctx.details)
        std::printf("       %s\n", d.c_str());
    }
  }
  return failed_criteria;
}
