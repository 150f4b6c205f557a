#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "heaplog/algebra.hpp"
#include "heaplog/env.hpp"
#include "heaplog/graph.hpp"
#include "heaplog/parser.hpp"
#include "heaplog/term.hpp"
#include "json.hpp"

using nlohmann::json;

namespace {

struct Options {
  int depth = 4;
  std::string format = "text";
  bool strict_garbage = false;
};

heaplog::Workspace load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  heaplog::Workspace w = heaplog::parse_workspace(ss.str());
  w.env.validate();
  return w;
}

const heaplog::Goal& goal_of(const heaplog::Workspace& w,
                             const std::string& name) {
  const heaplog::Goal* g = w.find_goal(name);
  if (!g) throw std::runtime_error("unknown goal: " + name);
  return *g;
}

const heaplog::HeapTerm& spatial(const heaplog::Goal& g) {
  if (g.term.kind() != heaplog::ExtTerm::Kind::heap)
    throw std::runtime_error("goal '" + g.name +
                             "' is a boolean combination; this command "
                             "applies to spatial goals");
  return g.term.heap_term();
}

// The unfolded alternatives of a goal with their normal forms.
struct Judgement {
  std::vector<heaplog::HeapTerm> alts;
  std::vector<heaplog::NormalForm> forms;  // parallel to alts
  std::vector<std::string> notes;
  int first_sat = -1;
};

Judgement judge(const heaplog::Workspace& w, const heaplog::Goal& g,
                const Options& opt) {
  Judgement j;
  heaplog::UnfoldResult r =
      heaplog::unfold_term(heaplog::ExtTerm::heap(spatial(g)), w.env,
                           opt.depth);
  j.notes = std::move(r.notes);
  for (auto& alt : r.disjuncts) {
    heaplog::NormalForm nf = heaplog::normalize(alt);
    if (nf.satisfiable && j.first_sat < 0) j.first_sat = (int)j.alts.size();
    j.alts.push_back(std::move(alt));
    j.forms.push_back(std::move(nf));
  }
  return j;
}

void print_notes(const Judgement& j) {
  for (const auto& n : j.notes) std::cerr << "note: " << n << "\n";
  for (const auto& nf : j.forms)
    for (const auto& d : nf.dropped) std::cerr << "note: " << d << "\n";
}

std::vector<std::string> garbage_labels(const heaplog::HeapGraph& g) {
  std::vector<std::string> out;
  for (heaplog::VertexId id : g.garbage()) out.push_back(g.vertex(id).label);
  return out;
}

json nf_json(const heaplog::NormalForm& nf) {
  json o;
  o["satisfiable"] = nf.satisfiable;
  if (!nf.satisfiable) {
    o["reason"] = nf.reason->str();
    return o;
  }
  json ds = json::array();
  for (const auto& c : nf.disjuncts) ds.push_back(c.to_term().str());
  o["disjuncts"] = std::move(ds);
  return o;
}

int cmd_check(const heaplog::Workspace& w, const std::string& goal,
              const Options& opt) {
  const heaplog::Goal& g = goal_of(w, goal);
  Judgement j = judge(w, g, opt);
  print_notes(j);

  if (j.first_sat >= 0) {
    std::vector<std::string> garbage;
    auto built = heaplog::build_graph(j.alts[j.first_sat], w.env);
    const auto* graph = std::get_if<heaplog::HeapGraph>(&built);
    if (graph) garbage = garbage_labels(*graph);
    if (!garbage.empty() && opt.strict_garbage) {
      std::string who;
      for (const auto& l : garbage) who += (who.empty() ? "" : ", ") + l;
      if (opt.format == "json") {
        json o;
        o["goal"] = g.name;
        o["result"] = "unsatisfiable";
        o["reason"] = "garbage vertices: " + who;
        std::cout << o.dump(2) << "\n";
      } else {
        std::cout << "unsatisfiable: garbage vertices: " << who << "\n";
      }
      return 1;
    }
    for (const auto& l : garbage)
      std::cerr << "warning: garbage vertex unreachable from any root: " << l
                << "\n";
    if (opt.format == "dot" && graph) {
      std::cout << heaplog::to_dot(*graph, g.name);
      return 0;
    }
    if (opt.format == "json") {
      json o;
      o["goal"] = g.name;
      o["result"] = "satisfiable";
      o["normal_form"] = nf_json(j.forms[j.first_sat]);
      std::cout << o.dump(2) << "\n";
    } else {
      std::cout << "satisfiable\n";
    }
    return 0;
  }
  if (!j.notes.empty()) {
    if (opt.format == "json") {
      json o;
      o["goal"] = g.name;
      o["result"] = "inconclusive";
      o["reason"] = "depth " + std::to_string(opt.depth) + " exhausted";
      std::cout << o.dump(2) << "\n";
    } else {
      std::cout << "inconclusive: depth " << opt.depth << " exhausted\n";
    }
    return 2;
  }
  std::string reason = j.forms.empty() ? "no alternatives"
                                       : j.forms.front().reason->str();
  if (opt.format == "json") {
    json o;
    o["goal"] = g.name;
    o["result"] = "unsatisfiable";
    o["reason"] = reason;
    std::cout << o.dump(2) << "\n";
  } else {
    std::cout << "unsatisfiable: " << reason << "\n";
  }
  return 1;
}

int cmd_normalize(const heaplog::Workspace& w, const std::string& goal,
                  const Options& opt) {
  const heaplog::Goal& g = goal_of(w, goal);
  Judgement j = judge(w, g, opt);
  print_notes(j);

  if (opt.format == "dot" && j.first_sat >= 0) {
    auto built = heaplog::build_graph(j.alts[j.first_sat], w.env);
    if (const auto* graph = std::get_if<heaplog::HeapGraph>(&built)) {
      std::cout << heaplog::to_dot(*graph, g.name);
      return 0;
    }
  }
  if (opt.format == "json") {
    json o;
    o["goal"] = g.name;
    json alts = json::array();
    for (const auto& nf : j.forms) alts.push_back(nf_json(nf));
    o["alternatives"] = std::move(alts);
    std::cout << o.dump(2) << "\n";
  } else {
    for (size_t i = 0; i < j.forms.size(); ++i) {
      if (i) std::cout << "\\/\n";
      const auto& nf = j.forms[i];
      if (!nf.satisfiable) {
        std::cout << "false\n";
        std::cerr << "note: alternative " << (i + 1)
                  << " is unsatisfiable: " << nf.reason->str() << "\n";
        continue;
      }
      if (nf.disjuncts.empty()) {
        std::cout << "emp\n";
        continue;
      }
      for (const auto& c : nf.disjuncts)
        std::cout << c.to_term().str() << "\n";
    }
  }
  if (j.first_sat >= 0) return 0;
  return j.notes.empty() ? 1 : 2;
}

int cmd_diff(const heaplog::Workspace& w, const std::string& expected,
             const std::string& actual, const Options& opt) {
  const heaplog::Goal& ge = goal_of(w, expected);
  const heaplog::Goal& ga = goal_of(w, actual);
  Judgement je = judge(w, ge, opt);
  Judgement ja = judge(w, ga, opt);
  if (je.alts.size() != 1 || ja.alts.size() != 1)
    throw std::runtime_error(
        "diff needs goals with exactly one ground alternative after "
        "unfolding");

  heaplog::HeapTerm t =
      heaplog::HeapTerm::conj(ja.alts[0], heaplog::invert(je.alts[0]));
  heaplog::CancelReport rep = heaplog::cancel_with_report(t);

  if (opt.format == "json") {
    json o;
    o["expected"] = ge.name;
    o["actual"] = ga.name;
    o["residue"] = rep.residue.str();
    auto arr = [](const std::vector<heaplog::Heaplet>& hs) {
      json a = json::array();
      for (const auto& h : hs) a.push_back(h.str());
      return a;
    };
    o["matched"] = arr(rep.matched);
    o["missing"] = arr(rep.missing);
    o["extra"] = arr(rep.extra);
    std::cout << o.dump(2) << "\n";
  } else {
    std::cout << rep.residue.str() << "\n";
    std::cout << "matched:\n";
    for (const auto& h : rep.matched) std::cout << "  " << h.str() << "\n";
    std::cout << "missing:\n";
    for (const auto& h : rep.missing) std::cout << "  " << h.str() << "\n";
    std::cout << "extra:\n";
    for (const auto& h : rep.extra) std::cout << "  " << h.str() << "\n";
  }
  return (rep.missing.empty() && rep.extra.empty()) ? 0 : 1;
}

std::vector<std::string> split_names(const std::string& s) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= s.size()) {
    size_t comma = s.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

int cmd_reach(const heaplog::Workspace& w, const std::string& goal,
              const std::string& from, const std::string& to,
              const Options& opt) {
  const heaplog::Goal& g = goal_of(w, goal);
  Judgement j = judge(w, g, opt);
  print_notes(j);
  if (j.first_sat < 0) {
    std::cerr << "error: goal is "
              << (j.notes.empty() ? "unsatisfiable" : "inconclusive") << "\n";
    return j.notes.empty() ? 1 : 2;
  }
  auto built = heaplog::build_graph(j.alts[j.first_sat], w.env);
  const auto* graph = std::get_if<heaplog::HeapGraph>(&built);
  if (!graph) throw std::runtime_error("goal did not build a graph");
  heaplog::VertexSel fs;
  fs.names = split_names(from);
  heaplog::VertexSel ts;
  ts.names = split_names(to);
  bool yes = heaplog::reaches(*graph, fs, ts);
  if (opt.format == "json") {
    json o;
    o["goal"] = g.name;
    o["from"] = from;
    o["to"] = to;
    o["reaches"] = yes;
    std::cout << o.dump(2) << "\n";
  } else {
    std::cout << (yes ? "true" : "false") << "\n";
  }
  return 0;
}

int cmd_dot(const heaplog::Workspace& w, const std::string& goal,
            const std::string& outpath, const Options& opt) {
  const heaplog::Goal& g = goal_of(w, goal);
  Judgement j = judge(w, g, opt);
  print_notes(j);
  if (j.first_sat < 0) {
    std::cerr << "error: goal is "
              << (j.notes.empty() ? "unsatisfiable" : "inconclusive") << "\n";
    return j.notes.empty() ? 1 : 2;
  }
  auto built = heaplog::build_graph(j.alts[j.first_sat], w.env);
  const auto* graph = std::get_if<heaplog::HeapGraph>(&built);
  if (!graph) throw std::runtime_error("goal did not build a graph");
  std::string dot = heaplog::to_dot(*graph, g.name);
  if (outpath.empty()) {
    std::cout << dot;
  } else {
    std::ofstream f(outpath);
    if (!f) throw std::runtime_error("cannot write file: " + outpath);
    f << dot;
  }
  return 0;
}

int cmd_unfold(const heaplog::Workspace& w, const std::string& call_text,
               const Options& opt) {
  heaplog::ExtTerm parsed = heaplog::parse_term(call_text);
  if (parsed.kind() != heaplog::ExtTerm::Kind::heap ||
      parsed.heap_term().kind() != heaplog::HeapTerm::Kind::pred)
    throw std::runtime_error("unfold expects a predicate call like tree(l)");
  heaplog::UnfoldResult r = heaplog::unfold_predicate(
      parsed.heap_term().call(), w.env, opt.depth);
  for (const auto& n : r.notes) std::cerr << "note: " << n << "\n";
  if (opt.format == "json") {
    json o;
    o["call"] = call_text;
    json ds = json::array();
    for (const auto& d : r.disjuncts) ds.push_back(d.str());
    o["disjuncts"] = std::move(ds);
    std::cout << o.dump(2) << "\n";
  } else {
    for (const auto& d : r.disjuncts) std::cout << d.str() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"term algebra for heap assertions: strict conjunction, "
               "strict disjunction, inverses, normal forms"};
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  app.add_option("--depth", opt.depth, "predicate unfolding bound")
      ->capture_default_str();
  app.add_option("--format", opt.format, "output format")
      ->check(CLI::IsMember({"text", "json", "dot"}))
      ->capture_default_str();
  app.add_flag("--strict-garbage", opt.strict_garbage,
               "treat garbage vertices as errors");

  std::string file, goal, goal2, from, to, outpath, call_text;

  CLI::App* check = app.add_subcommand("check", "decide satisfiability");
  check->add_option("file", file)->required();
  check->add_option("goal", goal)->required();

  CLI::App* norm = app.add_subcommand("normalize", "print the normal form");
  norm->add_option("file", file)->required();
  norm->add_option("goal", goal)->required();

  CLI::App* diff = app.add_subcommand("diff", "cancel actual against expected");
  diff->add_option("file", file)->required();
  diff->add_option("expected", goal)->required();
  diff->add_option("actual", goal2)->required();

  CLI::App* reach = app.add_subcommand("reach", "reachability between vertices");
  reach->add_option("file", file)->required();
  reach->add_option("goal", goal)->required();
  reach->add_option("from", from)->required();
  reach->add_option("to", to)->required();

  CLI::App* dot = app.add_subcommand("dot", "render the heap graph as DOT");
  dot->add_option("file", file)->required();
  dot->add_option("goal", goal)->required();
  dot->add_option("out", outpath);

  CLI::App* unfold = app.add_subcommand("unfold", "expand a predicate call");
  unfold->add_option("file", file)->required();
  unfold->add_option("call", call_text)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }

  try {
    heaplog::Workspace w = load(file);
    if (app.got_subcommand(check)) return cmd_check(w, goal, opt);
    if (app.got_subcommand(norm)) return cmd_normalize(w, goal, opt);
    if (app.got_subcommand(diff)) return cmd_diff(w, goal, goal2, opt);
    if (app.got_subcommand(reach)) return cmd_reach(w, goal, from, to, opt);
    if (app.got_subcommand(dot)) return cmd_dot(w, goal, outpath, opt);
    if (app.got_subcommand(unfold)) return cmd_unfold(w, call_text, opt);
  } catch (const heaplog::DepthExhaustedError& e) {
    std::cerr << "inconclusive: " << e.what() << "\n";
    return 2;
  } catch (const heaplog::UnmatchedInverseError& e) {
    std::cout << "unsatisfiable: " << e.what() << "\n";
    return 1;
  } catch (const heaplog::SyntaxError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 3;
}
