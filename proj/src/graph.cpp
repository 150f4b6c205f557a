#include "heaplog/graph.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "eval.hpp"
#include "heaplog/algebra.hpp"
#include "scope_tracker.hpp"

namespace heaplog {

std::string Unsat::str() const {
  switch (reason) {
    case Reason::duplicate_heaplet:
      return "duplicate heaplet: " + witness;
    case Reason::duplicate_source:
      return "duplicate source: " + witness;
    case Reason::not_connectible:
      return "'*'-operands share no vertex: " + witness;
    case Reason::interference:
      return "'||'-operands interfere: " + witness;
    case Reason::false_constant:
      return "contains 'false'";
  }
  return witness;
}

// --- HeapGraph queries -------------------------------------------------------

namespace {

std::vector<size_t> in_degrees(const HeapGraph& g) {
  std::vector<size_t> deg(g.vertices().size(), 0);
  for (const auto& e : g.edges()) ++deg[e.dst.value];
  return deg;
}

std::vector<std::vector<VertexId>> adjacency(const HeapGraph& g) {
  std::vector<std::vector<VertexId>> adj(g.vertices().size());
  for (const auto& e : g.edges()) adj[e.src.value].push_back(e.dst);
  return adj;
}

std::vector<bool> reachable_from(const HeapGraph& g,
                                 const std::vector<VertexId>& starts) {
  std::vector<bool> seen(g.vertices().size(), false);
  auto adj = adjacency(g);
  std::queue<VertexId> work;
  for (VertexId s : starts) {
    if (!seen[s.value]) {
      seen[s.value] = true;
      work.push(s);
    }
  }
  while (!work.empty()) {
    VertexId v = work.front();
    work.pop();
    for (VertexId w : adj[v.value]) {
      if (!seen[w.value]) {
        seen[w.value] = true;
        work.push(w);
      }
    }
  }
  return seen;
}

}  // namespace

std::vector<VertexId> HeapGraph::roots() const {
  std::vector<VertexId> out;
  auto deg = in_degrees(*this);
  for (const auto& v : vertices_)
    if (deg[v.id.value] == 0) out.push_back(v.id);
  return out;
}

std::vector<VertexId> HeapGraph::garbage() const {
  std::vector<VertexId> out;
  auto seen = reachable_from(*this, roots());
  for (const auto& v : vertices_)
    if (!seen[v.id.value]) out.push_back(v.id);
  return out;
}

std::vector<std::string> HeapGraph::warnings() const {
  std::vector<std::string> out;
  for (VertexId id : garbage())
    out.push_back("garbage vertex unreachable from any root: " +
                  vertex(id).label);
  return out;
}

const Vertex* HeapGraph::find(const std::string& name) const {
  for (const auto& v : vertices_)
    if (!v.name.empty() && v.name == name) return &v;
  return nullptr;
}

std::vector<std::string> HeapGraph::shared_names() const {
  std::vector<std::string> out;
  for (const auto& v : vertices_)
    if (!v.name.empty()) out.push_back(v.name);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

std::string vertex_key(const Vertex& v) {
  return v.name.empty() ? "#" + v.label : v.name;
}

std::vector<std::string> shape_keys(const HeapGraph& g) {
  std::vector<std::string> keys;
  for (const auto& e : g.edges()) {
    keys.push_back(vertex_key(g.vertex(e.src)) + " -" + e.slot + "-> " +
                   vertex_key(g.vertex(e.dst)) + (e.implied ? " ~" : ""));
  }
  for (const auto& v : g.vertices()) keys.push_back("v " + vertex_key(v));
  std::sort(keys.begin(), keys.end());
  return keys;
}

}  // namespace

bool HeapGraph::same_shape(const HeapGraph& other) const {
  return shape_keys(*this) == shape_keys(other);
}

// --- Construction ------------------------------------------------------------

// Materializes vertices and edges while a ScopeTracker enforces the
// non-repetitiveness claims on the same heaplets.
class GraphBuilder {
 public:
  explicit GraphBuilder(const Env& env) : env_(&env) {}

  std::optional<Unsat> add(const Heaplet& h) {
    if (auto bad = tracker_.add(h)) return bad;

    auto chain = detail::location_chain(h.loc);
    std::vector<VertexId> vids;
    vids.reserve(chain.size());
    for (const auto& name : chain) vids.push_back(shared_vertex(name));
    for (size_t i = 0; i + 1 < chain.size(); ++i)
      structural_edge(vids[i], h.loc.path[i], vids[i + 1]);

    VertexId src = vids.back();
    if (h.val.kind == Value::Kind::record) {
      VertexId obj = src;
      if (h.loc.is_field()) {
        obj = shared_vertex(h.loc.str());
        structural_edge(src, h.loc.last_field(), obj);
      }
      for (const auto& [field, fv] : h.val.fields)
        g_.edges_.push_back(Edge{obj, field, value_vertex(fv), false});
    } else if (h.loc.is_field()) {
      g_.edges_.push_back(Edge{src, h.loc.last_field(), value_vertex(h.val), false});
    } else {
      g_.edges_.push_back(Edge{src, "", value_vertex(h.val), false});
    }
    for (const auto& f : detail::fieldwise(h)) g_.heaplets_.push_back(f);
    return std::nullopt;
  }

  detail::ScopeTracker& tracker() { return tracker_; }

  HeapGraph finish() {
    std::vector<bool> slotted(g_.vertices_.size(), false);
    for (const auto& e : g_.edges_)
      if (!e.slot.empty()) slotted[e.src.value] = true;
    auto deg = in_degrees(g_);
    for (auto& v : g_.vertices_) {
      const ClassDecl* cls =
          v.name.empty() ? nullptr : env_->class_of(v.name);
      if (slotted[v.id.value] || cls) {
        v.kind = Vertex::Kind::object;
        if (cls) {
          v.cls = cls->name;
          v.slots = cls->fields;
        } else {
          for (const auto& e : g_.edges_)
            if (e.src == v.id && !e.slot.empty() &&
                std::find(v.slots.begin(), v.slots.end(), e.slot) ==
                    v.slots.end())
              v.slots.push_back(e.slot);
        }
      } else if (deg[v.id.value] == 0) {
        v.kind = Vertex::Kind::stack_root;
      } else {
        v.kind = Vertex::Kind::cell;
      }
    }
    return std::move(g_);
  }

 private:
  VertexId shared_vertex(const std::string& name) {
    auto it = byname_.find(name);
    if (it != byname_.end()) return it->second;
    VertexId id{(uint32_t)g_.vertices_.size()};
    g_.vertices_.push_back(Vertex{id, Vertex::Kind::cell, name, name, "", {}});
    byname_.emplace(name, id);
    return id;
  }

  VertexId fresh_vertex(std::string label) {
    VertexId id{(uint32_t)g_.vertices_.size()};
    g_.vertices_.push_back(
        Vertex{id, Vertex::Kind::cell, "", std::move(label), "", {}});
    return id;
  }

  VertexId value_vertex(const Value& v) {
    switch (v.kind) {
      case Value::Kind::lit:
        return fresh_vertex(std::to_string(v.lit));
      case Value::Kind::any:
        return fresh_vertex("_");
      case Value::Kind::nil:
        return shared_vertex("nil");
      case Value::Kind::sym:
        return shared_vertex(v.sym);
      case Value::Kind::record:
        break;  // rejected by the parser; records are split by add()
    }
    return fresh_vertex("?");
  }

  void structural_edge(VertexId src, const std::string& slot, VertexId dst) {
    std::string key = std::to_string(src.value) + "|" + slot;
    if (!structural_done_.insert(key).second) return;
    g_.edges_.push_back(Edge{src, slot, dst, true});
  }

  const Env* env_;
  detail::ScopeTracker tracker_;
  HeapGraph g_;
  std::map<std::string, VertexId> byname_;
  std::set<std::string> structural_done_;
};

std::variant<HeapGraph, Unsat> build_heaplets(const std::vector<Heaplet>& hs,
                                              bool require_connected,
                                              const Env& env) {
  GraphBuilder b(env);
  for (const auto& h : hs)
    if (auto u = b.add(h)) return *u;
  if (require_connected && b.tracker().added() > 1 &&
      !b.tracker().connected()) {
    auto comps = b.tracker().heaplet_components();
    return Unsat{Unsat::Reason::not_connectible, hs[comps[1].front()].str()};
  }
  return b.finish();
}

namespace {

// All shareable names a branch touches.
std::set<std::string> branch_names(const detail::BranchOutcome& o) {
  std::set<std::string> names;
  for (const auto& comp : o.components)
    for (const auto& h : comp)
      for (const auto& n : detail::heaplet_names(h)) names.insert(n);
  return names;
}

std::string branch_key(const detail::BranchOutcome& o) {
  std::vector<std::string> prints;
  for (const auto& comp : o.components)
    for (const auto& h : comp)
      for (const auto& f : detail::fieldwise(h)) prints.push_back(f.str());
  std::sort(prints.begin(), prints.end());
  std::string k;
  for (const auto& p : prints) k += p + " ; ";
  return k;
}

HeapGraph materialize(const std::vector<const detail::BranchOutcome*>& branches,
                      const Env& env) {
  GraphBuilder b(env);
  for (const auto* o : branches)
    for (const auto& comp : o->components)
      for (const auto& h : comp) b.add(h);  // already validated
  return b.finish();
}

}  // namespace

BuildResult build_graph(const HeapTerm& t, const Env& env) {
  detail::EvalResult ev;
  try {
    ev = detail::eval_term(t);
  } catch (const NeedsEnvError& e) {
    return NeedsEnv{e.what()};
  }
  if (!ev.satisfiable) return *ev.reason;

  // Vertex-disjoint disjuncts coexist in one graph; disjuncts that share
  // context (possible after ∘-over-‖ distribution) are alternatives, and
  // the canonically first one is materialized.
  bool disjoint = true;
  std::vector<std::set<std::string>> names;
  names.reserve(ev.branches.size());
  for (const auto& o : ev.branches) names.push_back(branch_names(o));
  for (size_t i = 0; i < names.size() && disjoint; ++i)
    for (size_t j = i + 1; j < names.size() && disjoint; ++j)
      for (const auto& n : names[i])
        if (names[j].count(n)) {
          disjoint = false;
          break;
        }

  std::vector<const detail::BranchOutcome*> chosen;
  if (disjoint) {
    for (const auto& o : ev.branches) chosen.push_back(&o);
  } else {
    const detail::BranchOutcome* best = &ev.branches.front();
    for (const auto& o : ev.branches)
      if (branch_key(o) < branch_key(*best)) best = &o;
    chosen.push_back(best);
  }
  return materialize(chosen, env);
}

std::variant<HeapGraph, Unsat> conjoin_heaplet(const HeapGraph& g,
                                               const Heaplet& h,
                                               const Env& env) {
  if (!g.empty()) {
    bool touches = false;
    for (const auto& n : detail::heaplet_names(h))
      if (g.find(n)) {
        touches = true;
        break;
      }
    if (!touches) return Unsat{Unsat::Reason::not_connectible, h.str()};
  }
  GraphBuilder b(env);
  for (const auto& old : g.heaplets())
    if (auto u = b.add(old)) return *u;
  if (auto u = b.add(h)) return *u;
  return b.finish();
}

// --- Queries -----------------------------------------------------------------

namespace {

std::vector<VertexId> resolve(const HeapGraph& g, const VertexSel& sel) {
  std::vector<VertexId> out;
  for (const auto& n : sel.names) {
    const Vertex* v = g.find(n);
    if (!v) throw UnknownVertexError(n);
    out.push_back(v->id);
  }
  return out;
}

}  // namespace

bool reaches(const HeapGraph& g, const VertexSel& from, const VertexSel& to) {
  auto starts = resolve(g, from);
  auto goals = resolve(g, to);
  auto seen = reachable_from(g, starts);
  for (VertexId t : goals)
    if (seen[t.value]) return true;
  return false;
}

namespace {

// Weak components as a vertex -> group map, skipping at most one
// occurrence of `skip`.
size_t count_components(const HeapGraph& g, const Edge* skip,
                        std::vector<int>* group_out) {
  size_t n = g.vertices().size();
  std::vector<int> parent(n);
  for (size_t i = 0; i < n; ++i) parent[i] = (int)i;
  auto find = [&parent](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  bool skipped = false;
  for (const auto& e : g.edges()) {
    if (skip && !skipped && e == *skip) {
      skipped = true;
      continue;
    }
    parent[find((int)e.src.value)] = find((int)e.dst.value);
  }
  std::set<int> reps;
  for (size_t i = 0; i < n; ++i) reps.insert(find((int)i));
  if (group_out) {
    group_out->resize(n);
    for (size_t i = 0; i < n; ++i) (*group_out)[i] = find((int)i);
  }
  return reps.size();
}

}  // namespace

std::vector<std::vector<VertexId>> connected_components(const HeapGraph& g) {
  std::vector<int> group;
  count_components(g, nullptr, &group);
  std::map<int, std::vector<VertexId>> by_rep;
  for (size_t i = 0; i < group.size(); ++i)
    by_rep[group[i]].push_back(VertexId{(uint32_t)i});
  std::vector<std::vector<VertexId>> out;
  for (auto& [rep, ids] : by_rep) {
    std::sort(ids.begin(), ids.end());
    out.push_back(std::move(ids));
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return out;
}

bool is_bridge(const HeapGraph& g, const Edge& e) {
  return count_components(g, &e, nullptr) > count_components(g, nullptr, nullptr);
}

// --- Midpoint duality --------------------------------------------------------

MidpointGraph to_vertex_centric(const HeapGraph& g) {
  MidpointGraph m;
  for (const auto& v : g.vertices()) {
    MidNode n;
    n.kind = MidNode::Kind::vertex;
    n.vertex = v;
    m.nodes.push_back(std::move(n));
  }
  for (const auto& e : g.edges()) {
    MidNode n;
    n.kind = MidNode::Kind::midpoint;
    n.slot = e.slot;
    n.implied = e.implied;
    uint32_t mid = (uint32_t)m.nodes.size();
    m.nodes.push_back(std::move(n));
    m.links.emplace_back(e.src.value, mid);
    m.links.emplace_back(mid, e.dst.value);
  }
  return m;
}

namespace {

Location location_of_name(const std::string& dotted) {
  Location loc;
  size_t start = 0;
  while (true) {
    size_t dot = dotted.find('.', start);
    std::string part = dotted.substr(start, dot - start);
    if (start == 0)
      loc.root = std::move(part);
    else
      loc.path.push_back(std::move(part));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return loc;
}

Value value_of_vertex(const Vertex& v) {
  if (v.name == "nil") return Value::of_nil();
  if (!v.name.empty()) return Value::of_sym(v.name);
  if (v.label == "_") return Value::of_any();
  return Value::of_lit(std::stoll(v.label));
}

}  // namespace

HeapGraph from_vertex_centric(const MidpointGraph& m) {
  // Re-number the vertex nodes by their order of appearance.
  std::vector<int> vertex_pos(m.nodes.size(), -1);
  std::vector<Vertex> vertices;
  for (size_t i = 0; i < m.nodes.size(); ++i) {
    if (m.nodes[i].kind == MidNode::Kind::vertex) {
      vertex_pos[i] = (int)vertices.size();
      Vertex v = m.nodes[i].vertex;
      v.id = VertexId{(uint32_t)vertices.size()};
      vertices.push_back(std::move(v));
    }
  }

  struct Ends {
    int in = -1, out = -1;
    size_t in_count = 0, out_count = 0;
  };
  std::vector<Ends> ends(m.nodes.size());
  for (const auto& [a, b] : m.links) {
    if (a >= m.nodes.size() || b >= m.nodes.size())
      throw MalformedMidpointGraphError("link endpoint out of range");
    bool a_mid = m.nodes[a].kind == MidNode::Kind::midpoint;
    bool b_mid = m.nodes[b].kind == MidNode::Kind::midpoint;
    if (a_mid == b_mid)
      throw MalformedMidpointGraphError(
          a_mid ? "link connects two midpoints"
                : "link bypasses midpoints (vertex to vertex)");
    if (b_mid) {
      ends[b].in = (int)a;
      ++ends[b].in_count;
    } else {
      ends[a].out = (int)b;
      ++ends[a].out_count;
    }
  }

  HeapGraph g;
  g.vertices_ = std::move(vertices);
  for (size_t i = 0; i < m.nodes.size(); ++i) {
    if (m.nodes[i].kind != MidNode::Kind::midpoint) continue;
    if (ends[i].in_count != 1 || ends[i].out_count != 1)
      throw MalformedMidpointGraphError(
          "midpoint must have exactly one incoming and one outgoing link");
    Edge e;
    e.src = VertexId{(uint32_t)vertex_pos[ends[i].in]};
    e.dst = VertexId{(uint32_t)vertex_pos[ends[i].out]};
    e.slot = m.nodes[i].slot;
    e.implied = m.nodes[i].implied;
    g.edges_.push_back(std::move(e));
  }
  // Restore the heaplet record from the asserted edges, as graph_to_term
  // does, so the reconstruction is a full heap graph rather than a shell.
  for (const auto& e : g.edges_) {
    if (e.implied) continue;
    Location loc = location_of_name(g.vertex(e.src).name);
    if (!e.slot.empty()) loc.path.push_back(e.slot);
    g.heaplets_.push_back(Heaplet{std::move(loc), value_of_vertex(g.vertex(e.dst))});
  }
  return g;
}

// --- Subheap order -----------------------------------------------------------

namespace {

std::string edge_key(const HeapGraph& g, const Edge& e) {
  return vertex_key(g.vertex(e.src)) + " -" + e.slot + "-> " +
         vertex_key(g.vertex(e.dst));
}

}  // namespace

bool subheap(const HeapGraph& g1, const HeapGraph& g2) {
  std::multiset<std::string> have;
  for (const auto& e : g2.edges())
    if (!e.implied) have.insert(edge_key(g2, e));
  for (const auto& e : g1.edges()) {
    if (e.implied) continue;
    auto it = have.find(edge_key(g1, e));
    if (it == have.end()) return false;
    have.erase(it);
  }
  return true;
}

// --- Back to terms and DOT ---------------------------------------------------

HeapTerm graph_to_term(const HeapGraph& g) {
  std::vector<int> group;
  count_components(g, nullptr, &group);

  std::map<int, std::vector<Heaplet>> per_comp;
  for (const auto& e : g.edges()) {
    if (e.implied) continue;
    Location loc = location_of_name(g.vertex(e.src).name);
    if (!e.slot.empty()) loc.path.push_back(e.slot);
    per_comp[group[e.src.value]].push_back(
        Heaplet{std::move(loc), value_of_vertex(g.vertex(e.dst))});
  }

  std::vector<std::vector<Heaplet>> comps;
  for (auto& [rep, hs] : per_comp) {
    std::sort(hs.begin(), hs.end(), [](const Heaplet& a, const Heaplet& b) {
      return detail::heaplet_before(a, b);
    });
    comps.push_back(std::move(hs));
  }
  std::sort(comps.begin(), comps.end(),
            [](const std::vector<Heaplet>& a, const std::vector<Heaplet>& b) {
              return detail::heaplet_before(a.front(), b.front());
            });

  std::vector<HeapTerm> parts;
  for (const auto& hs : comps) {
    std::vector<HeapTerm> atoms;
    atoms.reserve(hs.size());
    for (const auto& h : hs) atoms.push_back(HeapTerm::points_to(h));
    parts.push_back(HeapTerm::conj_all(atoms));
  }
  if (parts.empty()) return HeapTerm::emp();
  return HeapTerm::disj_all(parts);
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string to_dot(const HeapGraph& g, const std::string& title) {
  std::set<uint32_t> gray;
  for (VertexId id : g.garbage()) gray.insert(id.value);

  std::ostringstream os;
  os << "digraph \"" << dot_escape(title) << "\" {\n";
  os << "  rankdir=LR;\n";
  os << "  node [fontname=\"Helvetica\"];\n";
  for (const auto& v : g.vertices()) {
    os << "  v" << v.id.value << " [label=\"" << dot_escape(v.label) << "\"";
    switch (v.kind) {
      case Vertex::Kind::stack_root:
        os << ", shape=none";
        break;
      case Vertex::Kind::cell:
        os << ", shape=box";
        break;
      case Vertex::Kind::object:
        os << ", shape=record";
        break;
    }
    if (!v.cls.empty()) os << ", tooltip=\"" << dot_escape(v.cls) << "\"";
    if (gray.count(v.id.value))
      os << ", style=filled, fillcolor=gray85, fontcolor=gray40";
    os << "];\n";
  }
  for (const auto& e : g.edges()) {
    os << "  v" << e.src.value << " -> v" << e.dst.value;
    std::vector<std::string> attrs;
    if (!e.slot.empty()) attrs.push_back("label=\"" + dot_escape(e.slot) + "\"");
    if (e.implied) attrs.push_back("style=dashed");
    if (!attrs.empty()) {
      os << " [" << attrs[0];
      for (size_t i = 1; i < attrs.size(); ++i) os << ", " << attrs[i];
      os << "]";
    }
    os << ";\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace heaplog
