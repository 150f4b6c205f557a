#include "scope_tracker.hpp"

namespace heaplog::detail {

std::vector<std::string> location_chain(const Location& loc) {
  std::vector<std::string> chain;
  chain.reserve(loc.path.size());
  std::string acc = loc.root;
  chain.push_back(acc);
  for (size_t i = 0; i + 1 < loc.path.size(); ++i) {
    acc += '.';
    acc += loc.path[i];
    chain.push_back(acc);
  }
  return chain;
}

int ScopeTracker::node_of(const std::string& name) {
  auto [it, fresh] = node_ids_.try_emplace(name, (int)parent_.size());
  if (fresh) {
    parent_.push_back((int)parent_.size());
    name_order_.push_back(name);
  }
  return it->second;
}

int ScopeTracker::fresh_node() {
  parent_.push_back((int)parent_.size());
  return (int)parent_.size() - 1;
}

int ScopeTracker::find(int x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

void ScopeTracker::unite(int a, int b) { parent_[find(a)] = find(b); }

std::optional<Unsat> ScopeTracker::claim_plain(const std::string& v) {
  SourceState& s = sources_[v];
  if (s.plain || s.whole || !s.fields.empty() || !s.structural.empty())
    return Unsat{Unsat::Reason::duplicate_source, v};
  s.plain = true;
  return std::nullopt;
}

std::optional<Unsat> ScopeTracker::claim_field(const std::string& v,
                                               const std::string& f,
                                               const std::string& at) {
  SourceState& s = sources_[v];
  if (s.plain || s.whole || s.fields.count(f) || s.structural.count(f))
    return Unsat{Unsat::Reason::duplicate_source, at};
  s.fields.insert(f);
  return std::nullopt;
}

std::optional<Unsat> ScopeTracker::claim_whole(const std::string& v) {
  SourceState& s = sources_[v];
  if (s.plain || s.whole || !s.fields.empty() || !s.structural.empty())
    return Unsat{Unsat::Reason::duplicate_source, v};
  s.whole = true;
  return std::nullopt;
}

std::optional<Unsat> ScopeTracker::claim_structural(const std::string& v,
                                                    const std::string& f,
                                                    const std::string& at) {
  SourceState& s = sources_[v];
  if (s.structural.count(f)) return std::nullopt;  // idempotent
  if (s.plain || s.whole || s.fields.count(f))
    return Unsat{Unsat::Reason::duplicate_source, at};
  s.structural.insert(f);
  return std::nullopt;
}

int ScopeTracker::value_node(const Value& v) {
  switch (v.kind) {
    case Value::Kind::lit:
    case Value::Kind::any:
      return fresh_node();
    case Value::Kind::nil:
      return node_of("nil");
    case Value::Kind::sym:
      return node_of(v.sym);
    case Value::Kind::record:
      return -1;  // handled field by field by the caller
  }
  return -1;
}

std::optional<Unsat> ScopeTracker::add(const Heaplet& h) {
  std::string printed = h.str();
  if (!seen_heaplets_.insert(printed).second)
    return Unsat{Unsat::Reason::duplicate_heaplet, printed};

  std::vector<int> touched;
  std::vector<std::string> chain = location_chain(h.loc);
  for (const auto& name : chain) touched.push_back(node_of(name));
  // Prefix (structural) edges of a deep path: o --f1--> o.f1 --f2--> ...
  for (size_t i = 0; i + 1 < chain.size(); ++i) {
    if (auto u = claim_structural(chain[i], h.loc.path[i], chain[i + 1]))
      return u;
  }

  const std::string& src = chain.back();
  if (h.val.kind == Value::Kind::record) {
    // The record's object vertex: the source itself for a bare root, the
    // field's target vertex for a field location.
    std::string obj = src;
    if (h.loc.is_field()) {
      obj = h.loc.str();
      if (auto u = claim_field(src, h.loc.last_field(), obj)) return u;
      touched.push_back(node_of(obj));
    }
    if (auto u = claim_whole(obj)) return u;
    for (const auto& [field, fv] : h.val.fields) {
      int n = value_node(fv);
      touched.push_back(n);
    }
  } else if (h.loc.is_field()) {
    if (auto u = claim_field(src, h.loc.last_field(), h.loc.str())) return u;
    touched.push_back(value_node(h.val));
  } else {
    if (auto u = claim_plain(src)) return u;
    touched.push_back(value_node(h.val));
  }

  for (size_t i = 1; i < touched.size(); ++i) unite(touched[0], touched[i]);
  first_node_.push_back(touched[0]);
  ++added_;
  return std::nullopt;
}

bool ScopeTracker::connected() {
  if (first_node_.empty()) return true;
  int rep = find(first_node_[0]);
  for (size_t i = 1; i < first_node_.size(); ++i)
    if (find(first_node_[i]) != rep) return false;
  return true;
}

std::vector<std::vector<size_t>> ScopeTracker::heaplet_components() {
  std::vector<std::vector<size_t>> out;
  std::unordered_map<int, size_t> group_of;
  for (size_t i = 0; i < first_node_.size(); ++i) {
    int rep = find(first_node_[i]);
    auto [it, fresh] = group_of.try_emplace(rep, out.size());
    if (fresh) out.emplace_back();
    out[it->second].push_back(i);
  }
  return out;
}

}  // namespace heaplog::detail
