#include "gu/unify.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <unordered_map>

namespace gu {

Atom unify_atoms(const Atom& a, const Atom& b) {
  std::vector<std::pair<std::string, double>> merged;
  for (const auto& [sym, w] : a.weights()) merged.emplace_back(sym, 0.5 * (w + b.weight(sym)));
  for (const auto& [sym, w] : b.weights())
    if (a.weight(sym) == 0.0) merged.emplace_back(sym, 0.5 * w);
  return Atom(merged);
}

double atom_strength(const Atom& a, const Atom& b) {
  double s = 0.0;
  for (const auto& [sym, w] : a.weights()) s += std::min(w, b.weight(sym));
  return s;
}

namespace {

struct CompatSums {
  double actual = 0.0;
  double perfect = 0.0;
  bool clash = false;
};

// What the other structure holds at a path that is atomic on one side.
enum class At { absent, arcs, blocked };

At resolve(const FeatureStructure& fs, const Path& path) {
  FeatureStructure cur = fs;
  for (const auto& name : path) {
    if (cur.is_atom()) return At::blocked;
    auto it = cur.features().find(name);
    if (it == cur.features().end()) return At::absent;
    cur = it->second.value;
  }
  if (cur.is_atom()) return At::blocked;  // shared atomic paths are handled by the merge
  return cur.features().empty() ? At::absent : At::arcs;
}

CompatSums compatibility_sums(const FeatureStructure& a, const FeatureStructure& b) {
  CompatSums s;
  auto pa = atomic_paths(a);
  auto pb = atomic_paths(b);
  size_t i = 0, j = 0;
  while (i < pa.size() || j < pb.size()) {
    bool take_a = j == pb.size() || (i < pa.size() && pa[i].path < pb[j].path);
    bool take_b = i == pa.size() || (j < pb.size() && pb[j].path < pa[i].path);
    if (!take_a && !take_b) {  // shared path
      double pri = 0.5 * (pa[i].priority + pb[j].priority);
      s.actual += pri * atom_strength(pa[i].value, pb[j].value);
      s.perfect += pri;
      ++i, ++j;
      continue;
    }
    const AtomicPath& p = take_a ? pa[i] : pb[j];
    switch (resolve(take_a ? b : a, p.path)) {
      case At::absent:
        s.actual += p.priority;
        s.perfect += p.priority;
        break;
      case At::arcs:
      case At::blocked:
        s.clash = true;
        return s;
    }
    take_a ? ++i : ++j;
  }
  return s;
}

// ---------------------------------------------------------------------------
// destructive graph unification on an arena copy, union-find over nodes

struct ArenaSlot {
  int node;
  double pri;
  bool atomic_src;  // value was atomic in the structure it came from
};

struct ArenaNode {
  int parent = -1;
  std::optional<Atom> atom;
  std::map<std::string, ArenaSlot> feats;
};

class Arena {
 public:
  int import(const FeatureStructure& fs) {
    auto it = memo_.find(fs.node_id());
    if (it != memo_.end()) return it->second;
    int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    memo_.emplace(fs.node_id(), id);
    if (fs.is_atom()) {
      nodes_[id].atom = fs.as_atom();
      return id;
    }
    for (const auto& [name, slot] : fs.features()) {
      int child = import(slot.value);
      nodes_[id].feats.emplace(name, ArenaSlot{child, slot.priority, slot.value.is_atom()});
    }
    return id;
  }

  int id_of(const FeatureStructure& fs) const { return memo_.at(fs.node_id()); }

  int find(int x) {
    while (nodes_[x].parent >= 0) x = nodes_[x].parent;
    return x;
  }

  bool unify(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return true;
    if (nodes_[a].atom && nodes_[b].atom) {
      nodes_[a].atom = unify_atoms(*nodes_[a].atom, *nodes_[b].atom);
      nodes_[b].parent = a;
      return true;
    }
    if (nodes_[a].atom) {  // b is complex: only an arcless node gives way
      if (!nodes_[b].feats.empty()) return false;
      nodes_[b].parent = a;
      return true;
    }
    if (nodes_[b].atom) {
      if (!nodes_[a].feats.empty()) return false;
      nodes_[a].parent = b;
      return true;
    }
    nodes_[b].parent = a;
    auto moved = std::move(nodes_[b].feats);
    nodes_[b].feats.clear();
    for (auto& [name, bslot] : moved) {
      int tgt = find(a);  // nested merges may have absorbed the survivor
      auto [it, fresh] = nodes_[tgt].feats.try_emplace(name, bslot);
      if (fresh) continue;
      ArenaSlot& as = it->second;
      if (as.atomic_src && bslot.atomic_src)
        as.pri = 0.5 * (as.pri + bslot.pri);
      else if (bslot.atomic_src)
        as.pri = bslot.pri;
      else if (!as.atomic_src)
        as.pri = 1.0;
      as.atomic_src = as.atomic_src || bslot.atomic_src;
      int an = as.node, bn = bslot.node;  // the reference dies across the recursion
      if (!unify(an, bn)) return false;
    }
    return true;
  }

  // Rebuild an immutable structure from the merged graph. nullopt when the
  // merge introduced a cycle (the classical occurs failure).
  std::optional<FeatureStructure> extract(int root) {
    state_.assign(nodes_.size(), 0);
    out_.clear();
    return extract_rec(root);
  }

 private:
  std::optional<FeatureStructure> extract_rec(int x) {
    x = find(x);
    if (auto it = out_.find(x); it != out_.end()) return it->second;
    if (state_[x] == 1) return std::nullopt;
    state_[x] = 1;
    FeatureStructure result;
    if (nodes_[x].atom) {
      result = FeatureStructure::atom(*nodes_[x].atom);
    } else {
      std::vector<std::pair<std::string, Slot>> arcs;
      for (const auto& [name, s] : nodes_[x].feats) {
        auto child = extract_rec(s.node);
        if (!child) return std::nullopt;
        double pri = child->is_atom() ? s.pri : 1.0;
        arcs.emplace_back(name, Slot{*child, pri});
      }
      result = FeatureStructure::make(std::move(arcs));
    }
    state_[x] = 2;
    out_.emplace(x, result);
    return result;
  }

  std::deque<ArenaNode> nodes_;
  std::unordered_map<const void*, int> memo_;
  std::vector<char> state_;
  std::unordered_map<int, FeatureStructure> out_;
};

}  // namespace

std::optional<double> actual_compatibility(const FeatureStructure& a, const FeatureStructure& b) {
  auto s = compatibility_sums(a, b);
  if (s.clash) return std::nullopt;
  return s.actual;
}

std::optional<double> perfect_compatibility(const FeatureStructure& a, const FeatureStructure& b) {
  auto s = compatibility_sums(a, b);
  if (s.clash) return std::nullopt;
  return s.perfect;
}

UnifyResult unify_graded_at(const FeatureStructure& container, const Path& path,
                            const FeatureStructure& other, double threshold) {
  auto sub = get_path(container, path);
  if (!sub) throw std::invalid_argument("unify_graded_at: no node at the given path");

  auto sums = compatibility_sums(*sub, other);
  if (sums.clash) return {UnifyResult::Status::clash, 0.0, std::nullopt};
  double strength = sums.perfect <= kEps ? 1.0 : sums.actual / sums.perfect;
  strength = std::clamp(strength, 0.0, 1.0);
  if (strength < threshold - kEps)
    return {UnifyResult::Status::below_threshold, strength, std::nullopt};

  Arena arena;
  int root = arena.import(container);
  int at = arena.id_of(*sub);
  int oth = arena.import(other);
  if (!arena.unify(at, oth)) return {UnifyResult::Status::clash, 0.0, std::nullopt};
  auto fs = arena.extract(root);
  if (!fs) return {UnifyResult::Status::clash, 0.0, std::nullopt};
  return {UnifyResult::Status::ok, strength, std::move(fs)};
}

UnifyResult unify_graded(const FeatureStructure& a, const FeatureStructure& b, double threshold) {
  return unify_graded_at(a, {}, b, threshold);
}

}  // namespace gu
