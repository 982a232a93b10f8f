#include "gu/avm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace gu {

Atom::Atom(const std::vector<std::pair<std::string, double>>& disjuncts) {
  if (disjuncts.empty()) throw std::invalid_argument("atom needs at least one disjunct");
  double mass = 0.0;
  for (const auto& [sym, w] : disjuncts) {
    if (w < 0.0) throw std::invalid_argument("negative disjunct weight for '" + sym + "'");
    w_[sym] += w;
    mass += w;
  }
  if (mass <= 0.0) throw std::invalid_argument("atom weights sum to zero");
  // leave already-normalized input untouched so serialization round-trips exactly
  if (std::abs(mass - 1.0) > kEps)
    for (auto& [sym, w] : w_) w /= mass;
}

Atom Atom::single(const std::string& symbol) { return Atom({{symbol, 1.0}}); }

double Atom::weight(const std::string& symbol) const {
  auto it = w_.find(symbol);
  return it == w_.end() ? 0.0 : it->second;
}

std::vector<std::string> Atom::argmax() const {
  double best = 0.0;
  for (const auto& [sym, w] : w_) best = std::max(best, w);
  std::vector<std::string> out;
  for (const auto& [sym, w] : w_)
    if (w >= best - kEps) out.push_back(sym);
  return out;  // map order is already name-sorted
}

bool atoms_equal(const Atom& a, const Atom& b, double eps) {
  if (a.weights().size() != b.weights().size()) return false;
  auto ib = b.weights().begin();
  for (const auto& [sym, w] : a.weights()) {
    if (sym != ib->first || std::fabs(w - ib->second) > eps) return false;
    ++ib;
  }
  return true;
}

FeatureStructure::FeatureStructure() : n_(std::make_shared<const Node>()) {}

FeatureStructure::FeatureStructure(std::shared_ptr<const Node> n) : n_(std::move(n)) {}

FeatureStructure FeatureStructure::atom(Atom a) {
  auto n = std::make_shared<Node>();
  n->atom = std::move(a);
  return FeatureStructure(std::move(n));
}

FeatureStructure FeatureStructure::atom(const std::string& symbol) {
  return atom(Atom::single(symbol));
}

FeatureStructure FeatureStructure::empty() { return FeatureStructure(); }

FeatureStructure FeatureStructure::make(std::vector<std::pair<std::string, Slot>> arcs) {
  auto n = std::make_shared<Node>();
  for (auto& [name, slot] : arcs) {
    if (slot.priority <= 0.0)
      throw std::invalid_argument("priority must be positive on feature '" + name + "'");
    if (!slot.value.is_atom() && std::fabs(slot.priority - 1.0) > kEps)
      throw std::invalid_argument("priority on complex-valued feature '" + name + "'");
    if (!n->feats.emplace(std::move(name), std::move(slot)).second)
      throw std::invalid_argument("duplicate feature name");
  }
  return FeatureStructure(std::move(n));
}

bool FeatureStructure::is_atom() const { return n_->atom.has_value(); }

const Atom& FeatureStructure::as_atom() const {
  if (!is_atom()) throw std::logic_error("not an atomic node");
  return *n_->atom;
}

const std::map<std::string, Slot>& FeatureStructure::features() const { return n_->feats; }

const void* FeatureStructure::node_id() const { return n_.get(); }

std::optional<FeatureStructure> get_path(const FeatureStructure& fs, const Path& path) {
  FeatureStructure cur = fs;
  for (const auto& name : path) {
    if (cur.is_atom()) return std::nullopt;
    auto it = cur.features().find(name);
    if (it == cur.features().end()) return std::nullopt;
    cur = it->second.value;
  }
  return cur;
}

namespace {

void collect_atomic(const FeatureStructure& fs, Path& prefix, std::vector<AtomicPath>& out) {
  if (fs.is_atom()) {
    // a bare atom root; arcs attach priorities, so the root carries the default
    out.push_back({prefix, fs.as_atom(), 1.0});
    return;
  }
  for (const auto& [name, slot] : fs.features()) {
    prefix.push_back(name);
    if (slot.value.is_atom())
      out.push_back({prefix, slot.value.as_atom(), slot.priority});
    else
      collect_atomic(slot.value, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<AtomicPath> atomic_paths(const FeatureStructure& fs) {
  std::vector<AtomicPath> out;
  Path prefix;
  collect_atomic(fs, prefix, out);
  // preorder over name-sorted arcs is already lexicographic in the paths
  return out;
}

namespace {

// Bisimulation check with a bijective node correspondence: equal structures
// must pair up node for node, which captures "same sharing relation".
struct EqState {
  std::unordered_map<const void*, const void*> fwd, rev;
  double eps;
};

bool equal_rec(const FeatureStructure& a, const FeatureStructure& b, EqState& st) {
  auto fa = st.fwd.find(a.node_id());
  auto fb = st.rev.find(b.node_id());
  if (fa != st.fwd.end() || fb != st.rev.end()) {
    return fa != st.fwd.end() && fb != st.rev.end() &&
           fa->second == b.node_id() && fb->second == a.node_id();
  }
  st.fwd.emplace(a.node_id(), b.node_id());
  st.rev.emplace(b.node_id(), a.node_id());
  if (a.is_atom() != b.is_atom()) return false;
  if (a.is_atom()) return atoms_equal(a.as_atom(), b.as_atom(), st.eps);
  if (a.features().size() != b.features().size()) return false;
  auto ib = b.features().begin();
  for (const auto& [name, slot] : a.features()) {
    if (name != ib->first) return false;
    if (slot.value.is_atom() && ib->second.value.is_atom() &&
        std::fabs(slot.priority - ib->second.priority) > st.eps)
      return false;
    if (!equal_rec(slot.value, ib->second.value, st)) return false;
    ++ib;
  }
  return true;
}

}  // namespace

bool fs_equal(const FeatureStructure& a, const FeatureStructure& b, double eps) {
  EqState st;
  st.eps = eps;
  return equal_rec(a, b, st);
}

}  // namespace gu
