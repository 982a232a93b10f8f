#include "support/oracle.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace oracle {

// ---- atoms ----------------------------------------------------------------

double min_sum(const gu::Atom& a, const gu::Atom& b) {
  double total = 0.0;
  for (const auto& [sym, w] : a.weights()) {
    auto it = b.weights().find(sym);
    if (it != b.weights().end()) total += std::min(w, it->second);
  }
  return total;
}

gu::Atom avg_union(const gu::Atom& a, const gu::Atom& b) {
  std::vector<std::pair<std::string, double>> ds;
  for (const auto& [sym, w] : a.weights()) ds.emplace_back(sym, (w + b.weight(sym)) / 2.0);
  for (const auto& [sym, w] : b.weights())
    if (a.weights().find(sym) == a.weights().end()) ds.emplace_back(sym, w / 2.0);
  return gu::Atom(ds);
}

// ---- path-dictionary strength ----------------------------------------------

namespace {

void flat_rec(const gu::FeatureStructure& node, gu::Path& prefix, Flat& out) {
  if (!node.features().empty()) out.interior.insert(prefix);
  for (const auto& [name, slot] : node.features()) {
    prefix.push_back(name);
    if (slot.value.is_atom())
      out.leaves.insert({prefix, Leaf{slot.value.as_atom(), slot.priority}});
    else
      flat_rec(slot.value, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

Flat flatten(const gu::FeatureStructure& fs) {
  Flat out;
  if (fs.is_atom()) {
    out.leaves.insert({gu::Path{}, Leaf{fs.as_atom(), 1.0}});
    return out;
  }
  gu::Path prefix;
  flat_rec(fs, prefix, out);
  return out;
}

std::optional<Sums> compatibility(const gu::FeatureStructure& a, const gu::FeatureStructure& b) {
  Flat fa = flatten(a);
  Flat fb = flatten(b);
  for (const auto& [p, leaf] : fa.leaves)
    if (fb.interior.count(p)) return std::nullopt;
  for (const auto& [p, leaf] : fb.leaves)
    if (fa.interior.count(p)) return std::nullopt;
  Sums s;
  for (const auto& [p, la] : fa.leaves) {
    auto it = fb.leaves.find(p);
    if (it != fb.leaves.end()) {
      double mean = (la.priority + it->second.priority) / 2.0;
      s.actual += mean * min_sum(la.atom, it->second.atom);
      s.perfect += mean;
    } else {
      s.actual += la.priority;
      s.perfect += la.priority;
    }
  }
  for (const auto& [p, lb] : fb.leaves) {
    if (!fa.leaves.count(p)) {
      s.actual += lb.priority;
      s.perfect += lb.priority;
    }
  }
  return s;
}

std::optional<double> strength(const gu::FeatureStructure& a, const gu::FeatureStructure& b) {
  auto s = compatibility(a, b);
  if (!s) return std::nullopt;
  if (s->perfect <= 0.0) return 1.0;  // neither side constrains anything
  return s->actual / s->perfect;
}

// ---- classical unification ---------------------------------------------------

namespace {

struct CGraph {
  struct Node {
    std::optional<gu::Atom> atom;
    std::map<std::string, int> arcs;
    int parent = -1;
  };
  std::vector<Node> nodes;

  int find(int x) {
    while (nodes[x].parent != x) {
      nodes[x].parent = nodes[nodes[x].parent].parent;
      x = nodes[x].parent;
    }
    return x;
  }

  int import(const gu::FeatureStructure& fs, std::map<const void*, int>& memo) {
    auto hit = memo.find(fs.node_id());
    if (hit != memo.end()) return hit->second;
    int id = static_cast<int>(nodes.size());
    nodes.push_back(Node{});
    nodes[id].parent = id;
    memo.emplace(fs.node_id(), id);
    if (fs.is_atom()) {
      nodes[id].atom = fs.as_atom();
    } else {
      for (const auto& [name, slot] : fs.features()) {
        int child = import(slot.value, memo);
        nodes[id].arcs.emplace(name, child);
      }
    }
    return id;
  }

  bool unite(int x, int y) {
    x = find(x);
    y = find(y);
    if (x == y) return true;
    nodes[y].parent = x;
    std::optional<gu::Atom> yatom = std::move(nodes[y].atom);
    std::map<std::string, int> yarcs = std::move(nodes[y].arcs);
    nodes[y].atom.reset();
    nodes[y].arcs.clear();
    if (yatom) {
      if (nodes[x].atom) {
        if (!gu::atoms_equal(*nodes[x].atom, *yatom)) return false;
      } else if (!nodes[x].arcs.empty()) {
        return false;  // atom against a complex node with arcs
      } else {
        nodes[x].atom = std::move(yatom);
      }
    } else if (!yarcs.empty() && nodes[x].atom) {
      return false;
    }
    for (const auto& [name, cy] : yarcs) {
      auto it = nodes[x].arcs.find(name);
      if (it == nodes[x].arcs.end())
        nodes[x].arcs.emplace(name, cy);
      else if (!unite(it->second, cy))
        return false;
    }
    return true;
  }

  std::optional<gu::FeatureStructure> extract(int root) {
    std::map<int, gu::FeatureStructure> done;
    std::set<int> grey;
    return ex(root, done, grey);
  }

  std::optional<gu::FeatureStructure> ex(int id, std::map<int, gu::FeatureStructure>& done,
                                         std::set<int>& grey) {
    int r = find(id);
    auto hit = done.find(r);
    if (hit != done.end()) return hit->second;
    if (!grey.insert(r).second) return std::nullopt;  // occurs check
    std::optional<gu::FeatureStructure> out;
    if (nodes[r].atom) {
      out = gu::FeatureStructure::atom(*nodes[r].atom);
    } else {
      std::vector<std::pair<std::string, gu::Slot>> arcs;
      bool bad = false;
      for (const auto& [name, child] : nodes[r].arcs) {
        auto sub = ex(child, done, grey);
        if (!sub) {
          bad = true;
          break;
        }
        arcs.emplace_back(name, gu::Slot{*sub, 1.0});
      }
      if (!bad) out = gu::FeatureStructure::make(std::move(arcs));
    }
    grey.erase(r);
    if (out) done.emplace(r, *out);
    return out;
  }
};

}  // namespace

std::optional<gu::FeatureStructure> classical_unify(const gu::FeatureStructure& a,
                                                    const gu::FeatureStructure& b) {
  CGraph cg;
  // One memo for both sides: a node genuinely shared between the arguments
  // is the same node.
  std::map<const void*, int> memo;
  int ra = cg.import(a, memo);
  int rb = cg.import(b, memo);
  if (!cg.unite(ra, rb)) return std::nullopt;
  return cg.extract(ra);
}

// ---- brute-force derivations ---------------------------------------------------

namespace {

std::string dominant_cat(const gu::FeatureStructure& fs) {
  auto cat = gu::get_path(fs, {"CAT"});
  if (!cat || !cat->is_atom())
    throw std::invalid_argument("constituent without an atomic CAT");
  return cat->as_atom().argmax().front();
}

struct Cell {
  std::vector<Derivation> items;
  std::set<std::string> keys;

  bool add(Derivation d) {
    std::string k = derivation_key(d);
    if (!keys.insert(k).second) return false;
    items.push_back(std::move(d));
    return true;
  }
};

struct Backbone {
  const gu::Grammar& grammar;
  const gu::Lexicon& lexicon;
  const std::vector<std::string>& tokens;
  // (start, end, cat) -> derivations of that category over that span
  std::map<std::tuple<int, int, std::string>, Cell> table;

  const std::vector<Derivation>& at(int i, int j, const std::string& cat) {
    static const std::vector<Derivation> kNone;
    auto it = table.find({i, j, cat});
    return it == table.end() ? kNone : it->second.items;
  }

  // Every way to finish rhs[idx..] over [pos, j); calls sink on full rows.
  void assemble(const std::vector<std::string>& cats, std::size_t idx, int pos, int j,
                std::vector<Derivation>& row, bool& changed, const gu::Rule& rule, int i) {
    if (idx == cats.size()) {
      if (pos != j) return;
      Derivation d;
      d.label = rule.id;
      d.cat = dominant_cat(rule.lhs);
      d.start = i;
      d.end = j;
      d.children = row;
      changed = table[{i, j, d.cat}].add(std::move(d)) || changed;
      return;
    }
    int remaining = static_cast<int>(cats.size() - idx - 1);
    for (int end = pos + 1; end <= j - remaining; ++end) {
      // Copy: a unit rule writes into the cell it is reading from.
      const std::vector<Derivation> children = at(pos, end, cats[idx]);
      for (const Derivation& child : children) {
        row.push_back(child);
        assemble(cats, idx + 1, end, j, row, changed, rule, i);
        row.pop_back();
      }
    }
  }

  void build() {
    int n = static_cast<int>(tokens.size());
    for (int i = 0; i < n; ++i) {
      for (int idx : lexicon.entries_for(tokens[i])) {
        const gu::LexEntry& e = lexicon.entries()[idx];
        Derivation d;
        d.label = e.id;
        d.cat = dominant_cat(e.fs);
        d.start = i;
        d.end = i + 1;
        d.token = tokens[i];
        table[{i, i + 1, d.cat}].add(std::move(d));
      }
    }
    std::vector<std::vector<std::string>> rhs_cats;
    for (const gu::Rule& r : grammar.rules) {
      std::vector<std::string> cats;
      for (const auto& slot : r.rhs) cats.push_back(dominant_cat(slot));
      rhs_cats.push_back(std::move(cats));
    }
    for (int span = 1; span <= n; ++span) {
      for (int i = 0; i + span <= n; ++i) {
        int j = i + span;
        // Unit rules re-derive over the same span, so iterate to a fixpoint.
        bool changed = true;
        int guard = 0;
        while (changed) {
          changed = false;
          if (++guard > 200) throw std::runtime_error("unit-rule cycle in test grammar");
          for (std::size_t r = 0; r < grammar.rules.size(); ++r) {
            std::vector<Derivation> row;
            assemble(rhs_cats[r], 0, i, j, row, changed, grammar.rules[r], i);
          }
        }
      }
    }
  }
};

const gu::Rule* rule_by_id(const gu::Grammar& g, const std::string& id) {
  for (const auto& r : g.rules)
    if (r.id == id) return &r;
  return nullptr;
}

std::optional<gu::FeatureStructure> validate(const Derivation& d, const gu::Grammar& grammar,
                                             const gu::Lexicon& lexicon) {
  if (d.children.empty()) {
    const gu::LexEntry* e = lexicon.by_id(d.label);
    if (!e) return std::nullopt;
    return e->fs;
  }
  const gu::Rule* rule = rule_by_id(grammar, d.label);
  if (!rule || rule->rhs.size() != d.children.size()) return std::nullopt;
  CGraph cg;
  // lhs and rhs enter through one memo so rule-internal sharing links them;
  // each child gets a fresh memo so repeated lexicon nodes stay distinct
  // copies, as they are in chart edges.
  std::map<const void*, int> rule_memo;
  int lhs = cg.import(rule->lhs, rule_memo);
  std::vector<int> slots;
  for (const auto& r : rule->rhs) slots.push_back(cg.import(r, rule_memo));
  for (std::size_t k = 0; k < d.children.size(); ++k) {
    auto child = validate(d.children[k], grammar, lexicon);
    if (!child) return std::nullopt;
    std::map<const void*, int> child_memo;
    int croot = cg.import(*child, child_memo);
    if (!cg.unite(slots[k], croot)) return std::nullopt;
  }
  return cg.extract(lhs);
}

}  // namespace

std::string derivation_key(const Derivation& d) {
  std::string out = "(" + d.label + "@" + std::to_string(d.start) + "-" + std::to_string(d.end);
  for (const Derivation& c : d.children) out += " " + derivation_key(c);
  return out + ")";
}

std::vector<Derivation> enumerate_parses(const gu::Grammar& grammar, const gu::Lexicon& lexicon,
                                         const std::vector<std::string>& tokens) {
  Backbone bb{grammar, lexicon, tokens, {}};
  bb.build();
  std::vector<Derivation> out;
  for (const Derivation& d : bb.at(0, static_cast<int>(tokens.size()), grammar.start)) {
    auto mother = validate(d, grammar, lexicon);
    if (!mother) continue;
    Derivation v = d;
    v.mother = *mother;
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace oracle
