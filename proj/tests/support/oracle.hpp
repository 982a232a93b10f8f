#pragma once
// Independent reference implementations the tests check the library
// against: a path-dictionary strength calculator, a textbook destructive
// unifier, and a brute-force derivation enumerator. Everything here favors
// the most literal formulation over sharing code with the library.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gu/avm.hpp"
#include "gu/grammar.hpp"

namespace oracle {

// ---- atoms ----------------------------------------------------------------

// Total shared mass: sum over common symbols of the smaller weight.
double min_sum(const gu::Atom& a, const gu::Atom& b);

// Union of the symbol sets with averaged weights (absent counts as 0).
gu::Atom avg_union(const gu::Atom& a, const gu::Atom& b);

// ---- path-dictionary strength ----------------------------------------------

struct Leaf {
  gu::Atom atom;
  double priority;
};

// A structure flattened into plain dictionaries, sharing fully expanded.
// `interior` holds every path whose node is complex and carries at least
// one arc; arc-less complex nodes count as absence.
struct Flat {
  std::map<gu::Path, Leaf> leaves;
  std::set<gu::Path> interior;
};

Flat flatten(const gu::FeatureStructure& fs);

struct Sums {
  double actual = 0.0;
  double perfect = 0.0;
};

// The two compatibility sums over the union of atomic paths: a path atomic
// on both sides contributes its mean priority (scaled by the shared atom
// mass for `actual`); a path atomic on one side only contributes its own
// priority to both. nullopt when some path is atomic on one side but
// interior on the other.
std::optional<Sums> compatibility(const gu::FeatureStructure& a, const gu::FeatureStructure& b);

// actual / perfect, with 1.0 when neither side has an atomic path;
// nullopt on a structural clash.
std::optional<double> strength(const gu::FeatureStructure& a, const gu::FeatureStructure& b);

// ---- classical unification ---------------------------------------------------

// Textbook destructive unifier over a scratch union-find graph; atoms unify
// only when their distributions are equal, and a cyclic result fails the
// occurs check. Assumes every priority is the default 1.0 (the extracted
// structure carries 1.0 everywhere).
std::optional<gu::FeatureStructure> classical_unify(const gu::FeatureStructure& a,
                                                    const gu::FeatureStructure& b);

// ---- brute-force derivations ---------------------------------------------------

struct Derivation {
  std::string label;  // rule id, or lexical entry id at leaves
  std::string cat;
  int start = 0;
  int end = 0;
  std::string token;  // leaves only
  std::vector<Derivation> children;
  gu::FeatureStructure mother;  // classical unification result for the node
};

// Canonical bracketing "(label@start-end child ...)" for set comparisons.
std::string derivation_key(const Derivation& d);

// Every derivation of the start category over the whole token range whose
// rule bodies also survive classical unification bottom-up. Enumerates the
// context-free backbone (dominant CAT symbols) first, then validates.
// Assumes uniform priorities and an acyclic unit-rule graph.
std::vector<Derivation> enumerate_parses(const gu::Grammar& grammar,
                                         const gu::Lexicon& lexicon,
                                         const std::vector<std::string>& tokens);

}  // namespace oracle
