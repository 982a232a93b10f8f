#pragma once

#include <map>
#include <string>
#include <vector>

#include "gu/avm.hpp"

namespace gu {

/// One production. lhs and the rhs items may share nodes, so a binding
/// established against one constituent propagates into the others.
struct Rule {
  std::string id;
  FeatureStructure lhs;
  std::vector<FeatureStructure> rhs;  // never empty
};

struct Grammar {
  std::string start;  // category symbol the root CAT must carry
  std::vector<Rule> rules;
};

struct LexEntry {
  std::string id;  // word/cat, ".2", ".3" ... appended on collisions
  std::string word;
  FeatureStructure fs;
};

class Lexicon {
 public:
  /// Assigns the entry id from the word and the dominant CAT symbol.
  /// Throws std::invalid_argument when the structure has no atomic CAT.
  const LexEntry& add(const std::string& word, FeatureStructure fs);

  const std::vector<LexEntry>& entries() const { return entries_; }

  /// Indices into entries() in insertion order; empty for unknown words.
  std::vector<int> entries_for(const std::string& word) const;

  const LexEntry* by_id(const std::string& id) const;

 private:
  std::vector<LexEntry> entries_;
  std::map<std::string, std::vector<int>> by_word_;
  std::map<std::string, int> by_id_;
};

/// Per-token initial activations for lexical edges, keyed by
/// (token index, entry id). Pairs not present default to 1.0.
class LexActivations {
 public:
  void set(int token, const std::string& entry_id, double activation);
  double get(int token, const std::string& entry_id) const;
  bool empty() const { return m_.empty(); }

 private:
  std::map<std::pair<int, std::string>, double> m_;
};

/// One predicted likelihood record from a tag-prob file.
struct TagProb {
  int token = 0;
  std::string entry_id;
  double likelihood = 1.0;
  int line = 0;  // source line, for diagnostics
};

/// Turns records into activations. Throws std::invalid_argument when a
/// record names an entry id the lexicon does not define.
LexActivations bind_tag_probs(const std::vector<TagProb>& records, const Lexicon& lexicon);

}  // namespace gu
