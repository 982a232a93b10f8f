#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "gu/chart.hpp"
#include "gu/grammar.hpp"

namespace gu {

struct UnknownWord : std::runtime_error {
  UnknownWord(std::string token, int position);
  std::string token;
  int position = 0;
};

struct ParseReport {
  std::vector<std::string> tokens;
  Chart chart;
  std::vector<int> parses;  // spanning inactive edges, best first

  const std::vector<Suspension>& suspended() const { return chart.suspended; }
  const std::vector<TraceEvent>& trace() const { return chart.trace; }
  bool truncated() const { return chart.truncated; }
  int steps() const { return chart.steps; }
};

struct ParseTree {
  int edge = -1;
  std::string label;     // rule id, or the lexical entry id at leaves
  std::string category;  // dominant CAT symbol of the edge's mother
  int start = 0;
  int end = 0;
  std::string token;  // leaves only
  std::vector<ParseTree> children;
};

struct RankedParse {
  int edge = -1;
  double activation = 0.0;
  ParseTree tree;
  FeatureStructure mother;
};

class ChartParser {
 public:
  /// Validates the configuration and the grammar (unique rule ids,
  /// non-empty right-hand sides, an atomic CAT on every constituent).
  ChartParser(Grammar grammar, Lexicon lexicon, ParserConfig cfg = {});

  const Grammar& grammar() const { return grammar_; }
  const Lexicon& lexicon() const { return lexicon_; }
  const ParserConfig& config() const { return cfg_; }

  /// Lexical lookup only: one inactive edge per (token, entry), activation
  /// taken from `acts` (1.0 when absent), edges below the activation
  /// threshold suspended immediately. Throws UnknownWord.
  Chart init_chart(const std::vector<std::string>& tokens,
                   const LexActivations& acts = {}) const;

  /// Full run: lexical edges, goal seeding, best-first agenda loop,
  /// spanning-parse collection.
  ParseReport parse(const std::vector<std::string>& tokens,
                    const LexActivations& acts = {}) const;

 private:
  struct Engine;
  Grammar grammar_;
  Lexicon lexicon_;
  ParserConfig cfg_;
  std::vector<FeatureStructure> wrappers_;  // one per rule: lhs + rhs under reserved arcs
};

/// Rebuilds the derivation of a chart edge from provenance links.
ParseTree build_tree(const ParseReport& report, int edge_id);

/// The n best spanning parses with trees; n <= 0 means all of them.
std::vector<RankedParse> extract_parses(const ParseReport& report, int n_best);

}  // namespace gu
