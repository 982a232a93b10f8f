#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "gu/avm.hpp"
#include "gu/grammar.hpp"

namespace gu {

struct ParseError : std::runtime_error {
  ParseError(std::string file, int line, int col, const std::string& msg);
  std::string file;  // "<input>" for in-memory text
  int line = 0;
  int col = 0;
};

/// One bracketed structure, e.g.
///   [CAT: {np}  NUM: {sg: 0.6, pl: 0.4} !2.0  SUBJ: #1 []]
FeatureStructure parse_fs(const std::string& text);

Grammar parse_grammar(const std::string& text, const std::string& filename = "");
Lexicon parse_lexicon(const std::string& text, const std::string& filename = "");
std::vector<TagProb> parse_tag_probs(const std::string& text,
                                     const std::string& filename = "");

Grammar load_grammar(const std::string& path);
Lexicon load_lexicon(const std::string& path);
std::vector<TagProb> load_tag_probs(const std::string& path);

}  // namespace gu
