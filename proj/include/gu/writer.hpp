#pragma once

#include <string>

#include <json.hpp>

#include "gu/chart.hpp"
#include "gu/parser.hpp"

namespace gu {

/// Text form that parse_fs reads back: features name-sorted, disjuncts by
/// falling weight, '#n' tags on shared nodes, '!p' on non-default
/// priorities, '{sym}' for certain singleton atoms.
std::string render_fs(const FeatureStructure& fs);

/// Bracketed derivation, e.g. (s (np (det the) (n van)) (vp ...)).
std::string render_tree(const ParseTree& t);

/// One tab-separated line per event:
/// step, kind, edge, parents, strength, activation, detail ('-' = blank).
std::string trace_tsv(const Chart& chart);

nlohmann::json tree_json(const ParseTree& t);
nlohmann::json report_json(const ParseReport& report, int n_best, bool include_trace);

std::string report_text(const ParseReport& report, int n_best, bool include_trace);

}  // namespace gu
