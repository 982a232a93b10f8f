#include "gu/writer.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <map>
#include <set>

namespace gu {

namespace {

std::string num(double v) { return fmt::format("{}", v); }

// Arc targets reached through more than one arc get reentrancy tags,
// numbered in the order rendering first meets them.
void count_targets(const FeatureStructure& fs, std::map<const void*, int>& indeg,
                   std::set<const void*>& seen) {
  if (!seen.insert(fs.node_id()).second) return;
  for (const auto& [name, slot] : fs.features()) {
    ++indeg[slot.value.node_id()];
    count_targets(slot.value, indeg, seen);
  }
}

struct Renderer {
  std::map<const void*, int> indeg;
  std::map<const void*, int> tag;   // node -> assigned tag number
  std::set<const void*> emitted;    // tags whose body has been written
  int next_tag = 1;

  std::string atom_text(const Atom& a) const {
    std::vector<std::pair<std::string, double>> ds(a.weights().begin(), a.weights().end());
    std::sort(ds.begin(), ds.end(), [](const auto& x, const auto& y) {
      if (x.second != y.second) return x.second > y.second;
      return x.first < y.first;
    });
    if (ds.size() == 1 && std::abs(ds[0].second - 1.0) <= kEps)
      return fmt::format("{{{}}}", ds[0].first);
    std::string out = "{";
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (i) out += ", ";
      out += fmt::format("{}: {}", ds[i].first, num(ds[i].second));
    }
    return out + "}";
  }

  std::string render(const FeatureStructure& fs) {
    std::string prefix;
    if (indeg[fs.node_id()] >= 2) {
      auto it = tag.find(fs.node_id());
      if (it == tag.end()) it = tag.emplace(fs.node_id(), next_tag++).first;
      if (!emitted.insert(fs.node_id()).second)
        return fmt::format("#{}", it->second);
      prefix = fmt::format("#{} ", it->second);
    }
    if (fs.is_atom()) return prefix + atom_text(fs.as_atom());
    std::string out = prefix + "[";
    bool first = true;
    for (const auto& [name, slot] : fs.features()) {
      if (!first) out += "  ";
      first = false;
      out += fmt::format("{}: {}", name, render(slot.value));
      if (slot.value.is_atom() && std::abs(slot.priority - 1.0) > kEps)
        out += fmt::format(" !{}", num(slot.priority));
    }
    return out + "]";
  }
};

}  // namespace

std::string render_fs(const FeatureStructure& fs) {
  Renderer r;
  std::set<const void*> seen;
  count_targets(fs, r.indeg, seen);
  return r.render(fs);
}

std::string render_tree(const ParseTree& t) {
  if (t.children.empty() && !t.token.empty())
    return fmt::format("({} {})", t.category, t.token);
  std::string out = fmt::format("({}", t.category);
  for (const auto& c : t.children) out += " " + render_tree(c);
  return out + ")";
}

std::string trace_tsv(const Chart& chart) {
  std::string out;
  for (const TraceEvent& ev : chart.trace) {
    std::string parents = "-";
    if (!ev.parents.empty()) {
      parents.clear();
      for (std::size_t i = 0; i < ev.parents.size(); ++i) {
        if (i) parents += ",";
        parents += std::to_string(ev.parents[i]);
      }
    }
    out += fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\n", ev.step, event_name(ev.kind),
                       ev.edge >= 0 ? std::to_string(ev.edge) : "-", parents,
                       ev.strength ? num(*ev.strength) : "-",
                       ev.activation ? num(*ev.activation) : "-",
                       ev.detail.empty() ? "-" : ev.detail);
  }
  return out;
}

nlohmann::json tree_json(const ParseTree& t) {
  nlohmann::json j;
  j["edge"] = t.edge;
  j["label"] = t.label;
  j["category"] = t.category;
  j["span"] = {t.start, t.end};
  if (!t.token.empty()) j["token"] = t.token;
  if (!t.children.empty()) {
    nlohmann::json kids = nlohmann::json::array();
    for (const auto& c : t.children) kids.push_back(tree_json(c));
    j["children"] = std::move(kids);
  }
  return j;
}

namespace {

nlohmann::json edge_json(const Chart& chart, int id) {
  const Edge& e = chart.edge(id);
  nlohmann::json j;
  j["id"] = e.id;
  j["span"] = {e.start, e.end};
  j["mother"] = render_fs(e.mother);
  nlohmann::json needed = nlohmann::json::array();
  for (const auto& n : e.needed) needed.push_back(render_fs(n));
  j["needed"] = std::move(needed);
  j["activation"] = e.activation;
  j["strength"] = e.strength;
  j["provenance"] = provenance_name(e.provenance);
  if (e.parent_active >= 0) j["parent_active"] = e.parent_active;
  if (e.parent_inactive >= 0) j["parent_inactive"] = e.parent_inactive;
  if (!e.rule_id.empty()) j["rule"] = e.rule_id;
  if (!e.entry_id.empty()) j["entry"] = e.entry_id;
  switch (chart.disposition[id]) {
    case Disposition::pending: j["disposition"] = "pending"; break;
    case Disposition::chart: j["disposition"] = "chart"; break;
    case Disposition::suspended: j["disposition"] = "suspended"; break;
    case Disposition::dropped: j["disposition"] = "dropped"; break;
  }
  return j;
}

nlohmann::json event_json(const TraceEvent& ev) {
  nlohmann::json j;
  j["step"] = ev.step;
  j["kind"] = event_name(ev.kind);
  if (ev.edge >= 0) j["edge"] = ev.edge;
  if (!ev.parents.empty()) j["parents"] = ev.parents;
  if (ev.strength) j["strength"] = *ev.strength;
  if (ev.activation) j["activation"] = *ev.activation;
  if (!ev.detail.empty()) j["detail"] = ev.detail;
  return j;
}

}  // namespace

nlohmann::json report_json(const ParseReport& report, int n_best, bool include_trace) {
  nlohmann::json j;
  j["tokens"] = report.tokens;
  j["steps"] = report.steps();
  j["truncated"] = report.truncated();
  j["n_spanning"] = report.parses.size();

  nlohmann::json parses = nlohmann::json::array();
  int rank = 0;
  for (const RankedParse& rp : extract_parses(report, n_best)) {
    nlohmann::json p;
    p["rank"] = ++rank;
    p["edge"] = rp.edge;
    p["activation"] = rp.activation;
    p["category"] = rp.tree.category;
    p["mother"] = render_fs(rp.mother);
    p["tree"] = render_tree(rp.tree);
    p["derivation"] = tree_json(rp.tree);
    parses.push_back(std::move(p));
  }
  j["parses"] = std::move(parses);

  nlohmann::json susp = nlohmann::json::array();
  for (const Suspension& s : report.suspended()) {
    const Edge& e = report.chart.edge(s.edge);
    nlohmann::json sj;
    sj["edge"] = s.edge;
    sj["span"] = {e.start, e.end};
    sj["activation"] = e.activation;
    sj["reason"] = s.reason;
    susp.push_back(std::move(sj));
  }
  j["suspended"] = std::move(susp);

  if (include_trace) {
    nlohmann::json evs = nlohmann::json::array();
    for (const TraceEvent& ev : report.trace()) evs.push_back(event_json(ev));
    j["trace"] = std::move(evs);
    nlohmann::json edges = nlohmann::json::array();
    for (std::size_t i = 0; i < report.chart.edges.size(); ++i)
      edges.push_back(edge_json(report.chart, static_cast<int>(i)));
    j["edges"] = std::move(edges);
  }
  return j;
}

std::string report_text(const ParseReport& report, int n_best, bool include_trace) {
  std::string out;
  out += "tokens:";
  for (const auto& t : report.tokens) out += " " + t;
  out += "\n";
  out += fmt::format("spanning parses: {}  (steps: {}{})\n", report.parses.size(),
                     report.steps(), report.truncated() ? ", truncated" : "");
  int rank = 0;
  for (const RankedParse& rp : extract_parses(report, n_best)) {
    out += fmt::format("  {}. activation {}  edge {}\n     {}\n", ++rank,
                       num(rp.activation), rp.edge, render_tree(rp.tree));
  }
  if (!report.suspended().empty()) {
    out += fmt::format("suspended edges: {}\n", report.suspended().size());
    for (const Suspension& s : report.suspended()) {
      const Edge& e = report.chart.edge(s.edge);
      out += fmt::format("  edge {} [{}..{}]: {}\n", s.edge, e.start, e.end, s.reason);
    }
  }
  if (include_trace) {
    out += "trace:\n";
    out += trace_tsv(report.chart);
  }
  return out;
}

}  // namespace gu
