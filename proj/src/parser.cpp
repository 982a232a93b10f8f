#include "gu/parser.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <tuple>

#include "gu/unify.hpp"

namespace gu {

namespace {

// Reserved arc names for packing a rule into a single structure. '*' is not
// a legal identifier character, so these can never collide with grammar
// features.
constexpr const char* kMotherArc = "*m*";

std::string needed_arc(int i) { return fmt::format("*n{:03}*", i); }  // 1-based

FeatureStructure make_wrapper(const FeatureStructure& mother,
                              const std::vector<FeatureStructure>& needed) {
  std::vector<std::pair<std::string, Slot>> arcs;
  arcs.reserve(needed.size() + 1);
  arcs.emplace_back(kMotherArc, Slot{mother, 1.0});
  for (std::size_t i = 0; i < needed.size(); ++i)
    arcs.emplace_back(needed_arc(static_cast<int>(i) + 1), Slot{needed[i], 1.0});
  return FeatureStructure::make(std::move(arcs));
}

// Pulls mother and the needed list back out of a unified wrapper,
// dropping the first `consumed` needed slots.
struct Unpacked {
  FeatureStructure mother;
  std::vector<FeatureStructure> needed;
};

Unpacked unpack_wrapper(const FeatureStructure& w, int n_needed, int consumed) {
  Unpacked out;
  const auto& feats = w.features();
  out.mother = feats.at(kMotherArc).value;
  for (int i = consumed + 1; i <= n_needed; ++i)
    out.needed.push_back(feats.at(needed_arc(i)).value);
  return out;
}

std::vector<std::string> dominant_cat(const FeatureStructure& fs) {
  auto cat = get_path(fs, {"CAT"});
  if (!cat || !cat->is_atom()) return {};
  return cat->as_atom().argmax();
}

std::string cat_label(const FeatureStructure& fs) {
  auto best = dominant_cat(fs);
  return best.empty() ? std::string("?") : best.front();
}

}  // namespace

void ParserConfig::validate() const {
  auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in01(unification_threshold))
    throw std::invalid_argument("unification threshold must lie in [0, 1]");
  if (!in01(activation_threshold))
    throw std::invalid_argument("activation threshold must lie in [0, 1]");
  if (w_strength < 0.0 || w_active < 0.0 || w_inactive < 0.0)
    throw std::invalid_argument("activation weights must be non-negative");
  if (std::abs(w_strength + w_active + w_inactive - 1.0) > kEps)
    throw std::invalid_argument("activation weights must sum to 1");
  if (max_agenda_steps <= 0)
    throw std::invalid_argument("step limit must be positive");
}

double compute_activation(double strength, double active_act, double inactive_act,
                          const ParserConfig& cfg) {
  double a = cfg.w_strength * strength + cfg.w_active * active_act +
             cfg.w_inactive * inactive_act;
  return std::clamp(a, 0.0, 1.0);
}

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::lexical: return "LEXICAL";
    case Provenance::rule_invoked: return "RULE-INVOKED";
    case Provenance::extended: return "EXTENDED";
  }
  return "?";
}

const char* event_name(EventKind k) {
  switch (k) {
    case EventKind::lex_init: return "LEX-INIT";
    case EventKind::goal_seed: return "GOAL-SEED";
    case EventKind::extend: return "EXTEND";
    case EventKind::invoke: return "INVOKE";
    case EventKind::suspend: return "SUSPEND";
    case EventKind::unify_fail: return "UNIFY-FAIL";
    case EventKind::dedup_drop: return "DEDUP-DROP";
  }
  return "?";
}

std::vector<int> Chart::chart_edges() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (disposition[i] == Disposition::chart) out.push_back(static_cast<int>(i));
  return out;
}

UnknownWord::UnknownWord(std::string token, int position)
    : std::runtime_error(fmt::format("unknown word '{}' at position {}", token, position)),
      token(std::move(token)),
      position(position) {}

ChartParser::ChartParser(Grammar grammar, Lexicon lexicon, ParserConfig cfg)
    : grammar_(std::move(grammar)), lexicon_(std::move(lexicon)), cfg_(cfg) {
  cfg_.validate();
  if (grammar_.start.empty()) throw std::invalid_argument("grammar has no start symbol");
  if (grammar_.rules.empty()) throw std::invalid_argument("grammar has no rules");
  std::set<std::string> ids;
  for (const auto& r : grammar_.rules) {
    if (r.id.empty()) throw std::invalid_argument("rule without an id");
    if (!ids.insert(r.id).second)
      throw std::invalid_argument(fmt::format("duplicate rule id '{}'", r.id));
    if (r.rhs.empty())
      throw std::invalid_argument(fmt::format("rule '{}' has an empty right-hand side", r.id));
    if (dominant_cat(r.lhs).empty())
      throw std::invalid_argument(fmt::format("rule '{}': mother has no atomic CAT", r.id));
    for (const auto& item : r.rhs)
      if (dominant_cat(item).empty())
        throw std::invalid_argument(fmt::format("rule '{}': constituent has no atomic CAT", r.id));
    wrappers_.push_back(make_wrapper(r.lhs, r.rhs));
  }
}

// ---------------------------------------------------------------------------
// The agenda engine. One instance per parse run.

struct ChartParser::Engine {
  const ChartParser& p;
  Chart chart;

  struct AgendaItem {
    double act;
    long seq;
    int edge;
  };
  struct Worse {
    bool operator()(const AgendaItem& a, const AgendaItem& b) const {
      if (a.act != b.act) return a.act < b.act;
      return a.seq > b.seq;  // FIFO among exact activation ties
    }
  };
  std::priority_queue<AgendaItem, std::vector<AgendaItem>, Worse> agenda;
  long seq = 0;

  // Dedup buckets: edges that are pending, incorporated, or suspended,
  // grouped by the cheap part of the signature.
  std::map<std::tuple<int, int, std::size_t>, std::vector<int>> groups;

  Engine(const ChartParser& parser, int n_tokens) : p(parser), chart(n_tokens) {}

  void emit(EventKind kind, int edge, std::vector<int> parents,
            std::optional<double> strength, std::optional<double> activation,
            std::string detail) {
    chart.trace.push_back(TraceEvent{chart.steps, kind, edge, std::move(parents),
                                     strength, activation, std::move(detail)});
  }

  bool same_edge(const Edge& a, const Edge& b) const {
    if (a.start != b.start || a.end != b.end) return false;
    if (a.needed.size() != b.needed.size()) return false;
    if (std::abs(a.activation - b.activation) > kEps) return false;
    if (!fs_equal(a.mother, b.mother)) return false;
    for (std::size_t i = 0; i < a.needed.size(); ++i)
      if (!fs_equal(a.needed[i], b.needed[i])) return false;
    return true;
  }

  int duplicate_of(const Edge& e) const {
    auto it = groups.find({e.start, e.end, e.needed.size()});
    if (it == groups.end()) return -1;
    for (int id : it->second)
      if (same_edge(chart.edges[id], e)) return id;
    return -1;
  }

  void incorporate(int id) {
    chart.disposition[id] = Disposition::chart;
    const Edge& e = chart.edges[id];
    if (e.inactive())
      chart.inactives_by_start[e.start].push_back(id);
    else
      chart.actives_by_end[e.end].push_back(id);
  }

  // Runs a constructed candidate through creation / dedup / suspension /
  // scheduling. `direct` skips the agenda (lexical edges are chart
  // residents from the start).
  void consider(Edge cand, EventKind kind, std::vector<int> parents,
                std::optional<double> ev_strength, std::string detail, bool direct) {
    cand.id = static_cast<int>(chart.edges.size());
    chart.edges.push_back(cand);
    chart.disposition.push_back(Disposition::pending);
    const Edge& e = chart.edges[cand.id];
    emit(kind, e.id, std::move(parents), ev_strength, e.activation, std::move(detail));

    int dup = duplicate_of(e);
    if (dup >= 0) {
      chart.disposition[e.id] = Disposition::dropped;
      emit(EventKind::dedup_drop, e.id, {}, std::nullopt, std::nullopt,
           fmt::format("duplicate-of={}", dup));
      return;
    }
    groups[{e.start, e.end, e.needed.size()}].push_back(e.id);

    if (e.activation < p.cfg_.activation_threshold - kEps) {
      chart.disposition[e.id] = Disposition::suspended;
      chart.suspended.push_back(Suspension{
          e.id, fmt::format("activation {} below threshold {}", e.activation,
                            p.cfg_.activation_threshold)});
      emit(EventKind::suspend, e.id, {}, std::nullopt, e.activation,
           "reason=activation-below-threshold");
      return;
    }

    if (direct) {
      incorporate(e.id);
    } else {
      agenda.push(AgendaItem{e.activation, seq++, e.id});
    }
  }

  void init_lexical(const std::vector<std::string>& tokens, const LexActivations& acts) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      auto hits = p.lexicon_.entries_for(tokens[i]);
      if (hits.empty()) throw UnknownWord(tokens[i], static_cast<int>(i));
      for (int idx : hits) {
        const LexEntry& entry = p.lexicon_.entries()[idx];
        Edge e;
        e.start = static_cast<int>(i);
        e.end = static_cast<int>(i) + 1;
        e.mother = entry.fs;
        e.activation = acts.get(static_cast<int>(i), entry.id);
        e.provenance = Provenance::lexical;
        e.entry_id = entry.id;
        e.strength = 1.0;
        consider(std::move(e), EventKind::lex_init, {}, std::nullopt,
                 fmt::format("entry={}", entry.id), /*direct=*/true);
      }
    }
  }

  void seed_goals() {
    FeatureStructure goal = FeatureStructure::make(
        {{"CAT", Slot{FeatureStructure::atom(p.grammar_.start), 1.0}}});
    for (std::size_t r = 0; r < p.grammar_.rules.size(); ++r) {
      const Rule& rule = p.grammar_.rules[r];
      auto res = unify_graded_at(p.wrappers_[r], {kMotherArc}, goal,
                                 p.cfg_.unification_threshold);
      if (!res.ok()) {
        emit(EventKind::unify_fail, -1, {}, res.strength, std::nullopt,
             fmt::format("rule={} reason={}", rule.id,
                         res.status == UnifyResult::Status::clash ? "clash"
                                                                  : "below-threshold"));
        continue;
      }
      auto parts = unpack_wrapper(*res.fs, static_cast<int>(rule.rhs.size()), 0);
      Edge e;
      e.start = 0;
      e.end = 0;
      e.mother = std::move(parts.mother);
      e.needed = std::move(parts.needed);
      e.activation = compute_activation(res.strength, 1.0, 1.0, p.cfg_);
      e.provenance = Provenance::rule_invoked;
      e.rule_id = rule.id;
      e.strength = res.strength;
      consider(std::move(e), EventKind::goal_seed, {}, res.strength,
               fmt::format("rule={}", rule.id), /*direct=*/false);
    }
  }

  // Active edge consumes an adjacent inactive one. Both are copies: the
  // pool may reallocate while we append candidates.
  void try_extend(const Edge active, const Edge inactive) {
    FeatureStructure w = make_wrapper(active.mother, active.needed);
    auto res = unify_graded_at(w, {needed_arc(1)}, inactive.mother,
                               p.cfg_.unification_threshold);
    if (!res.ok()) {
      emit(EventKind::unify_fail, -1, {active.id, inactive.id}, res.strength,
           std::nullopt,
           fmt::format("reason={}", res.status == UnifyResult::Status::clash
                                        ? "clash"
                                        : "below-threshold"));
      return;
    }
    auto parts = unpack_wrapper(*res.fs, static_cast<int>(active.needed.size()), 1);
    Edge e;
    e.start = active.start;
    e.end = inactive.end;
    e.mother = std::move(parts.mother);
    e.needed = std::move(parts.needed);
    e.activation =
        compute_activation(res.strength, active.activation, inactive.activation, p.cfg_);
    e.provenance = Provenance::extended;
    e.parent_active = active.id;
    e.parent_inactive = inactive.id;
    e.strength = res.strength;
    consider(std::move(e), EventKind::extend, {active.id, inactive.id}, res.strength,
             "", /*direct=*/false);
  }

  // Top-down prediction: propose every rule whose mother fits the first
  // needed constituent of the active edge.
  void invoke_rules(const Edge active) {
    const FeatureStructure& target = active.needed.front();
    for (std::size_t r = 0; r < p.grammar_.rules.size(); ++r) {
      const Rule& rule = p.grammar_.rules[r];
      auto res = unify_graded_at(p.wrappers_[r], {kMotherArc}, target,
                                 p.cfg_.unification_threshold);
      if (!res.ok()) {
        emit(EventKind::unify_fail, -1, {active.id}, res.strength, std::nullopt,
             fmt::format("rule={} reason={}", rule.id,
                         res.status == UnifyResult::Status::clash ? "clash"
                                                                  : "below-threshold"));
        continue;
      }
      auto parts = unpack_wrapper(*res.fs, static_cast<int>(rule.rhs.size()), 0);
      Edge e;
      e.start = active.end;
      e.end = active.end;
      e.mother = std::move(parts.mother);
      e.needed = std::move(parts.needed);
      e.activation = compute_activation(res.strength, active.activation, 1.0, p.cfg_);
      e.provenance = Provenance::rule_invoked;
      e.parent_active = active.id;
      e.rule_id = rule.id;
      e.strength = res.strength;
      consider(std::move(e), EventKind::invoke, {active.id}, res.strength,
               fmt::format("rule={}", rule.id), /*direct=*/false);
    }
  }

  void run_agenda() {
    while (!agenda.empty()) {
      if (chart.steps >= p.cfg_.max_agenda_steps) {
        chart.truncated = true;
        return;
      }
      AgendaItem item = agenda.top();
      agenda.pop();
      ++chart.steps;
      incorporate(item.edge);
      const Edge e = chart.edges[item.edge];  // copy: the pool grows below
      if (!e.inactive()) {
        invoke_rules(e);
        for (int iid : chart.inactives_by_start[e.end]) {
          if (iid == e.id) continue;
          try_extend(e, chart.edges[iid]);
        }
      } else {
        for (int aid : chart.actives_by_end[e.start]) {
          if (aid == e.id) continue;
          try_extend(chart.edges[aid], e);
        }
      }
    }
  }

  std::vector<int> spanning_parses() const {
    struct Hit {
      double act;
      int id;
    };
    std::vector<Hit> hits;
    for (std::size_t i = 0; i < chart.edges.size(); ++i) {
      if (chart.disposition[i] != Disposition::chart) continue;
      const Edge& e = chart.edges[i];
      if (!e.inactive() || e.start != 0 || e.end != chart.n_tokens) continue;
      auto cats = dominant_cat(e.mother);
      if (std::find(cats.begin(), cats.end(), p.grammar_.start) == cats.end()) continue;
      hits.push_back({e.activation, static_cast<int>(i)});
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
      if (a.act != b.act) return a.act > b.act;
      return a.id < b.id;
    });
    std::vector<int> out;
    out.reserve(hits.size());
    for (const Hit& h : hits) out.push_back(h.id);
    return out;
  }
};

Chart ChartParser::init_chart(const std::vector<std::string>& tokens,
                              const LexActivations& acts) const {
  Engine en(*this, static_cast<int>(tokens.size()));
  en.init_lexical(tokens, acts);
  return std::move(en.chart);
}

ParseReport ChartParser::parse(const std::vector<std::string>& tokens,
                               const LexActivations& acts) const {
  Engine en(*this, static_cast<int>(tokens.size()));
  en.init_lexical(tokens, acts);
  en.seed_goals();
  en.run_agenda();
  ParseReport report;
  report.tokens = tokens;
  report.parses = en.spanning_parses();
  report.chart = std::move(en.chart);
  return report;
}

ParseTree build_tree(const ParseReport& report, int edge_id) {
  const Edge& e = report.chart.edge(edge_id);
  ParseTree t;
  t.edge = edge_id;
  t.category = cat_label(e.mother);
  t.start = e.start;
  t.end = e.end;
  if (e.provenance == Provenance::lexical) {
    t.label = e.entry_id;
    t.token = report.tokens.at(e.start);
    return t;
  }
  // Walk the extension chain back to the invocation that created the
  // sequence, collecting the consumed edges along the way.
  std::vector<int> children;
  int cur = edge_id;
  while (report.chart.edge(cur).provenance == Provenance::extended) {
    children.push_back(report.chart.edge(cur).parent_inactive);
    cur = report.chart.edge(cur).parent_active;
  }
  t.label = report.chart.edge(cur).rule_id;
  std::reverse(children.begin(), children.end());
  for (int c : children) t.children.push_back(build_tree(report, c));
  return t;
}

std::vector<RankedParse> extract_parses(const ParseReport& report, int n_best) {
  std::vector<RankedParse> out;
  for (int id : report.parses) {
    if (n_best > 0 && static_cast<int>(out.size()) >= n_best) break;
    RankedParse rp;
    rp.edge = id;
    rp.activation = report.chart.edge(id).activation;
    rp.tree = build_tree(report, id);
    rp.mother = report.chart.edge(id).mother;
    out.push_back(std::move(rp));
  }
  return out;
}

const LexEntry& Lexicon::add(const std::string& word, FeatureStructure fs) {
  auto cat = get_path(fs, {"CAT"});
  if (!cat || !cat->is_atom())
    throw std::invalid_argument(
        fmt::format("lexical entry for '{}' has no atomic CAT", word));
  std::string base = fmt::format("{}/{}", word, cat->as_atom().argmax().front());
  std::string id = base;
  for (int k = 2; by_id_.count(id); ++k) id = fmt::format("{}.{}", base, k);
  int idx = static_cast<int>(entries_.size());
  entries_.push_back(LexEntry{id, word, std::move(fs)});
  by_word_[word].push_back(idx);
  by_id_[id] = idx;
  return entries_.back();
}

std::vector<int> Lexicon::entries_for(const std::string& word) const {
  auto it = by_word_.find(word);
  return it == by_word_.end() ? std::vector<int>{} : it->second;
}

const LexEntry* Lexicon::by_id(const std::string& id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &entries_[it->second];
}

void LexActivations::set(int token, const std::string& entry_id, double activation) {
  m_[{token, entry_id}] = activation;
}

double LexActivations::get(int token, const std::string& entry_id) const {
  auto it = m_.find({token, entry_id});
  return it == m_.end() ? 1.0 : it->second;
}

LexActivations bind_tag_probs(const std::vector<TagProb>& records, const Lexicon& lexicon) {
  LexActivations acts;
  for (const auto& r : records) {
    if (!lexicon.by_id(r.entry_id))
      throw std::invalid_argument(fmt::format(
          "tag-prob record for unknown lexical entry '{}' (line {})", r.entry_id, r.line));
    acts.set(r.token, r.entry_id, r.likelihood);
  }
  return acts;
}

}  // namespace gu
