#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gu/avm.hpp"

namespace gu {

struct ParserConfig {
  double unification_threshold = 0.7;
  double activation_threshold = 0.6;
  double w_strength = 0.5;
  double w_active = 0.3;
  double w_inactive = 0.2;
  int max_agenda_steps = 100000;

  /// Throws std::invalid_argument on thresholds outside [0,1], negative
  /// weights, an all-zero weight vector, or a non-positive step limit.
  void validate() const;
};

/// w1*strength + w2*active + w3*inactive, clamped into [0,1].
double compute_activation(double strength, double active_act, double inactive_act,
                          const ParserConfig& cfg);

enum class Provenance { lexical, rule_invoked, extended };
enum class Disposition { pending, chart, suspended, dropped };

const char* provenance_name(Provenance p);

struct Edge {
  int id = -1;
  int start = 0;
  int end = 0;
  FeatureStructure mother;
  std::vector<FeatureStructure> needed;  // empty = inactive (complete)
  double activation = 1.0;

  Provenance provenance = Provenance::lexical;
  int parent_active = -1;    // extended: the edge that advanced; invoked: the predicting edge (-1 for goal seeds)
  int parent_inactive = -1;  // extended: the edge that was consumed
  std::string rule_id;       // rule-invoked edges
  std::string entry_id;      // lexical edges
  double strength = 1.0;     // strength of the unification that licensed this edge

  bool inactive() const { return needed.empty(); }
};

enum class EventKind { lex_init, goal_seed, extend, invoke, suspend, unify_fail, dedup_drop };

const char* event_name(EventKind k);  // LEX-INIT, GOAL-SEED, ...

struct TraceEvent {
  int step = 0;  // 0 during initialization and goal seeding
  EventKind kind = EventKind::lex_init;
  int edge = -1;  // -1 for failures that never built an edge
  std::vector<int> parents;
  std::optional<double> strength;
  std::optional<double> activation;
  std::string detail;
};

struct Suspension {
  int edge = -1;
  std::string reason;
};

/// Everything one parse run accumulates: the pool of every candidate edge
/// ever constructed (indexed by id), per-position indexes over the edges
/// that made it into the chart proper, the suspended list, the event
/// trace, and the step counters.
struct Chart {
  Chart() : Chart(0) {}
  explicit Chart(int n_tokens)
      : n_tokens(n_tokens),
        actives_by_end(n_tokens + 1),
        inactives_by_start(n_tokens + 1) {}

  int n_tokens = 0;
  std::vector<Edge> edges;
  std::vector<Disposition> disposition;  // parallel to edges
  std::vector<std::vector<int>> actives_by_end;
  std::vector<std::vector<int>> inactives_by_start;
  std::vector<Suspension> suspended;
  std::vector<TraceEvent> trace;
  int steps = 0;
  bool truncated = false;

  const Edge& edge(int id) const { return edges.at(id); }

  /// Ids of edges that were incorporated, in id order.
  std::vector<int> chart_edges() const;
};

}  // namespace gu
