#pragma once

#include <optional>

#include "gu/avm.hpp"

namespace gu {

/// Disjunct-set union with averaged weights: a symbol absent from one side
/// contributes weight 0 there. The result is normalized by construction.
Atom unify_atoms(const Atom& a, const Atom& b);

/// Total shared mass: sum over common disjuncts of min(w_a, w_b).
/// 1 exactly for identical distributions, 0 exactly for disjoint supports.
double atom_strength(const Atom& a, const Atom& b);

/// Compatibility sums over the union of flattened atomic paths of both
/// arguments. A path atomic in both contributes mean-priority (times the
/// atom strength for the actual variant); a path atomic in only one
/// contributes its own priority to both variants. nullopt when some path is
/// atomic on one side but reaches a complex node with arcs on the other
/// (hard clash). A complex node with no arcs counts as absence.
std::optional<double> actual_compatibility(const FeatureStructure& a, const FeatureStructure& b);
std::optional<double> perfect_compatibility(const FeatureStructure& a, const FeatureStructure& b);

struct UnifyResult {
  enum class Status { ok, clash, below_threshold };
  Status status = Status::clash;
  /// actual/perfect ratio in [0,1]; 0.0 for a hard clash. 1.0 when neither
  /// side has any atomic path.
  double strength = 0.0;
  /// Engaged iff status == ok.
  std::optional<FeatureStructure> fs;

  bool ok() const { return status == Status::ok; }
};

/// Graded unification. Structure is built as in classical unification
/// (recursive arc merge with reentrancy propagation); atoms combine with
/// unify_atoms; the priority of a feature atomic on both sides becomes the
/// mean of the two. Fails with no result when strength falls below
/// `threshold` (hard clashes score 0 and always fail for threshold > 0;
/// they also fail at threshold 0 because no structure exists).
UnifyResult unify_graded(const FeatureStructure& a, const FeatureStructure& b, double threshold);

/// Unify `other` into the node of `container` addressed by `path` and
/// rebuild the whole container, so bindings propagate through shared nodes
/// into the rest of it. Strength is measured between container-at-path and
/// `other` only. Throws std::invalid_argument when `path` is unreachable.
UnifyResult unify_graded_at(const FeatureStructure& container, const Path& path,
                            const FeatureStructure& other, double threshold);

}  // namespace gu
