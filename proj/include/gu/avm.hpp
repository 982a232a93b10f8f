#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace gu {

/// Absolute tolerance for all weight / priority / strength comparisons.
inline constexpr double kEps = 1e-9;

/// A weighted disjunction over atomic symbols. Weights are normalized at
/// construction so they always sum to 1; duplicate symbols are merged by
/// summing their raw weights first.
class Atom {
 public:
  /// Throws std::invalid_argument on an empty list, a negative weight, or
  /// an all-zero weight mass.
  explicit Atom(const std::vector<std::pair<std::string, double>>& disjuncts);

  /// Single-symbol disjunction {sym: 1.0}.
  static Atom single(const std::string& symbol);

  const std::map<std::string, double>& weights() const { return w_; }

  /// Weight of `symbol`, 0.0 when it is not a disjunct.
  double weight(const std::string& symbol) const;

  /// Heaviest symbols (all of them on a tie), sorted by name.
  std::vector<std::string> argmax() const;

 private:
  std::map<std::string, double> w_;
};

bool atoms_equal(const Atom& a, const Atom& b, double eps = kEps);

class FeatureStructure;

/// One feature arc. `priority` is meaningful only when the value is atomic;
/// complex-valued arcs always carry the neutral 1.0.
struct Slot;

/// Immutable, acyclic feature structure: either an atom leaf or a finite
/// map from feature names to slots. Node sharing (reentrancy) is pointer
/// identity; two slots whose values compare equal with node_id() are the
/// same node.
class FeatureStructure {
 public:
  struct Node;

  /// Complex node with no arcs. Unifies with anything (carries no
  /// information).
  FeatureStructure();

  static FeatureStructure atom(Atom a);
  static FeatureStructure atom(const std::string& symbol);
  static FeatureStructure empty();

  /// Complex node from named arcs. Throws std::invalid_argument on a
  /// duplicate feature name, a non-positive priority, or an explicit
  /// priority attached to a complex value.
  static FeatureStructure make(std::vector<std::pair<std::string, Slot>> arcs);

  bool is_atom() const;
  const Atom& as_atom() const;

  /// Name-sorted arcs; empty for atoms.
  const std::map<std::string, Slot>& features() const;

  /// Node identity, the basis of structure sharing.
  const void* node_id() const;

 private:
  explicit FeatureStructure(std::shared_ptr<const Node> n);
  std::shared_ptr<const Node> n_;

  friend struct FsBuilderAccess;
};

struct Slot {
  FeatureStructure value;
  double priority = 1.0;
};

struct FeatureStructure::Node {
  std::optional<Atom> atom;
  std::map<std::string, Slot> feats;
};

/// A sequence of feature names addressing a node from the root.
using Path = std::vector<std::string>;

/// One flattened atomic leaf: the path that reaches it, the atom, and the
/// priority of the final arc. A node shared between several paths appears
/// once per path. The root atom of a bare-atom structure is reported under
/// the empty path with priority 1.0.
struct AtomicPath {
  Path path;
  Atom value;
  double priority;
};

/// Node at `path`, or nullopt when some prefix is missing or passes
/// through an atom.
std::optional<FeatureStructure> get_path(const FeatureStructure& fs, const Path& path);

/// All atomic leaves in lexicographic path order.
std::vector<AtomicPath> atomic_paths(const FeatureStructure& fs);

/// Structural equality: same arc skeleton, atoms and priorities equal
/// within `eps`, and the same sharing relation (there must be a bijection
/// between the node sets that respects arcs).
bool fs_equal(const FeatureStructure& a, const FeatureStructure& b, double eps = kEps);

}  // namespace gu
