#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "popqc/gate.hpp"

namespace popqc {

/// A contiguous run of live gates addressed by rank.
struct Segment {
  std::size_t start_rank{0};
  std::vector<Gate> gates;
};

/// One slot replacement: a gate, or std::nullopt for a tombstone.
struct SlotUpdate {
  std::size_t slot{0};
  std::optional<Gate> gate;
};

/// Sparse circuit: a fixed-capacity slot array of gates where removed gates
/// become tombstones, plus an index tree (complete binary tree of subtree
/// gate counts) that answers rank/select queries in O(lg n).
///
/// Terminology: a *slot index* addresses the raw array, including
/// tombstones; a *rank* counts live gates only. `before` maps slot -> rank,
/// `index_of` maps rank -> slot, and `get` fetches a gate by rank.
///
/// The tree is stored implicitly in heap order with the leaf row padded to
/// a power of two; padding leaves have permanent weight 0, so every
/// root-to-leaf path has the same length. Reads are safe from any number
/// of threads; `substitute` requires exclusive access.
class Circuit {
 public:
  Circuit(std::span<const Gate> gates, std::uint32_t num_qubits);

  std::uint32_t num_qubits() const { return num_qubits_; }

  /// Number of slots (the original gate count; never changes).
  std::size_t slot_count() const { return slot_count_; }

  /// Number of live (non-tombstone) gates: the root weight.
  std::size_t size() const { return tree_[0]; }

  bool is_tombstone(std::size_t slot) const;
  const Gate& slot_gate(std::size_t slot) const;

  /// Number of live gates at slots strictly below `slot`.
  /// `slot == slot_count()` is allowed and returns size().
  std::size_t before(std::size_t slot) const;

  /// The rank-th live gate in slot order.
  const Gate& get(std::size_t rank) const;

  /// Slot index of the rank-th live gate; inverse of `before` on live slots.
  std::size_t index_of(std::size_t rank) const;

  /// Replace slots in one batch; indices must be valid and pairwise
  /// distinct. With threads == 1 every leaf walks its root path; larger
  /// batches on several threads write leaves in parallel and rebuild only
  /// the dirty ancestors level by level. Both paths produce identical
  /// trees.
  void substitute(std::span<const SlotUpdate> updates, unsigned threads = 1);

  /// All live gates in slot order.
  std::vector<Gate> gates() const;

  /// Live gates with ranks in [max(0, center-radius), min(size, center+radius)):
  /// the half-open window of at most 2*radius gates around `center_rank`.
  Segment extract_segment(std::size_t center_rank, std::size_t radius) const;

  /// Full-tree consistency audit: every internal weight equals the sum of
  /// its children, leaf weights are 0/1 and match slot contents.
  bool audit() const;

 private:
  std::size_t leaf_node(std::size_t slot) const { return leaf_base_ + slot; }
  std::size_t descend(std::size_t rank) const;
  void substitute_bulk(std::span<const SlotUpdate> updates, unsigned threads);

  std::vector<Gate> slots_;
  std::vector<std::uint32_t> tree_;  // heap order, tree_[0] is the root
  std::size_t slot_count_{0};
  std::size_t leaf_base_{0};  // index of the first leaf in tree_
  std::uint32_t num_qubits_{0};
};

}  // namespace popqc
