#include "popqc/circuit.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <stdexcept>
#include <string>

#include "popqc/parallel.hpp"

namespace popqc {

namespace {

std::size_t next_pow2(std::size_t n) {
  return std::bit_ceil(n);
}

}  // namespace

Circuit::Circuit(std::span<const Gate> gates, std::uint32_t num_qubits)
    : slot_count_(gates.size()), num_qubits_(num_qubits) {
  if (gates.empty()) {
    throw std::invalid_argument("circuit needs at least one gate");
  }
  if (gates.size() > (std::size_t{1} << 31)) {
    throw std::invalid_argument("circuit exceeds the supported gate count");
  }
  if (num_qubits == 0) {
    throw std::invalid_argument("circuit needs at least one qubit");
  }
  for (const Gate& g : gates) {
    if (g.max_qubit() >= num_qubits) {
      throw std::invalid_argument("gate operand " + std::to_string(g.max_qubit()) +
                                  " out of range for " + std::to_string(num_qubits) +
                                  " qubits");
    }
  }
  slots_.assign(gates.begin(), gates.end());

  std::size_t leaves = next_pow2(slot_count_);
  leaf_base_ = leaves - 1;
  tree_.assign(2 * leaves - 1, 0);
  for (std::size_t i = 0; i < slot_count_; ++i) {
    tree_[leaf_base_ + i] = 1;
  }
  // Internal weights, bottom level first.
  for (std::size_t node = leaf_base_; node-- > 0;) {
    tree_[node] = tree_[2 * node + 1] + tree_[2 * node + 2];
  }
}

bool Circuit::is_tombstone(std::size_t slot) const {
  if (slot >= slot_count_) {
    throw std::out_of_range("slot index out of range");
  }
  return tree_[leaf_node(slot)] == 0;
}

const Gate& Circuit::slot_gate(std::size_t slot) const {
  if (slot >= slot_count_ || tree_[leaf_node(slot)] == 0) {
    throw std::out_of_range("no gate at slot " + std::to_string(slot));
  }
  return slots_[slot];
}

std::size_t Circuit::before(std::size_t slot) const {
  if (slot > slot_count_) {
    throw std::out_of_range("slot index out of range in before()");
  }
  if (slot == slot_count_) {
    return size();
  }
  // Walk leaf -> root, adding each left sibling's weight.
  std::size_t node = leaf_node(slot);
  std::size_t count = 0;
  while (node != 0) {
    if (node % 2 == 0) {  // right child: left sibling is node - 1
      count += tree_[node - 1];
    }
    node = (node - 1) / 2;
  }
  return count;
}

std::size_t Circuit::descend(std::size_t rank) const {
  assert(rank < size());
  std::size_t node = 0;
  while (node < leaf_base_) {
    std::size_t left = 2 * node + 1;
    std::uint32_t lw = tree_[left];
    if (rank < lw) {
      node = left;
    } else {
      rank -= lw;
      node = left + 1;
    }
  }
  return node;
}

const Gate& Circuit::get(std::size_t rank) const {
  if (rank >= size()) {
    throw std::out_of_range("rank out of range in get()");
  }
  return slots_[descend(rank) - leaf_base_];
}

std::size_t Circuit::index_of(std::size_t rank) const {
  if (rank >= size()) {
    throw std::out_of_range("rank out of range in index_of()");
  }
  return descend(rank) - leaf_base_;
}

void Circuit::substitute(std::span<const SlotUpdate> updates, unsigned threads) {
  bool sorted = true;
  for (std::size_t i = 0; i < updates.size(); ++i) {
    const SlotUpdate& u = updates[i];
    if (u.slot >= slot_count_) {
      throw std::out_of_range("substitute slot out of range");
    }
    if (u.gate && u.gate->max_qubit() >= num_qubits_) {
      throw std::invalid_argument("substitute gate operand out of range");
    }
    if (i > 0 && updates[i - 1].slot >= u.slot) sorted = false;
  }
  if (!sorted && updates.size() > 1) {
    std::vector<std::size_t> seen;
    seen.reserve(updates.size());
    for (const SlotUpdate& u : updates) seen.push_back(u.slot);
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) {
      throw std::invalid_argument("duplicate slot in substitute batch");
    }
  }

  if (threads > 1 && updates.size() >= 2048) {
    substitute_bulk(updates, threads);
    return;
  }

  for (const SlotUpdate& u : updates) {
    std::uint32_t new_weight = u.gate ? 1 : 0;
    if (u.gate) {
      slots_[u.slot] = *u.gate;
    }
    std::size_t node = leaf_node(u.slot);
    std::int64_t delta =
        static_cast<std::int64_t>(new_weight) - static_cast<std::int64_t>(tree_[node]);
    if (delta == 0 && !u.gate) {
      continue;
    }
    tree_[node] = new_weight;
    while (node != 0) {
      node = (node - 1) / 2;
      tree_[node] = static_cast<std::uint32_t>(
          static_cast<std::int64_t>(tree_[node]) + delta);
    }
  }
}

// Bulk path: leaves first (update slots are distinct, so plain parallel
// writes), then recompute dirty internal nodes one level at a time. The
// leaf row is padded to a power of two, so all leaves share one depth and
// every rebuild step touches exactly one level.
void Circuit::substitute_bulk(std::span<const SlotUpdate> updates, unsigned threads) {
  parallel_for(threads, updates.size(), 4096, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const SlotUpdate& u = updates[i];
      if (u.gate) {
        slots_[u.slot] = *u.gate;
      }
      tree_[leaf_node(u.slot)] = u.gate ? 1 : 0;
    }
  });

  // Dirty parents of the touched leaves, deduplicated. Updates arrive
  // sorted in the bulk path's main caller; handle the general case anyway.
  std::vector<std::size_t> dirty;
  dirty.reserve(updates.size() / 2 + 1);
  for (const SlotUpdate& u : updates) {
    std::size_t parent = (leaf_node(u.slot) - 1) / 2;
    dirty.push_back(parent);
  }
  std::sort(dirty.begin(), dirty.end());
  dirty.erase(std::unique(dirty.begin(), dirty.end()), dirty.end());

  while (!dirty.empty()) {
    parallel_for(threads, dirty.size(), 2048, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        std::size_t node = dirty[i];
        tree_[node] = tree_[2 * node + 1] + tree_[2 * node + 2];
      }
    });
    if (dirty[0] == 0) break;
    std::size_t out = 0;
    for (std::size_t i = 0; i < dirty.size(); ++i) {
      std::size_t parent = (dirty[i] - 1) / 2;
      if (out == 0 || dirty[out - 1] != parent) {
        dirty[out++] = parent;
      }
    }
    dirty.resize(out);
  }
}

std::vector<Gate> Circuit::gates() const {
  std::vector<Gate> out;
  out.reserve(size());
  for (std::size_t i = 0; i < slot_count_; ++i) {
    if (tree_[leaf_base_ + i] != 0) {
      out.push_back(slots_[i]);
    }
  }
  return out;
}

Segment Circuit::extract_segment(std::size_t center_rank, std::size_t radius) const {
  std::size_t live = size();
  if (center_rank > live) {
    throw std::out_of_range("center rank out of range in extract_segment()");
  }
  std::size_t lo = center_rank >= radius ? center_rank - radius : 0;
  std::size_t hi = center_rank + radius < live ? center_rank + radius : live;

  Segment seg;
  seg.start_rank = lo;
  if (lo >= hi) {
    return seg;
  }
  std::size_t want = hi - lo;
  seg.gates.reserve(want);
  // Scan slots rightward; a run of tombstones is skipped with a single
  // descent to the next needed rank, so the worst case stays O(k lg n)
  // for k collected gates while dense regions cost a plain scan.
  std::size_t slot = index_of(lo);
  std::size_t collected = 0;
  while (collected < want) {
    if (tree_[leaf_base_ + slot] != 0) {
      seg.gates.push_back(slots_[slot]);
      ++collected;
      ++slot;
    } else {
      slot = index_of(lo + collected);
    }
  }
  return seg;
}

bool Circuit::audit() const {
  std::size_t leaves = leaf_base_ + 1;
  for (std::size_t i = 0; i < leaves; ++i) {
    std::uint32_t w = tree_[leaf_base_ + i];
    if (i >= slot_count_) {
      if (w != 0) return false;  // padding leaf must stay empty
    } else if (w != 0 && w != 1) {
      return false;
    }
  }
  for (std::size_t node = 0; node < leaf_base_; ++node) {
    if (tree_[node] != tree_[2 * node + 1] + tree_[2 * node + 2]) {
      return false;
    }
  }
  return true;
}

}  // namespace popqc
