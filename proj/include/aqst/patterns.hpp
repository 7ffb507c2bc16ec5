#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

#include "aqst/qcore.hpp"

namespace aqst {

/// Strictly increasing list of 1-based indices. Range against a dimension is
/// checked where the dimension is known (patterns, padded bases).
class IndexSet {
 public:
  IndexSet() = default;
  /// Throws Error(invalid_argument) unless strictly increasing and >= 1.
  explicit IndexSet(std::vector<int> indices);
  IndexSet(std::initializer_list<int> indices) : IndexSet(std::vector<int>(indices)) {}

  /// {first, first + 1, ..., last}.
  static IndexSet range(int first, int last);

  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  int operator[](std::size_t k) const { return indices_[k]; }
  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }
  const std::vector<int>& values() const { return indices_; }
  bool contains(int index) const;
  /// True when every index lies in [1, dim].
  bool within(int dim) const;

  friend bool operator==(const IndexSet&, const IndexSet&) = default;

 private:
  std::vector<int> indices_;
};

/// [dim] \ set.
IndexSet complement(const IndexSet& set, int dim);
std::size_t intersection_size(const IndexSet& a, const IndexSet& b);

struct SelectionPattern {
  int dim = 0;
  std::vector<IndexSet> blocks;
  int rank_hint = 0;
};

struct PatternReport {
  bool covers_all_rows = false;
  bool chain_overlap_ok = false;
  bool column_coverage_ok = false;
  bool necessary_count_ok = false;
  std::int64_t settings_count = 0;
  std::vector<int> uncovered_rows;  // 1-based
  std::vector<int> weak_columns;    // columns with fewer than R observed entries

  bool all_ok() const {
    return covers_all_rows && chain_overlap_ok && column_coverage_ok && necessary_count_ok;
  }
};

/// Blocks {(l-1)d+1, ..., (l-1)d+R+d}, l = 1..ceil((D-R)/d); the last block
/// is shifted left to end at D when d does not divide D-R.
SelectionPattern overlapping_block_pattern(int dim, int rank, int step);

/// Coverage, overlap connectivity, per-column count and the necessary
/// constraint count sum_l (|r_l| - R) >= D - R. Never throws on a bad
/// pattern; failures are reported in the flags.
PatternReport validate_pattern(const SelectionPattern& pattern, int rank);

/// (R+d)^2 + (L-1)((R+d)^2 - R^2). Exact for patterns without end shift.
std::int64_t settings_count_formula(int rank, int step, int blocks);

/// |union_l r_l x r_l|.
std::int64_t settings_count_enumerated(const SelectionPattern& pattern);

/// Number of distinct cells (r, c), r < c, inside union_l r_l x r_l.
std::int64_t unique_upper_cells(const SelectionPattern& pattern);

/// Row-major D x D mask of cells covered by the pattern.
std::vector<char> observed_cell_mask(const SelectionPattern& pattern);

/// Diagonal: [s_r s_r^T]. Off-diagonal: [E_re, E_im] with
/// Tr(rho E_re) = Re rho(r,c) and Tr(rho E_im) = Im rho(r,c). 1-based.
std::vector<HermitianObservable> entry_observables(int row, int col, int dim);

}  // namespace aqst
