#include "aqst/patterns.hpp"

#include <algorithm>
#include <numeric>
#include <queue>

#include "aqst/error.hpp"

namespace aqst {

IndexSet::IndexSet(std::vector<int> indices) : indices_(std::move(indices)) {
  for (std::size_t k = 0; k < indices_.size(); ++k) {
    if (indices_[k] < 1)
      throw Error(ErrorCode::invalid_argument, "IndexSet: indices are 1-based, got " + std::to_string(indices_[k]));
    if (k > 0 && indices_[k] <= indices_[k - 1])
      throw Error(ErrorCode::invalid_argument, "IndexSet: indices must be strictly increasing");
  }
}

IndexSet IndexSet::range(int first, int last) {
  std::vector<int> v;
  for (int i = first; i <= last; ++i) v.push_back(i);
  return IndexSet(std::move(v));
}

bool IndexSet::contains(int index) const {
  return std::binary_search(indices_.begin(), indices_.end(), index);
}

bool IndexSet::within(int dim) const {
  return indices_.empty() || indices_.back() <= dim;
}

IndexSet complement(const IndexSet& set, int dim) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(dim) - std::min<std::size_t>(set.size(), dim));
  auto it = set.begin();
  for (int i = 1; i <= dim; ++i) {
    while (it != set.end() && *it < i) ++it;
    if (it == set.end() || *it != i) out.push_back(i);
  }
  return IndexSet(std::move(out));
}

std::size_t intersection_size(const IndexSet& a, const IndexSet& b) {
  std::size_t n = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++n;
      ++ia;
      ++ib;
    }
  }
  return n;
}

SelectionPattern overlapping_block_pattern(int dim, int rank, int step) {
  if (rank < 1 || rank >= dim || step < 1 || step > dim - rank) {
    throw Error(ErrorCode::invalid_pattern_parameters,
                "overlapping_block_pattern: need 1 <= R < D and 1 <= d <= D - R (D=" + std::to_string(dim) +
                    ", R=" + std::to_string(rank) + ", d=" + std::to_string(step) + ")");
  }
  const int size = rank + step;
  const int count = (dim - rank + step - 1) / step;
  SelectionPattern p;
  p.dim = dim;
  p.rank_hint = rank;
  p.blocks.reserve(count);
  for (int l = 0; l < count; ++l) {
    int first = l * step + 1;
    if (first + size - 1 > dim) first = dim - size + 1;
    p.blocks.push_back(IndexSet::range(first, first + size - 1));
  }
  return p;
}

std::vector<char> observed_cell_mask(const SelectionPattern& pattern) {
  const auto n = static_cast<std::size_t>(pattern.dim);
  std::vector<char> mask(n * n, 0);
  for (const IndexSet& block : pattern.blocks) {
    if (!block.within(pattern.dim))
      throw Error(ErrorCode::shape, "pattern block index exceeds dimension " + std::to_string(pattern.dim));
    for (int r : block)
      for (int c : block) mask[(r - 1) * n + (c - 1)] = 1;
  }
  return mask;
}

PatternReport validate_pattern(const SelectionPattern& pattern, int rank) {
  PatternReport report;
  const int dim = pattern.dim;
  const auto& blocks = pattern.blocks;
  bool in_range = dim >= 1;
  for (const IndexSet& b : blocks) in_range = in_range && b.within(dim);
  if (!in_range || blocks.empty()) {
    for (int i = 1; i <= std::max(dim, 0); ++i) report.uncovered_rows.push_back(i);
    return report;
  }

  std::vector<int> hits(dim + 1, 0);
  for (const IndexSet& b : blocks)
    for (int i : b) ++hits[i];
  for (int i = 1; i <= dim; ++i)
    if (hits[i] == 0) report.uncovered_rows.push_back(i);
  report.covers_all_rows = report.uncovered_rows.empty();

  // Chain condition: the graph linking blocks that share >= R indices must
  // be connected, i.e. the blocks admit an ordering in which every block
  // overlaps an earlier one in at least R indices.
  const std::size_t n = blocks.size();
  std::vector<char> seen(n, 0);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const std::size_t cur = frontier.front();
    frontier.pop();
    for (std::size_t k = 0; k < n; ++k) {
      if (seen[k]) continue;
      if (intersection_size(blocks[cur], blocks[k]) >= static_cast<std::size_t>(rank)) {
        seen[k] = 1;
        ++reached;
        frontier.push(k);
      }
    }
  }
  report.chain_overlap_ok = reached == n;

  const std::vector<char> mask = observed_cell_mask(pattern);
  for (int c = 1; c <= dim; ++c) {
    int count = 0;
    for (int r = 1; r <= dim; ++r) count += mask[(r - 1) * dim + (c - 1)];
    if (count < rank) report.weak_columns.push_back(c);
  }
  report.column_coverage_ok = report.weak_columns.empty();

  // Each isorank block of size |r_l| contributes |r_l| - R directions
  // orthogonal to the column space.
  std::int64_t constraints = 0;
  for (const IndexSet& b : blocks) constraints += std::max<std::int64_t>(0, static_cast<std::int64_t>(b.size()) - rank);
  report.necessary_count_ok = constraints >= dim - rank;

  report.settings_count = std::accumulate(mask.begin(), mask.end(), std::int64_t{0});
  return report;
}

std::int64_t settings_count_formula(int rank, int step, int blocks) {
  const std::int64_t size = rank + step;
  return size * size + static_cast<std::int64_t>(blocks - 1) * (size * size - static_cast<std::int64_t>(rank) * rank);
}

std::int64_t settings_count_enumerated(const SelectionPattern& pattern) {
  const std::vector<char> mask = observed_cell_mask(pattern);
  return std::accumulate(mask.begin(), mask.end(), std::int64_t{0});
}

std::int64_t unique_upper_cells(const SelectionPattern& pattern) {
  const std::vector<char> mask = observed_cell_mask(pattern);
  const int dim = pattern.dim;
  std::int64_t count = 0;
  for (int r = 0; r < dim; ++r)
    for (int c = r + 1; c < dim; ++c) count += mask[r * dim + c];
  return count;
}

std::vector<HermitianObservable> entry_observables(int row, int col, int dim) {
  if (row < 1 || row > dim || col < 1 || col > dim)
    throw Error(ErrorCode::shape, "entry_observables: index (" + std::to_string(row) + ", " + std::to_string(col) +
                                      ") outside [1, " + std::to_string(dim) + "]");
  const int r = row - 1;
  const int c = col - 1;
  std::vector<HermitianObservable> out;
  if (r == c) {
    CMatrix e = CMatrix::Zero(dim, dim);
    e(r, r) = 1.0;
    out.emplace_back(std::move(e), "D_" + std::to_string(row));
    return out;
  }
  // E_re = (s_c s_r^T + s_r s_c^T)/2, E_im = (s_c s_r^T - s_r s_c^T)/(2i).
  CMatrix re = CMatrix::Zero(dim, dim);
  re(c, r) = 0.5;
  re(r, c) = 0.5;
  CMatrix im = CMatrix::Zero(dim, dim);
  im(c, r) = Complex(0.0, -0.5);
  im(r, c) = Complex(0.0, 0.5);
  const std::string tag = "_" + std::to_string(row) + "_" + std::to_string(col);
  out.emplace_back(std::move(re), "Re" + tag);
  out.emplace_back(std::move(im), "Im" + tag);
  return out;
}

}  // namespace aqst
