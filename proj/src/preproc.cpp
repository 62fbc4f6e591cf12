#include "gnnsim/preproc.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <stdexcept>

namespace gnnsim {

EdgeStream reorder_edges(const NormalizedGraph& n, std::uint32_t l) {
  if (l == 0) throw std::runtime_error("reorder_edges: l must be >= 1");
  // Per-destination queues, canonical input order preserved within each.
  std::map<NodeIndex, std::deque<WeightedEdge>> pending;
  for (const auto& e : n.edges) pending[e.dst].push_back(e);
  std::vector<std::int64_t> last(n.num_nodes, -static_cast<std::int64_t>(l));
  EdgeStream s;
  s.min_gap = l;
  std::size_t remaining = n.edges.size();
  std::int64_t pos = 0;
  while (remaining > 0) {
    NodeIndex best = kNodeSentinel;
    std::size_t best_count = 0;
    for (const auto& [dst, q] : pending) {
      if (q.empty()) continue;
      if (pos - last[dst] < static_cast<std::int64_t>(l)) continue;
      // Most-constrained destination first keeps the tail schedulable.
      if (q.size() > best_count) {
        best = dst;
        best_count = q.size();
      }
    }
    if (best == kNodeSentinel) {
      s.entries.push_back({});  // bubble
    } else {
      auto& q = pending[best];
      const auto e = q.front();
      q.pop_front();
      s.entries.push_back({e.src, e.dst, static_cast<float>(e.weight)});
      last[best] = pos;
      --remaining;
    }
    ++pos;
  }
  return s;
}

bool verify_edge_stream(const EdgeStream& s, const NormalizedGraph& n, std::uint32_t l,
                        std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  using Key = std::tuple<NodeIndex, NodeIndex, float>;
  std::vector<Key> got, want;
  std::map<NodeIndex, std::int64_t> last;
  for (std::size_t i = 0; i < s.entries.size(); ++i) {
    const auto& e = s.entries[i];
    if (e.is_bubble()) continue;
    got.emplace_back(e.src, e.dst, e.weight);
    auto it = last.find(e.dst);
    if (it != last.end() && static_cast<std::int64_t>(i) - it->second < static_cast<std::int64_t>(l)) {
      return fail("destination " + std::to_string(e.dst) + " repeated within " +
                  std::to_string(l) + " positions at " + std::to_string(i));
    }
    last[e.dst] = static_cast<std::int64_t>(i);
  }
  for (const auto& e : n.edges) want.emplace_back(e.src, e.dst, static_cast<float>(e.weight));
  std::sort(got.begin(), got.end());
  std::sort(want.begin(), want.end());
  if (got != want) return fail("stream edge multiset differs from the normalized graph");
  return true;
}

std::uint32_t pad_rows(std::uint32_t rows, std::uint32_t df, std::uint32_t f_out,
                       std::uint32_t simd, std::uint32_t l) {
  if (df == 0 || simd == 0 || f_out == 0) throw std::runtime_error("pad_rows: bad parameters");
  const std::uint64_t per_row_group = (f_out + simd - 1) / simd;  // issue cycles per df-group
  std::uint64_t groups = (rows + df - 1) / df;
  if (groups == 0) groups = 1;
  while (groups * per_row_group < l) ++groups;
  return static_cast<std::uint32_t>(groups * df);
}

std::vector<AddressedValue> prune_pack(const FeatureMatrix& h) {
  std::vector<AddressedValue> out;
  for (std::uint32_t c = 0; c < h.cols; ++c) {
    for (std::uint32_t r = 0; r < h.rows; ++r) {
      const auto v = static_cast<float>(h.at(r, c));
      if (v != 0.0f) out.push_back({v, r, c});
    }
  }
  return out;
}

}  // namespace gnnsim
