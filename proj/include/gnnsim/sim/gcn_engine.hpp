#pragma once
// Cycle-stepped model of the GCN stage. Each layer is a MULT unit (feature
// transform: weight broadcast against streamed embedding elements) feeding an
// ACG unit (accumulate / aggregate over the edge stream / bias+ReLU+output
// scan) through a product FIFO. Layers are coupled by FIFO groups: in sparse
// mode a pruning scan forwards nonzeros into the next layer's P channels and
// a bank-aware arbiter fetches up to DF of them per issue slot; in dense
// modes the inter-layer stream carries DF-wide packs. FIFO pushes become
// visible one cycle after they are staged (registered semantics), so tick
// order within a cycle does not matter.

#include <cassert>
#include <cstdint>
#include <deque>
#include <limits>
#include <memory>
#include <vector>

#include "gnnsim/preproc.hpp"
#include "gnnsim/sim/arch_config.hpp"
#include "gnnsim/sim/report.hpp"

namespace gnnsim::sim {

inline std::uint32_t ceil_div_u32(std::uint32_t a, std::uint32_t b) { return (a + b - 1) / b; }

template <typename T>
class RegFifo {
 public:
  explicit RegFifo(std::uint32_t capacity) : cap_(capacity) {}

  bool can_push() const { return curr_.size() + staged_.size() < cap_; }
  void push(T v) {
    assert(can_push());
    staged_.push_back(std::move(v));
  }
  bool empty() const { return curr_.empty(); }
  std::size_t size() const { return curr_.size(); }
  const T& front() const { return curr_.front(); }
  T pop() {
    assert(!curr_.empty());
    T v = std::move(curr_.front());
    curr_.pop_front();
    return v;
  }
  void close() { close_staged_ = true; }
  // Producer finished and nothing further will arrive.
  bool closed() const { return closed_; }
  bool drained() const { return closed_ && curr_.empty() && staged_.empty(); }

  void commit() {
    for (auto& v : staged_) curr_.push_back(std::move(v));
    staged_.clear();
    if (close_staged_) closed_ = true;
    max_occ_ = std::max(max_occ_, curr_.size());
  }

  std::uint32_t capacity() const { return cap_; }
  std::uint32_t max_occupancy() const { return static_cast<std::uint32_t>(max_occ_); }

 private:
  std::uint32_t cap_;
  std::deque<T> curr_;
  std::vector<T> staged_;
  bool closed_ = false;
  bool close_staged_ = false;
  std::size_t max_occ_ = 0;
};

// One issue slot's worth of MULT output: up to df elements on distinct banks
// (sparse) or a df-wide dense pack. prev_dispatch lets the consumer check the
// stall-soundness invariant at commit time.
struct ProductGroup {
  std::vector<AddressedValue> elems;
  std::vector<std::int64_t> prev_dispatch;  // per element, < 0 when none
  std::uint64_t dispatch_cycle = 0;
  std::uint64_t ready_cycle = 0;
};

using AvFifo = RegFifo<AddressedValue>;

struct ArbiterState {
  std::uint32_t head = 0;                    // rotating round-robin start
  std::vector<std::int64_t> prev_dispatch;   // per row; kNoDispatch when never
  static constexpr std::int64_t kNoDispatch = std::numeric_limits<std::int64_t>::min();

  explicit ArbiterState(std::uint32_t rows) : prev_dispatch(rows, kNoDispatch) {}
};

struct DispatchDecision {
  std::vector<AddressedValue> elems;        // popped on success
  std::vector<std::int64_t> prev_dispatch;  // prior dispatch cycle per element
  bool raw_stall = false;   // candidates existed but the RAW window blocked the slot
  bool bank_conflict = false;  // a non-empty channel was skipped for its bank
};

// Scans the channels round-robin from state.head and greedily selects up to
// df head elements whose banks (row % df) are distinct. If any selected row
// was dispatched fewer than lat_acc cycles ago the whole slot stalls and
// nothing is popped; otherwise the selection is popped, prev_dispatch is
// updated and head advances past the first channel read.
DispatchDecision arbiter_dispatch(std::vector<AvFifo>& fifos, ArbiterState& state,
                                  std::uint64_t cycle, std::uint32_t df, std::uint32_t lat_acc);

// Collects elements delivered to the attention stage (always accepts).
struct StreamSink {
  std::uint64_t elems = 0;
  std::uint64_t first_cycle = 0;
  bool any = false;
  void deliver(std::uint64_t cycle, std::uint64_t n) {
    if (n == 0) return;
    if (!any) {
      any = true;
      first_cycle = cycle;
    }
    elems += n;
  }
};

// One GCN layer (MULT + ACG). Construct, wire the output side, then tick
// every cycle and commit FIFOs through the engine.
class LayerPipeline {
 public:
  struct Desc {
    std::uint32_t f_in = 0;
    std::uint32_t f_out = 0;
    std::uint32_t rows = 0;         // real node count
    std::uint32_t rows_padded = 0;  // == rows in sparse mode
    LayerParams prm;
    std::uint32_t lat_mult = 4;
    std::uint32_t lat_acc = 7;
    std::uint32_t fifo_depth = 16;
    bool sparse = false;
    const float* weights = nullptr;  // f_in x f_out
    const float* bias = nullptr;     // f_out
    const EdgeStream* edges = nullptr;
  };

  explicit LayerPipeline(const Desc& d);

  std::vector<AvFifo>& in_channels() { return in_channels_; }          // sparse input
  RegFifo<ProductGroup>& in_dense() { return *in_dense_; }             // dense input

  // Sparse scan output: lane i pushes into (*next)[i]; lane count fixed at
  // construction of the consumer (its p). Dense output: df_next-wide packs
  // over rows_padded_next rows.
  void connect_sparse_out(std::vector<AvFifo>* next);
  void connect_dense_out(RegFifo<ProductGroup>* next, std::uint32_t df_next,
                         std::uint32_t rows_padded_next);
  void connect_sink(StreamSink* sink, std::uint32_t lanes);

  void tick(std::uint64_t cycle);
  void commit_fifos();
  bool output_closed() const { return phase_ == Phase::done; }

  // Post bias+ReLU features, rows x f_out. Valid once the scan phase begins.
  const std::vector<float>& out_features() const { return out_final_; }

  const ModuleCounters& mult_counters() const { return mult_ctr_; }
  const ModuleCounters& acg_counters() const { return acg_ctr_; }
  std::uint64_t products() const { return products_; }
  std::uint64_t elems_consumed() const { return elems_consumed_; }
  std::uint64_t raw_violations() const { return raw_violations_; }
  std::uint64_t dispatch_conflicts() const { return dispatch_conflicts_; }
  const RegFifo<ProductGroup>& product_fifo() const { return prod_fifo_; }

 private:
  enum class Phase { ft_accumulate, ft_drain, aggregate, agg_drain, scan, done };

  void tick_mult(std::uint64_t cycle);
  void tick_acg(std::uint64_t cycle);
  void apply_group(const ProductGroup& g, std::uint64_t cycle);
  void begin_scan();
  void tick_scan_sparse(std::uint64_t cycle);
  void tick_scan_dense(std::uint64_t cycle);

  Desc d_;
  std::uint32_t mult_ceil_ = 1;  // issue cycles per slot
  std::uint32_t agg_ceil_ = 1;   // cycles per edge-stream entry

  // input side
  std::vector<AvFifo> in_channels_;
  std::unique_ptr<RegFifo<ProductGroup>> in_dense_;
  ArbiterState arb_;

  // MULT state
  std::uint32_t busy_ = 0;
  bool mult_done_ = false;
  RegFifo<ProductGroup> prod_fifo_;

  // ACG state
  Phase phase_ = Phase::ft_accumulate;
  std::vector<float> x_;          // rows_padded x f_out accumulator
  std::vector<float> out_agg_;    // rows x f_out aggregation buffer
  std::vector<float> out_final_;  // rows x f_out after bias+ReLU
  std::vector<std::int64_t> last_agg_;  // per dst row, last aggregation apply
  std::uint32_t drain_ = 0;
  std::size_t edge_pos_ = 0;
  std::uint32_t edge_sub_ = 0;

  // output side
  std::vector<AvFifo>* sparse_out_ = nullptr;
  RegFifo<ProductGroup>* dense_out_ = nullptr;
  std::uint32_t df_next_ = 0;
  std::uint32_t rows_padded_next_ = 0;
  StreamSink* sink_ = nullptr;
  std::uint32_t out_lanes_ = 1;
  std::vector<std::uint64_t> lane_pos_;  // column-major cursor per scan lane
  std::uint64_t dense_scan_pos_ = 0;
  bool out_closed_sent_ = false;

  // counters
  ModuleCounters mult_ctr_;
  ModuleCounters acg_ctr_;
  std::uint64_t products_ = 0;
  std::uint64_t elems_consumed_ = 0;
  std::uint64_t raw_violations_ = 0;
  std::uint64_t dispatch_conflicts_ = 0;
};

struct GcnRunResult {
  std::uint64_t cycles = 0;          // layer-3 output stream close
  std::uint64_t first_out_cycle = 0; // first element delivered to the sink
  std::uint64_t out_elems = 0;       // stream length seen by the attention stage
  std::vector<float> h_out;          // rows x F final features
  std::array<ModuleCounters, 3> mult{};
  std::array<ModuleCounters, 3> acg{};
  ModuleCounters mem{};              // baseline inter-layer round trips
  std::array<std::uint64_t, 3> products{};
  std::array<std::uint64_t, 3> input_nnz{};    // real-row nonzeros entering each layer
  std::array<std::uint64_t, 3> input_elems{};  // real-row element counts
  std::array<std::uint64_t, 3> ft_busy{};      // mult active + bubble
  std::uint64_t dispatch_conflicts = 0;
  std::uint64_t raw_violations = 0;
  std::vector<std::pair<std::string, FifoStat>> fifos;
  std::uint64_t stream_entries = 0;  // edge stream length incl. bubbles
};

// Runs one graph through the three-layer GCN stage. h0 is the one-hot input
// (|V| x f0, float), edges the reordered stream for L = lat_acc.
GcnRunResult run_gcn(const std::vector<float>& h0, std::uint32_t rows,
                     const std::array<const float*, 3>& weights,
                     const std::array<const float*, 3>& biases,
                     const std::array<std::uint32_t, 4>& dims, const EdgeStream& edges,
                     const ArchConfig& cfg);

}  // namespace gnnsim::sim
