#include "gnnsim/sim/gcn_engine.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "gnnsim/kern/kernels.hpp"

namespace gnnsim::sim {

DispatchDecision arbiter_dispatch(std::vector<AvFifo>& fifos, ArbiterState& state,
                                  std::uint64_t cycle, std::uint32_t df, std::uint32_t lat_acc) {
  const std::uint32_t p = static_cast<std::uint32_t>(fifos.size());
  DispatchDecision d;
  std::vector<std::uint32_t> pick;
  std::vector<bool> bank_used(df, false);
  bool skipped_for_bank = false;
  for (std::uint32_t k = 0; k < p && pick.size() < df; ++k) {
    const std::uint32_t f = (state.head + k) % p;
    if (fifos[f].empty()) continue;
    const std::uint32_t bank = fifos[f].front().row % df;
    if (bank_used[bank]) {
      skipped_for_bank = true;
      continue;
    }
    bank_used[bank] = true;
    pick.push_back(f);
  }
  if (pick.empty()) return d;  // starved: idle, not a bubble

  for (std::uint32_t f : pick) {
    const std::int64_t prev = state.prev_dispatch[fifos[f].front().row];
    if (prev != ArbiterState::kNoDispatch &&
        static_cast<std::int64_t>(cycle) - prev < static_cast<std::int64_t>(lat_acc)) {
      d.raw_stall = true;  // whole slot stalls; nothing popped, head unchanged
      return d;
    }
  }

  d.bank_conflict = skipped_for_bank && pick.size() < df;
  d.elems.reserve(pick.size());
  d.prev_dispatch.reserve(pick.size());
  for (std::uint32_t f : pick) {
    AddressedValue e = fifos[f].pop();
    d.prev_dispatch.push_back(state.prev_dispatch[e.row]);
    state.prev_dispatch[e.row] = static_cast<std::int64_t>(cycle);
    d.elems.push_back(e);
  }
  state.head = (pick.front() + 1) % p;
  return d;
}

LayerPipeline::LayerPipeline(const Desc& d)
    : d_(d),
      arb_(d.rows_padded),
      prod_fifo_(d.fifo_depth),
      x_(static_cast<std::size_t>(d.rows_padded) * d.f_out, 0.0f),
      out_agg_(static_cast<std::size_t>(d.rows) * d.f_out, 0.0f),
      last_agg_(d.rows, ArbiterState::kNoDispatch) {
  mult_ceil_ = ceil_div_u32(d_.f_out, d_.prm.simd_ft);
  agg_ceil_ = ceil_div_u32(d_.f_out, d_.prm.simd_agg);
  if (d_.sparse) {
    in_channels_.reserve(d_.prm.p);
    for (std::uint32_t i = 0; i < d_.prm.p; ++i) in_channels_.emplace_back(d_.fifo_depth);
  } else {
    in_dense_ = std::make_unique<RegFifo<ProductGroup>>(d_.fifo_depth);
  }
}

void LayerPipeline::connect_sparse_out(std::vector<AvFifo>* next) {
  sparse_out_ = next;
  out_lanes_ = static_cast<std::uint32_t>(next->size());
}

void LayerPipeline::connect_dense_out(RegFifo<ProductGroup>* next, std::uint32_t df_next,
                                      std::uint32_t rows_padded_next) {
  dense_out_ = next;
  df_next_ = df_next;
  rows_padded_next_ = rows_padded_next;
}

void LayerPipeline::connect_sink(StreamSink* sink, std::uint32_t lanes) {
  sink_ = sink;
  out_lanes_ = lanes;
  if (!d_.sparse) df_next_ = lanes;
}

void LayerPipeline::tick(std::uint64_t cycle) {
  tick_mult(cycle);
  tick_acg(cycle);
}

void LayerPipeline::tick_mult(std::uint64_t cycle) {
  if (busy_ > 0) {
    mult_ctr_.active++;
    busy_--;
    return;
  }
  if (mult_done_) return;

  if (d_.sparse) {
    bool all_drained = true;
    bool any_ready = false;
    for (const auto& f : in_channels_) {
      if (!f.drained()) all_drained = false;
      if (!f.empty()) any_ready = true;
    }
    if (!any_ready) {
      if (all_drained) {
        mult_done_ = true;
        prod_fifo_.close();
      }
      return;  // starved
    }
    if (!prod_fifo_.can_push()) return;  // backpressure
    DispatchDecision dec = arbiter_dispatch(in_channels_, arb_, cycle, d_.prm.df, d_.lat_acc);
    if (dec.raw_stall) {
      mult_ctr_.bubble++;
      return;
    }
    if (dec.elems.empty()) return;
    if (dec.bank_conflict) dispatch_conflicts_++;
    products_ += dec.elems.size() * d_.f_out;
    elems_consumed_ += dec.elems.size();
    ProductGroup g;
    g.elems = std::move(dec.elems);
    g.prev_dispatch = std::move(dec.prev_dispatch);
    g.dispatch_cycle = cycle;
    g.ready_cycle = cycle + (mult_ceil_ - 1) + d_.lat_mult;
    prod_fifo_.push(std::move(g));
    mult_ctr_.active++;
    busy_ = mult_ceil_ - 1;
    return;
  }

  // dense: one pack per issue slot, no arbiter
  auto& in = *in_dense_;
  if (in.empty()) {
    if (in.drained()) {
      mult_done_ = true;
      prod_fifo_.close();
    }
    return;
  }
  if (!prod_fifo_.can_push()) return;
  ProductGroup g = in.pop();
  g.prev_dispatch.clear();
  g.prev_dispatch.reserve(g.elems.size());
  std::size_t real = 0;
  for (const auto& e : g.elems) {
    g.prev_dispatch.push_back(arb_.prev_dispatch[e.row]);
    arb_.prev_dispatch[e.row] = static_cast<std::int64_t>(cycle);
    if (e.row < d_.rows) real++;
  }
  // Padding rows occupy the schedule but are not counted as useful work.
  products_ += real * d_.f_out;
  elems_consumed_ += real;
  g.dispatch_cycle = cycle;
  g.ready_cycle = cycle + (mult_ceil_ - 1) + d_.lat_mult;
  prod_fifo_.push(std::move(g));
  mult_ctr_.active++;
  busy_ = mult_ceil_ - 1;
}

void LayerPipeline::apply_group(const ProductGroup& g, std::uint64_t cycle) {
  for (std::size_t i = 0; i < g.elems.size(); ++i) {
    const AddressedValue& e = g.elems[i];
    const std::int64_t prev = g.prev_dispatch[i];
    if (prev != ArbiterState::kNoDispatch &&
        static_cast<std::int64_t>(cycle) - prev < static_cast<std::int64_t>(d_.lat_acc)) {
      raw_violations_++;
    }
    kern::axpy(e.value, d_.weights + static_cast<std::size_t>(e.col) * d_.f_out,
               x_.data() + static_cast<std::size_t>(e.row) * d_.f_out, d_.f_out);
  }
}

void LayerPipeline::begin_scan() {
  out_final_ = out_agg_;
  for (std::uint32_t r = 0; r < d_.rows; ++r) {
    float* row = out_final_.data() + static_cast<std::size_t>(r) * d_.f_out;
    kern::axpy(1.0f, d_.bias, row, d_.f_out);
    kern::active().relu_f32(row, d_.f_out);
  }
  if (d_.sparse) {
    lane_pos_.resize(out_lanes_);
    for (std::uint32_t i = 0; i < out_lanes_; ++i) lane_pos_[i] = i;
  } else {
    dense_scan_pos_ = 0;
  }
  phase_ = Phase::scan;
}

void LayerPipeline::tick_acg(std::uint64_t cycle) {
  switch (phase_) {
    case Phase::ft_accumulate: {
      if (!prod_fifo_.empty() && cycle >= prod_fifo_.front().ready_cycle) {
        ProductGroup g = prod_fifo_.pop();
        apply_group(g, cycle);
        acg_ctr_.active++;
      } else if (prod_fifo_.drained()) {
        drain_ = d_.lat_acc;
        phase_ = Phase::ft_drain;
      }
      return;
    }
    case Phase::ft_drain: {
      if (--drain_ == 0) {
        phase_ = Phase::aggregate;
        edge_pos_ = 0;
        edge_sub_ = agg_ceil_;
        if (d_.edges->entries.empty()) {
          drain_ = d_.lat_acc;
          phase_ = Phase::agg_drain;
        }
      }
      return;
    }
    case Phase::aggregate: {
      const EdgeStreamEntry& e = d_.edges->entries[edge_pos_];
      if (e.is_bubble()) {
        acg_ctr_.bubble++;
      } else {
        acg_ctr_.active++;
      }
      if (--edge_sub_ == 0) {
        if (!e.is_bubble()) {
          const std::int64_t prev = last_agg_[e.dst];
          if (prev != ArbiterState::kNoDispatch &&
              static_cast<std::int64_t>(cycle) - prev < static_cast<std::int64_t>(d_.lat_acc)) {
            raw_violations_++;
          }
          last_agg_[e.dst] = static_cast<std::int64_t>(cycle);
          kern::axpy(e.weight, x_.data() + static_cast<std::size_t>(e.src) * d_.f_out,
                     out_agg_.data() + static_cast<std::size_t>(e.dst) * d_.f_out, d_.f_out);
        }
        edge_pos_++;
        edge_sub_ = agg_ceil_;
        if (edge_pos_ == d_.edges->entries.size()) {
          drain_ = d_.lat_acc;
          phase_ = Phase::agg_drain;
        }
      }
      return;
    }
    case Phase::agg_drain: {
      if (--drain_ == 0) begin_scan();
      return;
    }
    case Phase::scan: {
      if (d_.sparse) {
        tick_scan_sparse(cycle);
      } else {
        tick_scan_dense(cycle);
      }
      return;
    }
    case Phase::done:
      return;
  }
}

void LayerPipeline::tick_scan_sparse(std::uint64_t cycle) {
  const std::uint64_t total = static_cast<std::uint64_t>(d_.rows) * d_.f_out;
  bool busy = false;
  std::uint64_t delivered = 0;
  for (std::uint32_t i = 0; i < out_lanes_; ++i) {
    std::uint64_t& pos = lane_pos_[i];
    if (pos >= total) continue;
    busy = true;
    // column-major walk: pos = col * rows + row
    const std::uint32_t col = static_cast<std::uint32_t>(pos / d_.rows);
    const std::uint32_t row = static_cast<std::uint32_t>(pos % d_.rows);
    const float v = out_final_[static_cast<std::size_t>(row) * d_.f_out + col];
    if (v != 0.0f) {
      if (sparse_out_ != nullptr) {
        AvFifo& f = (*sparse_out_)[i];
        if (!f.can_push()) continue;  // lane retries next cycle
        f.push(AddressedValue{v, row, col});
      } else {
        delivered++;
      }
    }
    pos += out_lanes_;
  }
  if (sink_ != nullptr) sink_->deliver(cycle, delivered);
  if (busy) {
    acg_ctr_.active++;
    return;
  }
  if (!out_closed_sent_) {
    if (sparse_out_ != nullptr) {
      for (auto& f : *sparse_out_) f.close();
    }
    out_closed_sent_ = true;
  }
  phase_ = Phase::done;
}

void LayerPipeline::tick_scan_dense(std::uint64_t cycle) {
  // Stream df_next-wide packs column-major over the consumer's padded rows.
  // Delivery to a sink covers real rows only (padding exists for the next
  // MULT's schedule; the attention stage has none).
  const std::uint32_t pack = df_next_;
  const std::uint32_t span_rows = (dense_out_ != nullptr) ? rows_padded_next_ : d_.rows;
  const std::uint64_t groups = ceil_div_u32(span_rows, pack);
  const std::uint64_t total = groups * d_.f_out;
  if (dense_scan_pos_ < total) {
    if (dense_out_ != nullptr && !dense_out_->can_push()) {
      acg_ctr_.active++;  // stalled on backpressure but occupied
      return;
    }
    const std::uint32_t col = static_cast<std::uint32_t>(dense_scan_pos_ / groups);
    const std::uint32_t grp = static_cast<std::uint32_t>(dense_scan_pos_ % groups);
    std::uint64_t delivered = 0;
    if (dense_out_ != nullptr) {
      ProductGroup g;
      g.elems.reserve(pack);
      for (std::uint32_t j = 0; j < pack; ++j) {
        const std::uint32_t row = grp * pack + j;
        const float v =
            row < d_.rows ? out_final_[static_cast<std::size_t>(row) * d_.f_out + col] : 0.0f;
        g.elems.push_back(AddressedValue{v, row, col});
      }
      dense_out_->push(std::move(g));
    } else {
      for (std::uint32_t j = 0; j < pack; ++j) {
        if (grp * pack + j < d_.rows) delivered++;
      }
      if (sink_ != nullptr) sink_->deliver(cycle, delivered);
    }
    dense_scan_pos_++;
    acg_ctr_.active++;
    return;
  }
  if (!out_closed_sent_) {
    if (dense_out_ != nullptr) dense_out_->close();
    out_closed_sent_ = true;
  }
  phase_ = Phase::done;
}

void LayerPipeline::commit_fifos() {
  for (auto& f : in_channels_) f.commit();
  if (in_dense_) in_dense_->commit();
  prod_fifo_.commit();
}

namespace {

// Streams df-wide packs of a row-major matrix into a dense input channel,
// column-major over padded rows, one pack per cycle.
struct DenseFeeder {
  const float* src = nullptr;
  std::uint32_t rows_real = 0;
  std::uint32_t cols = 0;
  std::uint32_t df = 0;
  std::uint32_t rows_padded = 0;
  RegFifo<ProductGroup>* out = nullptr;
  std::uint64_t start_cycle = 0;
  std::uint64_t pos = 0;
  bool active = false;
  bool finished = false;

  void tick(std::uint64_t cycle) {
    if (!active || finished || cycle < start_cycle) return;
    if (!out->can_push()) return;
    const std::uint64_t groups = rows_padded / df;
    const std::uint64_t total = groups * cols;
    const std::uint32_t col = static_cast<std::uint32_t>(pos / groups);
    const std::uint32_t grp = static_cast<std::uint32_t>(pos % groups);
    ProductGroup g;
    g.elems.reserve(df);
    for (std::uint32_t j = 0; j < df; ++j) {
      const std::uint32_t row = grp * df + j;
      const float v = row < rows_real ? src[static_cast<std::size_t>(row) * cols + col] : 0.0f;
      g.elems.push_back(AddressedValue{v, row, col});
    }
    out->push(std::move(g));
    if (++pos == total) {
      out->close();
      finished = true;
    }
  }
};

// Delivers prune-packed elements round-robin into the P input channels of the
// first sparse layer, at most one push per channel per cycle, in pack order.
struct SparseFeeder {
  std::vector<AddressedValue> elems;
  std::vector<AvFifo>* out = nullptr;
  std::uint64_t next = 0;
  bool finished = false;

  void tick(std::uint64_t) {
    if (finished) return;
    const std::uint32_t p = static_cast<std::uint32_t>(out->size());
    for (std::uint32_t tries = 0; tries < p && next < elems.size(); ++tries) {
      AvFifo& f = (*out)[static_cast<std::uint32_t>(next % p)];
      if (!f.can_push()) break;  // keep pack order
      f.push(elems[next]);
      next++;
    }
    if (next == elems.size()) {
      for (auto& f : *out) f.close();
      finished = true;
    }
  }
};

std::uint64_t count_nonzero(const float* m, std::uint64_t n) {
  std::uint64_t c = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    if (m[i] != 0.0f) c++;
  }
  return c;
}

}  // namespace

GcnRunResult run_gcn(const std::vector<float>& h0, std::uint32_t rows,
                     const std::array<const float*, 3>& weights,
                     const std::array<const float*, 3>& biases,
                     const std::array<std::uint32_t, 4>& dims, const EdgeStream& edges,
                     const ArchConfig& cfg) {
  const bool sparse_mode = cfg.mode == ArchMode::extended_sparsity;
  const bool baseline = cfg.mode == ArchMode::baseline;

  std::array<std::uint32_t, 3> rows_padded{};
  for (std::uint32_t l = 0; l < 3; ++l) {
    rows_padded[l] = sparse_mode ? rows
                                 : pad_rows(rows, cfg.layers[l].df, dims[l + 1],
                                            cfg.layers[l].simd_ft, cfg.lat_acc);
  }

  std::array<std::unique_ptr<LayerPipeline>, 3> layers;
  for (std::uint32_t l = 0; l < 3; ++l) {
    LayerPipeline::Desc d;
    d.f_in = dims[l];
    d.f_out = dims[l + 1];
    d.rows = rows;
    d.rows_padded = rows_padded[l];
    d.prm = cfg.layers[l];
    d.lat_mult = cfg.lat_mult;
    d.lat_acc = cfg.lat_acc;
    d.fifo_depth = cfg.fifo_depth;
    d.sparse = sparse_mode;
    d.weights = weights[l];
    d.bias = biases[l];
    d.edges = &edges;
    layers[l] = std::make_unique<LayerPipeline>(d);
  }

  StreamSink sink;
  SparseFeeder sparse_feeder;
  std::array<DenseFeeder, 3> dense_feeders{};  // [0] = input; [1],[2] = baseline boundaries

  if (sparse_mode) {
    FeatureMatrix h0d;
    h0d.rows = rows;
    h0d.cols = dims[0];
    h0d.data.assign(h0.begin(), h0.end());
    sparse_feeder.elems = prune_pack(h0d);
    sparse_feeder.out = &layers[0]->in_channels();
    layers[0]->connect_sparse_out(&layers[1]->in_channels());
    layers[1]->connect_sparse_out(&layers[2]->in_channels());
    layers[2]->connect_sink(&sink, cfg.layers[2].p);
  } else {
    dense_feeders[0].src = h0.data();
    dense_feeders[0].rows_real = rows;
    dense_feeders[0].cols = dims[0];
    dense_feeders[0].df = cfg.layers[0].df;
    dense_feeders[0].rows_padded = rows_padded[0];
    dense_feeders[0].out = &layers[0]->in_dense();
    dense_feeders[0].active = true;
    if (baseline) {
      // Inter-layer results round-trip through memory: each boundary
      // re-streams from the written-back features after the transfer cost.
      for (std::uint32_t l = 1; l < 3; ++l) {
        dense_feeders[l].rows_real = rows;
        dense_feeders[l].cols = dims[l];
        dense_feeders[l].df = cfg.layers[l].df;
        dense_feeders[l].rows_padded = rows_padded[l];
        dense_feeders[l].out = &layers[l]->in_dense();
      }
      layers[0]->connect_sink(nullptr, cfg.layers[0].df);  // writeback pacing only
      layers[1]->connect_sink(nullptr, cfg.layers[1].df);
      layers[2]->connect_sink(&sink, cfg.layers[2].df);
    } else {
      layers[0]->connect_dense_out(&layers[1]->in_dense(), cfg.layers[1].df, rows_padded[1]);
      layers[1]->connect_dense_out(&layers[2]->in_dense(), cfg.layers[2].df, rows_padded[2]);
      layers[2]->connect_sink(&sink, cfg.layers[2].df);
    }
  }

  GcnRunResult res;
  res.stream_entries = edges.entries.size();

  // Generous ceiling: deadlock shows up as an exception, not a hang.
  std::uint64_t work = 1;
  for (std::uint32_t l = 0; l < 3; ++l) {
    work += static_cast<std::uint64_t>(rows_padded[l]) * dims[l] *
            ceil_div_u32(dims[l + 1], cfg.layers[l].simd_ft);
    work += edges.entries.size() * ceil_div_u32(dims[l + 1], cfg.layers[l].simd_agg);
    work += static_cast<std::uint64_t>(rows) * dims[l + 1];
  }
  const std::uint64_t watchdog =
      10000 + 64 * work +
      2 * static_cast<std::uint64_t>(cfg.mem_cost_per_elem) * rows * (dims[1] + dims[2]);

  std::array<bool, 3> boundary_done{false, false, false};
  std::uint64_t cycle = 0;
  for (;; ++cycle) {
    if (cycle > watchdog) {
      throw std::runtime_error("simulation watchdog tripped at cycle " + std::to_string(cycle));
    }
    if (sparse_mode) {
      sparse_feeder.tick(cycle);
    } else {
      for (auto& f : dense_feeders) f.tick(cycle);
    }
    for (auto& l : layers) l->tick(cycle);
    for (auto& l : layers) l->commit_fifos();

    if (baseline) {
      for (std::uint32_t l = 0; l < 2; ++l) {
        if (!boundary_done[l] && layers[l]->output_closed()) {
          boundary_done[l] = true;
          const std::uint64_t mem_cycles = static_cast<std::uint64_t>(cfg.mem_cost_per_elem) *
                                           rows * dims[l + 1];
          res.mem.active += mem_cycles;
          dense_feeders[l + 1].src = layers[l]->out_features().data();
          dense_feeders[l + 1].start_cycle = cycle + 1 + mem_cycles;
          dense_feeders[l + 1].active = true;
        }
      }
    }
    if (layers[2]->output_closed()) {
      cycle++;
      break;
    }
  }

  res.cycles = cycle;
  res.first_out_cycle = sink.any ? sink.first_cycle : cycle;
  res.out_elems = sink.elems;
  res.h_out = layers[2]->out_features();

  const std::array<const float*, 3> ins = {h0.data(), layers[0]->out_features().data(),
                                           layers[1]->out_features().data()};
  for (std::uint32_t l = 0; l < 3; ++l) {
    res.mult[l] = layers[l]->mult_counters();
    res.acg[l] = layers[l]->acg_counters();
    res.mult[l].total = cycle;
    res.acg[l].total = cycle;
    res.mult[l].idle = cycle - res.mult[l].active - res.mult[l].bubble;
    res.acg[l].idle = cycle - res.acg[l].active - res.acg[l].bubble;
    res.products[l] = layers[l]->products();
    res.ft_busy[l] = layers[l]->mult_counters().active + layers[l]->mult_counters().bubble;
    res.input_elems[l] = static_cast<std::uint64_t>(rows) * dims[l];
    res.input_nnz[l] = count_nonzero(ins[l], res.input_elems[l]);
    res.dispatch_conflicts += layers[l]->dispatch_conflicts();
    res.raw_violations += layers[l]->raw_violations();

    const std::string prefix = "gcn" + std::to_string(l + 1);
    if (sparse_mode) {
      const auto& chans = layers[l]->in_channels();
      for (std::size_t i = 0; i < chans.size(); ++i) {
        res.fifos.emplace_back(prefix + ".in" + std::to_string(i),
                               FifoStat{chans[i].capacity(), chans[i].max_occupancy()});
      }
    } else {
      const auto& ch = layers[l]->in_dense();
      res.fifos.emplace_back(prefix + ".in", FifoStat{ch.capacity(), ch.max_occupancy()});
    }
    res.fifos.emplace_back(prefix + ".prod", FifoStat{layers[l]->product_fifo().capacity(),
                                                      layers[l]->product_fifo().max_occupancy()});
  }
  if (baseline) {
    res.mem.total = cycle;
    res.mem.idle = cycle - res.mem.active;
  }
  return res;
}

}  // namespace gnnsim::sim
