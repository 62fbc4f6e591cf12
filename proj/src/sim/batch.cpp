#include "gnnsim/sim/batch.hpp"

#include <algorithm>
#include <exception>
#include <stdexcept>
#include <thread>

#include "gnnsim/sim/query.hpp"

namespace gnnsim::sim {

BatchResult simulate_batch(const std::vector<std::pair<const Graph*, const Graph*>>& queries,
                           const SimGnnModel& model, const ArchConfig& cfg,
                           const std::vector<std::uint32_t>& batch_sizes, std::uint32_t replicas,
                           std::uint32_t threads) {
  if (queries.empty()) throw std::runtime_error("batch simulation needs at least one query");
  if (replicas == 0) throw std::runtime_error("replicas must be >= 1");

  BatchResult res;
  res.replicas = replicas;
  res.kernel_cycles.assign(queries.size(), 0);

  if (threads == 0) {
    threads = std::max(1u, std::thread::hardware_concurrency());
  }
  threads = std::min<std::uint32_t>(threads, static_cast<std::uint32_t>(queries.size()));

  std::vector<std::exception_ptr> errors(threads);
  auto worker = [&](std::uint32_t t) {
    try {
      for (std::size_t i = t; i < queries.size(); i += threads) {
        QueryResult q = simulate_query(*queries[i].first, *queries[i].second, model, cfg);
        res.kernel_cycles[i] = q.report.total_kernel_cycles;
      }
    } catch (...) {
      errors[t] = std::current_exception();
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::uint32_t t = 0; t < threads; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  double sum = 0.0;
  for (std::uint64_t c : res.kernel_cycles) sum += static_cast<double>(c);
  res.mean_kernel_cycles = sum / static_cast<double>(res.kernel_cycles.size());

  const double overhead = static_cast<double>(cfg.invocation_overhead);
  const double base = overhead + res.mean_kernel_cycles;  // batch size 1
  res.points.reserve(batch_sizes.size());
  for (std::uint32_t b : batch_sizes) {
    if (b == 0) throw std::runtime_error("batch size must be >= 1");
    BatchPoint p;
    p.batch_size = b;
    p.avg_cycles_per_query = overhead / static_cast<double>(b) + res.mean_kernel_cycles;
    p.speedup_vs_batch1 = base / p.avg_cycles_per_query;
    res.points.push_back(p);
  }
  return res;
}

}  // namespace gnnsim::sim
