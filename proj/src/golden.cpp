#include "gnnsim/golden.hpp"

#include <cmath>
#include <stdexcept>

#include "gnnsim/kern/kernels.hpp"

namespace gnnsim {

FeatureMatrix gcn_layer(const NormalizedGraph& n, const FeatureMatrix& h,
                        const GcnLayerWeights& lw) {
  if (h.cols != lw.f_in) throw std::runtime_error("gcn_layer: feature dim mismatch");
  if (h.rows != n.num_nodes) throw std::runtime_error("gcn_layer: row count mismatch");
  auto x = FeatureMatrix::zeros(h.rows, lw.f_out);
  kern::matmul(h.data.data(), lw.w.data(), x.data.data(), h.rows, lw.f_in, lw.f_out);
  auto out = FeatureMatrix::zeros(h.rows, lw.f_out);
  for (const auto& e : n.edges) {
    kern::axpy(e.weight, &x.at(e.src, 0), &out.at(e.dst, 0), lw.f_out);
  }
  for (std::uint32_t r = 0; r < out.rows; ++r) {
    for (std::uint32_t c = 0; c < lw.f_out; ++c) out.at(r, c) += lw.b[c];
  }
  kern::relu(out.data.data(), out.data.size());
  return out;
}

FeatureMatrix gcn_stack(const NormalizedGraph& n, const FeatureMatrix& h0, const SimGnnModel& m,
                        StackStats* stats) {
  FeatureMatrix h = h0;
  for (int l = 0; l < 3; ++l) {
    if (stats) {
      stats->input_elems[l] = h.data.size();
      std::uint64_t nnz = 0;
      for (double v : h.data) nnz += v != 0.0;
      stats->input_nnz[l] = nnz;
    }
    h = gcn_layer(n, h, m.gcn[l]);
  }
  return h;
}

std::vector<double> attention_pool(const FeatureMatrix& h, const std::vector<double>& w_att) {
  const std::uint32_t f = h.cols;
  if (w_att.size() != std::size_t{f} * f) throw std::runtime_error("attention_pool: W_att shape");
  if (h.rows == 0) throw std::runtime_error("attention_pool: empty graph");
  std::vector<double> mean(f, 0.0);
  for (std::uint32_t r = 0; r < h.rows; ++r) {
    kern::axpy(1.0, h.data.data() + std::size_t{r} * f, mean.data(), f);
  }
  const double inv_n = 1.0 / static_cast<double>(h.rows);
  for (auto& v : mean) v *= inv_n;
  std::vector<double> c(f, 0.0);
  kern::matmul(w_att.data(), mean.data(), c.data(), f, f, 1);
  for (auto& v : c) v = std::tanh(v);
  std::vector<double> pooled(f, 0.0);
  for (std::uint32_t r = 0; r < h.rows; ++r) {
    const double* row = h.data.data() + std::size_t{r} * f;
    const double a = sigmoid(kern::dot(row, c.data(), f));
    kern::axpy(a, row, pooled.data(), f);
  }
  return pooled;
}

std::vector<double> ntn_scores(const SimGnnModel& m, const std::vector<double>& hg1,
                               const std::vector<double>& hg2) {
  const std::uint32_t f = m.dims[3];
  if (hg1.size() != f || hg2.size() != f) throw std::runtime_error("ntn_scores: embedding dim");
  std::vector<double> concat(hg1);
  concat.insert(concat.end(), hg2.begin(), hg2.end());
  std::vector<double> out(m.k);
  std::vector<double> t(f);
  for (std::uint32_t s = 0; s < m.k; ++s) {
    kern::matmul(m.ntn_slice(s), hg2.data(), t.data(), f, f, 1);
    const double bilinear = kern::dot(hg1.data(), t.data(), f);
    const double linear = kern::dot(m.ntn_v.data() + std::size_t{s} * 2 * f, concat.data(), 2 * f);
    out[s] = sigmoid(bilinear + linear + m.ntn_b[s]);
  }
  return out;
}

double fcn_score(const SimGnnModel& m, const std::vector<double>& ntn) {
  std::vector<double> v = ntn;
  for (std::size_t l = 0; l < m.fcn.size(); ++l) {
    const auto& fl = m.fcn[l];
    if (v.size() != fl.in) throw std::runtime_error("fcn_score: input dim");
    std::vector<double> next(fl.out, 0.0);
    kern::matmul(fl.w.data(), v.data(), next.data(), fl.out, fl.in, 1);
    for (std::uint32_t i = 0; i < fl.out; ++i) next[i] += fl.b[i];
    if (l + 1 < m.fcn.size()) kern::relu(next.data(), next.size());
    v = std::move(next);
  }
  return sigmoid(v.at(0));
}

double simgnn_score(const Graph& a, const Graph& b, const SimGnnModel& m) {
  m.validate();
  const auto na = normalize_adjacency(a);
  const auto nb = normalize_adjacency(b);
  const auto ha = gcn_stack(na, one_hot_features(a, m.f0()), m);
  const auto hb = gcn_stack(nb, one_hot_features(b, m.f0()), m);
  const auto ga = attention_pool(ha, m.att);
  const auto gb = attention_pool(hb, m.att);
  return fcn_score(m, ntn_scores(m, ga, gb));
}

}  // namespace gnnsim
