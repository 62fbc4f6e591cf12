#pragma once
// SimGNN parameter set: three GCN layers, attention pooling matrix, neural
// tensor network (K bilinear slices + linear part + bias) and the final
// fully-connected scoring head. Stored in double; the simulator converts to
// float at load.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace gnnsim {

struct GcnLayerWeights {
  std::uint32_t f_in = 0;
  std::uint32_t f_out = 0;
  std::vector<double> w;  // f_in x f_out, row major
  std::vector<double> b;  // f_out
};

struct FcnLayer {
  std::uint32_t in = 0;
  std::uint32_t out = 0;
  std::vector<double> w;  // out x in, row major
  std::vector<double> b;  // out
};

struct SimGnnModel {
  // {f0, f1, f2, F}; f0 doubles as the label vocabulary size.
  std::array<std::uint32_t, 4> dims = {29, 64, 32, 16};
  std::uint32_t k = 16;  // NTN slice count
  std::array<GcnLayerWeights, 3> gcn;
  std::vector<double> att;    // F x F
  std::vector<double> ntn_w;  // k slices of F x F, slice-major
  std::vector<double> ntn_v;  // k x 2F
  std::vector<double> ntn_b;  // k
  std::vector<FcnLayer> fcn;  // k -> 8 -> 4 -> 1

  std::uint32_t f0() const { return dims[0]; }
  std::uint32_t embedding_dim() const { return dims[3]; }
  const double* ntn_slice(std::uint32_t s) const {
    return ntn_w.data() + std::size_t{s} * dims[3] * dims[3];
  }
  void validate() const;  // throws on any shape mismatch
};

// All parameters iid uniform(-0.5, 0.5) from the seed. FCN head is
// k -> 8 -> 4 -> 1.
SimGnnModel random_model(std::uint64_t seed, const std::array<std::uint32_t, 4>& dims,
                         std::uint32_t k);

SimGnnModel load_model(const std::string& path);
void save_model(const SimGnnModel& m, const std::string& path);

}  // namespace gnnsim
