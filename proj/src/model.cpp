#include "gnnsim/model.hpp"

#include <fstream>
#include <stdexcept>

#include "gnnsim/rng.hpp"
#include "json.hpp"

namespace gnnsim {

namespace {

void check(bool ok, const std::string& what) {
  if (!ok) throw std::runtime_error("model validation error: " + what);
}

std::vector<double> uniform_vec(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-0.5, 0.5);
  return v;
}

}  // namespace

void SimGnnModel::validate() const {
  const std::uint32_t f = dims[3];
  for (int l = 0; l < 3; ++l) {
    check(gcn[l].f_in == dims[l] && gcn[l].f_out == dims[l + 1],
          "gcn layer " + std::to_string(l) + " dims");
    check(gcn[l].w.size() == std::size_t{gcn[l].f_in} * gcn[l].f_out,
          "gcn layer " + std::to_string(l) + " weight size");
    check(gcn[l].b.size() == gcn[l].f_out, "gcn layer " + std::to_string(l) + " bias size");
  }
  check(att.size() == std::size_t{f} * f, "att matrix size");
  check(ntn_w.size() == std::size_t{k} * f * f, "ntn_w size");
  check(ntn_v.size() == std::size_t{k} * 2 * f, "ntn_v size");
  check(ntn_b.size() == k, "ntn_b size");
  check(!fcn.empty() && fcn.front().in == k && fcn.back().out == 1, "fcn head shape");
  std::uint32_t prev = k;
  for (const auto& l : fcn) {
    check(l.in == prev, "fcn chain dims");
    check(l.w.size() == std::size_t{l.in} * l.out && l.b.size() == l.out, "fcn layer sizes");
    prev = l.out;
  }
}

SimGnnModel random_model(std::uint64_t seed, const std::array<std::uint32_t, 4>& dims,
                         std::uint32_t k) {
  Rng rng(seed);
  SimGnnModel m;
  m.dims = dims;
  m.k = k;
  const std::uint32_t f = dims[3];
  for (int l = 0; l < 3; ++l) {
    m.gcn[l].f_in = dims[l];
    m.gcn[l].f_out = dims[l + 1];
    m.gcn[l].w = uniform_vec(rng, std::size_t{dims[l]} * dims[l + 1]);
    m.gcn[l].b = uniform_vec(rng, dims[l + 1]);
  }
  m.att = uniform_vec(rng, std::size_t{f} * f);
  m.ntn_w = uniform_vec(rng, std::size_t{k} * f * f);
  m.ntn_v = uniform_vec(rng, std::size_t{k} * 2 * f);
  m.ntn_b = uniform_vec(rng, k);
  const std::uint32_t widths[] = {k, 8, 4, 1};
  for (int l = 0; l < 3; ++l) {
    FcnLayer fl;
    fl.in = widths[l];
    fl.out = widths[l + 1];
    fl.w = uniform_vec(rng, std::size_t{fl.in} * fl.out);
    fl.b = uniform_vec(rng, fl.out);
    m.fcn.push_back(std::move(fl));
  }
  m.validate();
  return m;
}

namespace {

nlohmann::ordered_json matrix_json(const std::vector<double>& v, std::size_t rows,
                                   std::size_t cols) {
  auto out = nlohmann::ordered_json::array();
  for (std::size_t r = 0; r < rows; ++r) {
    auto row = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < cols; ++c) row.push_back(v[r * cols + c]);
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<double> matrix_from_json(const nlohmann::json& j, std::size_t rows, std::size_t cols,
                                     const std::string& what) {
  if (!j.is_array() || j.size() != rows) {
    throw std::runtime_error("model parse error: " + what + " row count");
  }
  std::vector<double> v;
  v.reserve(rows * cols);
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != cols) {
      throw std::runtime_error("model parse error: " + what + " column count");
    }
    for (const auto& x : row) v.push_back(x.get<double>());
  }
  return v;
}

}  // namespace

void save_model(const SimGnnModel& m, const std::string& path) {
  m.validate();
  const std::uint32_t f = m.dims[3];
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["dims"] = m.dims;
  j["k"] = m.k;
  auto gcn = nlohmann::ordered_json::array();
  for (const auto& l : m.gcn) {
    gcn.push_back({{"w", matrix_json(l.w, l.f_in, l.f_out)}, {"b", l.b}});
  }
  j["gcn"] = std::move(gcn);
  j["att"] = matrix_json(m.att, f, f);
  auto slices = nlohmann::ordered_json::array();
  for (std::uint32_t s = 0; s < m.k; ++s) {
    slices.push_back(matrix_json(
        std::vector<double>(m.ntn_slice(s), m.ntn_slice(s) + std::size_t{f} * f), f, f));
  }
  j["ntn_w"] = std::move(slices);
  j["ntn_v"] = matrix_json(m.ntn_v, m.k, std::size_t{2} * f);
  j["ntn_b"] = m.ntn_b;
  auto fcn = nlohmann::ordered_json::array();
  for (const auto& l : m.fcn) {
    fcn.push_back({{"w", matrix_json(l.w, l.out, l.in)}, {"b", l.b}});
  }
  j["fcn"] = std::move(fcn);
  j["ntn_activation"] = "sigmoid";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out << j.dump(2) << '\n';
}

SimGnnModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("model parse error in " + path + ": " + e.what());
  }
  try {
    if (j.at("version").get<int>() != 1) {
      throw std::runtime_error("model parse error: unsupported version");
    }
    if (j.value("ntn_activation", "sigmoid") != std::string("sigmoid")) {
      throw std::runtime_error("model parse error: unsupported ntn_activation");
    }
    SimGnnModel m;
    auto dims = j.at("dims").get<std::vector<std::uint32_t>>();
    if (dims.size() != 4) throw std::runtime_error("model parse error: dims must have 4 entries");
    std::copy(dims.begin(), dims.end(), m.dims.begin());
    m.k = j.at("k").get<std::uint32_t>();
    const std::uint32_t f = m.dims[3];
    const auto& gcn = j.at("gcn");
    if (gcn.size() != 3) throw std::runtime_error("model parse error: need 3 gcn layers");
    for (int l = 0; l < 3; ++l) {
      m.gcn[l].f_in = m.dims[l];
      m.gcn[l].f_out = m.dims[l + 1];
      m.gcn[l].w = matrix_from_json(gcn[l].at("w"), m.dims[l], m.dims[l + 1], "gcn w");
      m.gcn[l].b = gcn[l].at("b").get<std::vector<double>>();
    }
    m.att = matrix_from_json(j.at("att"), f, f, "att");
    m.ntn_w.clear();
    const auto& slices = j.at("ntn_w");
    if (slices.size() != m.k) throw std::runtime_error("model parse error: ntn_w slice count");
    for (const auto& s : slices) {
      auto sl = matrix_from_json(s, f, f, "ntn_w slice");
      m.ntn_w.insert(m.ntn_w.end(), sl.begin(), sl.end());
    }
    m.ntn_v = matrix_from_json(j.at("ntn_v"), m.k, std::size_t{2} * f, "ntn_v");
    m.ntn_b = j.at("ntn_b").get<std::vector<double>>();
    for (const auto& l : j.at("fcn")) {
      FcnLayer fl;
      fl.b = l.at("b").get<std::vector<double>>();
      fl.out = static_cast<std::uint32_t>(fl.b.size());
      const auto& w = l.at("w");
      if (!w.is_array() || w.empty() || !w[0].is_array()) {
        throw std::runtime_error("model parse error: fcn w");
      }
      fl.in = static_cast<std::uint32_t>(w[0].size());
      fl.w = matrix_from_json(w, fl.out, fl.in, "fcn w");
      m.fcn.push_back(std::move(fl));
    }
    m.validate();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("model parse error in " + path + ": " + e.what());
  }
}

}  // namespace gnnsim
