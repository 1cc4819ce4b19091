#include "sparsedual/data.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "sparsedual/format.hpp"
#include "sparsedual/rng.hpp"

namespace sparsedual {

void SyntheticSpec::validate() const {
  if (d < 1) throw std::invalid_argument("SyntheticSpec: d must be >= 1");
  if (k_true < 0 || k_true > d) throw std::invalid_argument("SyntheticSpec: k_true outside [0, d]");
  if (n < 1) throw std::invalid_argument("SyntheticSpec: n must be >= 1");
  if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) {
    throw std::invalid_argument("SyntheticSpec: noise_sd must be finite and >= 0");
  }
  if (!(off_diag >= 0.0 && off_diag < 1.0)) {
    throw std::invalid_argument("SyntheticSpec: off_diag outside [0, 1)");
  }
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  const Index d = spec.d;
  const Index kb = spec.k_true;
  Rng rng(spec.seed);

  std::vector<double> mu1(static_cast<std::size_t>(kb));
  for (double& v : mu1) v = rng.next_gaussian();
  std::vector<double> mu2(static_cast<std::size_t>(d - kb));
  for (double& v : mu2) v = rng.next_gaussian();

  // Square root of (1-rho)*I + rho*J is a*I + b*J with the closed form below.
  const double rho = spec.off_diag;
  const double a = std::sqrt(1.0 - rho);
  const double b =
      kb > 0 ? (std::sqrt(1.0 - rho + rho * static_cast<double>(kb)) - a) / static_cast<double>(kb)
             : 0.0;

  std::vector<Index> all_indices(static_cast<std::size_t>(d));
  std::iota(all_indices.begin(), all_indices.end(), Index{0});
  const IndexSet full_support(all_indices);

  Dataset data;
  data.dim = d;
  data.samples.reserve(static_cast<std::size_t>(spec.n));
  data.labels.reserve(static_cast<std::size_t>(spec.n));

  std::vector<double> z(static_cast<std::size_t>(kb));
  for (Index i = 0; i < spec.n; ++i) {
    std::vector<double> x(static_cast<std::size_t>(d));
    double zsum = 0.0;
    for (Index j = 0; j < kb; ++j) {
      z[static_cast<std::size_t>(j)] = rng.next_gaussian();
      zsum += z[static_cast<std::size_t>(j)];
    }
    double y = 0.0;
    for (Index j = 0; j < kb; ++j) {
      const double v = mu1[static_cast<std::size_t>(j)] + a * z[static_cast<std::size_t>(j)] + b * zsum;
      x[static_cast<std::size_t>(j)] = v;
      y += v;
    }
    for (Index j = kb; j < d; ++j) {
      x[static_cast<std::size_t>(j)] = mu2[static_cast<std::size_t>(j - kb)] + rng.next_gaussian();
    }
    y += spec.noise_sd * rng.next_gaussian();
    data.samples.emplace_back(full_support, std::move(x));
    data.labels.push_back(y);
  }

  std::vector<double> w(static_cast<std::size_t>(d), 0.0);
  for (Index j = 0; j < kb; ++j) w[static_cast<std::size_t>(j)] = 1.0;
  return SyntheticData{std::move(data), DenseVector(std::move(w))};
}

namespace {

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& why) {
  throw std::runtime_error("libsvm parse error at line " + std::to_string(line_no) + ": " + why);
}

}  // namespace

LoadedData load_libsvm(const std::string& path, Index dim_override) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);

  LoadedData out;
  Index max_index = -1;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream tokens(line);
    std::string tok;
    if (!(tokens >> tok)) parse_fail(line_no, "empty line");
    double label;
    if (!parse_double(tok, label)) parse_fail(line_no, "bad label '" + tok + "'");

    std::vector<Index> indices;
    std::vector<double> values;
    Index prev = 0;
    while (tokens >> tok) {
      const std::size_t colon = tok.find(':');
      if (colon == std::string::npos) parse_fail(line_no, "feature '" + tok + "' lacks ':'");
      long long raw_idx;
      if (!parse_long(tok.substr(0, colon), raw_idx) || raw_idx < 1) {
        parse_fail(line_no, "bad feature index in '" + tok + "'");
      }
      if (raw_idx <= prev) parse_fail(line_no, "indices not strictly increasing at '" + tok + "'");
      double v;
      if (!parse_double(tok.substr(colon + 1), v) || !std::isfinite(v)) {
        parse_fail(line_no, "bad feature value in '" + tok + "'");
      }
      prev = raw_idx;
      indices.push_back(static_cast<Index>(raw_idx - 1));
      values.push_back(v);
      max_index = std::max(max_index, indices.back());
    }
    out.samples.emplace_back(IndexSet(std::move(indices)), std::move(values));
    out.labels.push_back(label);
  }

  out.dim = dim_override >= 1 ? dim_override : max_index + 1;
  if (out.dim < 1) out.dim = 1;
  for (const SparseSample& s : out.samples) {
    if (s.max_index() >= out.dim) {
      throw std::runtime_error("libsvm: feature index exceeds requested dimension");
    }
  }
  return out;
}

void write_libsvm(const std::string& path, const std::vector<SparseSample>& samples,
                  const std::vector<double>& labels) {
  if (samples.size() != labels.size()) {
    throw std::invalid_argument("write_libsvm: sample/label count mismatch");
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open file for writing: " + path);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out << format_double(labels[i]);
    const auto& idx = samples[i].indices().indices();
    const auto& val = samples[i].values();
    for (std::size_t p = 0; p < val.size(); ++p) {
      out << ' ' << format_index(static_cast<long long>(idx[p]) + 1) << ':'
          << format_double(val[p]);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void normalize_rows(Dataset& data) {
  for (SparseSample& s : data.samples) {
    const double norm = std::sqrt(s.squared_norm());
    if (norm > 1.0) s = s.scaled(1.0 / norm);
  }
  data.rows_normalized = true;
}

void binarize_labels(std::vector<double>& labels) {
  for (double& y : labels) y = y < 0.0 ? -1.0 : 1.0;
}

}  // namespace sparsedual
