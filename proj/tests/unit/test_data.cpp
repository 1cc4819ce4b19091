#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "sparsedual/data.hpp"
#include "sparsedual/rng.hpp"

namespace sd = sparsedual;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "sparsedual_data_tests";
  fs::create_directories(dir);
  return dir / name;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("synthetic generation is deterministic in the seed") {
  const sd::SyntheticSpec spec{30, 5, 25, 1.0, 0.25, 99};
  const sd::SyntheticData a = sd::generate_synthetic(spec);
  const sd::SyntheticData b = sd::generate_synthetic(spec);
  REQUIRE(a.data.samples.size() == 25);
  CHECK(a.true_w == b.true_w);
  CHECK(a.data.labels == b.data.labels);
  for (std::size_t i = 0; i < 25; ++i) {
    CHECK(a.data.samples[i].values() == b.data.samples[i].values());
  }
  const sd::SyntheticData c = sd::generate_synthetic({30, 5, 25, 1.0, 0.25, 100});
  CHECK(a.data.labels != c.data.labels);
}

TEST_CASE("synthetic true weights are one on the leading block") {
  const sd::SyntheticData gen = sd::generate_synthetic({12, 4, 5, 1.0, 0.25, 3});
  for (sd::Index j = 0; j < 12; ++j) {
    CHECK(gen.true_w[j] == (j < 4 ? 1.0 : 0.0));
  }
  CHECK(gen.data.dim == 12);
  CHECK_FALSE(gen.data.rows_normalized);
}

TEST_CASE("synthetic responses equal the block sum when noise is zero") {
  const sd::SyntheticData gen = sd::generate_synthetic({10, 3, 50, 0.0, 0.25, 8});
  for (std::size_t i = 0; i < 50; ++i) {
    const auto& v = gen.data.samples[i].values();
    REQUIRE(gen.data.samples[i].nnz() == 10);  // stored dense over the full index range
    const double block_sum = v[0] + v[1] + v[2];
    CHECK(gen.data.labels[i] == block_sum);
  }
}

TEST_CASE("synthetic block covariance approaches the equicorrelation design") {
  const sd::Index n = 20000;
  const double rho = 0.25;
  const sd::SyntheticData gen = sd::generate_synthetic({6, 3, n, 1.0, rho, 13});
  double mean[3] = {0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
    for (int a = 0; a < 3; ++a) mean[a] += gen.data.samples[i].values()[static_cast<std::size_t>(a)];
  }
  for (double& m : mean) m /= static_cast<double>(n);
  double cov[3][3] = {};
  for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
    const auto& v = gen.data.samples[i].values();
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        cov[a][b] += (v[static_cast<std::size_t>(a)] - mean[a]) *
                     (v[static_cast<std::size_t>(b)] - mean[b]);
      }
    }
  }
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const double want = a == b ? 1.0 : rho;
      CHECK(std::fabs(cov[a][b] / static_cast<double>(n - 1) - want) <= 0.05);
    }
  }
}

TEST_CASE("synthetic tail features are unit-variance and uncorrelated with each other") {
  const sd::Index n = 20000;
  const sd::SyntheticData gen = sd::generate_synthetic({5, 2, n, 1.0, 0.25, 14});
  double mean[2] = {0.0, 0.0};
  for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
    mean[0] += gen.data.samples[i].values()[3];
    mean[1] += gen.data.samples[i].values()[4];
  }
  mean[0] /= static_cast<double>(n);
  mean[1] /= static_cast<double>(n);
  double var3 = 0.0;
  double cross = 0.0;
  for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
    const double u = gen.data.samples[i].values()[3] - mean[0];
    const double v = gen.data.samples[i].values()[4] - mean[1];
    var3 += u * u;
    cross += u * v;
  }
  CHECK(std::fabs(var3 / static_cast<double>(n - 1) - 1.0) <= 0.05);
  CHECK(std::fabs(cross / static_cast<double>(n - 1)) <= 0.05);
}

TEST_CASE("synthetic spec validation") {
  CHECK_THROWS_AS(sd::generate_synthetic({0, 0, 5, 1.0, 0.25, 1}), std::invalid_argument);
  CHECK_THROWS_AS(sd::generate_synthetic({5, 6, 5, 1.0, 0.25, 1}), std::invalid_argument);
  CHECK_THROWS_AS(sd::generate_synthetic({5, 2, 0, 1.0, 0.25, 1}), std::invalid_argument);
  CHECK_THROWS_AS(sd::generate_synthetic({5, 2, 5, -1.0, 0.25, 1}), std::invalid_argument);
  CHECK_THROWS_AS(sd::generate_synthetic({5, 2, 5, 1.0, 1.0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(sd::generate_synthetic({5, 2, 5, 1.0, -0.1, 1}), std::invalid_argument);
}

TEST_CASE("libsvm parser handles the documented line shapes") {
  const fs::path p = temp_file("ok.libsvm");
  write_text(p, "+1 3:0.5 7:1.0\n-1\n2.5 1:-3.25\n");
  const sd::LoadedData got = sd::load_libsvm(p.string());
  REQUIRE(got.samples.size() == 3);
  CHECK(got.labels == std::vector<double>{1.0, -1.0, 2.5});
  CHECK(got.dim == 7);
  CHECK(got.samples[0].indices() == sd::IndexSet({2, 6}));
  CHECK(got.samples[0].values() == std::vector<double>{0.5, 1.0});
  CHECK(got.samples[1].nnz() == 0);
  CHECK(got.samples[2].indices() == sd::IndexSet({0}));
  CHECK(got.samples[2].values() == std::vector<double>{-3.25});
}

TEST_CASE("libsvm parser reports malformed lines with their line number") {
  struct Case {
    const char* name;
    const char* text;
  };
  const Case cases[] = {
      {"bad_label.libsvm", "abc 1:2.0\n"},
      {"bad_index.libsvm", "1 x:2.0\n"},
      {"zero_index.libsvm", "1 0:2.0\n"},
      {"bad_value.libsvm", "1 1:zz\n"},
      {"no_colon.libsvm", "1 12\n"},
      {"non_increasing.libsvm", "1 3:0.5 2:1.0\n"},
      {"duplicate.libsvm", "1 3:0.5 3:1.0\n"},
      {"nan_value.libsvm", "1 1:nan\n"},
  };
  for (const auto& c : cases) {
    const fs::path p = temp_file(c.name);
    write_text(p, c.text);
    CAPTURE(c.name);
    CHECK_THROWS_AS(sd::load_libsvm(p.string()), std::runtime_error);
    try {
      sd::load_libsvm(p.string());
    } catch (const std::exception& e) {
      CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    }
  }
  const fs::path two = temp_file("second_line.libsvm");
  write_text(two, "1 1:1.0\n1 5:bad\n");
  try {
    sd::load_libsvm(two.string());
    CHECK(false);
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(sd::load_libsvm(temp_file("missing_file.libsvm").string()), std::runtime_error);
}

TEST_CASE("libsvm dimension can be overridden but never undercut") {
  const fs::path p = temp_file("dims.libsvm");
  write_text(p, "1 2:1.0\n");
  CHECK(sd::load_libsvm(p.string()).dim == 2);
  CHECK(sd::load_libsvm(p.string(), 10).dim == 10);
  CHECK_THROWS_AS(sd::load_libsvm(p.string(), 1), std::runtime_error);

  const fs::path empty_rows = temp_file("labels_only.libsvm");
  write_text(empty_rows, "1\n-1\n");
  CHECK(sd::load_libsvm(empty_rows.string()).dim == 1);  // minimum usable dimension
}

TEST_CASE("libsvm write/load round trip is bit exact") {
  std::vector<sd::SparseSample> samples;
  std::vector<double> labels;
  sd::Rng rng(77);
  for (int i = 0; i < 40; ++i) {
    std::vector<sd::Index> idx;
    std::vector<double> val;
    for (sd::Index j = 0; j < 15; ++j) {
      if (rng.next_double() < 0.35) {
        idx.push_back(j);
        val.push_back(rng.next_gaussian() * std::pow(10.0, static_cast<double>(rng.next_below(7)) - 3.0));
      }
    }
    samples.emplace_back(sd::IndexSet(idx), val);
    labels.push_back(rng.next_gaussian());
  }
  // Values with awkward shortest representations.
  samples.emplace_back(sd::IndexSet({0, 4}), std::vector<double>{0.1, 1e-17});
  labels.push_back(-2.5e300);

  const fs::path p = temp_file("roundtrip.libsvm");
  sd::write_libsvm(p.string(), samples, labels);
  const sd::LoadedData got = sd::load_libsvm(p.string());
  REQUIRE(got.samples.size() == samples.size());
  CHECK(got.labels == labels);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CHECK(got.samples[i].indices() == samples[i].indices());
    CHECK(got.samples[i].values() == samples[i].values());
  }
}

TEST_CASE("normalize_rows scales only rows with norm above one") {
  sd::Dataset data;
  data.dim = 3;
  data.samples = {sd::SparseSample(sd::IndexSet({0, 1}), {3.0, 4.0}),
                  sd::SparseSample(sd::IndexSet({2}), {0.5}),
                  sd::SparseSample(sd::IndexSet(), {})};
  data.labels = {1.0, -1.0, 1.0};
  sd::normalize_rows(data);
  CHECK(data.rows_normalized);
  CHECK(data.samples[0].values()[0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(data.samples[0].values()[1] == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(std::sqrt(data.samples[0].squared_norm()) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(data.samples[1].values() == std::vector<double>{0.5});  // untouched
  CHECK(data.samples[2].nnz() == 0);
  CHECK(data.labels == std::vector<double>{1.0, -1.0, 1.0});
}

TEST_CASE("binarize_labels maps signs with ties to plus one") {
  std::vector<double> labels = {-3.2, 0.0, 0.7, -0.0, 12.0};
  sd::binarize_labels(labels);
  CHECK(labels == std::vector<double>{-1.0, 1.0, 1.0, 1.0, 1.0});
}

TEST_CASE("rng streams are deterministic and box-muller marginals are sane") {
  sd::Rng a(5);
  sd::Rng b(5);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  sd::Rng g(6);
  double sum = 0.0;
  double sum2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = g.next_gaussian();
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  CHECK(std::fabs(mean) <= 0.01);
  CHECK(std::fabs(sum2 / n - mean * mean - 1.0) <= 0.02);
  sd::Rng u(7);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.next_double();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    CHECK(u.next_below(10) < 10);
  }
}
