#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "bnn/data.hpp"
#include "bnn/error.hpp"
#include "oracles.hpp"

namespace bnn {
namespace {

namespace fs = std::filesystem;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("bnn_data_test_" +
            std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& content) {
    const auto p = dir_ / name;
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << content;
    return p;
  }

  static std::string pgm(std::size_t w, std::size_t h, int maxval,
                         const std::vector<unsigned char>& px) {
    std::string s = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n" +
                    std::to_string(maxval) + "\n";
    s.append(px.begin(), px.end());
    return s;
  }

  fs::path dir_;
};

using CsvTest = TempDir;

TEST_F(CsvTest, ParsesTwoRows) {
  const auto p = write("a.csv", "label,f0,f1,f2\n0,1.5,2,3\n1,-1,0,1e-3\n");
  const Dataset d = load_csv(p);
  EXPECT_EQ(d.size(), 2u);
  EXPECT_EQ(d.dim(), 3u);
  EXPECT_EQ(d.n_classes(), 2u);
  EXPECT_EQ(d.row(1)[2], 1e-3);
}

TEST_F(CsvTest, EmptyBodyRejected) {
  EXPECT_THROW(load_csv(write("e.csv", "label,f0\n")), DataError);
}

TEST_F(CsvTest, ErrorsCarryLineNumbers) {
  auto expect_line = [&](const std::string& body, const std::string& needle) {
    try {
      load_csv(write("bad.csv", body));
      FAIL() << "accepted: " << body;
    } catch (const DataError& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  expect_line("label,f0,f1\n0,1,2\n1,3\n", ":3:");
  expect_line("label,f0\n0,1\n1,abc\n", ":3:");
  expect_line("label,f0\n-1,1\n", ":2:");
  expect_line("label,f0\n0.5,1\n", ":2:");
}

TEST_F(CsvTest, RoundTrip) {
  Rng rng(1);
  const Dataset d = oracles::random_dataset(20, 4, 3, rng);
  save_csv(dir_ / "rt.csv", d);
  const Dataset back = load_csv(dir_ / "rt.csv");
  // load_csv infers K from the labels present
  EXPECT_EQ(back.features(), d.features());
  EXPECT_EQ(back.labels(), d.labels());
}

using PgmTest = TempDir;

TEST_F(PgmTest, MaxByteIsOne) {
  const auto p = write("x.pgm", pgm(2, 1, 255, {255, 0}));
  const Image img = read_pgm(p);
  EXPECT_EQ(img.height, 1u);
  EXPECT_EQ(img.width, 2u);
  EXPECT_EQ(img.pixels[0], 1.0);
  EXPECT_EQ(img.pixels[1], 0.0);
}

TEST_F(PgmTest, HeaderCommentsAllowed) {
  const auto p = write("c.pgm", "P5\n# made by hand\n2 2\n# max\n255\n" + std::string("\x01\x02\x03\x04", 4));
  EXPECT_EQ(read_pgm(p).pixels[3], 4.0 / 255.0);
}

TEST_F(PgmTest, RejectsNonP5AndCorruptFiles) {
  EXPECT_THROW(read_pgm(write("a.pgm", "P2\n2 1\n255\n0 0\n")), DataError);
  EXPECT_THROW(read_pgm(write("b.pgm", "P5\n2 x\n255\n")), DataError);
  EXPECT_THROW(read_pgm(write("c.pgm", pgm(3, 3, 255, {1, 2, 3}))), DataError);
  EXPECT_THROW(read_pgm(write("d.pgm", pgm(1, 1, 1000, {1}))), DataError);
  try {
    read_pgm(write("named.pgm", "P6\n1 1\n255\n\x01"));
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("named.pgm"), std::string::npos);
  }
}

TEST_F(PgmTest, WriteReadRoundTrip) {
  Image img(3, 4);
  for (std::size_t i = 0; i < img.size(); ++i) img.pixels[i] = static_cast<double>(i * 20) / 255.0;
  write_pgm(dir_ / "rt.pgm", img);
  const Image back = read_pgm(dir_ / "rt.pgm");
  EXPECT_EQ(back.height, 3u);
  EXPECT_EQ(back.width, 4u);
  for (std::size_t i = 0; i < img.size(); ++i) EXPECT_EQ(back.pixels[i], img.pixels[i]);
}

TEST_F(PgmTest, ImageDirectoryLayout) {
  for (int i = 0; i < 5; ++i) write("root/normal/n" + std::to_string(i) + ".pgm", pgm(2, 2, 255, {1, 2, 3, 4}));
  for (int i = 0; i < 3; ++i) write("root/bacteria/b" + std::to_string(i) + ".pgm", pgm(2, 2, 255, {9, 9, 9, 9}));
  write("root/normal/readme.txt", "ignored");
  const auto ds = load_image_dir(dir_ / "root");
  EXPECT_EQ(ds.images.size(), 8u);
  EXPECT_EQ(ds.class_names, (std::vector<std::string>{"bacteria", "normal"}));
  EXPECT_EQ(std::count(ds.labels.begin(), ds.labels.end(), 0u), 3);
  EXPECT_EQ(std::count(ds.labels.begin(), ds.labels.end(), 1u), 5);
  EXPECT_TRUE(std::is_sorted(ds.files.begin(), ds.files.end()));
}

TEST_F(PgmTest, EmptyClassDirectoryRejected) {
  write("root/a/x.pgm", pgm(1, 1, 255, {0}));
  fs::create_directories(dir_ / "root" / "b");
  EXPECT_THROW(load_image_dir(dir_ / "root"), DataError);
}

TEST(Standardizer, ZeroMeanUnitVariance) {
  Rng rng(2);
  std::vector<double> f(60 * 3);
  for (std::size_t i = 0; i < 60; ++i) {
    f[i * 3 + 0] = 5.0 + 2.0 * rng.normal();
    f[i * 3 + 1] = -3.0 + 0.1 * rng.normal();
    f[i * 3 + 2] = 7.0;  // constant
  }
  const Dataset d(3, 2, f, std::vector<std::size_t>(60, 0));
  const TrainSplit train{d, {}};
  const auto params = fit_standardizer(train);
  EXPECT_FALSE(params.constant[0]);
  EXPECT_TRUE(params.constant[2]);
  const Dataset z = apply_standardizer(params, d);
  for (std::size_t c = 0; c < 2; ++c) {
    double m = 0.0, v = 0.0;
    for (std::size_t i = 0; i < 60; ++i) m += z.row(i)[c];
    m /= 60.0;
    for (std::size_t i = 0; i < 60; ++i) v += (z.row(i)[c] - m) * (z.row(i)[c] - m);
    v /= 60.0;
    EXPECT_NEAR(m, 0.0, 1e-9);
    EXPECT_NEAR(v, 1.0, 1e-9);
  }
  for (std::size_t i = 0; i < 60; ++i) EXPECT_EQ(z.row(i)[2], 0.0);
}

TEST(Standardizer, SingleSampleAllConstant) {
  const Dataset d(2, 2, {1.0, 2.0}, {0});
  const auto p = fit_standardizer(TrainSplit{d, {0}});
  EXPECT_TRUE(p.constant[0]);
  EXPECT_TRUE(p.constant[1]);
  EXPECT_EQ(p.apply(std::vector<double>{4.0, 5.0}), (std::vector<double>{0.0, 0.0}));
}

Dataset labelled(const std::vector<std::size_t>& sizes) {
  std::vector<double> f;
  std::vector<std::size_t> y;
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    for (std::size_t i = 0; i < sizes[c]; ++i) {
      f.push_back(static_cast<double>(y.size()));
      y.push_back(c);
    }
  }
  return Dataset(1, sizes.size(), f, y);
}

TEST(Split, StratifiedRounding) {
  const Dataset d = labelled({8, 4});
  const auto s = stratified_split(d, SplitSpec{0.25, 3, true});
  const auto counts = s.test.data.class_counts();
  EXPECT_EQ(counts[0], 2u);
  EXPECT_EQ(counts[1], 1u);
}

TEST(Split, PartitionAndDeterminism) {
  const Dataset d = labelled({13, 7, 21});
  for (bool strat : {true, false}) {
    const SplitSpec spec{0.3, 11, strat};
    const auto a = split_indices(d.labels(), 3, spec);
    const auto b = split_indices(d.labels(), 3, spec);
    EXPECT_EQ(a.train, b.train);
    EXPECT_EQ(a.test, b.test);
    std::set<std::size_t> all(a.train.begin(), a.train.end());
    for (auto i : a.test) EXPECT_TRUE(all.insert(i).second) << "overlap at " << i;
    EXPECT_EQ(all.size(), d.size());
    EXPECT_EQ(*all.rbegin(), d.size() - 1);
  }
}

TEST(Split, StratifiedProportionsAndTotal) {
  const Dataset d = labelled({40, 25, 9});
  const auto s = split_indices(d.labels(), 3, SplitSpec{0.2, 5, true});
  // round(8) + round(5) + round(1.8) = 8 + 5 + 2; within K-1 of round(74*0.2)=15
  EXPECT_EQ(s.test.size(), 15u);
}

TEST(Split, SingletonClassRejected) {
  const Dataset d = labelled({5, 1});
  EXPECT_THROW(stratified_split(d, SplitSpec{0.3, 1, true}), ConfigError);
  EXPECT_NO_THROW(stratified_split(d, SplitSpec{0.3, 1, false}));
}

TEST(Split, BadFractionRejected) {
  const Dataset d = labelled({5, 5});
  EXPECT_THROW(stratified_split(d, SplitSpec{0.0, 1, true}), ConfigError);
  EXPECT_THROW(stratified_split(d, SplitSpec{1.0, 1, true}), ConfigError);
}

TEST(Blobs, NoiseFreeSamplesSitOnCenters) {
  const Dataset d = synth_blobs({5, 3, 4, 4.0, 0.0, 1});
  const auto centers = blob_centers(3, 4, 4.0);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto r = d.row(i);
    for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(r[j], centers[d.label(i)][j]);
  }
}

TEST(Blobs, CountsAndBalance) {
  const Dataset d = synth_blobs({20, 2, 2, 4.0, 1.0, 2});
  EXPECT_EQ(d.size(), 40u);
  EXPECT_EQ(d.class_counts(), (std::vector<std::size_t>{20, 20}));
}

TEST(Blobs, CenterSpacing) {
  for (std::size_t k : {2u, 3u, 5u}) {
    const auto c = blob_centers(k, 6, 4.0);
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = a + 1; b < k; ++b) {
        double d2 = 0.0;
        for (std::size_t j = 0; j < 6; ++j) d2 += (c[a][j] - c[b][j]) * (c[a][j] - c[b][j]);
        EXPECT_NEAR(std::sqrt(d2), 4.0, 1e-12);
      }
  }
  const auto gon = blob_centers(5, 2, 3.0);
  for (std::size_t a = 0; a < 5; ++a) {
    const auto& p = gon[a];
    const auto& q = gon[(a + 1) % 5];
    EXPECT_NEAR(std::hypot(p[0] - q[0], p[1] - q[1]), 3.0, 1e-12);
  }
}

TEST(Blobs, BayesRuleAccuracy) {
  // Two unit-variance blobs 4 apart: Bayes accuracy Phi(2) ~ 0.977.
  const Dataset test = synth_blobs({100, 2, 2, 4.0, 1.0, 77});
  const auto c = blob_centers(2, 2, 4.0);
  std::size_t right = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto r = test.row(i);
    const double d0 = std::hypot(r[0] - c[0][0], r[1] - c[0][1]);
    const double d1 = std::hypot(r[0] - c[1][0], r[1] - c[1][1]);
    if ((d0 <= d1 ? 0u : 1u) == test.label(i)) ++right;
  }
  const double acc = static_cast<double>(right) / 200.0;
  EXPECT_NEAR(oracles::normal_cdf(2.0), 0.97725, 1e-5);
  EXPECT_GE(acc, 0.9);
}

}  // namespace
}  // namespace bnn
