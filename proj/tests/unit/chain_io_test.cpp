#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <limits>

#include "bnn/chain_io.hpp"
#include "bnn/error.hpp"
#include "bnn/text_io.hpp"

namespace bnn {
namespace {

namespace fs = std::filesystem;

TEST(FormatDouble, RoundTripsBitExact) {
  Rng rng(1);
  for (int i = 0; i < 2000; ++i) {
    const double v = rng.normal() * std::pow(10.0, static_cast<double>(rng.uniform_index(40)) - 20.0);
    double back = 0.0;
    ASSERT_TRUE(parse_double(format_double(v), back));
    EXPECT_EQ(back, v);
  }
  for (double v : {0.0, -0.0, 1.0 / 3.0, std::numeric_limits<double>::denorm_min(),
                   std::numeric_limits<double>::max()}) {
    double back = 0.0;
    ASSERT_TRUE(parse_double(format_double(v), back));
    EXPECT_EQ(back, v);
  }
}

TEST(ParseDouble, RejectsGarbage) {
  double v;
  EXPECT_FALSE(parse_double("", v));
  EXPECT_FALSE(parse_double("1.0x", v));
  EXPECT_FALSE(parse_double("abc", v));
  EXPECT_TRUE(parse_double(" 2.5 ", v));
  EXPECT_EQ(v, 2.5);
}

class ChainIoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / "bnn_chain_io_test";
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST_F(ChainIoTest, SaveLoadIsBitExact) {
  TargetDensity t;
  t.dim = 3;
  t.log_density = [](std::span<const double> x) { return -0.5 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); };
  ChainRecord rec;
  rec.kernel = RandomWalkProposal{0.7};
  rec.controls = {400, 100, 3, 1234, 2};
  rec.chain = run_chain(t, rec.kernel, std::vector<double>{0.1, 0.2, 0.3}, rec.controls);
  save_chain(dir_, "chain_2", rec);

  std::ifstream in(dir_ / "chain_2.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "lp,w0,w1,w2");

  const auto back = load_chain(dir_ / "chain_2.csv");
  EXPECT_EQ(back.chain, rec.chain);
  EXPECT_EQ(std::get<RandomWalkProposal>(back.kernel).step_scale, 0.7);
  EXPECT_EQ(back.controls.n_iter, 400u);
  EXPECT_EQ(back.controls.burn_in, 100u);
  EXPECT_EQ(back.controls.thin, 3u);
}

TEST_F(ChainIoTest, MalformedTableReportsLine) {
  fs::create_directories(dir_);
  std::ofstream(dir_ / "bad.csv") << "lp,w0\n1,2\n3\n";
  try {
    read_samples_table(dir_ / "bad.csv");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos);
  }
}

TEST_F(ChainIoTest, AtomicWriteLeavesNoTemp) {
  write_file_atomic(dir_ / "x.txt", "hello");
  EXPECT_EQ(read_file(dir_ / "x.txt"), "hello");
  EXPECT_FALSE(fs::exists(dir_ / "x.txt.tmp"));
}

}  // namespace
}  // namespace bnn
