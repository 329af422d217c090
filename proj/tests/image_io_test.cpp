#include <gtest/gtest.h>

#include <fstream>

#include "fpm/image_io.hpp"
#include "test_support.hpp"

namespace fpm {
namespace {

std::filesystem::path fixture(const char* name) { return testing::data_dir() / "fixtures" / name; }

TEST(ReadImage, Gray8Png) {
  const LoadedImage img = read_image(fixture("gray8.png"));
  EXPECT_EQ(img.image.width(), 16u);
  EXPECT_EQ(img.image.height(), 12u);
  EXPECT_EQ(img.white_level, 255.0);
  EXPECT_EQ(img.image(5, 2), 37.0);
}

TEST(ReadImage, Gray16Png) {
  const LoadedImage img = read_image(fixture("gray16.png"));
  EXPECT_EQ(img.white_level, 65535.0);
  EXPECT_EQ(img.image(1, 0), 300.0);
  EXPECT_EQ(img.image(15, 11), 57300.0);
}

TEST(ReadImage, ColorPngBecomesConstantLuma) {
  const LoadedImage img = read_image(fixture("red.png"));
  const double v = img.image(0, 0);
  EXPECT_GT(v, 0.0);
  EXPECT_LT(v, 255.0);
  for (double x : img.image.values()) EXPECT_EQ(x, v);
}

TEST(ReadImage, CorruptAndMissingAreIoErrors) {
  EXPECT_THROW((void)read_image(fixture("not_an_image.png")), IoError);
  EXPECT_THROW((void)read_image(fixture("absent.pgm")), IoError);
}

TEST(ReadImage, HeldOutSetIsPresent) {
  const auto paths = testing::heldout_images();
  ASSERT_EQ(paths.size(), 10u);
  for (const auto& p : paths) {
    const LoadedImage img = read_image(p);
    EXPECT_EQ(img.image.width(), 128u) << p;
    EXPECT_EQ(img.white_level, 255.0);
  }
}

TEST(Pgm, SixteenBitRoundTrip) {
  const auto dir = testing::scratch_dir("image_io");
  const RealImage src = testing::random_image(13, 7, 4);
  write_pgm16(src, dir / "a.pgm");
  const LoadedImage back = read_image(dir / "a.pgm");
  EXPECT_EQ(back.white_level, 65535.0);
  for (std::size_t i = 0; i < src.size(); ++i) {
    EXPECT_NEAR(back.image.values()[i] / 65535.0, src.values()[i], 0.5 / 65535.0 + 1e-12);
  }
}

TEST(Pgm, EightBitClampsAndRounds) {
  const auto dir = testing::scratch_dir("image_io");
  RealImage src(3, 1);
  src(0, 0) = -1.0;
  src(1, 0) = 0.5;
  src(2, 0) = 2.0;
  write_pgm8(src, dir / "b.pgm");
  const LoadedImage back = read_image(dir / "b.pgm");
  EXPECT_EQ(back.image(0, 0), 0.0);
  EXPECT_EQ(back.image(1, 0), 128.0);
  EXPECT_EQ(back.image(2, 0), 255.0);
}

TEST(Pgm, AsciiWithComments) {
  const auto path = testing::scratch_dir("image_io") / "c.pgm";
  std::ofstream(path) << "P2\n# made by hand\n3 2\n# max\n100\n0 50 100\n25 75 10\n";
  const LoadedImage img = read_image(path);
  EXPECT_EQ(img.white_level, 100.0);
  EXPECT_EQ(img.image(1, 0), 50.0);
  EXPECT_EQ(img.image(2, 1), 10.0);
}

TEST(Pgm, TruncatedIsIoError) {
  const auto path = testing::scratch_dir("image_io") / "d.pgm";
  std::ofstream(path, std::ios::binary) << "P5\n4 4\n255\nabc";
  EXPECT_THROW((void)read_image(path), IoError);
}

}  // namespace
}  // namespace fpm
