// Copyright 2026 The Umbra Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "umbra/io/image_io.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <filesystem>

namespace umbra {
namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("umbra_test_" + name)).string();
}

TEST(Image8, ClampsAndRounds) {
  Image img(4, 1, 1);
  img.at(0, 0) = -0.5;
  img.at(1, 0) = 0.5;
  img.at(2, 0) = 1.5;
  img.at(3, 0) = 1.0 / 255.0;
  const Image8 b = to_image8(img);
  EXPECT_EQ(b.at(0, 0), 0);
  EXPECT_EQ(b.at(1, 0), 128);
  EXPECT_EQ(b.at(2, 0), 255);
  EXPECT_EQ(b.at(3, 0), 1);
}

TEST(Image8Property, GammaRoundTripIsWithinOneStep) {
  Rng rng(3);
  const Image img = testing::random_image(16, 16, 3, rng);
  for (double gamma : {1.0, 2.2}) {
    const Image back = from_image8(to_image8(img, gamma), gamma);
    const Image8 again = to_image8(back, gamma);
    EXPECT_EQ(again, to_image8(img, gamma));
  }
}

TEST(Png, RoundTripsEveryChannelCount) {
  Rng rng(5);
  for (int c : {1, 2, 3, 4}) {
    Image8 img(13, 7, c);
    for (auto& v : img.values()) v = static_cast<std::uint8_t>(rng.index(256));
    const std::vector<std::uint8_t> bytes = encode_png(img);
    ASSERT_GT(bytes.size(), 8u);
    EXPECT_EQ(bytes[1], 'P');
    EXPECT_EQ(decode_png(bytes), img);
  }
}

TEST(Png, FileRoundTrip) {
  Image8 img(3, 2, 3, 200);
  img.at(1, 1, 2) = 7;
  const std::string path = temp_path("a.png");
  save_png(path, img);
  EXPECT_EQ(load_png(path), img);
  std::filesystem::remove(path);
}

TEST(Png, GarbageIsRejected) {
  const std::vector<std::uint8_t> junk = {1, 2, 3, 4, 5};
  EXPECT_ANY_THROW(decode_png(junk));
  EXPECT_ANY_THROW(encode_png(Image8(2, 2, 5)));
}

TEST(Raw, RoundTripIsFloatExact) {
  Rng rng(9);
  const Image img = testing::random_image(5, 4, 2, rng, -3.0, 3.0);
  const std::string path = temp_path("a.raw");
  save_raw(path, img);
  const Image back = load_raw(path);
  ASSERT_TRUE(back.same_shape(img));
  for (std::size_t i = 0; i < img.size(); ++i) {
    EXPECT_EQ(back.values()[i], static_cast<double>(static_cast<float>(img.values()[i])));
  }
  EXPECT_EQ(std::filesystem::file_size(path), 16u + 4u * img.size());
  std::filesystem::remove(path);
}

TEST(SignedGray, CentersZero) {
  Image img(3, 1, 1);
  img.at(0, 0) = -2.0;
  img.at(2, 0) = 1.0;
  const Image g = signed_to_gray(img);
  EXPECT_DOUBLE_EQ(g.at(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(g.at(1, 0), 0.5);
  EXPECT_DOUBLE_EQ(g.at(2, 0), 0.75);
  const Image flat = signed_to_gray(Image(2, 2, 1));
  for (double v : flat.values()) EXPECT_EQ(v, 0.5);
  EXPECT_DOUBLE_EQ(normalize_abs(img).at(0, 0), 1.0);
}

TEST(Base64, KnownVectors) {
  auto enc = [](const std::string& s) {
    return base64_encode(std::vector<std::uint8_t>(s.begin(), s.end()));
  };
  EXPECT_EQ(enc(""), "");
  EXPECT_EQ(enc("f"), "Zg==");
  EXPECT_EQ(enc("fo"), "Zm8=");
  EXPECT_EQ(enc("foobar"), "Zm9vYmFy");
}

TEST(Base64Property, RoundTrip) {
  Rng rng(1);
  for (int n = 0; n < 64; ++n) {
    std::vector<std::uint8_t> bytes(n);
    for (auto& b : bytes) b = static_cast<std::uint8_t>(rng.index(256));
    EXPECT_EQ(base64_decode(base64_encode(bytes)), bytes);
  }
  EXPECT_ANY_THROW(base64_decode("@@@@"));
}

}  // namespace
}  // namespace umbra
