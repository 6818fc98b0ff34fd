/*
 * Copyright 2026 The mixrobust Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "mixrobust/csv.hpp"
#include "mixrobust/error.hpp"
#include "mixrobust/io.hpp"
#include "mixrobust/random.hpp"

namespace mixrobust {
namespace {

namespace fs = std::filesystem;

TEST(Csv, ReadsHeaderAndRows) {
  std::istringstream in("a,b\n1,2\n\n3,4\r\n");
  const csv::Table t = csv::read(in);
  EXPECT_EQ(t.header, (std::vector<std::string>{"a", "b"}));
  ASSERT_EQ(t.rows.size(), 2U);
  EXPECT_EQ(t.rows[1], (std::vector<std::string>{"3", "4"}));
  EXPECT_EQ(t.column("b"), 1U);
  EXPECT_THROW(t.column("c"), IoError);
}

TEST(Csv, NumberParsing) {
  EXPECT_DOUBLE_EQ(csv::to_double("-1.5e-3", "x"), -1.5e-3);
  EXPECT_THROW(csv::to_double("1.5x", "x"), IoError);
  EXPECT_THROW(csv::to_double("", "x"), IoError);
  EXPECT_EQ(csv::to_integer("-12", "x"), -12);
  EXPECT_THROW(csv::to_integer("1.0", "x"), IoError);
  EXPECT_EQ(csv::to_uint64("18446744073709551615", "x"), 18446744073709551615ULL);
  EXPECT_THROW(csv::to_uint64("-1", "x"), IoError);
}

TEST(Csv, Formatting) {
  EXPECT_EQ(csv::fixed(1.0 / 3.0, 6), "0.333333");
  EXPECT_EQ(csv::fixed(-0.0000001, 3), "0.000");
  EXPECT_EQ(csv::exact(0.1), "0.1");
  const double v = 0.8148333333333333;
  EXPECT_EQ(csv::to_double(csv::exact(v), "v"), v);
}

TEST(Io, AtomicWriteCreatesDirectoriesAndReplaces) {
  const fs::path dir = fs::temp_directory_path() / "mixrobust_io_test";
  fs::remove_all(dir);
  const fs::path file = dir / "nested" / "out.txt";
  write_file_atomic(file, "first");
  write_file_atomic(file, "second");
  EXPECT_EQ(read_file(file), "second");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(file.parent_path())) ++entries;
  EXPECT_EQ(entries, 1U);  // no temporary left behind
  EXPECT_THROW(read_file(dir / "missing.txt"), IoError);
  fs::remove_all(dir);
}

TEST(Seeds, DerivationIsStableAndSensitive) {
  EXPECT_EQ(derive_seed(1, {2, 3}), derive_seed(1, {2, 3}));
  EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
  EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(2, {2, 3}));
  EXPECT_NE(derive_seed(0, SeedPurpose::kTrainingDraw), derive_seed(0, SeedPurpose::kTestDraw));
}

}  // namespace
}  // namespace mixrobust
