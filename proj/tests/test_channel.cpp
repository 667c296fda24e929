#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <utility>

#include "cbcc/channel.hpp"
#include "cbcc/errors.hpp"
#include "support.hpp"

using namespace cbcc;

namespace {

// Independent oracle: enumerate every k-subset of rows and test its rank.
bool every_subset_full_rank(const ComplexMatrix& rows, std::size_t k, std::size_t* count) {
  const auto n = static_cast<std::size_t>(rows.rows());
  std::vector<bool> mask(n, false);
  std::fill(mask.begin(), mask.begin() + static_cast<long>(k), true);
  bool ok = true;
  *count = 0;
  do {
    ComplexMatrix sub(static_cast<Eigen::Index>(k), rows.cols());
    Eigen::Index r = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask[i]) sub.row(r++) = rows.row(static_cast<Eigen::Index>(i));
    Eigen::JacobiSVD<ComplexMatrix> svd(sub);
    const auto sv = svd.singularValues();
    ok = ok && sv(sv.size() - 1) > 1e-8 * sv(0);
    ++*count;
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return ok;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("cbcc_test_" + name);
}

}  // namespace

TEST_CASE("generation is deterministic") {
  const ChannelGenSpec spec{2, 1, 1, 1, 1, 7};
  const auto a = generate_compound(spec);
  const auto b = generate_compound(spec);
  CHECK(a == b);
  CHECK(digest(a) == digest(b));

  const ChannelGenSpec other{2, 1, 1, 1, 1, 8};
  CHECK_FALSE(generate_compound(other) == a);
}

TEST_CASE("M=4 two states each: the stacked 4x4 has full rank") {
  const auto ch = generate_compound({4, 1, 1, 2, 2, 3});
  CHECK(ch.J(User::kOne) == 2);
  CHECK(ch.J(User::kTwo) == 2);
  const ComplexMatrix rows = ch.all_rows();
  REQUIRE(rows.rows() == 4);
  REQUIRE(rows.cols() == 4);
  std::size_t count = 0;
  CHECK(every_subset_full_rank(rows, 4, &count));
  CHECK(count == 1);
  const auto report = verify_generic_rank(ch);
  CHECK(report.pass);
  CHECK(report.exhaustive);
  CHECK(report.subsets_checked == 1);
}

TEST_CASE("seven stacked rows: all 35 triples have rank 3") {
  const auto ch = generate_compound({3, 2, 1, 2, 3, 5});
  const ComplexMatrix rows = ch.all_rows();
  REQUIRE(rows.rows() == 7);
  std::size_t count = 0;
  CHECK(every_subset_full_rank(rows, 3, &count));
  CHECK(count == 35);
  const auto report = verify_generic_rank(ch);
  CHECK(report.pass);
  CHECK(report.subset_size == 3);
  CHECK(report.total_rows == 7);
  CHECK(report.subsets_checked == 35);
}

TEST_CASE("duplicated row is reported") {
  const auto base = generate_compound({3, 1, 1, 2, 1, 9});
  std::vector<ComplexMatrix> u1 = base.states(User::kOne);
  std::vector<ComplexMatrix> u2{u1[0]};
  const CompoundChannelSet ch(3, 1, 1, u1, u2);
  const auto report = verify_generic_rank(ch);
  CHECK_FALSE(report.pass);
  REQUIRE(report.failures.size() == 1);
  const auto& f = report.failures[0];
  CHECK(std::find(f.begin(), f.end(), 0u) != f.end());
  CHECK(std::find(f.begin(), f.end(), 2u) != f.end());
  CHECK(ch.row_label(0) == "H_1_1 row 1");
  CHECK(ch.row_label(2) == "H_2_1 row 1");
}

TEST_CASE("M=1 with nonzero rows passes") {
  std::vector<ComplexMatrix> u1{ComplexMatrix::Constant(1, 1, 2.0), ComplexMatrix::Constant(1, 1, -0.5)};
  std::vector<ComplexMatrix> u2{ComplexMatrix::Constant(1, 1, std::complex<double>(0, 3))};
  const CompoundChannelSet ch(1, 1, 1, u1, u2);
  const auto report = verify_generic_rank(ch);
  CHECK(report.pass);
  CHECK(report.subset_size == 1);
  CHECK(report.subsets_checked == 3);
}

TEST_CASE("generated channels pass the rank check across seeds") {
  int passes = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto ch = generate_compound({4, 1, 2, 2, 1, seed});
    passes += verify_generic_rank(ch).pass ? 1 : 0;
  }
  CHECK(passes >= 49);
}

TEST_CASE("large row counts are sampled reproducibly") {
  const auto ch = generate_compound({3, 2, 2, 7, 6, 4});
  REQUIRE(ch.all_rows().rows() == 26);
  const auto a = verify_generic_rank(ch);
  const auto b = verify_generic_rank(ch);
  CHECK_FALSE(a.exhaustive);
  CHECK(a.subsets_checked == kSampledSubsetCount);
  CHECK(a.pass);
  CHECK(a.pass == b.pass);
  CHECK(a.failures == b.failures);
}

TEST_CASE("exhausted resampling raises") {
  ChannelGenSpec spec{4, 1, 1, 2, 2, 1};
  spec.max_resamples = 2;
  CHECK_THROWS_AS(generate_compound(spec, RankTolerance(0.999)), GenerationFailed);
  spec.max_resamples = 0;
  CHECK_THROWS_AS(generate_compound(spec), InvalidInput);
  CHECK_THROWS_AS(generate_compound({0, 1, 1, 1, 1, 1}), InvalidInput);
}

TEST_CASE("attempt streams are distinct across seed and attempt") {
  std::set<std::uint64_t> firsts;
  std::set<std::pair<std::uint64_t, std::uint64_t>> keys;
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    for (std::uint64_t attempt = 0; attempt < 16; ++attempt) {
      RandomStream rs(seed, StreamDomain::kChannel, {attempt});
      firsts.insert(rs.next_u64());
      keys.insert({seed, attempt});
    }
  }
  CHECK(firsts.size() == keys.size());
  // High seed bits matter too.
  RandomStream lo(1, StreamDomain::kChannel, {0});
  RandomStream hi(1 + (std::uint64_t{1} << 32), StreamDomain::kChannel, {0});
  CHECK(lo.next_u64() != hi.next_u64());
}

TEST_CASE("keyed families are independent of the plain stream") {
  const ChannelGenSpec spec{3, 1, 1, 2, 2, 5};
  const auto plain = generate_compound(spec);
  const auto k0 = generate_compound_keyed(spec, {}, StreamDomain::kFadingStates, 0);
  const auto k1 = generate_compound_keyed(spec, {}, StreamDomain::kFadingStates, 1);
  CHECK_FALSE(plain == k0);
  CHECK_FALSE(k0 == k1);
  CHECK(k1 == generate_compound_keyed(spec, {}, StreamDomain::kFadingStates, 1));
}

TEST_CASE("shape validation") {
  std::vector<ComplexMatrix> good{ComplexMatrix::Ones(1, 3)};
  std::vector<ComplexMatrix> bad{ComplexMatrix::Ones(2, 3)};
  CHECK_THROWS_AS(CompoundChannelSet(3, 1, 1, good, bad), InvalidInput);
  CHECK_THROWS_AS(CompoundChannelSet(3, 1, 1, good, {}), InvalidInput);
  const CompoundChannelSet ch(3, 1, 1, good, good);
  CHECK_THROWS_AS(ch.H(User::kOne, 0), InvalidInput);
  CHECK_THROWS_AS(ch.H(User::kOne, 2), InvalidInput);
}

TEST_CASE("swapped exchanges the receivers") {
  const auto ch = generate_compound({3, 2, 1, 1, 2, 2});
  const auto sw = ch.swapped();
  CHECK(sw.N(User::kOne) == 1);
  CHECK(sw.N(User::kTwo) == 2);
  CHECK(sw.J(User::kOne) == 2);
  CHECK(sw.H(User::kOne, 2) == ch.H(User::kTwo, 2));
  CHECK(sw.swapped() == ch);
}

TEST_CASE("save and load round-trip bit for bit") {
  const auto ch = generate_compound({3, 2, 1, 2, 3, 17});
  const auto path = temp_file("roundtrip.json");
  save_channel(ch, path);
  const auto back = load_channel(path);
  CHECK(back == ch);
  CHECK(digest(back) == digest(ch));
  std::filesystem::remove(path);
}

TEST_CASE("wrong matrix shape names the matrix") {
  const auto ch = generate_compound({2, 1, 1, 1, 2, 1});
  auto doc = to_json(ch);
  doc["matrices"]["H_2_2"].erase(0);
  try {
    channel_from_json(doc);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("H_2_2") != std::string::npos);
  }
}

TEST_CASE("malformed files raise ParseError") {
  const auto path = temp_file("broken.json");
  {
    std::ofstream f(path);
    f << "{\"M\": 2, ";
  }
  CHECK_THROWS_AS(load_channel(path), ParseError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_channel(temp_file("does_not_exist.json")), ParseError);
  CHECK_THROWS_AS(channel_from_json(nlohmann::json::array()), ParseError);
}

TEST_CASE("golden fixture matches its recorded digest") {
  const auto ch = load_channel(std::filesystem::path(CBCC_TEST_DATA) / "channel_m4_j2_seed1.json");
  CHECK(digest(ch) == 210565380499670441ull);
  CHECK(ch == generate_compound({4, 1, 1, 2, 2, 1}));
}
