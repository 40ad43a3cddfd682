#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>
#include <vector>

#include "graphann/semisort.hpp"

using namespace graphann;

namespace {

using Pair = std::pair<uint32_t, uint32_t>;

// Sort-based oracle: the grouped output must contain exactly the input
// multiset, every key's pairs must be contiguous, and within a group the
// input order must survive.
void check_against_oracle(const std::vector<Pair>& input, const GroupedPairs& got) {
  REQUIRE(got.pairs.size() == input.size());
  if (input.empty()) {
    CHECK(got.groups() == 0);
    return;
  }

  auto sorted_in = input;
  auto sorted_out = got.pairs;
  std::sort(sorted_in.begin(), sorted_in.end());
  std::sort(sorted_out.begin(), sorted_out.end());
  CHECK(sorted_in == sorted_out);

  REQUIRE(got.group_offsets.front() == 0);
  REQUIRE(got.group_offsets.back() == got.pairs.size());

  std::map<uint32_t, std::vector<uint32_t>> in_order;
  for (const auto& p : input) in_order[p.first].push_back(p.second);

  std::map<uint32_t, size_t> seen_at;
  for (size_t gi = 0; gi < got.groups(); gi++) {
    size_t lo = got.group_offsets[gi], hi = got.group_offsets[gi + 1];
    REQUIRE(lo < hi);
    uint32_t key = got.pairs[lo].first;
    CHECK(seen_at.find(key) == seen_at.end());  // contiguity: one group per key
    seen_at[key] = gi;
    std::vector<uint32_t> vals;
    for (size_t i = lo; i < hi; i++) {
      CHECK(got.pairs[i].first == key);
      vals.push_back(got.pairs[i].second);
    }
    CHECK(vals == in_order[key]);  // input order within the group
  }
  CHECK(seen_at.size() == in_order.size());
}

}  // namespace

TEST_CASE("grouping matches the oracle across many seeds") {
  for (uint64_t seed = 0; seed < 30; seed++) {
    std::mt19937_64 rng(seed);
    size_t n = 1 + rng() % 3000;
    uint32_t key_space = 1 + static_cast<uint32_t>(rng() % 200);
    std::vector<Pair> input(n);
    for (auto& p : input) {
      p.first = static_cast<uint32_t>(rng() % key_space);
      p.second = static_cast<uint32_t>(rng());
    }
    auto got = group_by_key(input, 1);
    check_against_oracle(input, got);
  }
}

TEST_CASE("worker count never changes the grouping") {
  std::mt19937_64 rng(77);
  std::vector<Pair> input(20000);
  for (auto& p : input) {
    p.first = static_cast<uint32_t>(rng() % 512);
    p.second = static_cast<uint32_t>(rng());
  }
  auto one = group_by_key(input, 1);
  for (size_t workers : {2, 4, 7}) {
    auto many = group_by_key(input, workers);
    CHECK(many.pairs == one.pairs);
    CHECK(many.group_offsets == one.group_offsets);
  }
}

TEST_CASE("edge shapes") {
  SUBCASE("empty input") {
    auto got = group_by_key(std::vector<Pair>{}, 4);
    CHECK(got.pairs.empty());
    CHECK(got.groups() == 0);
  }
  SUBCASE("single key repeated") {
    std::vector<Pair> input(100, Pair{3, 0});
    for (uint32_t i = 0; i < 100; i++) input[i].second = i;
    auto got = group_by_key(input, 4);
    REQUIRE(got.groups() == 1);
    for (uint32_t i = 0; i < 100; i++) CHECK(got.pairs[i].second == i);
  }
  SUBCASE("all keys distinct") {
    std::vector<Pair> input;
    for (uint32_t i = 0; i < 64; i++) input.push_back({i, i * 2});
    auto got = group_by_key(input, 2);
    CHECK(got.groups() == 64);
    check_against_oracle(input, got);
  }
  SUBCASE("adversarial keys sharing low bits") {
    std::vector<Pair> input;
    for (uint32_t i = 0; i < 4096; i++) input.push_back({i << 20, i});
    auto got = group_by_key(input, 4);
    check_against_oracle(input, got);
  }
}
