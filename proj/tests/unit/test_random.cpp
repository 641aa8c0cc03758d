#include <set>

#include "bolab/random.hpp"
#include "doctest.h"
#include "oracles.hpp"

TEST_SUITE("random") {
  TEST_CASE("philox matches known answer vectors") {
    for (const auto& kat : oracle::kPhiloxKats) {
      const auto out = bolab::philox4x32_10({kat.ctr[0], kat.ctr[1], kat.ctr[2], kat.ctr[3]}, {kat.key[0], kat.key[1]});
      for (int i = 0; i < 4; ++i) CHECK(out[i] == kat.out[i]);
    }
  }

  TEST_CASE("addressed draws are pure functions of their coordinates") {
    const bolab::RandomStream a(42, 7);
    const bolab::RandomStream b(42, 7);
    CHECK(a.bits(3, 1) == b.bits(3, 1));
    CHECK(a.bits(3, 1) != a.bits(3, 0));
    CHECK(a.bits(3, 1) != a.bits(4, 1));
    CHECK(a.bits(3, 1) != bolab::RandomStream(42, 8).bits(3, 1));
    CHECK(a.bits(3, 1) != bolab::RandomStream(43, 7).bits(3, 1));
    CHECK(a.bits(0, 0) != bolab::RandomStream(42, 7ull << 32).bits(0, 0));
  }

  TEST_CASE("sequential draws replay") {
    bolab::RandomStream a(1, 2);
    bolab::RandomStream b(1, 2);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  }

  TEST_CASE("unit conversions stay in range") {
    CHECK(bolab::RandomStream::to_open_unit(0) > 0.0);
    CHECK(bolab::RandomStream::to_open_unit(~0ull) == 1.0);
    CHECK(bolab::RandomStream::to_unit(0) == 0.0);
    CHECK(bolab::RandomStream::to_unit(~0ull) < 1.0);
    bolab::RandomStream r(3, 0);
    for (int i = 0; i < 10000; ++i) {
      const double u = r.next_unit();
      CHECK((u >= 0.0 && u < 1.0));
    }
  }

  TEST_CASE("next_below covers the range without bias") {
    bolab::RandomStream r(4, 0);
    std::vector<int> counts(7, 0);
    const int draws = 70000;
    for (int i = 0; i < draws; ++i) {
      const auto k = r.next_below(7);
      REQUIRE(k < 7);
      ++counts[k];
    }
    for (const int c : counts) CHECK(std::abs(c - draws / 7) < 5 * 100);
    CHECK(r.next_below(1) == 0);
    CHECK(r.next_below(0) == 0);
  }

  TEST_CASE("derived seeds are distinct") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t tag = 0; tag < 1000; ++tag) seen.insert(bolab::derive_seed(17, tag));
    CHECK(seen.size() == 1000);
    CHECK(bolab::derive_seed(17, 1) == bolab::derive_seed(17, 1));
    CHECK(bolab::mix64(0) != bolab::mix64(1));
  }
}
