#include <catch_amalgamated.hpp>

#include <set>

#include "selfsim/rng.hpp"

using namespace selfsim;

// Known-answer vectors of the reference Philox4x32-10 implementation.
TEST_CASE("philox4x32_10 known answers", "[rng]") {
  REQUIRE(philox4x32_10({0, 0, 0, 0}, {0, 0}) ==
          Philox4x32Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  REQUIRE(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          Philox4x32Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  REQUIRE(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          Philox4x32Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("RandomStream is a pure function of seed and stream", "[rng]") {
  RandomStream a(42, 7), b(42, 7), c(42, 8), e(43, 7);
  std::vector<std::uint64_t> xa, xc, xe;
  for (int i = 0; i < 100; ++i) {
    xa.push_back(a.next_u64());
    REQUIRE(b.next_u64() == xa.back());
    xc.push_back(c.next_u64());
    xe.push_back(e.next_u64());
  }
  REQUIRE(xa != xc);
  REQUIRE(xa != xe);
  std::set<std::uint64_t> distinct(xa.begin(), xa.end());
  REQUIRE(distinct.size() == xa.size());

  // The first block of stream s is philox(ctr = {0, 0, s_lo, s_hi}, key = seed).
  RandomStream f(0x1122334455667788ULL, 3);
  auto         blk = philox4x32_10({0, 0, 3, 0}, {0x55667788, 0x11223344});
  REQUIRE(f.next_u64() == ((std::uint64_t{blk[0]} << 32) | blk[1]));
  REQUIRE(f.next_u64() == ((std::uint64_t{blk[2]} << 32) | blk[3]));
}

TEST_CASE("RandomStream uniform and below", "[rng]") {
  RandomStream r(1, 0);
  double       sum = 0;
  int const    n   = 200000;
  std::vector<int> counts(6, 0);
  for (int i = 0; i < n; ++i) {
    double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    auto k = r.below(6);
    REQUIRE(k < 6);
    ++counts[k];
  }
  REQUIRE(std::abs(sum / n - 0.5) < 0.005);
  // Chi-square with 5 degrees of freedom; 20.5 is the 0.999 quantile.
  double chi = 0, expect = n / 6.0;
  for (int c : counts) {
    chi += (c - expect) * (c - expect) / expect;
  }
  REQUIRE(chi < 20.5);
  REQUIRE(r.below(1) == 0);
}
