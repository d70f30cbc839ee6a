#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "gaussep/io.hpp"
#include "gaussep/ppt.hpp"
#include "oracles.hpp"

using namespace gaussep;

TEST(Ppt, Vacuum) {
  const PptResult r = ppt_check(vacuum(1, 1));
  EXPECT_TRUE(r.ppt);
  EXPECT_NEAR(r.margin, 0.0, 1e-14);
}

TEST(Ppt, TmssMargin) {
  const PptResult r = ppt_check(tmss(1.0));
  EXPECT_FALSE(r.ppt);
  EXPECT_NEAR(r.margin, std::exp(-2.0) - 1.0, 1e-12);
  EXPECT_NEAR(r.margin, oracle::cm_margin(assemble(partial_transpose(tmss(1.0)))), 1e-12);
}

TEST(Ppt, NecessaryForSeparability) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const SeparableFixture f = random_separable(1 + seed % 3, 1 + (seed / 3) % 3, seed);
    const PptResult r = ppt_check(f.gamma);
    EXPECT_TRUE(r.ppt) << seed;
    EXPECT_GE(r.margin, -1e-9) << seed;
  }
}

TEST(Ppt, RejectsNonCm) {
  EXPECT_THROW(ppt_check(shifted(vacuum(1, 1), -0.5)), InputError);
}

TEST(Ppt, DecideSeparableImpliesPpt) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const BipartiteCM g = random_cm(1 + seed % 2, 1 + seed % 3, Purity::mixed, seed);
    if (decide(g).kind == VerdictKind::separable) {
      EXPECT_TRUE(ppt_check(g).ppt) << seed;
    }
  }
}

TEST(Ppt, BoundEntangledFixture) {
  std::ifstream in(std::string(GAUSSEP_SAMPLES_DIR) + "/ppt_entangled_2x2.json");
  ASSERT_TRUE(in) << "missing sample";
  std::stringstream ss;
  ss << in.rdbuf();
  const BipartiteCM g = io::state_from_string(ss.str());
  EXPECT_TRUE(validate_cm(g).valid);
  EXPECT_TRUE(ppt_check(g).ppt);
  const Verdict v = decide(g);
  EXPECT_EQ(v.kind, VerdictKind::entangled);
}
