#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "stabcert/embedding.hpp"

using namespace stabcert;
using namespace stabcert::embedding;

namespace {

std::string fixture(const char* name) { return std::string(STABCERT_FIXTURE_DIR) + "/" + name; }

void check_invariants(const EmbeddingPair& p, const Matrix& a) {
  const std::size_t n = a.rows();
  EXPECT_EQ(p.up - p.down, a);
  EXPECT_TRUE(is_nonnegative(p.down));
  EXPECT_EQ(p.hat.block(0, 0, n, n), p.up);
  EXPECT_EQ(p.hat.block(0, n, n, n), p.down);
  EXPECT_EQ(p.hat.block(n, 0, n, n), p.down);
  EXPECT_EQ(p.hat.block(n, n, n, n), p.up);
  if (p.domain == TimeDomain::DT) {
    EXPECT_TRUE(is_nonnegative(p.up));
    EXPECT_TRUE(is_nonnegative(p.hat));
  } else {
    EXPECT_TRUE(is_metzler(p.up));
    EXPECT_TRUE(is_metzler(p.hat));
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_EQ(p.up(i, i), a(i, i));
      EXPECT_EQ(p.down(i, i), 0.0);
    }
  }
}

}  // namespace

TEST(Split, DtExample) {
  const Split s = split_dt(Matrix{{1, -2}, {-3, 4}});
  EXPECT_EQ(s.up, (Matrix{{1, 0}, {0, 4}}));
  EXPECT_EQ(s.down, (Matrix{{0, 2}, {3, 0}}));
}

TEST(Split, CtExample) {
  const Split s = split_ct(Matrix{{-2, -3}, {4, -5}});
  EXPECT_EQ(s.up, (Matrix{{-2, 0}, {4, -5}}));
  EXPECT_EQ(s.down, (Matrix{{0, 3}, {0, 0}}));
  EXPECT_EQ(metzlerize(Matrix{{-2, -3}, {4, -5}}), (Matrix{{-2, 3}, {4, -5}}));
}

TEST(Split, ConeMembersHaveNoDownPart) {
  const Matrix ad = read_matrix_file(fixture("cstr_ad.mat"));
  EXPECT_EQ(split_dt(ad).up, ad);
  EXPECT_EQ(split_dt(ad).down, Matrix(2, 2));
  const Matrix ac = read_matrix_file(fixture("cstr_ac.mat"));
  EXPECT_EQ(split_ct(ac).down, Matrix(2, 2));
  EXPECT_EQ(metzlerize(ac), ac);
}

TEST(Split, OscillatorDownPart) {
  const Matrix ac = read_matrix_file(fixture("osc_ac.mat"));
  const Split s = split_ct(ac);
  Matrix expected(5, 5);
  expected(1, 0) = 2.0;
  expected(3, 2) = 1.5;
  EXPECT_EQ(s.down, expected);
  EXPECT_EQ(metzlerize(ac).block(0, 0, 2, 2), (Matrix{{0, 1}, {2, -3}}));
}

TEST(BuildAhat, Examples) {
  const Matrix ac = read_matrix_file(fixture("cstr_ac.mat"));
  const EmbeddingPair ct = build_ahat(ac, TimeDomain::CT);
  EXPECT_EQ(ct.hat.block(0, 0, 2, 2), ac);
  EXPECT_EQ(ct.hat.block(0, 2, 2, 2), Matrix(2, 2));

  const EmbeddingPair dt = build_ahat(Matrix{{0, -1}, {0, 0}}, TimeDomain::DT);
  EXPECT_EQ(dt.hat, (Matrix{{0, 0, 0, 1}, {0, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 0}}));
}

TEST(BuildAhat, InvariantsOnRandomMatrices) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + trial % 10;
    const Matrix a = oracle::random_matrix(rng, n, n, -2, 2);
    for (TimeDomain d : {TimeDomain::CT, TimeDomain::DT}) check_invariants(build_ahat(a, d), a);
  }
}

TEST(VerifySimilarity, TopLeftBlock) {
  const Matrix ac = read_matrix_file(fixture("osc_ac.mat"));
  const EmbeddingPair p = build_ahat(ac, TimeDomain::CT);
  EXPECT_EQ(p.up + p.down, metzlerize(ac));
  const SimilarityReport r = verify_similarity(p, ac);
  EXPECT_TRUE(r.pass());

  std::mt19937_64 rng(3);
  const Matrix a = oracle::random_matrix(rng, 6, 6, -2, 2);
  const EmbeddingPair q = build_ahat(a, TimeDomain::DT);
  EXPECT_EQ(q.up + q.down, oracle::absolute(a));
}

TEST(VerifySimilarity, PassesOnRandomMatrices) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 10;
    const Matrix a = oracle::random_matrix(rng, n, n, -2, 2);
    for (TimeDomain d : {TimeDomain::CT, TimeDomain::DT}) {
      const SimilarityReport r = verify_similarity(build_ahat(a, d), a);
      EXPECT_TRUE(r.structural_pass);
      EXPECT_TRUE(r.spectral_pass) << r.spectral_error;
    }
  }
}

TEST(VerifySimilarity, DetectsTamperedPair) {
  const Matrix a{{1, -2}, {-3, 4}};
  EmbeddingPair p = build_ahat(a, TimeDomain::DT);
  p.hat(0, 3) += 1.0;
  const SimilarityReport r = verify_similarity(p, a);
  EXPECT_FALSE(r.structural_pass);
  bool named = false;
  for (const CheckLine& l : r.lines) named = named || (!l.pass && l.name.find("structure") != std::string::npos);
  EXPECT_TRUE(named);
}
