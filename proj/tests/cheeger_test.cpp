#include <gtest/gtest.h>

#include "steklov/cheeger.hpp"
#include "steklov/errors.hpp"
#include "steklov/graph_io.hpp"
#include "test_support.hpp"

using namespace steklov;

namespace {

BoundaryComplex star_complex() {
  BoundaryComplex cx;
  cx.volume = {1, 1, 1, 1};
  cx.interfaces = {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}};
  cx.faces = {{1, 1}, {2, 1}, {3, 1}};
  return cx;
}

std::vector<bool> mask_of(std::size_t n, const std::vector<std::size_t>& s) {
  std::vector<bool> in(n, false);
  for (auto c : s) in[c] = true;
  return in;
}

}  // namespace

TEST(Cheeger, ThreeVertexPath) {
  const auto g = graph_to_pair(path_graph(2, 2.0));
  const auto k = enumerate_constants(g.complex, Constraint::kVolumeHalf);
  EXPECT_EQ(k.h, 1.0);
  EXPECT_EQ(k.hprime, 1.0);
  EXPECT_EQ(k.h_witness.subset, (std::vector<std::size_t>{0}));
  EXPECT_EQ(k.hprime_witness.subset, (std::vector<std::size_t>{0}));
  EXPECT_TRUE(k.h_witness.exact);

  // {u,m} carries exterior 1 = half of 2, so the boundary variant admits it
  // and its cut/volume of 1/2 beats {u}. {u,v} is still excluded.
  const auto b = enumerate_constants(g.complex, Constraint::kBoundaryHalf);
  EXPECT_EQ(b.h, 0.5);
  EXPECT_EQ(b.h_witness.subset, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(b.hprime, 1.0);
  EXPECT_EQ(b.hprime_witness.subset, (std::vector<std::size_t>{0}));
}

TEST(Cheeger, StarTieBreaksOnCardinality) {
  const auto k = enumerate_constants(star_complex(), Constraint::kVolumeHalf);
  EXPECT_EQ(k.h, 1.0);
  EXPECT_EQ(k.h_witness.subset, (std::vector<std::size_t>{1}));
  EXPECT_EQ(k.hprime, 1.0);
  EXPECT_EQ(k.hprime_witness.subset, (std::vector<std::size_t>{1}));
}

TEST(Cheeger, MatchesNaiveEnumerationBitForBit) {
  testkit::Rng rng(21);
  for (int trial = 0; trial < 60; ++trial) {
    const auto cx = testkit::random_complex(rng, 1 + testkit::pick(rng, 12));
    for (Constraint v : {Constraint::kVolumeHalf, Constraint::kBoundaryHalf}) {
      const auto k = enumerate_constants(cx, v);
      const auto ref = testkit::naive_constants(cx, v);
      EXPECT_EQ(k.h, ref.h.ratio) << trial;
      EXPECT_EQ(k.hprime, ref.hprime.ratio) << trial;
      EXPECT_EQ(k.h_witness.subset, ref.h.subset) << trial;
      EXPECT_EQ(k.hprime_witness.subset, ref.hprime.subset) << trial;
    }
  }
}

TEST(Cheeger, ThreadsDoNotChangeTheAnswer) {
  testkit::Rng rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    const auto cx = testkit::random_complex(rng, 10 + testkit::pick(rng, 6));
    EnumerationOptions one, many;
    many.jobs = 1 + static_cast<unsigned>(testkit::pick(rng, 7));
    const auto a = enumerate_constants(cx, Constraint::kVolumeHalf, one);
    const auto b = enumerate_constants(cx, Constraint::kVolumeHalf, many);
    EXPECT_EQ(a.h, b.h);
    EXPECT_EQ(a.hprime, b.hprime);
    EXPECT_EQ(a.h_witness.subset, b.h_witness.subset);
    EXPECT_EQ(a.hprime_witness.subset, b.hprime_witness.subset);
  }
}

TEST(Cheeger, SizeCap) {
  testkit::Rng rng(23);
  const auto cx = testkit::random_complex(rng, 23);
  EXPECT_THROW(enumerate_constants(cx, Constraint::kVolumeHalf), SizeError);
  EnumerationOptions small;
  small.cap = 4;
  EXPECT_THROW(enumerate_constants(testkit::random_complex(rng, 5), Constraint::kVolumeHalf, small),
               SizeError);
}

TEST(Cheeger, HPrimePositiveOnConnectedComplexes) {
  testkit::Rng rng(24);
  for (int trial = 0; trial < 40; ++trial) {
    const auto cx = testkit::random_complex(rng, 2 + testkit::pick(rng, 10));
    ASSERT_TRUE(validate_complex(cx).empty());
    const auto k = enumerate_constants(cx, Constraint::kVolumeHalf);
    EXPECT_GT(k.hprime, 0.0);
    EXPECT_GT(k.h, 0.0);
  }
}

TEST(Cheeger, Measures) {
  const auto cx = star_complex();
  CutEvaluator eval(cx);
  const auto m = eval.measure(mask_of(4, {0, 1}));
  EXPECT_EQ(m.cut, 2.0);
  EXPECT_EQ(m.volume, 2.0);
  EXPECT_EQ(m.exterior, 1.0);
  EXPECT_EQ(m.size, 2u);
  EXPECT_TRUE(eval.admissible(m, Constraint::kVolumeHalf));
  EXPECT_FALSE(eval.admissible(eval.measure(mask_of(4, {0, 1, 2})), Constraint::kVolumeHalf));
  EXPECT_FALSE(eval.admissible(eval.measure(mask_of(4, {1, 2})), Constraint::kBoundaryHalf));
  EXPECT_FALSE(eval.admissible(eval.measure(mask_of(4, {})), Constraint::kBoundaryHalf));
}

TEST(Cheeger, ConstraintNames) {
  EXPECT_EQ(parse_constraint("volume"), Constraint::kVolumeHalf);
  EXPECT_EQ(parse_constraint("BoundaryHalf"), Constraint::kBoundaryHalf);
  EXPECT_EQ(to_string(Constraint::kBoundaryHalf), "boundary");
  EXPECT_THROW(parse_constraint("area"), InputError);
}

TEST(Sweep, ConstantFieldHasNoCuts) {
  const auto cx = star_complex();
  const std::vector<double> zero(4, 0.0);
  EXPECT_TRUE(sweep_cuts(cx, zero, Constraint::kVolumeHalf).cuts.empty());
}

TEST(Sweep, NestedAndDominatedByExactConstants) {
  testkit::Rng rng(25);
  for (int trial = 0; trial < 40; ++trial) {
    const auto cx = testkit::random_complex(rng, 2 + testkit::pick(rng, 11));
    std::vector<double> field;
    for (std::size_t c = 0; c < cx.cell_count(); ++c)
      field.push_back(testkit::uniform(rng, -1.0, 1.0));
    for (Constraint v : {Constraint::kVolumeHalf, Constraint::kBoundaryHalf}) {
      const auto sw = sweep_cuts(cx, field, v);
      const auto k = enumerate_constants(cx, v);
      for (std::size_t i = 0; i < sw.cuts.size(); ++i) {
        for (auto c : sw.cuts[i].subset) EXPECT_GE(field[c], sw.thresholds[i]);
        if (i > 0) {
          EXPECT_GT(sw.thresholds[i], sw.thresholds[i - 1]);
          EXPECT_LE(sw.cuts[i].subset.size(), sw.cuts[i - 1].subset.size());
        }
        EXPECT_GE(sw.cuts[i].h_ratio, k.h);
        EXPECT_GE(sw.cuts[i].hprime_ratio, k.hprime);
      }
    }
  }
}

TEST(LocalSearch, ImprovesToALocalOptimum) {
  testkit::Rng rng(26);
  for (int trial = 0; trial < 30; ++trial) {
    const auto cx = testkit::random_complex(rng, 4 + testkit::pick(rng, 10));
    CutEvaluator eval(cx);
    std::vector<double> field;
    for (std::size_t c = 0; c < cx.cell_count(); ++c)
      field.push_back(testkit::uniform(rng, -1.0, 1.0));
    const auto sw = sweep_cuts(cx, field, Constraint::kVolumeHalf);
    if (!sw.best_h) continue;
    for (Objective o : {Objective::kH, Objective::kHPrime}) {
      const CutResult& seed = sw.cuts[*sw.best_h];
      if (!std::isfinite(seed.ratio(o))) continue;
      const auto out = local_search_improve(cx, seed, o);
      EXPECT_LE(out.ratio(o), seed.ratio(o));
      auto in = mask_of(cx.cell_count(), out.subset);
      ASSERT_TRUE(eval.admissible(eval.measure(in), Constraint::kVolumeHalf));
      for (std::size_t c = 0; c < cx.cell_count(); ++c) {
        in[c] = !in[c];
        const auto m = eval.measure(in);
        if (eval.admissible(m, Constraint::kVolumeHalf)) {
          const double r = o == Objective::kH ? (m.volume > 0 ? m.cut / m.volume : kInf)
                                              : (m.exterior > 0 ? m.cut / m.exterior : kInf);
          EXPECT_GE(r, out.ratio(o) * (1 - 1e-12));
        }
        in[c] = !in[c];
      }
    }
  }
}

TEST(LocalSearch, RejectsInadmissibleSeed) {
  const auto cx = star_complex();
  CutEvaluator eval(cx);
  const CutResult all = eval.result(std::vector<bool>(4, true), Constraint::kVolumeHalf, false);
  EXPECT_THROW(local_search_improve(cx, all, Objective::kH), std::invalid_argument);
}
