#include <gtest/gtest.h>

#include <map>

#include "haur/annotate.hpp"
#include "haur/error.hpp"
#include "haur/rng.hpp"
#include "haur/utf8.hpp"
#include "support.hpp"

namespace haur {
namespace {

class AnnotateTest : public ::testing::Test {
 protected:
  void SetUp() override {
    for (const auto& doc : test::tiny_corpus()) {
      for (auto& c : chunk_document(doc, 500)) chunks.push_back(std::move(c));
    }
  }
  std::vector<TextChunk> chunks;
  RenderConfig config;
};

TEST(Kinds, NamesRoundTrip) {
  for (const auto k : kAllKinds) EXPECT_EQ(parse_kind(to_string(k)), k);
  EXPECT_EQ(to_string(AnnotationKind::ParagraphMark), "pm");
  EXPECT_THROW(parse_kind("circle"), Error);
  EXPECT_TRUE(is_noisy_kind(AnnotationKind::Squiggly));
  EXPECT_FALSE(is_noisy_kind(AnnotationKind::Rect));
  EXPECT_FALSE(is_noisy_kind(AnnotationKind::ParagraphMark));
}

TEST(Kinds, StyleColorsAreDistinct) {
  std::map<std::tuple<int, int, int>, int> seen;
  for (const auto k : kAllKinds) {
    const auto c = default_style(k).color;
    EXPECT_EQ((seen[{c.r, c.g, c.b}]++), 0);
    EXPECT_FALSE(c == (Rgb{0, 0, 0}));
    EXPECT_FALSE(c == (Rgb{255, 255, 255}));
  }
}

TEST_F(AnnotateTest, SentenceTargetsAreUniform) {
  const auto& chunk = chunks.front();
  const auto n = chunk.sentences.size();
  ASSERT_GE(n, 3u);
  std::vector<int> hits(n);
  const int draws = 6000;
  for (int i = 0; i < draws; ++i) {
    const auto spec = select_target(chunk, AnnotationKind::Highlight, mix_seed(1, i));
    ++hits[std::get<SentenceTarget>(spec.target).sentence];
  }
  // Chi-square against uniform, generous bound for n - 1 degrees of freedom.
  double chi = 0;
  const double expect = static_cast<double>(draws) / static_cast<double>(n);
  for (int h : hits) chi += (h - expect) * (h - expect) / expect;
  EXPECT_LT(chi, 3.0 * static_cast<double>(n) + 10.0);
}

TEST_F(AnnotateTest, TargetsAreDeterministic) {
  for (const auto k : {AnnotationKind::Highlight, AnnotationKind::Rect, AnnotationKind::ParagraphMark}) {
    const auto a = select_target(chunks.front(), k, 77);
    const auto b = select_target(chunks.front(), k, 77);
    EXPECT_EQ(a.clean_span, b.clean_span);
    EXPECT_EQ(a.target.index(), b.target.index());
  }
}

TEST_F(AnnotateTest, RectSpansOneToFiveTokensOfOneSentence) {
  for (const auto& chunk : chunks) {
    const auto text = chunk.full_text();
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const auto spec = select_target(chunk, AnnotationKind::Rect, seed);
      const auto& span = std::get<TokenSpanTarget>(spec.target).span;
      const auto tokens = count_tokens(std::string_view(text).substr(span.begin, span.size()));
      EXPECT_GE(tokens, 1u);
      EXPECT_LE(tokens, 5u);
      bool inside = false;
      for (std::size_t s = 0; s < chunk.sentences.size(); ++s) inside = inside || chunk.sentence_span(s).contains(span);
      EXPECT_TRUE(inside);
      EXPECT_FALSE(utf8::is_space(text[span.begin]));
      EXPECT_FALSE(utf8::is_space(text[span.end - 1]));
    }
  }
}

TEST_F(AnnotateTest, ParagraphMarkNeedsTwoParagraphs) {
  const auto single = make_chunk("s", "s", {"Only one paragraph here."});
  try {
    select_target(single, AnnotationKind::ParagraphMark, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SingleParagraphChunk);
  }
}

TEST_F(AnnotateTest, NoiseStaysInParagraphAndWithinCap) {
  NoiseParams params{1.0, 12};
  for (const auto& chunk : chunks) {
    const auto text = chunk.full_text();
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
      auto spec = select_target(chunk, AnnotationKind::Underline, seed);
      spec = apply_noise(spec, chunk, params, mix_seed(seed, 9));
      const auto s = std::get<SentenceTarget>(spec.target).sentence;
      const auto para = chunk.paragraph_span(chunk.sentences[s].paragraph_index);
      EXPECT_TRUE(spec.noised_span.contains(spec.clean_span));
      EXPECT_TRUE(para.contains(spec.noised_span));
      EXPECT_LE(spec.noise.lead_chars, params.max_chars);
      EXPECT_LE(spec.noise.trail_chars, params.max_chars);
      const auto [first, last] = chunk.sentence_range(chunk.sentences[s].paragraph_index);
      EXPECT_EQ(spec.noise.applied, last - first > 1);
      if (spec.noise.lead_chars > 0) {
        const auto prev = chunk.sentence_span(s - 1);
        const auto taken = text.substr(spec.noised_span.begin, prev.end - spec.noised_span.begin);
        EXPECT_EQ(utf8::length(taken), spec.noise.lead_chars);
      } else {
        EXPECT_EQ(spec.noised_span.begin, spec.clean_span.begin);
      }
      if (spec.noise.trail_chars > 0) {
        const auto next = chunk.sentence_span(s + 1);
        const auto taken = text.substr(next.begin, spec.noised_span.end - next.begin);
        EXPECT_EQ(utf8::length(taken), spec.noise.trail_chars);
      } else {
        EXPECT_EQ(spec.noised_span.end, spec.clean_span.end);
      }
    }
  }
}

TEST_F(AnnotateTest, NoiseProbabilityZeroAndNonNoisyKinds) {
  const auto& chunk = chunks.front();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto spec = apply_noise(select_target(chunk, AnnotationKind::Highlight, seed), chunk, {0.0, 12}, seed);
    EXPECT_FALSE(spec.noise.applied);
    EXPECT_EQ(spec.noised_span, spec.clean_span);
    spec = apply_noise(select_target(chunk, AnnotationKind::Rect, seed), chunk, {1.0, 12}, seed);
    EXPECT_FALSE(spec.noise.applied);
  }
}

TEST_F(AnnotateTest, NoiseRateMatchesProbability) {
  const auto& chunk = chunks.front();
  int applied = 0, eligible = 0;
  for (std::uint64_t seed = 0; seed < 4000; ++seed) {
    const auto spec = apply_noise(select_target(chunk, AnnotationKind::Squiggly, seed), chunk, {0.5, 12},
                                  mix_seed(seed, 3));
    const auto s = std::get<SentenceTarget>(spec.target).sentence;
    const auto [first, last] = chunk.sentence_range(chunk.sentences[s].paragraph_index);
    if (last - first < 2) continue;
    ++eligible;
    applied += spec.noise.applied;
  }
  ASSERT_GT(eligible, 1000);
  EXPECT_NEAR(static_cast<double>(applied) / eligible, 0.5, 0.04);
}

TEST_F(AnnotateTest, GroundTruthIsCleanText) {
  for (const auto& chunk : chunks) {
    const auto text = chunk.full_text();
    for (const auto k : kAllKinds) {
      if (k == AnnotationKind::ParagraphMark && chunk.paragraphs.size() < 2) continue;
      auto spec = select_target(chunk, k, 5);
      spec = apply_noise(spec, chunk, {1.0, 12}, 6);
      EXPECT_EQ(ground_truth(chunk, spec), text.substr(spec.clean_span.begin, spec.clean_span.size()));
    }
  }
}

TEST_F(AnnotateTest, AnnotationInkStaysNearTarget) {
  for (const auto& chunk : chunks) {
    for (const auto k : {AnnotationKind::Highlight, AnnotationKind::Underline, AnnotationKind::Squiggly}) {
      auto spec = select_target(chunk, k, 11);
      spec.seed = 11;
      spec = apply_noise(spec, chunk, {1.0, 12}, 12);
      const auto layout = layout_chunk(chunk, config);
      const auto page = rasterize(layout);
      const auto marked = render_annotation(page, layout, spec);
      EXPECT_EQ(marked, render_annotation(page, layout, spec));
      const auto runs = sentence_runs(layout, spec.noised_span);
      int changed = 0;
      for (int y = 0; y < page.height(); ++y) {
        for (int x = 0; x < page.width(); ++x) {
          if (page.at(x, y) == marked.at(x, y)) continue;
          ++changed;
          bool near = false;
          for (const auto& r : runs) near = near || r.inflated(2, 10).contains(x, y);
          ASSERT_TRUE(near) << to_string(k) << " " << x << "," << y;
        }
      }
      EXPECT_GT(changed, 0);
    }
  }
}

TEST_F(AnnotateTest, ParagraphMarkDrawsInPlaceholderOnly) {
  for (const auto& chunk : chunks) {
    if (chunk.paragraphs.size() < 2) continue;
    auto spec = select_target(chunk, AnnotationKind::ParagraphMark, 3);
    const auto p = std::get<ParagraphTarget>(spec.target).paragraph;
    const auto layout = layout_chunk(chunk, config, p);
    const auto page = rasterize(layout);
    const auto marked = render_annotation(page, layout, spec);
    const auto box = *layout.pm_placeholder;
    int star = 0;
    for (int y = 0; y < page.height(); ++y) {
      for (int x = 0; x < page.width(); ++x) {
        if (page.at(x, y) == marked.at(x, y)) continue;
        ASSERT_TRUE(box.contains(x, y));
        star += marked.at(x, y) == spec.style.color;
      }
    }
    EXPECT_GT(star, 10);
    const auto unreserved = layout_chunk(chunk, config);
    EXPECT_THROW(render_annotation(rasterize(unreserved), unreserved, spec), Error);
  }
}

TEST_F(AnnotateTest, SingleLineRectStaysOnOneLine) {
  for (const auto& chunk : chunks) {
    const auto layout = layout_chunk(chunk, config);
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      const auto spec = select_single_line_rect(chunk, layout, seed);
      EXPECT_EQ(sentence_runs(layout, spec.clean_span).size(), 1u);
      EXPECT_EQ(spec.seed, seed);
    }
  }
}

TEST_F(AnnotateTest, ColorCollisionIsRejected) {
  const auto& chunk = chunks.front();
  auto spec = select_target(chunk, AnnotationKind::Highlight, 1);
  spec.style.color = config.foreground;
  const auto layout = layout_chunk(chunk, config);
  try {
    render_annotation(rasterize(layout), layout, spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidConfig);
  }
}

}  // namespace
}  // namespace haur
