#include <gtest/gtest.h>

#include <set>

#include "haur/corpus.hpp"
#include "haur/error.hpp"
#include "haur/rng.hpp"
#include "haur/utf8.hpp"
#include "support.hpp"

namespace haur {
namespace {

TEST(Utf8, DecodeEncodeRoundTrip) {
  const std::string text = "caf\xC3\xA9 \xE2\x80\x94 \xF0\x9F\x90\xB3";
  const auto cps = utf8::decode(text);
  ASSERT_EQ(cps.size(), 8u);
  EXPECT_EQ(cps[3], U'é');
  EXPECT_EQ(cps[7], U'\U0001F433');
  EXPECT_EQ(utf8::encode(cps), text);
  EXPECT_EQ(utf8::length(text), 8u);
}

TEST(Utf8, MalformedBytesBecomeReplacement) {
  const auto cps = utf8::decode("a\xFF" "b\xC3");
  ASSERT_EQ(cps.size(), 4u);
  EXPECT_EQ(cps[1], U'�');
  EXPECT_EQ(cps[3], U'�');
}

TEST(Utf8, AdvanceAndRetreatCountScalars) {
  const std::string text = "a\xC3\xA9z\xE2\x80\x94q";
  EXPECT_EQ(utf8::advance(text, 0, 2, text.size()), 3u);
  EXPECT_EQ(utf8::advance(text, 0, 99, text.size()), text.size());
  EXPECT_EQ(utf8::advance(text, 0, 3, 2), 2u);
  EXPECT_EQ(utf8::retreat(text, text.size(), 2, 0), 4u);
  EXPECT_EQ(utf8::retreat(text, text.size(), 99, 1), 1u);
}

TEST(Rng, DeterministicAndBounded) {
  Rng a(7), b(7);
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.below(13);
    EXPECT_EQ(x, b.below(13));
    EXPECT_LT(x, 13u);
    const auto y = a.uniform_int(-3, 3);
    b.uniform_int(-3, 3);
    EXPECT_GE(y, -3);
    EXPECT_LE(y, 3);
    const auto u = a.uniform01();
    b.uniform01();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Rng, BelowIsRoughlyUniform) {
  Rng rng(99);
  std::vector<int> counts(6);
  for (int i = 0; i < 60000; ++i) ++counts[rng.below(6)];
  for (int c : counts) EXPECT_NEAR(c, 10000, 400);
}

TEST(Rng, MixSeedSeparatesChildren) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 100; ++i) seen.insert(mix_seed(42, i));
  EXPECT_EQ(seen.size(), 100u);
  EXPECT_NE(hash_string("a"), hash_string("b"));
  EXPECT_EQ(hash_string(""), 0xcbf29ce484222325ULL);
}

TEST(Corpus, LoadDocumentSplitsOnBlankLines) {
  const auto doc = load_document("Title\n\nfirst line\ncontinues  here.\n\n\n  second.\n", "d");
  ASSERT_EQ(doc.paragraphs.size(), 3u);
  EXPECT_EQ(doc.title, "Title");
  EXPECT_EQ(doc.paragraphs[1], "first line continues here.");
  EXPECT_EQ(doc.paragraphs[2], "second.");
}

TEST(Corpus, EmptyDocumentThrows) {
  try {
    load_document(" \n\n\t\n", "empty");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyDocument);
  }
}

TEST(Corpus, CountTokensIsWhitespaceRuns) {
  EXPECT_EQ(count_tokens(""), 0u);
  EXPECT_EQ(count_tokens("  a  b\tc\n"), 3u);
  EXPECT_EQ(count_tokens("don't-stop"), 1u);
  const auto spans = token_spans(" ab  c ");
  ASSERT_EQ(spans.size(), 2u);
  EXPECT_EQ(spans[0], (Span{1, 3}));
  EXPECT_EQ(spans[1], (Span{5, 6}));
}

TEST(Corpus, SentenceSegmentation) {
  const std::string p = "He said \"Stop.\" Then left! Did he? Yes.5 apples and more";
  const auto s = segment_sentences(p, 2);
  ASSERT_EQ(s.size(), 4u);
  EXPECT_EQ(s[0].text, "He said \"Stop.\"");
  EXPECT_EQ(s[1].text, "Then left!");
  EXPECT_EQ(s[2].text, "Did he?");
  EXPECT_EQ(s[3].text, "Yes.5 apples and more");
  for (const auto& x : s) {
    EXPECT_EQ(x.paragraph_index, 2u);
    EXPECT_EQ(p.substr(x.char_span.begin, x.char_span.size()), x.text);
  }
}

TEST(Corpus, SentenceSpansCoverParagraphTokens) {
  for (const auto& doc : test::tiny_corpus()) {
    for (std::size_t i = 0; i < doc.paragraphs.size(); ++i) {
      std::size_t tokens = 0;
      for (const auto& s : segment_sentences(doc.paragraphs[i], i)) tokens += count_tokens(s.text);
      EXPECT_EQ(tokens, count_tokens(doc.paragraphs[i]));
    }
  }
}

TEST(Corpus, ChunkRespectsBudgetAndPreservesText) {
  const auto docs = load_corpus(test::corpus_dir());
  ASSERT_GE(docs.size(), 2u);
  for (const std::size_t budget : {60u, 200u, 500u}) {
    for (const auto& doc : docs) {
      const auto chunks = chunk_document(doc, budget);
      ASSERT_FALSE(chunks.empty());
      for (const auto& c : chunks) {
        if (!c.oversized_sentence) EXPECT_LE(c.token_count, budget) << c.chunk_id;
        EXPECT_EQ(c.token_count, count_tokens(c.full_text()));
        EXPECT_EQ(c.doc_id, doc.doc_id);
      }
      EXPECT_EQ(reassemble_paragraphs(chunks), doc.paragraphs);
    }
  }
}

TEST(Corpus, TwoHundredTokenParagraphsFitOneChunk) {
  std::string a, b;
  for (int i = 0; i < 100; ++i) a += "w" + std::to_string(i) + (i == 99 ? "." : " ");
  for (int i = 0; i < 100; ++i) b += "v" + std::to_string(i) + (i == 99 ? "." : " ");
  SourceDocument doc{"d", "d", {a, b}};
  const auto chunks = chunk_document(doc, 500);
  ASSERT_EQ(chunks.size(), 1u);
  EXPECT_EQ(chunks[0].token_count, 200u);
  EXPECT_EQ(chunks[0].paragraphs.size(), 2u);
}

TEST(Corpus, OversizedSentenceIsFlagged) {
  std::string s;
  for (int i = 0; i < 30; ++i) s += "word ";
  SourceDocument doc{"d", "d", {s + "end."}};
  const auto chunks = chunk_document(doc, 10);
  ASSERT_EQ(chunks.size(), 1u);
  EXPECT_TRUE(chunks[0].oversized_sentence);
}

TEST(Corpus, ChunkFromTextInvertsFullText) {
  for (const auto& doc : test::tiny_corpus()) {
    for (const auto& c : chunk_document(doc, 40)) {
      const auto back = chunk_from_text(c.chunk_id, c.doc_id, c.full_text());
      EXPECT_EQ(back.paragraphs, c.paragraphs);
      ASSERT_EQ(back.sentences.size(), c.sentences.size());
      for (std::size_t i = 0; i < c.sentences.size(); ++i) {
        EXPECT_EQ(back.sentence_span(i), c.sentence_span(i));
        const auto sp = c.sentence_span(i);
        EXPECT_EQ(c.full_text().substr(sp.begin, sp.size()), c.sentences[i].text);
      }
    }
  }
}

TEST(Corpus, MissingDirectoryIsIoError) {
  try {
    load_corpus("/nonexistent/haur/corpus");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Io);
  }
}

}  // namespace
}  // namespace haur
