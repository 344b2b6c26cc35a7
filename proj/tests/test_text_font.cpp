#include <gtest/gtest.h>

#include "scribe/hostctl/font.hpp"
#include "scribe/hostctl/strokes.hpp"
#include "scribe/hostctl/text.hpp"
#include "support/random.hpp"

namespace scribe::hostctl {
namespace {

std::size_t code_points(const std::string& s) { return decode_utf8(s).size(); }

TEST(SegmentText, WrapsAtWordBoundaries) {
  EXPECT_EQ(segment_text("the quick brown fox", 10), (std::vector<std::string>{"the quick", "brown fox"}));
  EXPECT_EQ(segment_text("hello", 28), (std::vector<std::string>{"hello"}));
}

TEST(SegmentText, EmptyAndBlankInput) {
  EXPECT_TRUE(segment_text("", 28).empty());
  EXPECT_TRUE(segment_text(" \t\n ", 28).empty());
}

TEST(SegmentText, CollapsesWhitespace) {
  EXPECT_EQ(segment_text("  a \t b\n\nc  ", 28), (std::vector<std::string>{"a b c"}));
}

TEST(SegmentText, HardSplitsLongWords) {
  EXPECT_EQ(segment_text("abcdefghij", 4), (std::vector<std::string>{"abcd", "efgh", "ij"}));
  EXPECT_EQ(segment_text("ab abcdefgh", 4), (std::vector<std::string>{"ab", "abcd", "efgh"}));
}

TEST(SegmentText, ExactFitStaysOnOneLine) {
  EXPECT_EQ(segment_text("abcd efgh", 9), (std::vector<std::string>{"abcd efgh"}));
  EXPECT_EQ(segment_text("abcd efgh", 8), (std::vector<std::string>{"abcd", "efgh"}));
}

TEST(SegmentText, CountsCodePointsNotBytes) {
  // Four 2-byte characters fit a 4-character line.
  EXPECT_EQ(segment_text("\xC3\xA9\xC3\xA9\xC3\xA9\xC3\xA9", 4).size(), 1u);
}

TEST(SegmentText, ZeroWidthIsRejected) { EXPECT_THROW(segment_text("a", 0), std::invalid_argument); }

TEST(SegmentText, Properties) {
  testing::Rng rng(41);
  for (int trial = 0; trial < 3000; ++trial) {
    std::string text;
    for (int i = 0, n = static_cast<int>(rng.integer(0, 30)); i < n; ++i) {
      text += rng.token(0, 14);
      text += rng.pick(std::vector<std::string>{" ", "  ", "\n", "\t", " \n "});
    }
    const auto width = static_cast<std::size_t>(rng.integer(1, 30));
    const auto lines = segment_text(text, width);
    std::string rejoined, words;
    for (const auto& l : lines) {
      ASSERT_FALSE(l.empty());
      ASSERT_LE(code_points(l), width) << l;
      ASSERT_NE(l.front(), ' ');
      ASSERT_NE(l.back(), ' ');
      ASSERT_EQ(l.find("  "), std::string::npos);
      for (char c : l) if (c != ' ') rejoined += c;
    }
    for (char c : text) if (c != ' ' && c != '\n' && c != '\t') words += c;
    // No character is lost, duplicated or reordered.
    ASSERT_EQ(rejoined, words);
    // Re-segmenting the output is a fixed point.
    std::string joined;
    for (const auto& l : lines) joined += l + "\n";
    ASSERT_EQ(segment_text(joined, width), lines);
  }
}

TEST(SegmentText, GreedyLinesCannotTakeTheNextWord) {
  testing::Rng rng(42);
  for (int trial = 0; trial < 2000; ++trial) {
    std::string text;
    for (int i = 0, n = static_cast<int>(rng.integer(1, 20)); i < n; ++i) text += rng.token(1, 8) + " ";
    const auto width = static_cast<std::size_t>(rng.integer(8, 30));
    const auto lines = segment_text(text, width);
    for (std::size_t i = 0; i + 1 < lines.size(); ++i) {
      const auto next_word = lines[i + 1].substr(0, lines[i + 1].find(' '));
      ASSERT_GT(code_points(lines[i]) + 1 + code_points(next_word), width);
    }
  }
}

TEST(Utf8, RoundTripAndReplacement) {
  for (char32_t cp : {U'a', U'é', U'€', U'\U0001F600'}) {
    const auto bytes = encode_utf8(cp);
    EXPECT_EQ(decode_utf8(bytes), std::vector<char32_t>{cp});
  }
  EXPECT_EQ(decode_utf8("\xFF" "a"), (std::vector<char32_t>{U'�', U'a'}));
  EXPECT_EQ(decode_utf8("\xC3"), std::vector<char32_t>{U'�'});
}

TEST(Font, BuiltinCoversPrintableAscii) {
  const auto& f = Font::builtin();
  EXPECT_GT(f.em(), 0.0);
  for (char32_t c = 0x21; c <= 0x7e; ++c) EXPECT_NE(f.find(c), nullptr) << static_cast<char>(c);
  ASSERT_TRUE(f.placeholder());
  EXPECT_NE(f.find(*f.placeholder()), nullptr);
}

TEST(Font, ShippedFileMatchesBuiltin) {
  const auto loaded = Font::load(std::string(SCRIBE_DATA_DIR) + "/fonts/simplex.font");
  EXPECT_EQ(loaded.size(), Font::builtin().size());
  EXPECT_EQ(loaded.name(), Font::builtin().name());
}

TEST(Font, ParsesMinimalFont) {
  const auto f = Font::parse("name t\nem 10\n# comment\nglyph U+0041 advance 5\nstroke 0,0 4,10\nstroke 1,5 3,5\n");
  EXPECT_EQ(f.name(), "t");
  ASSERT_NE(f.find(U'A'), nullptr);
  EXPECT_EQ(f.find(U'A')->strokes.size(), 2u);
  EXPECT_EQ(f.find(U'B'), nullptr);
  EXPECT_FALSE(f.placeholder());
}

TEST(Font, RejectsBrokenFiles) {
  for (const char* text : {"glyph U+0041 advance 5\n", "em 10\nstroke 0,0 1,1\n", "em 10\nglyph U+0041 advance 0\n",
                           "em 10\nglyph A advance 5\n", "em 10\nglyph U+0041 advance 5\nstroke 0,0\n",
                           "em 10\nglyph U+0041 advance 5\nstroke 0,0 0,0\n",
                           "em 10\nglyph U+0041 advance 5\nstroke 0,0 1,11\n", "em 10\nplaceholder U+0041\n",
                           "em 10\nbogus 1\n", "em 10\nglyph U+0041 advance 5\nglyph U+0041 advance 5\n"}) {
    EXPECT_THROW(Font::parse(text), FontError) << text;
  }
}

TEST(VectorFont, LetterIHasStemAndDot) {
  const VectorFontGenerator gen;
  const StrokeStyle style{8.0, false};
  const auto line = generate_strokes("i", gen, style);
  EXPECT_GE(line.strokes.size(), 2u);
  const double scale = style.letter_height_mm / Font::builtin().em();
  EXPECT_DOUBLE_EQ(line.width_mm, Font::builtin().find(U'i')->advance * scale);
  for (const auto& s : line.strokes) {
    for (const auto& p : s.points) {
      EXPECT_GE(p.y, 0.0);
      EXPECT_LE(p.y, style.letter_height_mm);
    }
  }
}

TEST(VectorFont, SpaceAdvancesWithoutInk) {
  const VectorFontGenerator gen;
  const auto a = generate_strokes("a", gen, {});
  const auto a_a = generate_strokes("a a", gen, {});
  EXPECT_EQ(a_a.strokes.size(), 2 * a.strokes.size());
  const double space = Font::builtin().find(U' ')->advance * 8.0 / Font::builtin().em();
  EXPECT_NEAR(a_a.width_mm, 2 * a.width_mm + space, 1e-12);
  // The second glyph is the first shifted by one advance plus the space.
  for (std::size_t i = 0; i < a.strokes.size(); ++i) {
    const auto& p = a.strokes[i].points;
    const auto& q = a_a.strokes[a.strokes.size() + i].points;
    ASSERT_EQ(p.size(), q.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
      EXPECT_NEAR(q[k].x - p[k].x, a.width_mm + space, 1e-12);
      EXPECT_DOUBLE_EQ(q[k].y, p[k].y);
    }
  }
}

TEST(VectorFont, UnsupportedGlyphUsesPlaceholderOrThrows) {
  const VectorFontGenerator gen;
  const auto lenient = generate_strokes("h\xC3\xA9llo", gen, {8.0, false});
  ASSERT_EQ(lenient.warnings.size(), 1u);
  EXPECT_NE(lenient.warnings[0].find("U+00E9"), std::string::npos);
  try {
    generate_strokes("h\xC3\xA9llo", gen, {8.0, true});
    FAIL() << "strict mode accepted an unsupported glyph";
  } catch (const UnsupportedGlyph& e) {
    EXPECT_EQ(e.codepoint(), U'é');
  }
}

TEST(VectorFont, ScalesLinearlyWithLetterHeight) {
  const VectorFontGenerator gen;
  const auto small = generate_strokes("Hello, world", gen, {4.0, false});
  const auto big = generate_strokes("Hello, world", gen, {12.0, false});
  ASSERT_EQ(small.strokes.size(), big.strokes.size());
  EXPECT_NEAR(big.width_mm, 3.0 * small.width_mm, 1e-9);
  for (std::size_t i = 0; i < small.strokes.size(); ++i) {
    for (std::size_t k = 0; k < small.strokes[i].points.size(); ++k) {
      EXPECT_NEAR(big.strokes[i].points[k].x, 3.0 * small.strokes[i].points[k].x, 1e-9);
      EXPECT_NEAR(big.strokes[i].points[k].y, 3.0 * small.strokes[i].points[k].y, 1e-9);
    }
  }
}

TEST(GenerateStrokes, ValidatesInputAndGenerator) {
  const VectorFontGenerator gen;
  EXPECT_THROW(generate_strokes("", gen, {}), std::invalid_argument);
  EXPECT_THROW(generate_strokes("a", gen, {0.0, false}), std::invalid_argument);

  struct Broken final : StrokeGenerator {
    std::string name() const override { return "broken"; }
    GeneratedLine generate(std::string_view, const StrokeStyle&) const override {
      GeneratedLine g;
      g.strokes.push_back(Stroke{{{0, 0}}});
      return g;
    }
  };
  EXPECT_THROW(generate_strokes("a", Broken{}, {}), std::logic_error);
}

TEST(VectorFont, EveryBuiltinGlyphSatisfiesTheStrokeContract) {
  const VectorFontGenerator gen;
  for (const auto& [cp, glyph] : Font::builtin().glyphs()) {
    if (cp == U' ' || cp == U'\n') continue;
    EXPECT_NO_THROW(generate_strokes(encode_utf8(cp), gen, {})) << static_cast<unsigned>(cp);
  }
}

}  // namespace
}  // namespace scribe::hostctl
