#include <gtest/gtest.h>

#include "claimforge/error.h"
#include "claimforge/lexedit/editor.h"
#include "claimforge/lexedit/tokenizer.h"
#include "expect_error.h"
#include "fixtures.h"
#include "prop.h"

namespace claimforge::lexedit {
namespace {

using P = PosCategory;

Lexicon fixture_lexicon() {
  Lexicon lx;
  lx.add_pos("the", P::kStopWord);
  lx.add_pos("he", P::kStopWord);
  lx.add_pos("earth", P::kNoun);
  lx.add_pos("home", P::kNoun);
  lx.add_pos("is", P::kVerb);
  lx.add_pos("flat", P::kAdjective);
  lx.add_pos("quickly", P::kAdverb);
  lx.add_synonyms("flat", {"level", "even"});
  lx.add_synonyms("earth", {"world"});
  lx.add_verb_form("ran", "run");
  return lx;
}


using testing::thrown_code;

TEST(Tokenize, DetachesPunctuationAndTags) {
  const auto c = tokenize("The Earth is flat.", fixture_lexicon());
  EXPECT_EQ(c.tokens(), (std::vector<std::string>{"The", "Earth", "is", "flat", "."}));
  EXPECT_EQ(c.pos(), (std::vector<P>{P::kStopWord, P::kNoun, P::kVerb, P::kAdjective, P::kOther}));
}

TEST(Tokenize, UnknownWordIsOther) {
  const auto c = tokenize("x", Lexicon{});
  EXPECT_EQ(c.tokens(), std::vector<std::string>{"x"});
  EXPECT_EQ(c.pos(), std::vector<P>{P::kOther});
}

TEST(Tokenize, BlankIsEmptyClaim) {
  EXPECT_EQ(thrown_code([] { tokenize("   ", Lexicon{}); }), ErrorCode::kEmptyClaim);
}

TEST(Tokenize, TieOrderPrefersVerb) {
  Lexicon lx;
  lx.add_pos("run", P::kStopWord);
  lx.add_pos("run", P::kNoun);
  lx.add_pos("run", P::kVerb);
  lx.add_pos("fast", P::kAdverb);
  lx.add_pos("fast", P::kAdjective);
  const auto c = tokenize("run fast", lx);
  EXPECT_EQ(c.pos(), (std::vector<P>{P::kVerb, P::kAdjective}));
}

TEST(Tokenize, VerbTableMembershipTagsVerb) {
  const auto c = tokenize("he ran", fixture_lexicon());
  EXPECT_EQ(c.pos()[1], P::kVerb);
}

TEST(Tokenize, RoundTripsThroughDetokenize) {
  testing::Gen g(5);
  const std::vector<std::string> pieces{"earth", "Flat", ".", ",", "don't", "well-known", "x", "!", "(a)"};
  for (int i = 0; i < 500; ++i) {
    std::string text;
    const int n = g.integer(1, 10);
    for (int j = 0; j < n; ++j) text += g.pick(pieces) + (g.coin() ? " " : "");
    const auto c = tokenize(text, fixture_lexicon());
    EXPECT_EQ(tokenize(detokenize(c.tokens()), fixture_lexicon()).tokens(), c.tokens()) << text;
  }
}

TEST(LegalActions, SingleTokenExcludesRemove) {
  const auto c = tokenize("flat", fixture_lexicon());
  EXPECT_EQ(legal_actions(c, fixture_lexicon()),
            (std::vector<EditAction>{{EditKind::kSwapSynonym, 0}, {EditKind::kAddSynonym, 0}}));
}

TEST(LegalActions, StopWordOnlyRemovable) {
  const auto c = tokenize("The earth", fixture_lexicon());
  std::vector<EditAction> at0;
  for (auto a : legal_actions(c, fixture_lexicon())) {
    if (a.position == 0) at0.push_back(a);
  }
  EXPECT_EQ(at0, (std::vector<EditAction>{{EditKind::kRemove, 0}}));
}

TEST(LegalActions, NothingBeyondPosition31) {
  std::string text;
  for (int i = 0; i < 40; ++i) text += "flat ";
  const auto c = tokenize(text, fixture_lexicon());
  for (auto a : legal_actions(c, fixture_lexicon())) EXPECT_LT(a.position, 32);
  EXPECT_EQ(c.size(), 40u);
}

TEST(LegalActions, GatingByCategory) {
  const auto lx = fixture_lexicon();
  const auto c = tokenize("he ran quickly home", lx);
  const auto legal = legal_actions(c, lx);
  auto has = [&](EditKind k, int p) {
    return std::find(legal.begin(), legal.end(), EditAction{k, p}) != legal.end();
  };
  EXPECT_TRUE(has(EditKind::kPresentTense, 1));
  EXPECT_FALSE(has(EditKind::kSwapSynonym, 1));  // verb without synonyms
  EXPECT_FALSE(has(EditKind::kPresentTense, 3));
  EXPECT_FALSE(has(EditKind::kSwapSynonym, 2));
  for (int p = 0; p < 4; ++p) EXPECT_TRUE(has(EditKind::kRemove, p));
}

TEST(ApplyAction, Examples) {
  const auto lx = fixture_lexicon();
  EXPECT_EQ(apply_action(tokenize("The Earth is flat", lx), {EditKind::kRemove, 0}, lx).tokens(),
            (std::vector<std::string>{"Earth", "is", "flat"}));
  EXPECT_EQ(apply_action(tokenize("Earth is flat", lx), {EditKind::kSwapSynonym, 2}, lx).tokens(),
            (std::vector<std::string>{"Earth", "is", "level"}));
  EXPECT_EQ(apply_action(tokenize("He ran home", lx), {EditKind::kPresentTense, 1}, lx).tokens(),
            (std::vector<std::string>{"He", "run", "home"}));
  EXPECT_EQ(apply_action(tokenize("Earth is flat", lx), {EditKind::kAddSynonym, 2}, lx).tokens(),
            (std::vector<std::string>{"Earth", "is", "flat", "level"}));
}

TEST(ApplyAction, RecordsHistoryAndRejectsIllegal) {
  const auto lx = fixture_lexicon();
  const auto c = apply_action(tokenize("The Earth is flat", lx), {EditKind::kRemove, 0}, lx);
  EXPECT_EQ(c.edit_history(), (std::vector<EditAction>{{EditKind::kRemove, 0}}));
  EXPECT_EQ(thrown_code([&] { apply_action(c, {EditKind::kPresentTense, 0}, lx); }),
            ErrorCode::kIllegalAction);
  EXPECT_EQ(thrown_code([&] { apply_action(tokenize("flat", lx), {EditKind::kRemove, 0}, lx); }),
            ErrorCode::kIllegalAction);
}

TEST(ActionSpace, TableExamples) {
  EXPECT_EQ(flatten_action({EditKind::kSwapSynonym, 0}), 0);
  EXPECT_EQ(flatten_action({EditKind::kAddSynonym, 1}), 33);
  EXPECT_EQ(flatten_action({EditKind::kRemove, 31}), 127);
  EXPECT_EQ(to_string(unflatten_action(96)), "remove@0");
  EXPECT_EQ(thrown_code([] { unflatten_action(128); }), ErrorCode::kOutOfRange);
  EXPECT_EQ(thrown_code([] { unflatten_action(-1); }), ErrorCode::kOutOfRange);
  EXPECT_EQ(thrown_code([] { flatten_action({EditKind::kRemove, 32}); }), ErrorCode::kOutOfRange);
}

TEST(ActionSpace, Bijection) {
  for (int i = 0; i < kActionSpaceSize; ++i) EXPECT_EQ(flatten_action(unflatten_action(i)), i);
}

TEST(ChooseSynonym, FirstStoredAndDeterministic) {
  const auto lx = fixture_lexicon();
  EXPECT_EQ(choose_synonym("flat", lx), "level");
  EXPECT_EQ(choose_synonym("FLAT", lx), choose_synonym("flat", lx));
  EXPECT_EQ(thrown_code([&] { choose_synonym("home", lx); }), ErrorCode::kNoSynonym);
}

TEST(Lexicon, DropsHeadwordAndDuplicates) {
  Lexicon lx;
  lx.add_synonyms("big", {"big", "large", "huge", "large"});
  EXPECT_EQ(lx.synonyms("big"), (std::vector<std::string>{"large", "huge"}));
}

TEST(Lexicon, SaveLoadRoundTrip) {
  testing::TempDir dir;
  const auto& lx = testing::bundled_lexicon();
  lx.save(dir.path());
  EXPECT_EQ(Lexicon::load(dir.path()), lx);
}

TEST(Lexicon, ParseErrorsCarryLine) {
  testing::TempDir dir;
  testing::write_file(dir / "synonyms.tsv", "# c\nflat\tlevel\n");
  testing::write_file(dir / "pos.tsv", "flat\tADJ\nx\tBOGUS\n");
  testing::write_file(dir / "verbs.tsv", "");
  try {
    Lexicon::load(dir.path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParseError);
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Lexicon, CaseInsensitiveLookupPreservesSurface) {
  const auto lx = fixture_lexicon();
  const auto c = apply_action(tokenize("THE Earth is FLAT", lx), {EditKind::kSwapSynonym, 3}, lx);
  EXPECT_EQ(c.tokens(), (std::vector<std::string>{"THE", "Earth", "is", "level"}));
}

// Random claims over the bundled lexicon; every legal action applies and
// changes the length as its kind dictates.
TEST(LexeditProperty, LengthAlgebraAndGating) {
  const auto& lx = testing::bundled_lexicon();
  const std::vector<std::string> vocab{"the", "earth", "is", "flat", "vaccines", "cause", "autism",
                                       "ran", "big", "home", "said", "quickly", "zzq", ".", "film"};
  testing::Gen g(17);
  for (int i = 0; i < 2000; ++i) {
    std::vector<std::string> words;
    const int n = g.integer(1, 36);
    for (int j = 0; j < n; ++j) words.push_back(g.pick(vocab));
    const auto c = from_tokens(words, lx);
    const auto legal = legal_actions(c, lx);
    for (const auto a : legal) {
      ASSERT_LT(a.position, std::min<int>(32, static_cast<int>(c.size())));
      const auto next = apply_action(c, a, lx);
      const auto expected = a.kind == EditKind::kRemove     ? c.size() - 1
                            : a.kind == EditKind::kAddSynonym ? c.size() + 1
                                                              : c.size();
      ASSERT_EQ(next.size(), expected);
      ASSERT_EQ(next, apply_action(c, a, lx));
    }
    for (int flat = 0; flat < kActionSpaceSize; ++flat) {
      const auto a = unflatten_action(flat);
      const bool listed = std::find(legal.begin(), legal.end(), a) != legal.end();
      ASSERT_EQ(is_legal(c, a, lx), listed);
    }
  }
}

}  // namespace
}  // namespace claimforge::lexedit
