#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "forge/common/errors.hpp"
#include "forge/evaluator/agreement.hpp"
#include "forge/evaluator/codebleu.hpp"
#include "forge/evaluator/doc_metrics.hpp"
#include "forge/evaluator/readability.hpp"
#include "forge/evaluator/review.hpp"
#include "forge/generator/fallback.hpp"
#include "forge/generator/wire_format.hpp"
#include "forge/planner/judge.hpp"
#include "oracles.hpp"

using namespace forge;
using namespace forge::evaluator;
using Catch::Approx;

TEST_CASE("codebleu of a source with itself is 1") {
  for (const auto& src : testing::python_fixtures()) {
    const auto r = codebleu(src, src);
    INFO(src);
    CHECK(r.composite == Approx(1.0).margin(1e-9));
    CHECK(r.token_match == 1.0);
    CHECK(r.identifier_match == 1.0);
  }
}

TEST_CASE("disjoint token streams score 0 on n-gram components") {
  const auto r = codebleu("alpha = beta\n", "gamma(delta)\n");
  CHECK(r.ngram == 0.0);
  CHECK(r.weighted_ngram == 0.0);
  CHECK(r.token_match == 0.0);
}

TEST_CASE("components match the independent oracles") {
  for (const auto& [cand, ref] : testing::codebleu_fixture_pairs()) {
    const auto r = codebleu(cand, ref);
    const auto o = testing::oracle_codebleu(cand, ref);
    INFO(cand);
    CHECK(r.ngram == Approx(o.ngram).margin(1e-9));
    CHECK(r.weighted_ngram == Approx(o.weighted).margin(1e-9));
    CHECK(r.syntax == Approx(o.syntax).margin(1e-9));
    CHECK(r.dataflow == Approx(o.dataflow).margin(1e-9));
    CHECK(r.composite == Approx(o.composite).margin(1e-9));
    CHECK(r.composite > 0.0);
    CHECK(r.composite < 1.0);
  }
}

TEST_CASE("token F1 matches the sorted-multiset oracle") {
  for (const auto& [cand, ref] : testing::codebleu_fixture_pairs()) {
    std::vector<std::string> ct, rt;
    for (const auto& t : testing::oracle_tokens(cand)) ct.push_back(t.text);
    for (const auto& t : testing::oracle_tokens(ref)) rt.push_back(t.text);
    const auto tm = token_and_identifier_match(source::tokenize(cand), source::tokenize(ref));
    CHECK(tm.token_match == Approx(testing::oracle_f1(ct, rt)).margin(1e-12));
  }
}

TEST_CASE("keyword weight 1 reproduces plain BLEU") {
  for (const auto& [cand, ref] : testing::codebleu_fixture_pairs()) {
    const auto c = source::tokenize(cand);
    const auto r = source::tokenize(ref);
    CHECK(weighted_ngram_match(c, r, 4, 1.0) == ngram_match(c, r, 4));
  }
  CHECK_THROWS_AS(weighted_ngram_match(source::tokenize("x"), source::tokenize("x"), 4, 0.5), InvalidInput);
}

TEST_CASE("BLEU edge cases") {
  const auto empty = source::tokenize("");
  const auto x = source::tokenize("x");
  CHECK(ngram_match(empty, x) == 0.0);
  CHECK(ngram_match(x, x) == 1.0);  // orders above 1 have no candidate n-grams
  // Brevity penalty: "a b" against "a b c d" has precision 1 and BP exp(1 - 4/2).
  CHECK(ngram_match(source::tokenize("a b"), source::tokenize("a b c d"), 2) == Approx(std::exp(-1.0)));
  // A longer candidate is not penalised: "a b c" vs "a b" -> p1 = 2/3, p2 = 1/2.
  CHECK(ngram_match(source::tokenize("a b c"), source::tokenize("a b"), 2) == Approx(std::sqrt(2.0 / 3.0 * 0.5)));
  // Comments and layout do not count.
  CHECK(ngram_match(source::tokenize("x = 1  # hi\n"), source::tokenize("x = 1\n")) == 1.0);
}

TEST_CASE("weighted BLEU against the brute-force oracle on random streams") {
  std::mt19937_64 rng(8);
  const std::vector<std::string> vocab{"if", "x", "y", "for", "in", "return", "(", ")", "1", "z"};
  std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
  std::uniform_int_distribution<int> len(0, 14);
  for (int i = 0; i < 300; ++i) {
    std::string a, b;
    for (int k = len(rng); k > 0; --k) a += vocab[pick(rng)] + " ";
    for (int k = len(rng); k > 0; --k) b += vocab[pick(rng)] + " ";
    const auto ca = testing::oracle_tokens(a);
    const auto cb = testing::oracle_tokens(b);
    INFO(a << " | " << b);
    CHECK(weighted_ngram_match(source::tokenize(a), source::tokenize(b), 4, 5.0) ==
          Approx(testing::oracle_bleu(ca, cb, 4, 5.0)).margin(1e-12));
    CHECK(ngram_match(source::tokenize(a), source::tokenize(b), 3) ==
          Approx(testing::oracle_bleu(ca, cb, 3, 1.0)).margin(1e-12));
  }
}

TEST_CASE("syntax match conventions") {
  std::vector<std::string> diags;
  CHECK(syntax_match(source::parse(""), source::parse(""), &diags) == 1.0);
  CHECK(syntax_match(source::parse("x = 1\n"), source::parse(""), &diags) == 0.0);
  CHECK(diags.size() == 1);
  CHECK(syntax_match(source::parse("x = 1\n"), source::parse("y = 2\n")) == 1.0);
  CHECK(syntax_match(source::parse("x = 1\n"), source::parse("y = 2\nz = f(y)\n")) < 1.0);
}

TEST_CASE("dataflow match is invariant under consistent renaming") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 50; ++i) {
    for (const auto& src : testing::python_fixtures()) {
      const auto renamed = testing::rename_identifiers(src, rng);
      const auto a = analyze(src);
      const auto b = analyze(renamed);
      REQUIRE(dataflow_match(b.dataflow, a.dataflow) == 1.0);
    }
  }
  std::vector<std::string> diags;
  CHECK(dataflow_match(analyze("x = 1\nprint(x)\n").dataflow, analyze("pass\n").dataflow, &diags) == 1.0);
  CHECK(diags.size() == 1);
}

TEST_CASE("dataflow match drops when an edge disappears") {
  const auto ref = analyze("def f(a, b):\n    c = a + b\n    return c\n");
  const auto cand = analyze("def f(a, b):\n    c = a\n    return c\n");
  CHECK(dataflow_match(cand.dataflow, ref.dataflow) == Approx(2.0 / 3.0));
}

TEST_CASE("weights are validated") {
  CodeBleuOptions o;
  o.weights = {0.5, 0.5, 0.5, 0.0};
  CHECK_THROWS_AS(codebleu("x", "x", o), InvalidInput);
  o.weights = {1.0, 0.0, 0.0, 0.0};
  CHECK(codebleu("x = 1\n", "x = 1\n", o).composite == 1.0);
  o.weights = {-0.1, 0.6, 0.25, 0.25};
  CHECK_THROWS_AS(o.weights.validate(), InvalidInput);
}

TEST_CASE("package CodeBLEU: parallel equals serial bit for bit") {
  const auto reference = generator::create_fallback_structure({"mypkg", {"Data Loader", "Plotter", "Cache"}, "x"});
  auto candidate = generator::parse_content(testing::sample_generation_reply()).tree;
  candidate.put("mypkg/cache.py", "CACHE = {}\n\ndef get(k):\n    return CACHE.get(k)\n");
  const auto par = codebleu_package(candidate, reference);
  const auto ser = codebleu_package_serial(candidate, reference);
  CHECK(par.aggregate.composite == ser.aggregate.composite);
  CHECK(par.aggregate.ngram == ser.aggregate.ngram);
  CHECK(par.aggregate.dataflow == ser.aggregate.dataflow);
  CHECK(par.diagnostics == ser.diagnostics);
  REQUIRE(par.files.size() == ser.files.size());
  for (const auto& [path, r] : par.files) CHECK(r.composite == ser.files.at(path).composite);
}

TEST_CASE("package CodeBLEU weighting and diagnostics") {
  PackageTree cand, ref;
  cand.put("a.py", "x = 1\n");           // 3 tokens, identical
  ref.put("a.py", "x = 1\n");
  ref.put("b.py", "y = 2\nz = 3\n");     // 6 tokens, missing from candidate
  cand.put("c.py", "w = 4\n");           // 3 tokens, missing from reference
  cand.put("notes.txt", "ignored");
  const auto r = codebleu_package(cand, ref);
  REQUIRE(r.files.size() == 3);
  CHECK(r.files.at("b.py").composite < 1.0);
  const double expected = (3.0 * r.files.at("a.py").composite + 6.0 * r.files.at("b.py").composite +
                           3.0 * r.files.at("c.py").composite) / 12.0;
  CHECK(r.aggregate.composite == Approx(expected).margin(1e-12));
  CHECK(r.diagnostics.size() == 2);

  const auto none = codebleu_package(PackageTree{}, PackageTree{});
  CHECK(none.aggregate.composite == 0.0);
  CHECK(none.diagnostics == std::vector<std::string>{"no Python tokens to compare"});
}

TEST_CASE("identical packages score 1") {
  const auto t = generator::create_fallback_structure({"pkg", {"A", "B"}, ""});
  CHECK(codebleu_package(t, t).aggregate.composite == Approx(1.0).margin(1e-12));
}

TEST_CASE("syllable counting") {
  CHECK(count_syllables("the") == 1);
  CHECK(count_syllables("cat") == 1);
  CHECK(count_syllables("like") == 1);
  CHECK(count_syllables("table") == 2);
  CHECK(count_syllables("little") == 2);
  CHECK(count_syllables("apples") == 2);
  CHECK(count_syllables("beautiful") == 3);
  CHECK(count_syllables("education") == 4);
  CHECK(count_syllables("why") == 1);
  CHECK(count_syllables("rhythm") == 1);
  CHECK(count_syllables("queue") == 1);
  CHECK(count_syllables("xyz") == 1);
  CHECK(count_syllables("bcd") == 1);
}

TEST_CASE("Flesch reading ease on hand-counted text") {
  struct Case {
    const char* text;
    std::size_t words, sentences, syllables;
    double score;
  };
  const std::vector<Case> cases{
      {"The cat sat.", 3, 1, 3, 119.19},
      {"I like apples.", 3, 1, 4, 90.99},
      {"Dogs run. Cats sleep.", 4, 2, 4, 120.205},
      {"The table is stable.", 4, 1, 6, 75.875},
      {"Beautiful weather today!", 3, 1, 7, 6.39},
      {"Why? Yes.", 2, 2, 2, 121.22},
      {"Code is fun to write.", 5, 1, 5, 117.16},
      {"Education matters.", 2, 1, 6, -48.995},
      {"The quick brown fox jumps over the lazy dog.", 9, 1, 11, 94.3},
      {"Hello, world! It's 42 degrees.", 4, 2, 6, 77.905},
  };
  for (const auto& c : cases) {
    INFO(c.text);
    const auto f = flesch_counts(c.text);
    CHECK(f.words == c.words);
    CHECK(f.sentences == c.sentences);
    CHECK(f.syllables == c.syllables);
    CHECK(f.score == Approx(c.score).margin(1e-9));
  }
  const auto none = flesch_counts("42 ... !!");
  CHECK(none.score == 0.0);
  CHECK(none.diagnostic.has_value());
  CHECK(flesch_counts("no terminator here").sentences == 1);
}

TEST_CASE("term vectors and cosine") {
  const auto tf = term_frequencies("The loader loads data.\n```\nignored_code = 1\n```\nData, data!");
  CHECK(tf.at("data") == 3.0);
  CHECK(tf.at("loader") == 1.0);
  CHECK_FALSE(tf.contains("the"));
  CHECK_FALSE(tf.contains("ignored"));
  CHECK(cosine({}, {}) == 1.0);
  CHECK(cosine({{"a", 1}}, {}) == 0.0);
  CHECK(cosine({{"a", 1}, {"b", 1}}, {{"a", 2}, {"b", 2}}) == Approx(1.0));
  CHECK(cosine({{"a", 1}}, {{"b", 1}}) == 0.0);
  CHECK(cosine({{"a", 3}, {"b", 4}}, {{"a", 1}}) == Approx(0.6));
  CHECK(strip_fenced_code("a\n```\nb\n```\nc\n") == "a\nc\n");
  CHECK(is_stopword("the"));
  CHECK_FALSE(is_stopword("loader"));
}

TEST_CASE("documentation metrics") {
  documenter::DocBundle doc;
  doc.source_package = "p";
  doc.sections = {{"A", "The cat sat."}, {"B", "The cat sat."}, {"C", "```\ncode only\n```"}};
  const auto m = doc_metrics(doc);
  REQUIRE(m.coherence.size() == 2);
  CHECK(m.coherence[0].score == Approx(1.0));
  CHECK(m.coherence[1].score == 0.0);
  CHECK(m.consistency == 1.0);  // the code-only section has no words
  CHECK(m.flesch == Approx(206.835 - 1.015 * 3.0 - 84.6));
  CHECK(m.mean_coherence == Approx(0.5));

  documenter::DocBundle mixed;
  mixed.sections = {{"A", "The cat sat."}, {"B", "Education matters."}};
  const auto mm = doc_metrics(mixed);
  const double mean = (119.19 + -48.995) / 2.0;
  const double sd = std::abs(119.19 - -48.995) / 2.0;
  CHECK(mm.consistency == Approx(1.0 - std::min(1.0, sd / std::abs(mean))));
}

TEST_CASE("agreement statistics") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> y{2, 4, 6, 8, 10};
  const auto a = agreement(x, y);
  CHECK(*a.pearson_r == Approx(1.0));
  CHECK(*a.spearman_rho == Approx(1.0));
  CHECK(*pearson(x, {5, 4, 3, 2, 1}) == Approx(-1.0));
  CHECK_FALSE(pearson(x, {3, 3, 3, 3, 3}).has_value());
  CHECK(fractional_ranks({10, 20, 20, 30}) == std::vector<double>{1, 2.5, 2.5, 4});
  CHECK(score_bin(7.5) == 8);
  CHECK(score_bin(7.49) == 7);
  CHECK(score_bin(-3) == 0);
  CHECK(score_bin(12) == 10);

  // Two raters over bins: po = 3/4; pe = (2*1 + 2*3)/16 = 1/2; kappa = 0.5.
  const auto k = agreement({1, 1, 2, 2}, {1, 2, 2, 2});
  CHECK(*k.cohen_kappa == Approx(0.5));
  const auto same = agreement({5, 5, 5}, {5, 5, 5});
  CHECK_FALSE(same.cohen_kappa.has_value());
  CHECK_FALSE(same.diagnostics.empty());

  CHECK_THROWS_AS(agreement({1}, {1}), InvalidInput);
  CHECK_THROWS_AS(agreement({1, 2}, {1}), InvalidInput);
  CHECK_THROWS_AS(agreement({1, NAN}, {1, 2}), InvalidInput);
}

TEST_CASE("model review parses rubric scores") {
  CHECK(rubric_criteria(Rubric::package) ==
        std::vector<std::string>{"Structure", "Code Quality", "Testing", "Usability"});
  CHECK(rubric_from_string("documentation") == Rubric::documentation);
  CHECK_THROWS_AS(rubric_from_string("poetry"), InvalidInput);

  auto m = testing::scripted_model(testing::pipeline_script());
  const auto prompts = PromptLibrary::from_default_location();
  const auto r = model_review(m.access(), prompts, Rubric::package, "def f(): pass");
  CHECK(r.score("Testing") == 6.0);
  CHECK(r.mean() == Approx((8 + 7 + 6 + 8) / 4.0));
  CHECK(r.reviewer_model == "scripted-model");
  CHECK_THROWS_AS(model_review(m.access(), prompts, Rubric::package, ""), InvalidInput);

  auto bad = testing::scripted_model(gateway::ScriptedBehavior{{"no scores"}, {}, {}, {}, {}, {}});
  CHECK_THROWS_AS(model_review(bad.access(), prompts, Rubric::enhancement, "text", 1), planner::MalformedJudgeOutput);
  CHECK(bad.provider->calls() == 2);
}
