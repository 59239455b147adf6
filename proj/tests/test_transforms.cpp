#include "xstring/transforms.hpp"

#include "support/fixtures.hpp"
#include "support/random_document.hpp"

#include <gtest/gtest.h>

using namespace xstring;

namespace {

XsDocument xs(std::string_view text) { return tokenize(text, EscapeMode::Entity); }

XmlDocument fixture_doc(const std::string& name) {
  return strip_insignificant_whitespace(parse_xml(read_fixture(name)));
}

SubstitutionErrorKind subst_error(auto&& fn) {
  try {
    fn();
  } catch (const SubstitutionError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no substitution error";
  return SubstitutionErrorKind::AlreadySubstituted;
}

const char* const kCorpus[] = {"environment.xml", "emp_row.xml",      "emp_col.xml",   "emp_rec.xml",
                               "tag_enclosing.xml", "tag_closed_early.xml", "root_sibling.xml",
                               "substitution.xml", "xhtml_example.xml", "mixed_kinds.xml"};

} // namespace

TEST(ToChildDepth, EmpRevised) {
  EXPECT_EQ(render(to_child_depth(xs("/EMP/ROW/FNAME'John|LNAME'Doh|ROW/FNAME'Jane|LNAME'Doh"))),
            "/EMP+10/ROW+4/FNAME+1'John/LNAME+1'Doh/ROW+4/FNAME+1'Jane/LNAME+1'Doh");
}

TEST(ToChildDepth, Environment) {
  EXPECT_EQ(render(to_child_depth(xs("/ENVIRONMENT/TERM'ANSI|CURRENCY'DOLLAR"))),
            "/ENVIRONMENT+4/TERM+1'ANSI/CURRENCY+1'DOLLAR");
}

TEST(ToChildDepth, Trivial) { EXPECT_EQ(render(to_child_depth(xs("/X"))), "/X+0"); }

TEST(ToChildDepth, Idempotent) {
  XsDocument once = to_child_depth(xs("/EMP/COL/FNAME'John|FNAME'Jane|COL/LNAME'Doe|LNAME'Doh"));
  EXPECT_EQ(to_child_depth(once), once);
}

TEST(ToChildDepth, PropagatesDecodeErrors) {
  EXPECT_THROW(to_child_depth(xs("/A/B+2'x|C")), DecodeError);
}

TEST(ToChildDepthProperty, Corpus) {
  for (const char* f : kCorpus) {
    XmlDocument doc = fixture_doc(f);
    XsDocument in = encode(doc);
    XsDocument out = to_child_depth(in);
    for (const auto& t : out.tokens) {
      EXPECT_NE(t.kind, PrefixKind::Sibling) << f;
      if (t.kind == PrefixKind::Child)
        EXPECT_TRUE(t.depth.has_value()) << f;
    }
    EXPECT_TRUE(structural_equal(decode(out), doc)) << f;
    EXPECT_EQ(to_child_depth(out), out) << f;
  }
}

TEST(ToChildDepthProperty, Generated) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    XmlDocument doc = gen::DocumentGenerator(seed).document();
    XsDocument out = to_child_depth(encode(doc));
    ASSERT_TRUE(structural_equal(decode(out), doc)) << seed;
    ASSERT_EQ(to_child_depth(out), out) << seed;
    for (const auto& t : out.tokens)
      ASSERT_NE(t.kind, PrefixKind::Sibling);
  }
}

TEST(AttrsToElements, EmpRecords) {
  XsDocument out = attrs_to_elements(xs("/EMP/REC@FNAME=John@LNAME=Doe|REC@FNAME=Jane@LNAME=Doh"));
  EXPECT_TRUE(structural_equal(decode(out), decode(xs("/EMP/REC/FNAME'John|LNAME'Doe|REC/FNAME'Jane|LNAME'Doh"))));
  EXPECT_EQ(serialize_xml(decode(out)),
            "<EMP><REC><FNAME>John</FNAME><LNAME>Doe</LNAME></REC><REC><FNAME>Jane</FNAME><LNAME>Doh</LNAME></REC></EMP>");
}

TEST(AttrsToElements, ValuelessBecomesEmptyChild) {
  EXPECT_TRUE(structural_equal(decode(attrs_to_elements(xs("/X@NAME"))), parse_xml("<X><NAME/></X>")));
}

TEST(AttrsToElements, InsertedBeforeExistingChildren) {
  EXPECT_EQ(serialize_xml(decode(attrs_to_elements(xs("/A@b=1/C'x")))), "<A><b>1</b><C>x</C></A>");
}

TEST(AttrsToElements, NoAttributesUnchanged) {
  XmlDocument doc = fixture_doc("environment.xml");
  EXPECT_TRUE(structural_equal(decode(attrs_to_elements(encode(doc))), doc));
}

TEST(AttrsToElementsProperty, NoAttributeTokensRemain) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    XsDocument out = attrs_to_elements(encode(gen::DocumentGenerator(seed).document()));
    for (const auto& t : out.tokens) {
      ASSERT_NE(t.kind, PrefixKind::AttrName) << seed;
      ASSERT_NE(t.kind, PrefixKind::AttrValue) << seed;
    }
    XmlDocument d = decode(out);
    ASSERT_TRUE(check_well_formed(serialize_xml(d)).ok()) << seed;
  }
}

TEST(Substitution, LongRepeatedName) {
  XsDocument in = xs("/XML/AVERYLONGTAGNAME'child1|AVERYLONGTAGNAME'child2");
  auto [table, out] = build_substitution(in, 8);
  EXPECT_EQ(table.entries, std::vector<std::string>{"AVERYLONGTAGNAME"});
  EXPECT_EQ(render(out), "/XML/AVERYLONGTAGNAME#0'child1|0'child2");
  EXPECT_EQ(expand_substitution(table, out), in);
  EXPECT_EQ(table_from_binders(out), table);
  EXPECT_EQ(expand_substitution(xs(render(out))), in);
}

TEST(Substitution, UniqueNamesUnchanged) {
  XsDocument in = xs("/ENVIRONMENT/TERM'ANSI|CURRENCY'DOLLAR");
  auto [table, out] = build_substitution(in, 3);
  EXPECT_TRUE(table.empty());
  EXPECT_EQ(out, in);
}

TEST(Substitution, BelowThresholdUnchanged) {
  XsDocument in = xs("/XML/AVERYLONGTAGNAME'a|AVERYLONGTAGNAME'b");
  EXPECT_TRUE(build_substitution(in, 17).first.empty());
}

TEST(Substitution, AttributeNamesToo) {
  auto [table, out] = build_substitution(xs("/EMP/REC@FNAME=John|REC@FNAME=Jane"), 3);
  EXPECT_EQ(render(out), "/EMP/REC#0@FNAME#1=John|0@1=Jane");
  EXPECT_EQ(table.entries, (std::vector<std::string>{"REC", "FNAME"}));
}

TEST(Substitution, Errors) {
  XsDocument numeric;
  numeric.tokens = {make_token(PrefixKind::Child, "A"), make_token(PrefixKind::Child, "42")};
  EXPECT_EQ(subst_error([&] { build_substitution(numeric, 3); }), SubstitutionErrorKind::NumericNameClash);
  SubstitutionTable one{{"NAME"}};
  EXPECT_EQ(subst_error([&] { expand_substitution(one, xs("/A/5")); }), SubstitutionErrorKind::UnknownKey);
  EXPECT_EQ(subst_error([] { expand_substitution(xs("/A/0")); }), SubstitutionErrorKind::UnknownKey);
  EXPECT_EQ(subst_error([] { build_substitution(xs("/AAAA#0/0"), 3); }), SubstitutionErrorKind::AlreadySubstituted);
}

TEST(Substitution, EmptyTableIsIdentity) {
  XsDocument in = xs("/A/B'x|C");
  EXPECT_EQ(expand_substitution(SubstitutionTable{}, in), in);
}

TEST(Substitution, ErrorMessage) {
  try {
    expand_substitution(SubstitutionTable{{"NAME"}}, xs("/A/5"));
    FAIL();
  } catch (const SubstitutionError& e) {
    EXPECT_EQ(std::string(e.what()), "subst: unknown key #5");
  }
}

TEST(SubstitutionProperty, RoundTripAndNeverLonger) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    gen::DocumentGenerator generator(seed, {.name_pool = 4});
    XmlDocument doc = generator.document();
    for (auto esc : {EscapeMode::Entity, EscapeMode::Sentinel}) {
      XsDocument in = encode(doc, {.escaping = esc});
      for (std::size_t threshold : {3u, 5u, 10u}) {
        auto [table, out] = build_substitution(in, threshold);
        ASSERT_LE(render(out).size(), render(in).size()) << seed;
        ASSERT_EQ(expand_substitution(table, out), in) << seed;
        XsDocument reparsed = tokenize(render(out), esc);
        ASSERT_EQ(reparsed, out) << seed;
        ASSERT_EQ(expand_substitution(reparsed), in) << seed;
        ASSERT_TRUE(structural_equal(decode(out), doc)) << seed;
      }
    }
  }
}
