#include "xstring/xml.hpp"

#include "support/fixtures.hpp"
#include "support/random_document.hpp"

#include <gtest/gtest.h>

using namespace xstring;

namespace {

Rule first_rule(const std::string& text) {
  auto report = check_well_formed(text);
  EXPECT_FALSE(report.ok()) << text;
  return report.ok() ? Rule::Syntax : report.violations.front().rule;
}

} // namespace

TEST(XmlParse, EnvironmentFixture) {
  XmlDocument doc = strip_insignificant_whitespace(parse_xml(read_fixture("environment.xml")));
  EXPECT_EQ(doc.root.name, "ENVIRONMENT");
  ASSERT_EQ(doc.root.children.size(), 4u);
  EXPECT_EQ(doc.root.children[0].name, "TERM");
  ASSERT_EQ(doc.root.children[0].children.size(), 1u);
  EXPECT_EQ(doc.root.children[0].children[0].content, "ANSI");
  EXPECT_EQ(doc.root.children[3].children[0].content, "jdoe");
}

TEST(XmlParse, AttributesKeepOrderAndValues) {
  XmlDocument doc = parse_xml(R"(<REC FNAME="John" LNAME='Doe' FLAG/>)");
  ASSERT_EQ(doc.root.attributes.size(), 3u);
  EXPECT_EQ(doc.root.attributes[0], (Attribute{"FNAME", "John"}));
  EXPECT_EQ(doc.root.attributes[1], (Attribute{"LNAME", "Doe"}));
  EXPECT_EQ(doc.root.attributes[2], (Attribute{"FLAG", std::nullopt}));
}

TEST(XmlParse, Prolog) {
  XmlDocument doc = parse_xml(R"(<?xml version="1.0"?><!DOCTYPE A><!--c--><A/><?tail x?>)");
  ASSERT_TRUE(doc.declaration);
  EXPECT_EQ(doc.declaration->name, "xml");
  EXPECT_EQ(doc.declaration->content, R"( version="1.0")");
  ASSERT_EQ(doc.before_root.size(), 2u);
  EXPECT_EQ(doc.before_root[0].kind, NodeKind::DtdElement);
  EXPECT_EQ(doc.before_root[0].content, "DOCTYPE A");
  EXPECT_EQ(doc.before_root[1].kind, NodeKind::Comment);
  ASSERT_EQ(doc.after_root.size(), 1u);
  EXPECT_EQ(doc.after_root[0].name, "tail");
  EXPECT_EQ(doc.after_root[0].content, " x");
}

TEST(XmlParse, AllNodeKinds) {
  XmlDocument doc = parse_xml("<A><?p d?><!--c--><![CDATA[<x>&]]><!ELEMENT A ANY>t<B/></A>");
  ASSERT_EQ(doc.root.children.size(), 6u);
  EXPECT_EQ(doc.root.children[0].kind, NodeKind::ProcessingInstruction);
  EXPECT_EQ(doc.root.children[1].kind, NodeKind::Comment);
  EXPECT_EQ(doc.root.children[2].kind, NodeKind::CData);
  EXPECT_EQ(doc.root.children[2].content, "<x>&");
  EXPECT_EQ(doc.root.children[3].kind, NodeKind::DtdElement);
  EXPECT_EQ(doc.root.children[4].kind, NodeKind::Text);
  EXPECT_TRUE(doc.root.children[5].is_element());
}

TEST(XmlParse, ReferencesAreKeptVerbatim) {
  XmlDocument doc = parse_xml("<A>&amp;&#47;&#x2f;&lt;</A>");
  EXPECT_EQ(doc.root.children[0].content, "&amp;&#47;&#x2f;&lt;");
}

TEST(XmlSerialize, FlatAndStable) {
  std::string flat = "<EMP><REC FNAME=\"John\" LNAME=\"Doe\"/><REC FNAME=\"Jane\" LNAME=\"Doh\"/></EMP>";
  XmlDocument doc = strip_insignificant_whitespace(parse_xml(read_fixture("emp_rec.xml")));
  EXPECT_EQ(serialize_xml(doc), flat);
  EXPECT_EQ(serialize_xml(parse_xml(flat)), flat);
}

TEST(XmlSerialize, EscapesStrayMarkupInModelValues) {
  XmlNode n = XmlNode::element("A", {{"v", "a<b & \"c\""}}, {XmlNode::text("x<y & z")});
  EXPECT_EQ(serialize_xml(n), "<A v='a&lt;b &amp; \"c\"'>x&lt;y &amp; z</A>");
}

TEST(XmlSerialize, PicksQuoteThatAvoidsEscaping) {
  XmlNode n = XmlNode::element("A", {{"v", "say \"hi\""}, {"w", "it's"}});
  EXPECT_EQ(serialize_xml(n), R"(<A v='say "hi"' w="it's"/>)");
}

TEST(XmlCompare, WhitespaceInsignificantByDefault) {
  XmlDocument pretty = parse_xml(read_fixture("emp_row.xml"));
  XmlDocument flat = parse_xml(serialize_xml(strip_insignificant_whitespace(pretty)));
  EXPECT_TRUE(structural_equal(pretty, flat));
  EXPECT_FALSE(structural_equal(pretty, flat, {.whitespace_significant = true}));
}

TEST(XmlCompare, DetectsDifferences) {
  auto a = parse_xml("<A x='1'><B/>t</A>");
  EXPECT_FALSE(structural_equal(a, parse_xml("<A x='2'><B/>t</A>")));
  EXPECT_FALSE(structural_equal(a, parse_xml("<A><B/>t</A>")));
  EXPECT_FALSE(structural_equal(a, parse_xml("<A x='1'><C/>t</A>")));
  EXPECT_FALSE(structural_equal(a, parse_xml("<A x='1'><B/>u</A>")));
  EXPECT_FALSE(structural_equal(a, parse_xml("<A x='1'><B>t</B></A>")));
  EXPECT_FALSE(structural_equal(a, parse_xml("<?xml version='1.0'?><A x='1'><B/>t</A>")));
  EXPECT_TRUE(structural_equal(a, parse_xml("<A x='1'>\n  <B/>t</A>")));
}

TEST(XmlPreorder, VisitsDocumentOrder) {
  std::string order;
  for_each_preorder(parse_xml("<?xml version='1.0'?><A><B><C/></B><D/></A><!--z-->"), [&](const XmlNode& n) {
    order += n.is_element() ? n.name : (n.kind == NodeKind::Comment ? "#" : "?");
  });
  EXPECT_EQ(order, "?ABCD#");
}

TEST(WellFormedness, RuleFixtures) {
  const std::pair<const char*, Rule> cases[] = {
      {"rule1_multiple_roots.xml", Rule::UniqueRoot},
      {"rule2_unclosed.xml", Rule::MatchedTags},
      {"rule3_late_declaration.xml", Rule::DeclarationAtStart},
      {"rule4_overlap.xml", Rule::NoOverlap},
      {"rule5_end_tag_attribute.xml", Rule::AttributesOnOpenTags},
      {"rule6_unquoted_value.xml", Rule::SingleQuotedValue},
      {"rule7_bad_name.xml", Rule::NamingConventions},
      {"rule8_bad_reference.xml", Rule::Entities},
  };
  for (const auto& [file, rule] : cases) {
    std::string text = read_fixture(std::string("wf/") + file);
    EXPECT_EQ(first_rule(text), rule) << file;
    try {
      parse_xml(text);
      ADD_FAILURE() << file << " parsed";
    } catch (const XmlError& e) {
      EXPECT_EQ(e.rule(), rule) << file;
    }
  }
}

TEST(WellFormedness, MoreRuleCases) {
  EXPECT_EQ(first_rule(""), Rule::UniqueRoot);
  EXPECT_EQ(first_rule("text<A/>"), Rule::UniqueRoot);
  EXPECT_EQ(first_rule("<A/>text"), Rule::UniqueRoot);
  EXPECT_EQ(first_rule("<A></B>"), Rule::MatchedTags);
  EXPECT_EQ(first_rule(" <?xml version='1.0'?><A/>"), Rule::DeclarationAtStart);
  EXPECT_EQ(first_rule("<A x='1' x='2'/>"), Rule::SingleQuotedValue);
  EXPECT_EQ(first_rule("<A x=\"1\"\"2\"/>"), Rule::SingleQuotedValue);
  EXPECT_EQ(first_rule("<-A/>"), Rule::NamingConventions);
  EXPECT_EQ(first_rule("<A x=\"a<b\"/>"), Rule::Entities);
  EXPECT_EQ(first_rule("<A>&#;</A>"), Rule::Entities);
}

TEST(WellFormedness, DiagnosticFormat) {
  try {
    parse_xml(read_fixture("wf/rule4_overlap.xml"));
    FAIL();
  } catch (const XmlError& e) {
    EXPECT_EQ(std::string(e.what()), "wellformedness: rule 4 at offset 6 (end tag 'A' overlaps open element 'B')");
  }
  auto report = check_well_formed("<A");
  ASSERT_EQ(report.violations.size(), 1u);
  EXPECT_EQ(report.violations[0].rule, Rule::Syntax);
}

TEST(WellFormedness, ValidFixturesPass) {
  for (const char* f : {"environment.xml", "emp_row.xml", "emp_col.xml", "emp_rec.xml", "tag_enclosing.xml",
                        "tag_closed_early.xml", "root_sibling.xml", "substitution.xml", "xhtml_example.xml",
                        "xhtml_another.xml", "xhtml_too_far.xml", "xhtml_prefolded.xml", "mixed_kinds.xml"}) {
    auto report = check_well_formed(read_fixture(f));
    EXPECT_TRUE(report.ok()) << f << ": " << (report.ok() ? "" : report.violations[0].message);
  }
}

TEST(WellFormedness, ValuelessAttributeAccepted) { EXPECT_TRUE(check_well_formed("<A NAME/>").ok()); }

TEST(XmlProperty, GeneratedDocumentsReparse) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    XmlDocument doc = gen::DocumentGenerator(seed).document();
    std::string text = serialize_xml(doc);
    ASSERT_TRUE(check_well_formed(text).ok()) << text;
    EXPECT_TRUE(structural_equal(parse_xml(text), doc, {.whitespace_significant = true})) << text;
  }
}
