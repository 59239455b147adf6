#pragma once

/// \file
/// Size accounting for XML versus XString, and the per-construct size
/// formulas (XML size, XString size) for payload length n:
///
///   NestedTag  2n+5   n+1      CommentTag  n+7    n+1
///   EmptyTag   n+3    n+1      CDataTag    n+12   n+1
///   PiTag      n+4    n+1      Text        n      n+1
///   DtdElement n+3    n+1      TextDual    n      n+2
///   Attribute  m+n+3  m+n+2

#include "xstring/binary.hpp"
#include "xstring/codec.hpp"
#include "xstring/error.hpp"
#include "xstring/grammar.hpp"
#include "xstring/substitution.hpp"
#include "xstring/text.hpp"
#include "xstring/xml.hpp"

#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace xstring {

enum class ConstructKind { NestedTag, EmptyTag, PiTag, DtdElement, CommentTag, CDataTag, Text, TextDual, Attribute };

inline constexpr ConstructKind kAllConstructs[] = {
    ConstructKind::NestedTag,  ConstructKind::EmptyTag, ConstructKind::PiTag,
    ConstructKind::DtdElement, ConstructKind::CommentTag, ConstructKind::CDataTag,
    ConstructKind::Text,       ConstructKind::TextDual, ConstructKind::Attribute};

inline const char* to_string(ConstructKind kind) {
  switch (kind) {
  case ConstructKind::NestedTag: return "nested_tag";
  case ConstructKind::EmptyTag: return "empty_tag";
  case ConstructKind::PiTag: return "pi_tag";
  case ConstructKind::DtdElement: return "dtd_element";
  case ConstructKind::CommentTag: return "comment_tag";
  case ConstructKind::CDataTag: return "cdata_tag";
  case ConstructKind::Text: return "text";
  case ConstructKind::TextDual: return "text_dual";
  case ConstructKind::Attribute: return "attribute";
  }
  return "unknown";
}

struct SizePair {
  std::size_t xml = 0;
  std::size_t xs = 0;

  friend bool operator==(const SizePair&, const SizePair&) = default;
};

/// `m` is the second length of an Attribute (name and value lengths are
/// interchangeable in the formula) and must be absent otherwise.
inline SizePair predict_size(ConstructKind kind, std::size_t n, std::optional<std::size_t> m = {}) {
  if (n < 1)
    throw MetricsError("payload length must be at least 1");
  if ((kind == ConstructKind::Attribute) != m.has_value())
    throw MetricsError(kind == ConstructKind::Attribute ? "attribute needs a second length"
                                                        : "second length only applies to attributes");
  switch (kind) {
  case ConstructKind::NestedTag: return {2 * n + 5, n + 1};
  case ConstructKind::EmptyTag: return {n + 3, n + 1};
  case ConstructKind::PiTag: return {n + 4, n + 1};
  case ConstructKind::DtdElement: return {n + 3, n + 1};
  case ConstructKind::CommentTag: return {n + 7, n + 1};
  case ConstructKind::CDataTag: return {n + 12, n + 1};
  case ConstructKind::Text: return {n, n + 1};
  case ConstructKind::TextDual: return {n, n + 2};
  case ConstructKind::Attribute: return {*m + n + 3, *m + n + 2};
  }
  return {};
}

struct ConstructSize {
  std::size_t count = 0;
  std::size_t xml_chars = 0;
  std::size_t xs_chars = 0;

  friend bool operator==(const ConstructSize&, const ConstructSize&) = default;
};

/// All character counts are Unicode code points.
struct SizeReport {
  /// Flat serialization of the parsed document (no indentation).
  std::size_t xml_chars = 0;
  /// The input text exactly as given.
  std::size_t xml_raw_chars = 0;
  std::size_t xs_chars = 0;
  std::optional<std::size_t> xsb_bytes;
  double ratio = 0;
  std::map<ConstructKind, ConstructSize> per_construct;

  std::size_t xml_construct_total() const {
    std::size_t s = 0;
    for (const auto& [k, v] : per_construct)
      s += v.xml_chars;
    return s;
  }
  std::size_t xs_construct_total() const {
    std::size_t s = 0;
    for (const auto& [k, v] : per_construct)
      s += v.xs_chars;
    return s;
  }
  /// Attribute separators in XML; depth markers and key digits in the XString.
  std::size_t xml_overhead() const { return xml_chars - xml_construct_total(); }
  std::size_t xs_overhead() const { return xs_chars - xs_construct_total(); }
};

namespace detail {

inline std::size_t xs_cost(XsToken t, EscapeMode mode) {
  t.depth.reset();
  t.subst_key.reset();
  return text::utf8_length(render_token(t, mode));
}

inline std::size_t attribute_xml_cost(const Attribute& a) {
  XmlNode probe = XmlNode::element("", {a});
  // "< " + attribute + "/>"
  return text::utf8_length(serialize_xml(probe)) - 4;
}

class Attributor {
public:
  Attributor(const XsDocument& xs, SizeReport& report) : xs_(xs), report_(report) {}

  void node(const XmlNode& n) {
    const XsToken& t = next_node_token();
    ConstructKind kind = construct_of(n, t);
    std::size_t xml = 0;
    switch (n.kind) {
    case NodeKind::Element:
      xml = text::utf8_length(n.name) * (n.children.empty() ? 1 : 2) + (n.children.empty() ? 3 : 5);
      break;
    case NodeKind::Text: {
      std::string out;
      escape_stray(out, n.content, false, 0);
      xml = text::utf8_length(out);
      break;
    }
    case NodeKind::Comment: xml = text::utf8_length(n.content) + 7; break;
    case NodeKind::ProcessingInstruction: xml = text::utf8_length(n.name) + text::utf8_length(n.content) + 4; break;
    case NodeKind::CData: xml = text::utf8_length(n.content) + 12; break;
    case NodeKind::DtdElement: xml = text::utf8_length(n.content) + 3; break;
    }
    add(kind, xml, xs_cost(t, xs_.escaping));
    for (const auto& a : n.attributes) {
      std::size_t xs = xs_cost(expect(PrefixKind::AttrName), xs_.escaping);
      if (pos_ < xs_.tokens.size() && xs_.tokens[pos_].kind == PrefixKind::AttrValue)
        xs += xs_cost(xs_.tokens[pos_++], xs_.escaping);
      add(ConstructKind::Attribute, attribute_xml_cost(a), xs);
    }
    for (const auto& c : n.children)
      node(c);
  }

private:
  const XsToken& next_node_token() {
    while (pos_ < xs_.tokens.size() && (xs_.tokens[pos_].kind == PrefixKind::AttrName ||
                                        xs_.tokens[pos_].kind == PrefixKind::AttrValue))
      ++pos_;
    if (pos_ >= xs_.tokens.size())
      throw MetricsError("mismatch: XString has fewer nodes than the XML");
    return xs_.tokens[pos_++];
  }

  const XsToken& expect(PrefixKind kind) {
    if (pos_ >= xs_.tokens.size() || xs_.tokens[pos_].kind != kind)
      throw MetricsError("mismatch: attribute tokens out of step");
    return xs_.tokens[pos_++];
  }

  static ConstructKind construct_of(const XmlNode& n, const XsToken& t) {
    switch (n.kind) {
    case NodeKind::Element: return n.children.empty() ? ConstructKind::EmptyTag : ConstructKind::NestedTag;
    case NodeKind::Text: return t.kind == PrefixKind::TextDual ? ConstructKind::TextDual : ConstructKind::Text;
    case NodeKind::Comment: return ConstructKind::CommentTag;
    case NodeKind::ProcessingInstruction: return ConstructKind::PiTag;
    case NodeKind::CData: return ConstructKind::CDataTag;
    case NodeKind::DtdElement: return ConstructKind::DtdElement;
    }
    return ConstructKind::Text;
  }

  void add(ConstructKind kind, std::size_t xml, std::size_t xs) {
    auto& slot = report_.per_construct[kind];
    ++slot.count;
    slot.xml_chars += xml;
    slot.xs_chars += xs;
  }

  const XsDocument& xs_;
  SizeReport& report_;
  std::size_t pos_ = 0;
};

} // namespace detail

/// Compares `xml_text` with an XString of the same document. Throws
/// MetricsError when `xs_doc` does not decode to the parsed XML.
inline SizeReport measure(std::string_view xml_text, const XsDocument& xs_doc) {
  XmlDocument parsed = parse_xml(xml_text);
  XmlDocument stripped = strip_insignificant_whitespace(parsed);
  XmlDocument decoded = decode(expand_substitution(xs_doc));
  const CompareOptions exact{true};
  const XmlDocument* basis = nullptr;
  if (structural_equal(decoded, stripped, exact))
    basis = &stripped;
  else if (structural_equal(decoded, parsed, exact))
    basis = &parsed;
  else
    throw MetricsError("mismatch: XString does not decode to the XML document");

  SizeReport report;
  report.xml_raw_chars = text::utf8_length(xml_text);
  report.xml_chars = text::utf8_length(serialize_xml(*basis));
  report.xs_chars = text::utf8_length(render(xs_doc));
  report.xsb_bytes = pack(xs_doc).size();
  report.ratio = report.xml_chars ? static_cast<double>(report.xs_chars) / static_cast<double>(report.xml_chars) : 0;

  detail::Attributor attr(xs_doc, report);
  if (basis->declaration)
    attr.node(*basis->declaration);
  for (const auto& n : basis->before_root)
    attr.node(n);
  attr.node(basis->root);
  for (const auto& n : basis->after_root)
    attr.node(n);
  return report;
}

/// A chain of `depth` nested elements, each named with `n` characters.
inline XmlDocument deep_chain(std::size_t n, std::size_t depth) {
  XmlDocument doc;
  doc.root = XmlNode::element(std::string(n, 'N'));
  XmlNode* tip = &doc.root;
  for (std::size_t i = 1; i < depth; ++i) {
    tip->children.push_back(XmlNode::element(std::string(n, 'N')));
    tip = &tip->children.back();
  }
  return doc;
}

/// Measured XString/XML ratio of deep_chain(n, depth).
inline double asymptote_check(std::size_t n, std::size_t depth) {
  if (n < 1 || depth < 1)
    throw MetricsError("name length and depth must be at least 1");
  XmlDocument doc = deep_chain(n, depth);
  return measure(serialize_xml(doc), encode(doc)).ratio;
}

inline std::string format_ratio(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", r);
  return buf;
}

/// One `key=value` per line.
inline std::string format_kv(const SizeReport& r) {
  std::ostringstream out;
  out << "xml_chars=" << r.xml_chars << '\n'
      << "xml_raw_chars=" << r.xml_raw_chars << '\n'
      << "xs_chars=" << r.xs_chars << '\n';
  if (r.xsb_bytes)
    out << "xsb_bytes=" << *r.xsb_bytes << '\n';
  out << "ratio=" << format_ratio(r.ratio) << '\n';
  for (const auto& [kind, s] : r.per_construct) {
    out << to_string(kind) << ".count=" << s.count << '\n'
        << to_string(kind) << ".xml_chars=" << s.xml_chars << '\n'
        << to_string(kind) << ".xs_chars=" << s.xs_chars << '\n';
  }
  out << "overhead.xml_chars=" << r.xml_overhead() << '\n'
      << "overhead.xs_chars=" << r.xs_overhead() << '\n';
  return out.str();
}

inline std::string format_table(const SizeReport& r) {
  std::ostringstream out;
  char line[96];
  std::snprintf(line, sizeof line, "%-12s %6s %9s %9s\n", "construct", "count", "xml", "xstring");
  out << line;
  for (const auto& [kind, s] : r.per_construct) {
    std::snprintf(line, sizeof line, "%-12s %6zu %9zu %9zu\n", to_string(kind), s.count, s.xml_chars, s.xs_chars);
    out << line;
  }
  std::snprintf(line, sizeof line, "%-12s %6s %9zu %9zu\n", "overhead", "", r.xml_overhead(), r.xs_overhead());
  out << line;
  std::snprintf(line, sizeof line, "%-12s %6s %9zu %9zu\n", "total", "", r.xml_chars, r.xs_chars);
  out << line;
  if (r.xsb_bytes) {
    std::snprintf(line, sizeof line, "%-12s %6s %9s %9zu\n", "xsb bytes", "", "", *r.xsb_bytes);
    out << line;
  }
  out << "ratio " << format_ratio(r.ratio) << '\n';
  return out.str();
}

} // namespace xstring
