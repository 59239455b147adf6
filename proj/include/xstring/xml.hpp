#pragma once

/// \file
/// Minimal non-validating XML data model: parser, serializer, well-formedness
/// checker and structural comparison for the node kinds XString represents.
///
/// Entity and character references are kept verbatim in text and attribute
/// values; nothing is expanded. DTD declarations are captured as opaque
/// DtdElement nodes.

#include "xstring/error.hpp"
#include "xstring/text.hpp"

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace xstring {

enum class NodeKind { Element, Text, Comment, ProcessingInstruction, CData, DtdElement };

struct Attribute {
  std::string name;
  /// nullopt for a valueless attribute (`<X NAME/>`).
  std::optional<std::string> value;

  friend bool operator==(const Attribute&, const Attribute&) = default;
};

struct XmlNode {
  NodeKind kind = NodeKind::Element;
  /// Element name or PI target.
  std::string name;
  std::vector<Attribute> attributes;
  /// Payload for Text/Comment/CData/DtdElement; for a PI, everything after
  /// the target including the separating whitespace.
  std::string content;
  std::vector<XmlNode> children;

  static XmlNode element(std::string name, std::vector<Attribute> attrs = {},
                         std::vector<XmlNode> children = {}) {
    XmlNode n;
    n.kind = NodeKind::Element;
    n.name = std::move(name);
    n.attributes = std::move(attrs);
    n.children = std::move(children);
    return n;
  }

  static XmlNode leaf(NodeKind kind, std::string content) {
    XmlNode n;
    n.kind = kind;
    n.content = std::move(content);
    return n;
  }

  static XmlNode text(std::string content) {
    return leaf(NodeKind::Text, std::move(content));
  }

  static XmlNode pi(std::string target, std::string content = {}) {
    XmlNode n;
    n.kind = NodeKind::ProcessingInstruction;
    n.name = std::move(target);
    n.content = std::move(content);
    return n;
  }

  bool is_element() const noexcept { return kind == NodeKind::Element; }

  const Attribute* find_attribute(std::string_view attr) const {
    for (const auto& a : attributes)
      if (a.name == attr)
        return &a;
    return nullptr;
  }
};

struct XmlDocument {
  /// The XML declaration (`<?xml ...?>`), if present at offset 0.
  std::optional<XmlNode> declaration;
  /// Comments, PIs and DTD declarations between the declaration and the root.
  std::vector<XmlNode> before_root;
  XmlNode root;
  /// Comments and PIs after the root element.
  std::vector<XmlNode> after_root;
};

struct Violation {
  Rule rule;
  std::size_t offset;
  std::string message;
};

struct WellFormednessReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }
};

/// Whitespace-only text is insignificant; encode drops it by default.
inline bool is_insignificant(const XmlNode& node) noexcept {
  return node.kind == NodeKind::Text && text::is_all_space(node.content);
}

namespace detail {

class XmlParser {
public:
  XmlParser(std::string_view src, std::vector<Violation>* collect)
      : src_(src), collect_(collect) {}

  XmlDocument parse() {
    if (src_.substr(0, 5) == "<?xml" &&
        (src_.size() > 5 && (text::is_space(src_[5]) || src_.substr(5, 2) == "?>")))
      doc_.declaration = parse_pi();

    while (pos_ < src_.size()) {
      if (src_[pos_] != '<') {
        parse_text();
        continue;
      }
      std::string_view rest = src_.substr(pos_);
      std::size_t at = pos_;
      if (rest.starts_with("<!--"))
        attach(parse_delimited(NodeKind::Comment, 4, "-->", "unterminated comment"), at);
      else if (rest.starts_with("<![CDATA["))
        attach(parse_delimited(NodeKind::CData, 9, "]]>", "unterminated CDATA section"), at);
      else if (rest.starts_with("<!"))
        attach(parse_dtd(), at);
      else if (rest.starts_with("<?"))
        attach(parse_pi(), at);
      else if (rest.starts_with("</"))
        parse_close_tag();
      else
        parse_open_tag();
    }

    while (!open_.empty()) {
      report(Rule::MatchedTags, open_.back().offset,
             "element '" + open_.back().node.name + "' is never closed");
      close_top();
    }
    if (!have_root_)
      report(Rule::UniqueRoot, src_.size(), "document has no root element");
    return std::move(doc_);
  }

private:
  struct Frame {
    XmlNode node;
    std::size_t offset;
    bool extra_root;
  };

  [[noreturn]] void syntax(std::size_t offset, const std::string& message) {
    throw XmlError(Rule::Syntax, offset, message);
  }

  void report(Rule rule, std::size_t offset, std::string message) {
    if (!collect_)
      throw XmlError(rule, offset, std::move(message));
    collect_->push_back({rule, offset, std::move(message)});
  }

  void check_references(std::string_view s, std::size_t base) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] == '&') {
        std::size_t len = text::reference_length(s, i);
        if (len == 0)
          report(Rule::Entities, base + i, "'&' does not start an entity reference");
        else
          i += len - 1;
      }
    }
  }

  void check_name(std::string_view name, std::size_t offset) {
    if (!text::is_xml_name(name))
      report(Rule::NamingConventions, offset, "invalid name '" + std::string(name) + "'");
  }

  void attach(XmlNode node, std::size_t offset) {
    if (!open_.empty()) {
      open_.back().node.children.push_back(std::move(node));
      return;
    }
    switch (node.kind) {
    case NodeKind::Element:
      if (have_root_)
        return;
      doc_.root = std::move(node);
      have_root_ = true;
      return;
    case NodeKind::Text:
      if (text::is_all_space(node.content))
        return;
      report(Rule::UniqueRoot, offset, "text outside the root element");
      return;
    case NodeKind::CData:
      report(Rule::UniqueRoot, offset, "CDATA outside the root element");
      return;
    default:
      (root_started_ ? doc_.after_root : doc_.before_root).push_back(std::move(node));
    }
  }

  void close_top() {
    Frame frame = std::move(open_.back());
    open_.pop_back();
    if (frame.extra_root)
      return;
    attach(std::move(frame.node), frame.offset);
  }

  void parse_text() {
    std::size_t start = pos_;
    std::size_t end = src_.find('<', pos_);
    if (end == std::string_view::npos)
      end = src_.size();
    std::string_view body = src_.substr(start, end - start);
    pos_ = end;
    if (open_.empty() && text::is_all_space(body))
      return;
    check_references(body, start);
    attach(XmlNode::text(std::string(body)), start);
  }

  XmlNode parse_delimited(NodeKind kind, std::size_t open_len, std::string_view close,
                          const char* unterminated) {
    std::size_t start = pos_;
    std::size_t end = src_.find(close, pos_ + open_len);
    if (end == std::string_view::npos)
      syntax(start, unterminated);
    XmlNode node = XmlNode::leaf(kind, std::string(src_.substr(pos_ + open_len, end - pos_ - open_len)));
    pos_ = end + close.size();
    return node;
  }

  XmlNode parse_dtd() {
    std::size_t start = pos_;
    std::size_t i = pos_ + 2;
    int brackets = 0;
    char quote = 0;
    for (; i < src_.size(); ++i) {
      char c = src_[i];
      if (quote) {
        if (c == quote)
          quote = 0;
      } else if (c == '"' || c == '\'') {
        quote = c;
      } else if (c == '[') {
        ++brackets;
      } else if (c == ']') {
        --brackets;
      } else if (c == '>' && brackets <= 0) {
        break;
      }
    }
    if (i >= src_.size())
      syntax(start, "unterminated declaration");
    XmlNode node = XmlNode::leaf(NodeKind::DtdElement, std::string(src_.substr(start + 2, i - start - 2)));
    pos_ = i + 1;
    return node;
  }

  XmlNode parse_pi() {
    std::size_t start = pos_;
    std::size_t end = src_.find("?>", pos_ + 2);
    if (end == std::string_view::npos)
      syntax(start, "unterminated processing instruction");
    std::string_view body = src_.substr(start + 2, end - start - 2);
    std::size_t target_end = 0;
    while (target_end < body.size() && !text::is_space(body[target_end]))
      ++target_end;
    std::string_view target = body.substr(0, target_end);
    if (target.empty())
      syntax(start, "processing instruction without target");
    check_name(target, start + 2);
    std::string lowered(target);
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lowered == "xml" && start != 0)
      report(Rule::DeclarationAtStart, start, "XML declaration is not at the start of the document");
    pos_ = end + 2;
    return XmlNode::pi(std::string(target), std::string(body.substr(target_end)));
  }

  static bool is_delimiter(char c) {
    return text::is_space(c) || c == '/' || c == '>' || c == '=' || c == '<' ||
           c == '"' || c == '\'';
  }

  std::string_view read_name() {
    std::size_t start = pos_;
    while (pos_ < src_.size() && !is_delimiter(src_[pos_]))
      ++pos_;
    return src_.substr(start, pos_ - start);
  }

  void skip_space() {
    while (pos_ < src_.size() && text::is_space(src_[pos_]))
      ++pos_;
  }

  std::string_view read_quoted() {
    char quote = src_[pos_];
    std::size_t start = pos_;
    std::size_t end = src_.find(quote, pos_ + 1);
    if (end == std::string_view::npos)
      syntax(start, "unterminated attribute value");
    pos_ = end + 1;
    return src_.substr(start + 1, end - start - 1);
  }

  void parse_open_tag() {
    std::size_t start = pos_;
    ++pos_;
    std::string_view name = read_name();
    if (name.empty())
      syntax(start, "missing element name");
    check_name(name, start + 1);

    bool extra_root = false;
    if (open_.empty()) {
      if (root_started_) {
        report(Rule::UniqueRoot, start, "second root element '" + std::string(name) + "'");
        extra_root = true;
      }
      root_started_ = true;
    }

    XmlNode node = XmlNode::element(std::string(name));
    for (;;) {
      skip_space();
      if (pos_ >= src_.size())
        syntax(start, "unterminated start tag");
      char c = src_[pos_];
      if (c == '>') {
        ++pos_;
        open_.push_back({std::move(node), start, extra_root});
        return;
      }
      if (c == '/') {
        if (pos_ + 1 >= src_.size() || src_[pos_ + 1] != '>')
          syntax(pos_, "expected '>' after '/'");
        pos_ += 2;
        if (!extra_root)
          attach(std::move(node), start);
        return;
      }
      std::size_t attr_at = pos_;
      std::string_view attr_name = read_name();
      if (attr_name.empty())
        syntax(attr_at, "unexpected character in start tag");
      check_name(attr_name, attr_at);
      Attribute attr{std::string(attr_name), std::nullopt};
      skip_space();
      if (pos_ < src_.size() && src_[pos_] == '=') {
        ++pos_;
        skip_space();
        if (pos_ >= src_.size())
          syntax(start, "unterminated start tag");
        if (src_[pos_] == '"' || src_[pos_] == '\'') {
          std::size_t value_at = pos_ + 1;
          std::string_view value = read_quoted();
          if (auto lt = value.find('<'); lt != std::string_view::npos)
            report(Rule::Entities, value_at + lt, "'<' in attribute value");
          check_references(value, value_at);
          attr.value = std::string(value);
          std::size_t save = pos_;
          skip_space();
          if (pos_ < src_.size() && (src_[pos_] == '"' || src_[pos_] == '\'')) {
            report(Rule::SingleQuotedValue, pos_, "attribute '" + attr.name + "' has more than one value");
            while (pos_ < src_.size() && (src_[pos_] == '"' || src_[pos_] == '\'')) {
              read_quoted();
              skip_space();
            }
          } else {
            pos_ = save;
          }
        } else {
          std::size_t value_at = pos_;
          while (pos_ < src_.size() && !text::is_space(src_[pos_]) && src_[pos_] != '>' &&
                 !(src_[pos_] == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>'))
            ++pos_;
          report(Rule::SingleQuotedValue, value_at, "attribute '" + attr.name + "' value is not quoted");
          attr.value = std::string(src_.substr(value_at, pos_ - value_at));
        }
      }
      if (node.find_attribute(attr.name)) {
        report(Rule::SingleQuotedValue, attr_at, "duplicate attribute '" + attr.name + "'");
        continue;
      }
      node.attributes.push_back(std::move(attr));
    }
  }

  void parse_close_tag() {
    std::size_t start = pos_;
    pos_ += 2;
    std::string_view name = read_name();
    if (name.empty())
      syntax(start, "missing element name in end tag");
    skip_space();
    if (pos_ < src_.size() && src_[pos_] != '>') {
      report(Rule::AttributesOnOpenTags, pos_, "attribute on end tag '" + std::string(name) + "'");
      std::size_t gt = src_.find('>', pos_);
      if (gt == std::string_view::npos)
        syntax(start, "unterminated end tag");
      pos_ = gt;
    }
    if (pos_ >= src_.size())
      syntax(start, "unterminated end tag");
    ++pos_;

    if (!open_.empty() && open_.back().node.name == name) {
      close_top();
      return;
    }
    auto match = std::find_if(open_.rbegin(), open_.rend(),
                              [&](const Frame& f) { return f.node.name == name; });
    if (match == open_.rend()) {
      report(Rule::MatchedTags, start, "end tag '" + std::string(name) + "' has no start tag");
      return;
    }
    report(Rule::NoOverlap, start,
           "end tag '" + std::string(name) + "' overlaps open element '" + open_.back().node.name + "'");
    std::size_t keep = static_cast<std::size_t>(open_.rend() - match) - 1;
    while (open_.size() > keep)
      close_top();
  }

  std::string_view src_;
  std::vector<Violation>* collect_;
  std::size_t pos_ = 0;
  std::vector<Frame> open_;
  XmlDocument doc_;
  bool have_root_ = false;
  bool root_started_ = false;
};

inline void escape_stray(std::string& out, std::string_view s, bool attribute, char quote) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '<')
      out += "&lt;";
    else if (c == '&' && text::reference_length(s, i) == 0)
      out += "&amp;";
    else if (attribute && c == quote)
      out += quote == '"' ? "&quot;" : "&apos;";
    else
      out.push_back(c);
  }
}

inline void serialize_node(std::string& out, const XmlNode& node) {
  switch (node.kind) {
  case NodeKind::Element: {
    out += '<';
    out += node.name;
    for (const auto& a : node.attributes) {
      out += ' ';
      out += a.name;
      if (a.value) {
        char quote = a.value->find('"') != std::string::npos &&
                             a.value->find('\'') == std::string::npos
                         ? '\''
                         : '"';
        out += '=';
        out += quote;
        escape_stray(out, *a.value, true, quote);
        out += quote;
      }
    }
    if (node.children.empty()) {
      out += "/>";
      return;
    }
    out += '>';
    for (const auto& c : node.children)
      serialize_node(out, c);
    out += "</";
    out += node.name;
    out += '>';
    return;
  }
  case NodeKind::Text:
    escape_stray(out, node.content, false, 0);
    return;
  case NodeKind::Comment:
    out += "<!--" + node.content + "-->";
    return;
  case NodeKind::ProcessingInstruction:
    out += "<?" + node.name + node.content + "?>";
    return;
  case NodeKind::CData:
    out += "<![CDATA[" + node.content + "]]>";
    return;
  case NodeKind::DtdElement:
    out += "<!" + node.content + ">";
    return;
  }
}

inline void strip_node(XmlNode& node) {
  std::erase_if(node.children, [](const XmlNode& c) { return is_insignificant(c); });
  for (auto& c : node.children)
    strip_node(c);
}

} // namespace detail

/// Parses UTF-8 XML text. Throws XmlError naming the first violated rule
/// (or Rule::Syntax for malformed markup).
inline XmlDocument parse_xml(std::string_view text) {
  return detail::XmlParser(text, nullptr).parse();
}

/// Reports every detectable rule breach instead of stopping at the first.
/// A syntax error ends the scan and is reported with Rule::Syntax.
inline WellFormednessReport check_well_formed(std::string_view text) {
  WellFormednessReport report;
  try {
    detail::XmlParser(text, &report.violations).parse();
  } catch (const XmlError& e) {
    report.violations.push_back({e.rule(), e.offset(), e.message()});
  }
  return report;
}

inline std::string serialize_xml(const XmlNode& node) {
  std::string out;
  detail::serialize_node(out, node);
  return out;
}

/// Serializes without adding any whitespace between nodes.
inline std::string serialize_xml(const XmlDocument& doc) {
  std::string out;
  if (doc.declaration)
    detail::serialize_node(out, *doc.declaration);
  for (const auto& n : doc.before_root)
    detail::serialize_node(out, n);
  detail::serialize_node(out, doc.root);
  for (const auto& n : doc.after_root)
    detail::serialize_node(out, n);
  return out;
}

/// Copy of doc with every whitespace-only text node removed.
inline XmlDocument strip_insignificant_whitespace(XmlDocument doc) {
  detail::strip_node(doc.root);
  return doc;
}

struct CompareOptions {
  bool whitespace_significant = false;
};

inline bool structural_equal(const XmlNode& a, const XmlNode& b, CompareOptions opts = {}) {
  if (a.kind != b.kind || a.name != b.name || a.content != b.content ||
      a.attributes != b.attributes)
    return false;
  auto keep = [&](const XmlNode& n) { return opts.whitespace_significant || !is_insignificant(n); };
  auto ia = a.children.begin(), ib = b.children.begin();
  for (;;) {
    while (ia != a.children.end() && !keep(*ia))
      ++ia;
    while (ib != b.children.end() && !keep(*ib))
      ++ib;
    if (ia == a.children.end() || ib == b.children.end())
      return ia == a.children.end() && ib == b.children.end();
    if (!structural_equal(*ia, *ib, opts))
      return false;
    ++ia;
    ++ib;
  }
}

inline bool structural_equal(const XmlDocument& a, const XmlDocument& b, CompareOptions opts = {}) {
  auto same_list = [&](const std::vector<XmlNode>& x, const std::vector<XmlNode>& y) {
    return std::equal(x.begin(), x.end(), y.begin(), y.end(),
                      [&](const XmlNode& p, const XmlNode& q) { return structural_equal(p, q, opts); });
  };
  if (a.declaration.has_value() != b.declaration.has_value())
    return false;
  if (a.declaration && !structural_equal(*a.declaration, *b.declaration, opts))
    return false;
  return same_list(a.before_root, b.before_root) && structural_equal(a.root, b.root, opts) &&
         same_list(a.after_root, b.after_root);
}

/// Visits every node of the document in document (preorder) order.
inline void for_each_preorder(const XmlDocument& doc, const std::function<void(const XmlNode&)>& visit) {
  std::function<void(const XmlNode&)> walk = [&](const XmlNode& n) {
    visit(n);
    for (const auto& c : n.children)
      walk(c);
  };
  if (doc.declaration)
    visit(*doc.declaration);
  for (const auto& n : doc.before_root)
    visit(n);
  walk(doc.root);
  for (const auto& n : doc.after_root)
    visit(n);
}

} // namespace xstring
