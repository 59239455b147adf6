#pragma once

/// \file
/// Encoder (XmlDocument -> XsDocument) and decoder (XsDocument -> XmlDocument).
///
/// Decoding rules, applied token by token:
///  - a Child element becomes a child of the innermost open element;
///  - a Sibling element closes up to and including the nearest open element
///    with the same name, or the innermost open element when no name
///    matches, and is attached beside it;
///  - every other node becomes a child of the innermost open element;
///  - an element with depth N encloses exactly the next N nodes of the
///    stream (attributes do not count) and closes when its budget hits zero.

#include "xstring/error.hpp"
#include "xstring/grammar.hpp"
#include "xstring/substitution.hpp"
#include "xstring/xml.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace xstring {

enum class EncodeMode {
  /// Compact form: sibling tokens, depth markers only where needed.
  SafeSibling,
  /// Child tokens only, every element with an explicit depth.
  CanonicalChildDepth,
};

struct EncodeOptions {
  EncodeMode mode = EncodeMode::SafeSibling;
  EscapeMode escaping = EscapeMode::Entity;
  bool drop_insignificant_whitespace = true;
  /// Minimum name length for redundant-name substitution; unset disables it.
  std::optional<std::size_t> substitution_threshold;
};

/// Nodes in the subtree below `node`, attributes excluded.
inline std::uint64_t descendant_count(const XmlNode& node) {
  std::uint64_t n = 0;
  for (const auto& c : node.children)
    n += 1 + descendant_count(c);
  return n;
}

namespace detail {

inline bool is_prolog_pi(const XsToken& t) {
  if (t.kind != PrefixKind::ProcInstr)
    return false;
  std::string_view p = t.payload;
  return p.starts_with("xml") && (p.size() == 3 || text::is_space(p[3]));
}

inline XmlNode pi_from_payload(std::string_view payload) {
  std::size_t split = 0;
  while (split < payload.size() && !text::is_space(payload[split]))
    ++split;
  return XmlNode::pi(std::string(payload.substr(0, split)), std::string(payload.substr(split)));
}

inline NodeKind leaf_kind(PrefixKind kind) {
  switch (kind) {
  case PrefixKind::Text:
  case PrefixKind::TextDual: return NodeKind::Text;
  case PrefixKind::Comment: return NodeKind::Comment;
  case PrefixKind::ProcInstr: return NodeKind::ProcessingInstruction;
  case PrefixKind::CData: return NodeKind::CData;
  case PrefixKind::Dtd: return NodeKind::DtdElement;
  default: throw std::logic_error("not a leaf token");
  }
}

class Decoder {
public:
  explicit Decoder(const XsDocument& doc) : tokens_(doc.tokens) {}

  XmlDocument run() {
    if (tokens_.empty())
      throw DecodeError(DecodeErrorKind::EmptyStream, 0);
    for (index_ = 0; index_ < tokens_.size(); ++index_) {
      const XsToken& t = tokens_[index_];
      switch (t.kind) {
      case PrefixKind::Child:
      case PrefixKind::Sibling: element(t); break;
      case PrefixKind::AttrName: attr_name(t); break;
      case PrefixKind::AttrValue: attr_value(t); break;
      case PrefixKind::Depth:
      case PrefixKind::SubstKey: fail(DecodeErrorKind::BudgetConflict);
      default: leaf(t);
      }
    }
    for (const auto& f : stack_)
      if (f.budget && *f.budget > 0)
        fail(DecodeErrorKind::BudgetOverrun);
    if (!root_seen_)
      fail(DecodeErrorKind::MissingRoot);
    return std::move(doc_);
  }

private:
  struct Frame {
    XmlNode* node;
    std::optional<std::uint64_t> budget;
  };

  [[noreturn]] void fail(DecodeErrorKind kind) { throw DecodeError(kind, index_); }

  std::string resolve_name(const XsToken& t) {
    if (t.is_reference()) {
      auto it = keys_.find(*t.subst_key);
      if (it == keys_.end())
        fail(DecodeErrorKind::UnknownKey);
      return it->second;
    }
    if (t.is_binder())
      keys_[*t.subst_key] = t.payload;
    return t.payload;
  }

  void count_node() {
    for (auto& f : stack_)
      if (f.budget)
        --*f.budget;
  }

  void close_exhausted() {
    auto it = std::find_if(stack_.begin(), stack_.end(),
                           [](const Frame& f) { return f.budget && *f.budget == 0; });
    if (it == stack_.end())
      return;
    for (auto above = it + 1; above != stack_.end(); ++above)
      if (above->budget && *above->budget > 0)
        fail(DecodeErrorKind::BudgetOverrun);
    stack_.erase(it, stack_.end());
  }

  void element(const XsToken& t) {
    std::string name = resolve_name(t);
    if (!text::is_xml_name(name))
      fail(DecodeErrorKind::BadName);

    if (t.kind == PrefixKind::Sibling) {
      if (stack_.empty())
        fail(root_seen_ ? DecodeErrorKind::MultipleRoots : DecodeErrorKind::MissingRoot);
      auto match = std::find_if(stack_.rbegin(), stack_.rend(),
                                [&](const Frame& f) { return f.node->name == name; });
      std::size_t first_closed =
          match == stack_.rend() ? stack_.size() - 1 : static_cast<std::size_t>(stack_.rend() - match) - 1;
      if (first_closed == 0)
        fail(DecodeErrorKind::MultipleRoots);
      for (std::size_t i = first_closed; i < stack_.size(); ++i)
        if (stack_[i].budget)
          fail(DecodeErrorKind::BudgetConflict);
      stack_.resize(first_closed);
    }

    XmlNode* node = nullptr;
    if (stack_.empty()) {
      if (root_seen_)
        fail(DecodeErrorKind::MultipleRoots);
      root_seen_ = true;
      doc_.root = XmlNode::element(std::move(name));
      node = &doc_.root;
    } else {
      count_node();
      auto& siblings = stack_.back().node->children;
      siblings.push_back(XmlNode::element(std::move(name)));
      node = &siblings.back();
    }
    stack_.push_back({node, t.depth});
    attr_target_ = node;
    close_exhausted();
  }

  void attr_name(const XsToken& t) {
    if (!attr_target_)
      fail(element_seen() ? DecodeErrorKind::AttrAfterContent : DecodeErrorKind::AttrWithoutElement);
    std::string name = resolve_name(t);
    if (!text::is_xml_name(name))
      fail(DecodeErrorKind::BadName);
    if (attr_target_->find_attribute(name))
      fail(DecodeErrorKind::DuplicateAttribute);
    attr_target_->attributes.push_back({std::move(name), std::nullopt});
  }

  void attr_value(const XsToken& t) {
    if (!attr_target_ || attr_target_->attributes.empty() || attr_target_->attributes.back().value)
      fail(DecodeErrorKind::ValueWithoutName);
    attr_target_->attributes.back().value = t.payload;
  }

  bool element_seen() const { return root_seen_; }

  void leaf(const XsToken& t) {
    XmlNode node = t.kind == PrefixKind::ProcInstr ? pi_from_payload(t.payload)
                                                   : XmlNode::leaf(leaf_kind(t.kind), t.payload);
    attr_target_ = nullptr;
    if (stack_.empty()) {
      if (node.kind == NodeKind::Text || node.kind == NodeKind::CData)
        fail(DecodeErrorKind::ContentOutsideRoot);
      if (!root_seen_) {
        if (index_ == 0 && is_prolog_pi(t))
          doc_.declaration = std::move(node);
        else
          doc_.before_root.push_back(std::move(node));
      } else {
        doc_.after_root.push_back(std::move(node));
      }
      return;
    }
    count_node();
    stack_.back().node->children.push_back(std::move(node));
    close_exhausted();
  }

  const std::vector<XsToken>& tokens_;
  std::size_t index_ = 0;
  XmlDocument doc_;
  std::vector<Frame> stack_;
  XmlNode* attr_target_ = nullptr;
  bool root_seen_ = false;
  std::unordered_map<std::uint64_t, std::string> keys_;
};

inline bool has_markup_child(const XmlNode& node) {
  return std::any_of(node.children.begin(), node.children.end(), [](const XmlNode& c) {
    return c.kind == NodeKind::Comment || c.kind == NodeKind::ProcessingInstruction ||
           c.kind == NodeKind::CData || c.kind == NodeKind::DtdElement;
  });
}

class Encoder {
public:
  Encoder(const EncodeOptions& opts) : opts_(opts) {}

  XsDocument run(const XmlDocument& doc) {
    out_.escaping = opts_.escaping;
    if (doc.declaration)
      leaf(*doc.declaration, nullptr);
    for (const auto& n : doc.before_root) {
      if (n.is_element() || n.kind == NodeKind::Text || n.kind == NodeKind::CData)
        throw EncodeError("node before the root element");
      leaf(n, nullptr);
    }
    node(doc.root, nullptr);
    for (const auto& n : doc.after_root) {
      if (n.is_element() || n.kind == NodeKind::Text || n.kind == NodeKind::CData)
        throw EncodeError("node after the root element");
      leaf(n, nullptr);
    }
    return std::move(out_);
  }

private:
  struct Frame {
    const XmlNode* node;
    std::size_t token;
    std::optional<std::uint64_t> budget;
  };

  bool canonical() const { return opts_.mode == EncodeMode::CanonicalChildDepth; }

  void check_payload(std::string_view s) const {
    if (opts_.escaping == EscapeMode::Sentinel && s.find(kSentinel) != std::string_view::npos)
      throw EncodeError("NUL byte in data under sentinel escaping");
  }

  void check_name(std::string_view s) const {
    if (!text::is_xml_name(s))
      throw EncodeError("name '" + std::string(s) + "'");
  }

  /// Index of `parent` in the simulated decoder stack; -1 for the document.
  long index_of(const XmlNode* parent) const {
    if (!parent)
      return -1;
    for (long i = static_cast<long>(stack_.size()) - 1; i >= 0; --i)
      if (stack_[static_cast<std::size_t>(i)].node == parent)
        return i;
    throw std::logic_error("encoder lost track of the open element chain");
  }

  /// Closes every simulated frame above `keep` by giving the lowest of them
  /// an explicit depth covering its whole subtree.
  void close_above(long keep) {
    auto first = static_cast<std::size_t>(keep + 1);
    if (first >= stack_.size())
      return;
    const Frame& f = stack_[first];
    out_.tokens[f.token].depth = descendant_count(*f.node);
    stack_.resize(first);
  }

  /// Mirrors the decoder's budget accounting for one emitted node.
  void count_node(const XmlNode* opened, std::size_t token) {
    if (canonical())
      return;
    for (auto& f : stack_)
      if (f.budget)
        --*f.budget;
    if (opened)
      stack_.push_back({opened, token, out_.tokens[token].depth});
    auto it = std::find_if(stack_.begin(), stack_.end(),
                           [](const Frame& f) { return f.budget && *f.budget == 0; });
    stack_.erase(it, stack_.end());
  }

  bool try_sibling(const XmlNode& el, long parent) {
    if (stack_.empty())
      return false;
    long top = static_cast<long>(stack_.size()) - 1;
    long closed_from = top;
    for (long i = top; i >= 0; --i) {
      if (stack_[static_cast<std::size_t>(i)].node->name == el.name) {
        closed_from = i;
        break;
      }
    }
    if (closed_from - 1 != parent || closed_from == 0)
      return false;
    stack_.resize(static_cast<std::size_t>(closed_from));
    return true;
  }

  void node(const XmlNode& n, const XmlNode* parent) {
    if (n.is_element())
      element(n, parent);
    else
      leaf(n, parent);
  }

  void element(const XmlNode& el, const XmlNode* parent) {
    check_name(el.name);
    XsToken t = make_token(PrefixKind::Child, el.name);
    if (canonical()) {
      t.depth = descendant_count(el);
    } else {
      long p = index_of(parent);
      if (p != static_cast<long>(stack_.size()) - 1) {
        if (parent && try_sibling(el, p))
          t.kind = PrefixKind::Sibling;
        else
          close_above(p);
      }
      if (parent && has_markup_child(el))
        t.depth = descendant_count(el);
    }

    std::size_t index = out_.tokens.size();
    out_.tokens.push_back(std::move(t));
    for (const auto& a : el.attributes) {
      check_name(a.name);
      out_.tokens.push_back(make_token(PrefixKind::AttrName, a.name));
      if (a.value) {
        check_payload(*a.value);
        out_.tokens.push_back(make_token(PrefixKind::AttrValue, *a.value));
      }
    }
    count_node(&el, index);
    for (const auto& c : el.children)
      node(c, &el);
  }

  PrefixKind text_kind(const std::string& s) const {
    if (opts_.escaping == EscapeMode::Sentinel)
      return PrefixKind::Text;
    std::size_t as_text = 1 + escape_data(s, EscapeMode::Entity).size();
    std::size_t as_dual = 2 + detail::escape_quoted(s).size();
    return as_dual < as_text ? PrefixKind::TextDual : PrefixKind::Text;
  }

  void leaf(const XmlNode& n, const XmlNode* parent) {
    if (!canonical()) {
      long p = index_of(parent);
      if (p != static_cast<long>(stack_.size()) - 1)
        close_above(p);
    }
    switch (n.kind) {
    case NodeKind::Text:
      check_payload(n.content);
      out_.tokens.push_back(make_token(text_kind(n.content), n.content));
      break;
    case NodeKind::ProcessingInstruction: {
      if (n.name.empty() || n.name.find_first_of(" \t\r\n") != std::string::npos ||
          (!n.content.empty() && !text::is_space(n.content.front())))
        throw EncodeError("processing instruction target '" + n.name + "'");
      std::string payload = n.name + n.content;
      check_payload(payload);
      out_.tokens.push_back(make_token(PrefixKind::ProcInstr, std::move(payload)));
      break;
    }
    case NodeKind::Comment:
    case NodeKind::CData:
    case NodeKind::DtdElement: {
      check_payload(n.content);
      PrefixKind kind = n.kind == NodeKind::Comment ? PrefixKind::Comment
                        : n.kind == NodeKind::CData ? PrefixKind::CData
                                                    : PrefixKind::Dtd;
      out_.tokens.push_back(make_token(kind, n.content));
      break;
    }
    case NodeKind::Element:
      throw std::logic_error("element passed as leaf");
    }
    if (parent)
      count_node(nullptr, 0);
  }

  EncodeOptions opts_;
  XsDocument out_;
  std::vector<Frame> stack_;
};

} // namespace detail

/// Rebuilds the XML tree. Substitution keys are resolved from the binders
/// in the stream.
inline XmlDocument decode(const XsDocument& doc) { return detail::Decoder(doc).run(); }

/// Encodes doc so that decode(encode(doc)) is structurally equal to doc
/// (after dropping insignificant whitespace, unless disabled).
///
/// In SafeSibling mode an explicit depth is added to an element when the
/// decoder would otherwise keep it open past its end, or when it directly
/// holds a comment, PI, CDATA or DTD node; a sibling that cannot resolve to
/// the right parent is written as a child instead.
inline XsDocument encode(const XmlDocument& doc, const EncodeOptions& opts = {}) {
  if (opts.substitution_threshold && *opts.substitution_threshold < 2)
    throw std::invalid_argument("substitution threshold must be at least 2");
  XmlDocument source = opts.drop_insignificant_whitespace ? strip_insignificant_whitespace(doc) : doc;
  XsDocument out = detail::Encoder(opts).run(source);

  if (!structural_equal(decode(out), source, {.whitespace_significant = true}))
    throw std::logic_error("encoder produced an XString that does not decode to its input");

  if (opts.substitution_threshold)
    out = build_substitution(out, *opts.substitution_threshold).second;
  return out;
}

} // namespace xstring
