#pragma once

/// \file
/// Token-stream rewrites over XStrings.

#include "xstring/codec.hpp"
#include "xstring/grammar.hpp"
#include "xstring/substitution.hpp"
#include "xstring/xml.hpp"

#include <vector>

namespace xstring {

namespace detail {

inline void collect_elements(const XmlNode& node, std::vector<const XmlNode*>& out) {
  out.push_back(&node);
  for (const auto& c : node.children)
    if (c.is_element())
      collect_elements(c, out);
}

inline bool is_canonical(const XsDocument& doc) {
  for (const auto& t : doc.tokens) {
    if (t.kind == PrefixKind::Sibling)
      return false;
    if (t.kind == PrefixKind::Child && !t.depth)
      return false;
  }
  return true;
}

inline void hoist_attributes(XmlNode& node) {
  if (!node.is_element())
    return;
  for (auto& c : node.children)
    hoist_attributes(c);
  if (node.attributes.empty())
    return;
  std::vector<XmlNode> synthesized;
  synthesized.reserve(node.attributes.size() + node.children.size());
  for (auto& a : node.attributes) {
    XmlNode child = XmlNode::element(std::move(a.name));
    if (a.value)
      child.children.push_back(XmlNode::text(std::move(*a.value)));
    synthesized.push_back(std::move(child));
  }
  node.attributes.clear();
  for (auto& c : node.children)
    synthesized.push_back(std::move(c));
  node.children = std::move(synthesized);
}

} // namespace detail

/// Converts every sibling to a child and makes every implicit depth
/// explicit, left to right. Substitution keys and attributes are kept.
inline XsDocument to_child_depth(const XsDocument& doc) {
  XmlDocument tree = decode(doc);
  std::vector<const XmlNode*> elements;
  detail::collect_elements(tree.root, elements);

  XsDocument out = doc;
  std::size_t next = 0;
  for (auto& t : out.tokens) {
    if (!t.is_element())
      continue;
    t.kind = PrefixKind::Child;
    t.depth = descendant_count(*elements.at(next++));
  }
  return out;
}

/// Rewrites each attribute as a leading child element holding its value as
/// text. The result keeps the input's form (canonical or sibling).
inline XsDocument attrs_to_elements(const XsDocument& doc) {
  bool any = false;
  for (const auto& t : doc.tokens)
    any = any || t.kind == PrefixKind::AttrName;
  if (!any) {
    decode(doc);
    return doc;
  }
  XmlDocument tree = decode(doc);
  detail::hoist_attributes(tree.root);
  EncodeOptions opts;
  opts.escaping = doc.escaping;
  opts.mode = detail::is_canonical(doc) ? EncodeMode::CanonicalChildDepth : EncodeMode::SafeSibling;
  opts.drop_insignificant_whitespace = false;
  return encode(tree, opts);
}

} // namespace xstring
