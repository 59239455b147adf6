#pragma once

/// \file
/// Folding: carrying a whole document, as its XString, in the attributes of
/// an `XSTRING` element of a host document.
///
/// Nested slots hold one `LENGTH`/`TEXT` pair that is overwritten by each
/// fold. Multi slots hold `COUNT` plus `LENGTH_i`/`TEXT_i` pairs, one per
/// fold. LENGTH is the code-point length of the XString before it is
/// escaped into the attribute.

#include "xstring/codec.hpp"
#include "xstring/error.hpp"
#include "xstring/grammar.hpp"
#include "xstring/text.hpp"
#include "xstring/xml.hpp"

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace xstring {

enum class FoldMode { Nested, Multi };

inline constexpr std::string_view kSlotName = "XSTRING";

/// Makes an XString safe as a double-quoted attribute value. Spaces become
/// `&#160;`; `&`, `"`, `<` and control characters become numeric references.
inline std::string fold_escape(std::string_view xs) {
  std::string out;
  out.reserve(xs.size());
  for (char c : xs) {
    auto u = static_cast<unsigned char>(c);
    if (c == ' ')
      out += "&#160;";
    else if (c == '&' || c == '"' || c == '<' || u < 0x20 || u == 0x7F)
      detail::append_reference(out, u);
    else
      out.push_back(c);
  }
  return out;
}

/// Inverse of fold_escape. Also accepts `&nbsp;` and the predefined XML
/// entities. `&#160;` and `&nbsp;` both read back as a plain space.
inline std::string fold_unescape(std::string_view v) {
  static constexpr std::pair<std::string_view, char> named[] = {
      {"&nbsp;", ' '}, {"&amp;", '&'}, {"&quot;", '"'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&apos;", '\''}};
  std::string out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != '&') {
      out.push_back(v[i]);
      continue;
    }
    if (std::size_t len = detail::numeric_reference_length(v, i)) {
      std::uint32_t cp = detail::reference_code_point(v.substr(i, len));
      if (cp != 0xFFFFFFFF) {
        text::append_utf8(out, cp == 160 ? ' ' : cp);
        i += len - 1;
        continue;
      }
    }
    bool matched = false;
    for (const auto& [entity, ch] : named) {
      if (v.substr(i, entity.size()) == entity) {
        out.push_back(ch);
        i += entity.size() - 1;
        matched = true;
        break;
      }
    }
    if (!matched)
      out.push_back('&');
  }
  return out;
}

namespace detail {

template <class Node>
void find_slots(Node& node, std::vector<Node*>& out) {
  if (!node.is_element())
    return;
  if (node.name == kSlotName)
    out.push_back(&node);
  for (auto& c : node.children)
    find_slots(c, out);
}

template <class Doc>
auto& the_slot(Doc& doc) {
  using Node = std::remove_reference_t<decltype((doc.root))>;
  std::vector<Node*> slots;
  find_slots(doc.root, slots);
  if (slots.empty())
    throw FoldError(FoldErrorKind::NoSlot);
  if (slots.size() > 1)
    throw FoldError(FoldErrorKind::MultipleSlots, std::to_string(slots.size()) + " XSTRING elements");
  return *slots.front();
}

inline bool has_nested_form(const XmlNode& slot) {
  return slot.find_attribute("LENGTH") || slot.find_attribute("TEXT");
}

inline bool has_multi_form(const XmlNode& slot) {
  for (const auto& a : slot.attributes)
    if (a.name == "COUNT" || a.name.starts_with("LENGTH_") || a.name.starts_with("TEXT_"))
      return true;
  return false;
}

inline void set_attribute(XmlNode& node, const std::string& name, std::string value) {
  for (auto& a : node.attributes) {
    if (a.name == name) {
      a.value = std::move(value);
      return;
    }
  }
  node.attributes.push_back({name, std::move(value)});
}

inline const std::string& required_value(const XmlNode& slot, const std::string& name) {
  const Attribute* a = slot.find_attribute(name);
  if (!a || !a->value)
    throw FoldError(FoldErrorKind::MalformedSlot, "missing " + name);
  return *a->value;
}

inline std::uint64_t parse_count(std::string_view s, FoldErrorKind kind, const std::string& what) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size())
    throw FoldError(kind, what + " '" + std::string(s) + "' is not a count");
  return v;
}

inline std::uint64_t slot_count(const XmlNode& slot) {
  const Attribute* a = slot.find_attribute("COUNT");
  if (!a)
    return 0;
  return parse_count(a->value.value_or(""), FoldErrorKind::MalformedSlot, "COUNT");
}

inline XmlDocument decode_payload(const std::string& length_attr, const std::string& text_attr) {
  std::string xs = fold_unescape(text_attr);
  std::uint64_t declared = parse_count(length_attr, FoldErrorKind::LengthMismatch, "LENGTH");
  std::size_t actual = text::utf8_length(xs);
  if (declared != actual)
    throw FoldError(FoldErrorKind::LengthMismatch,
                    "LENGTH=" + std::to_string(declared) + ", payload has " + std::to_string(actual));
  return decode(tokenize(xs, EscapeMode::Entity));
}

} // namespace detail

/// The XString a fold stores for `inner`, before attribute escaping.
inline std::string fold_payload(const XmlDocument& inner) {
  EncodeOptions opts;
  opts.mode = EncodeMode::SafeSibling;
  opts.escaping = EscapeMode::Entity;
  return render(encode(inner, opts));
}

/// Embeds `inner` into the single XSTRING element of `host`.
inline XmlDocument fold(const XmlDocument& inner, const XmlDocument& host, FoldMode mode) {
  XmlDocument out = host;
  XmlNode& slot = detail::the_slot(out);
  bool nested = detail::has_nested_form(slot);
  bool multi = detail::has_multi_form(slot);
  if (nested && multi)
    throw FoldError(FoldErrorKind::MixedSlot, "slot carries both LENGTH/TEXT and COUNT");
  if ((mode == FoldMode::Nested && multi) || (mode == FoldMode::Multi && nested))
    throw FoldError(FoldErrorKind::MixedSlot, "slot is already in the other form");

  std::string xs = fold_payload(inner);
  std::string length = std::to_string(text::utf8_length(xs));
  std::string payload = fold_escape(xs);
  if (mode == FoldMode::Nested) {
    detail::set_attribute(slot, "LENGTH", std::move(length));
    detail::set_attribute(slot, "TEXT", std::move(payload));
    return out;
  }
  std::uint64_t k = detail::slot_count(slot);
  detail::set_attribute(slot, "COUNT", std::to_string(k + 1));
  detail::set_attribute(slot, "LENGTH_" + std::to_string(k), std::move(length));
  detail::set_attribute(slot, "TEXT_" + std::to_string(k), std::move(payload));
  return out;
}

/// Extracts the document stored at `index` (always 0 for a Nested slot).
inline XmlDocument unfold(const XmlDocument& host, std::size_t index) {
  const XmlNode& slot = detail::the_slot(host);
  bool nested = detail::has_nested_form(slot);
  bool multi = detail::has_multi_form(slot);
  if (nested && multi)
    throw FoldError(FoldErrorKind::MixedSlot, "slot carries both LENGTH/TEXT and COUNT");
  if (multi) {
    std::uint64_t count = detail::slot_count(slot);
    if (index >= count)
      throw FoldError(FoldErrorKind::IndexOutOfRange,
                      "index " + std::to_string(index) + ", COUNT=" + std::to_string(count));
    std::string k = std::to_string(index);
    return detail::decode_payload(detail::required_value(slot, "LENGTH_" + k),
                                  detail::required_value(slot, "TEXT_" + k));
  }
  if (!nested)
    throw FoldError(FoldErrorKind::IndexOutOfRange, "slot is empty");
  if (index != 0)
    throw FoldError(FoldErrorKind::IndexOutOfRange, "nested slot holds only index 0");
  return detail::decode_payload(detail::required_value(slot, "LENGTH"), detail::required_value(slot, "TEXT"));
}

} // namespace xstring
