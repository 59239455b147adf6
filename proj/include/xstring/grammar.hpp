#pragma once

/// \file
/// XString token alphabet, tokenizer, renderer and the two schemes for
/// keeping prefix characters that occur in data apart from structure.
///
/// Entity mode writes each prefix character found in data as a numeric
/// character reference (`&#47;`). Sentinel mode leaves data untouched and
/// instead writes a NUL byte in front of every structural prefix character.

#include "xstring/error.hpp"
#include "xstring/text.hpp"

#include <array>
#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace xstring {

enum class PrefixKind : char {
  Child = '/',
  Sibling = '|',
  Text = '\'',
  TextDual = '"',
  AttrName = '@',
  AttrValue = '=',
  Comment = '-',
  ProcInstr = '?',
  CData = '[',
  Dtd = '!',
  Depth = '+',
  SubstKey = '#',
};

inline constexpr std::array<char, 12> kPrefixChars = {'/', '|', '\'', '"', '@', '=',
                                                      '-', '?', '[',  '!', '+', '#'};

inline constexpr bool is_prefix_char(char c) noexcept {
  for (char p : kPrefixChars)
    if (p == c)
      return true;
  return false;
}

inline constexpr char prefix_char(PrefixKind kind) noexcept { return static_cast<char>(kind); }

enum class EscapeMode { Entity, Sentinel };

inline constexpr char kSentinel = '\0';

struct XsToken {
  PrefixKind kind = PrefixKind::Child;
  std::string payload;
  /// Explicit depth marker (`+N`); Child and Sibling only.
  std::optional<std::uint64_t> depth;
  /// Substitution key. With a non-empty payload the token binds the key to
  /// its name (`NAME#k`); with an empty payload it is a reference (`k`).
  std::optional<std::uint64_t> subst_key;

  bool is_element() const noexcept {
    return kind == PrefixKind::Child || kind == PrefixKind::Sibling;
  }
  bool is_name_bearing() const noexcept { return is_element() || kind == PrefixKind::AttrName; }
  bool is_reference() const noexcept { return subst_key && payload.empty(); }
  bool is_binder() const noexcept { return subst_key && !payload.empty(); }

  friend bool operator==(const XsToken&, const XsToken&) = default;
};

inline XsToken make_token(PrefixKind kind, std::string payload = {},
                          std::optional<std::uint64_t> depth = std::nullopt) {
  return XsToken{kind, std::move(payload), depth, std::nullopt};
}

struct XsDocument {
  std::vector<XsToken> tokens;
  EscapeMode escaping = EscapeMode::Entity;

  friend bool operator==(const XsDocument&, const XsDocument&) = default;
};

namespace detail {

inline void append_reference(std::string& out, unsigned code) {
  out += "&#";
  out += std::to_string(code);
  out += ';';
}

/// Entity-mode escaping. `&` is escaped only where it would otherwise read as
/// the start of a character reference.
template <class Pred>
std::string escape_entities(std::string_view s, Pred must_escape) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (must_escape(c) || (c == '&' && i + 1 < s.size() && s[i + 1] == '#'))
      append_reference(out, static_cast<unsigned char>(c));
    else
      out.push_back(c);
  }
  return out;
}

/// Length of a numeric character reference at s[pos], 0 if malformed.
inline std::size_t numeric_reference_length(std::string_view s, std::size_t pos) {
  if (pos + 1 >= s.size() || s[pos] != '&' || s[pos + 1] != '#')
    return 0;
  return text::reference_length(s, pos);
}

inline std::uint32_t reference_code_point(std::string_view ref) {
  // ref is "&#...;"
  std::string_view body = ref.substr(2, ref.size() - 3);
  int base = 10;
  if (!body.empty() && body.front() == 'x') {
    body.remove_prefix(1);
    base = 16;
  }
  std::uint32_t cp = 0;
  auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(), cp, base);
  if (ec != std::errc() || p != body.data() + body.size() || cp > 0x10FFFF)
    return 0xFFFFFFFF;
  return cp;
}

} // namespace detail

/// Escapes prefix characters in data. Sentinel mode returns s unchanged;
/// structural marking happens in render.
inline std::string escape_data(std::string_view s, EscapeMode mode) {
  if (mode == EscapeMode::Sentinel)
    return std::string(s);
  return detail::escape_entities(s, is_prefix_char);
}

/// Inverse of escape_data. Throws TokenizeError(MalformedEntity) when a
/// `&#` is not a complete numeric reference.
inline std::string unescape_data(std::string_view s, EscapeMode mode, std::size_t base_offset = 0) {
  if (mode == EscapeMode::Sentinel)
    return std::string(s);
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '&' && i + 1 < s.size() && s[i + 1] == '#') {
      std::size_t len = detail::numeric_reference_length(s, i);
      std::uint32_t cp = len ? detail::reference_code_point(s.substr(i, len)) : 0xFFFFFFFF;
      if (cp == 0xFFFFFFFF)
        throw TokenizeError(TokenizeErrorKind::MalformedEntity, base_offset + i);
      text::append_utf8(out, cp);
      i += len - 1;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

namespace detail {

inline std::size_t digit_count(std::uint64_t v) {
  std::size_t n = 1;
  while (v >= 10) {
    v /= 10;
    ++n;
  }
  return n;
}

inline std::string escape_quoted(std::string_view s) {
  return escape_entities(s, [](char c) { return c == '"'; });
}

inline void render_marker(std::string& out, char prefix, std::uint64_t value, EscapeMode mode) {
  if (mode == EscapeMode::Sentinel)
    out.push_back(kSentinel);
  out.push_back(prefix);
  out += std::to_string(value);
}

} // namespace detail

/// Renders one token. Attribute values and dual text use `"` quoting only
/// where it is shorter than escaping.
inline std::string render_token(const XsToken& t, EscapeMode mode) {
  std::string out;
  const bool sentinel = mode == EscapeMode::Sentinel;
  if (sentinel)
    out.push_back(kSentinel);
  out.push_back(prefix_char(t.kind));

  switch (t.kind) {
  case PrefixKind::Child:
  case PrefixKind::Sibling:
  case PrefixKind::AttrName:
    if (t.is_reference())
      out += std::to_string(*t.subst_key);
    else
      out += escape_data(t.payload, mode);
    if (t.is_binder())
      detail::render_marker(out, prefix_char(PrefixKind::SubstKey), *t.subst_key, mode);
    if (t.depth && t.is_element())
      detail::render_marker(out, prefix_char(PrefixKind::Depth), *t.depth, mode);
    break;
  case PrefixKind::AttrValue:
    if (sentinel) {
      out += t.payload;
    } else if (t.payload.empty()) {
      out += "\"\"";
    } else {
      std::string plain = escape_data(t.payload, mode);
      std::string quoted = detail::escape_quoted(t.payload);
      if (quoted.size() + 2 < plain.size())
        out += '"' + quoted + '"';
      else
        out += plain;
    }
    break;
  case PrefixKind::TextDual:
    if (sentinel) {
      out += t.payload;
      out.push_back(kSentinel);
    } else {
      out += detail::escape_quoted(t.payload);
    }
    out.push_back('"');
    break;
  case PrefixKind::Depth:
  case PrefixKind::SubstKey:
    out += t.payload;
    break;
  default:
    out += escape_data(t.payload, mode);
  }
  return out;
}

/// Renders the document with no inter-token whitespace.
inline std::string render(const XsDocument& doc) {
  std::string out;
  for (const auto& t : doc.tokens)
    out += render_token(t, doc.escaping);
  return out;
}

namespace detail {

class Tokenizer {
public:
  Tokenizer(std::string_view src, EscapeMode mode) : src_(src), mode_(mode) {}

  XsDocument run() {
    XsDocument doc;
    doc.escaping = mode_;
    skip_space();
    while (pos_ < src_.size()) {
      std::size_t at = pos_;
      char prefix = read_prefix();
      read_token(doc.tokens, prefix, at);
      skip_space();
    }
    return doc;
  }

private:
  [[noreturn]] void fail(TokenizeErrorKind kind, std::size_t at) { throw TokenizeError(kind, at); }

  bool sentinel() const { return mode_ == EscapeMode::Sentinel; }

  void skip_space() {
    while (pos_ < src_.size() && text::is_space(src_[pos_]))
      ++pos_;
  }

  /// True if a structural prefix begins at pos_.
  bool at_prefix() const {
    if (pos_ >= src_.size())
      return false;
    if (sentinel())
      return src_[pos_] == kSentinel;
    return is_prefix_char(src_[pos_]);
  }

  bool at_prefix(char p) const {
    if (sentinel())
      return pos_ + 1 < src_.size() && src_[pos_] == kSentinel && src_[pos_ + 1] == p;
    return pos_ < src_.size() && src_[pos_] == p;
  }

  char read_prefix() {
    if (sentinel()) {
      if (src_[pos_] != kSentinel)
        fail(TokenizeErrorKind::UnexpectedCharacter, pos_);
      if (pos_ + 1 >= src_.size() || !is_prefix_char(src_[pos_ + 1]))
        fail(TokenizeErrorKind::DanglingEscape, pos_);
      pos_ += 2;
      return src_[pos_ - 1];
    }
    if (!is_prefix_char(src_[pos_]))
      fail(TokenizeErrorKind::UnexpectedCharacter, pos_);
    return src_[pos_++];
  }

  /// Raw span up to the next structural prefix (or `stop` in entity mode).
  std::string_view scan(bool stop_at_space, char stop = 0) {
    std::size_t start = pos_;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (stop_at_space && text::is_space(c))
        break;
      if (sentinel()) {
        if (c == kSentinel)
          break;
      } else if (c == '&' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '#') {
        std::size_t len = numeric_reference_length(src_, pos_);
        if (len == 0)
          fail(TokenizeErrorKind::MalformedEntity, pos_);
        pos_ += len;
        continue;
      } else if (stop ? c == stop : is_prefix_char(c)) {
        break;
      }
      ++pos_;
    }
    return src_.substr(start, pos_ - start);
  }

  std::string data(std::string_view raw, std::size_t at) { return unescape_data(raw, mode_, at); }

  std::uint64_t read_number(TokenizeErrorKind kind) {
    std::size_t start = pos_;
    while (pos_ < src_.size() && text::is_digit(src_[pos_]))
      ++pos_;
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (start == pos_ || ec != std::errc())
      fail(kind, start);
    (void)p;
    return v;
  }

  void read_name(XsToken& t, std::size_t at) {
    std::size_t start = pos_;
    std::string_view raw = scan(true);
    if (raw.empty())
      fail(TokenizeErrorKind::EmptyName, at);
    if (text::is_all_digits(raw)) {
      t.subst_key = read_number_from(raw, start);
    } else {
      t.payload = data(raw, start);
    }
    for (;;) {
      skip_space();
      if (at_prefix('#')) {
        std::size_t key_at = pos_;
        pos_ += sentinel() ? 2 : 1;
        if (t.subst_key)
          fail(TokenizeErrorKind::BadKey, key_at);
        t.subst_key = read_number(TokenizeErrorKind::BadKey);
      } else if (t.is_element() && at_prefix('+')) {
        std::size_t depth_at = pos_;
        pos_ += sentinel() ? 2 : 1;
        if (t.depth)
          fail(TokenizeErrorKind::BadDepth, depth_at);
        t.depth = read_number(TokenizeErrorKind::BadDepth);
      } else {
        break;
      }
    }
  }

  static std::uint64_t read_number_from(std::string_view digits, std::size_t at) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (ec != std::errc() || p != digits.data() + digits.size())
      throw TokenizeError(TokenizeErrorKind::BadKey, at);
    return v;
  }

  void read_token(std::vector<XsToken>& tokens, char prefix, std::size_t at) {
    XsToken t;
    t.kind = static_cast<PrefixKind>(prefix);
    switch (t.kind) {
    case PrefixKind::Child:
    case PrefixKind::Sibling:
    case PrefixKind::AttrName:
      read_name(t, at);
      break;
    case PrefixKind::AttrValue:
      if (!sentinel() && pos_ < src_.size() && src_[pos_] == '"') {
        std::size_t start = ++pos_;
        std::string_view raw = scan(false, '"');
        if (pos_ >= src_.size())
          fail(TokenizeErrorKind::UnterminatedDual, at);
        ++pos_;
        t.payload = data(raw, start);
      } else {
        std::size_t start = pos_;
        t.payload = data(scan(false), start);
      }
      break;
    case PrefixKind::TextDual: {
      std::size_t start = pos_;
      std::string_view raw = scan(false, '"');
      if (sentinel() ? !at_prefix('"') : pos_ >= src_.size())
        fail(TokenizeErrorKind::UnterminatedDual, at);
      pos_ += sentinel() ? 2 : 1;
      t.payload = data(raw, start);
      break;
    }
    case PrefixKind::ProcInstr: {
      std::size_t start = pos_;
      std::string_view raw = scan(false);
      if (raw.empty() || text::is_space(raw.front()))
        fail(TokenizeErrorKind::EmptyName, at);
      t.payload = data(raw, start);
      break;
    }
    case PrefixKind::Depth: {
      // A depth after the attribute list belongs to the element that owns it.
      std::uint64_t depth = read_number(TokenizeErrorKind::BadDepth);
      XsToken* owner = nullptr;
      for (auto it = tokens.rbegin(); it != tokens.rend(); ++it) {
        if (it->kind == PrefixKind::AttrName || it->kind == PrefixKind::AttrValue)
          continue;
        if (it->is_element())
          owner = &*it;
        break;
      }
      if (!owner || owner->depth)
        fail(TokenizeErrorKind::BadDepth, at);
      owner->depth = depth;
      return;
    }
    case PrefixKind::SubstKey:
      fail(TokenizeErrorKind::BadKey, at);
    default: {
      std::size_t start = pos_;
      t.payload = data(scan(false), start);
    }
    }
    tokens.push_back(std::move(t));
  }

  std::string_view src_;
  EscapeMode mode_;
  std::size_t pos_ = 0;
};

} // namespace detail

/// Splits an XString into tokens. Whitespace after names, markers and
/// quoted values is padding and is discarded; data payloads keep theirs.
inline XsDocument tokenize(std::string_view text, EscapeMode mode) {
  return detail::Tokenizer(text, mode).run();
}

} // namespace xstring
