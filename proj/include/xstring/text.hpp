#pragma once

/// \file
/// Small character helpers shared by the XML and XString layers.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace xstring::text {

inline bool is_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

inline bool is_digit(char c) noexcept { return c >= '0' && c <= '9'; }

inline bool is_all_space(std::string_view s) noexcept {
  for (char c : s)
    if (!is_space(c))
      return false;
  return true;
}

inline bool is_all_digits(std::string_view s) noexcept {
  if (s.empty())
    return false;
  for (char c : s)
    if (!is_digit(c))
      return false;
  return true;
}

/// Number of code points, counting each UTF-8 lead byte once.
inline std::size_t utf8_length(std::string_view s) noexcept {
  std::size_t n = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80)
      ++n;
  return n;
}

inline void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline bool is_name_start(unsigned char c) noexcept {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' ||
         c == ':' || c >= 0x80;
}

inline bool is_name_char(unsigned char c) noexcept {
  return is_name_start(c) || is_digit(static_cast<char>(c)) || c == '-' ||
         c == '.';
}

/// XML Name production, ASCII-strict and permissive above 0x7F.
inline bool is_xml_name(std::string_view s) noexcept {
  if (s.empty() || !is_name_start(static_cast<unsigned char>(s.front())))
    return false;
  for (unsigned char c : s)
    if (!is_name_char(c))
      return false;
  return true;
}

/// Length of the entity or character reference starting at s[pos] == '&',
/// or 0 when it is not a syntactically valid reference.
inline std::size_t reference_length(std::string_view s, std::size_t pos) noexcept {
  std::size_t i = pos + 1;
  if (i >= s.size())
    return 0;
  if (s[i] == '#') {
    ++i;
    bool hex = i < s.size() && s[i] == 'x';
    if (hex)
      ++i;
    std::size_t start = i;
    while (i < s.size() &&
           (is_digit(s[i]) ||
            (hex && ((s[i] >= 'a' && s[i] <= 'f') || (s[i] >= 'A' && s[i] <= 'F')))))
      ++i;
    if (i == start || i >= s.size() || s[i] != ';')
      return 0;
    return i + 1 - pos;
  }
  if (!is_name_start(static_cast<unsigned char>(s[i])))
    return 0;
  while (i < s.size() && is_name_char(static_cast<unsigned char>(s[i])))
    ++i;
  if (i >= s.size() || s[i] != ';')
    return 0;
  return i + 1 - pos;
}

} // namespace xstring::text
