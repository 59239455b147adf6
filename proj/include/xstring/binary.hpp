#pragma once

/// \file
/// Nibble-packed binary form of an XsDocument (`.xsb`).
///
/// Layout: "XSB1", version byte 0x01, then the record stream. Records are
/// taken two at a time; each pair is introduced by one byte whose high
/// nibble codes the first record's kind and whose low nibble codes the
/// second's (0xE pads an odd count). The pair byte is followed by each
/// record body: string records carry a LEB128 length and UTF-8 bytes,
/// Depth and SubstKey records a LEB128 value. An element's depth and
/// binder/reference key follow it as their own records.

#include "xstring/error.hpp"
#include "xstring/grammar.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace xstring {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::array<std::uint8_t, 4> kXsbMagic = {'X', 'S', 'B', '1'};
inline constexpr std::uint8_t kXsbVersion = 0x01;
inline constexpr std::uint8_t kPadNibble = 0xE;

inline constexpr std::uint8_t nibble_code(PrefixKind kind) noexcept {
  switch (kind) {
  case PrefixKind::Child: return 0x0;
  case PrefixKind::Sibling: return 0x1;
  case PrefixKind::Comment: return 0x2;
  case PrefixKind::ProcInstr: return 0x3;
  case PrefixKind::CData: return 0x4;
  case PrefixKind::Dtd: return 0x5;
  case PrefixKind::TextDual: return 0x6;
  case PrefixKind::AttrName: return 0x7;
  case PrefixKind::AttrValue: return 0x8;
  case PrefixKind::Depth: return 0x9;
  case PrefixKind::SubstKey: return 0xA;
  case PrefixKind::Text: return 0xF;
  }
  return kPadNibble;
}

inline std::optional<PrefixKind> kind_from_nibble(std::uint8_t code) noexcept {
  static constexpr std::array<PrefixKind, 11> low = {
      PrefixKind::Child,  PrefixKind::Sibling,  PrefixKind::Comment,   PrefixKind::ProcInstr,
      PrefixKind::CData,  PrefixKind::Dtd,      PrefixKind::TextDual,  PrefixKind::AttrName,
      PrefixKind::AttrValue, PrefixKind::Depth, PrefixKind::SubstKey};
  if (code < low.size())
    return low[code];
  if (code == 0xF)
    return PrefixKind::Text;
  return std::nullopt;
}

namespace detail {

struct Record {
  PrefixKind kind;
  std::string payload;
  std::uint64_t value = 0;
};

inline void put_varint(Bytes& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<std::uint8_t>(v | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<std::uint8_t>(v));
}

inline void put_body(Bytes& out, const Record& r) {
  if (r.kind == PrefixKind::Depth || r.kind == PrefixKind::SubstKey) {
    put_varint(out, r.value);
    return;
  }
  put_varint(out, r.payload.size());
  out.insert(out.end(), r.payload.begin(), r.payload.end());
}

inline std::vector<Record> flatten(const XsDocument& doc) {
  std::vector<Record> records;
  for (const auto& t : doc.tokens) {
    records.push_back({t.kind, t.payload, 0});
    if (t.depth && t.is_element())
      records.push_back({PrefixKind::Depth, {}, *t.depth});
    if (t.subst_key)
      records.push_back({PrefixKind::SubstKey, {}, *t.subst_key});
  }
  return records;
}

class Reader {
public:
  Reader(std::span<const std::uint8_t> data, std::size_t base) : data_(data), base_(base) {}

  bool done() const { return pos_ >= data_.size(); }
  std::size_t offset() const { return base_ + pos_; }

  std::uint8_t byte() {
    if (done())
      throw BinaryError(BinaryErrorKind::Truncated, offset());
    return data_[pos_++];
  }

  std::uint64_t varint() {
    std::uint64_t v = 0;
    for (int shift = 0;; shift += 7) {
      std::size_t at = offset();
      std::uint8_t b = byte();
      if (shift == 63 && b > 1)
        throw BinaryError(BinaryErrorKind::Malformed, at);
      v |= static_cast<std::uint64_t>(b & 0x7F) << shift;
      if (!(b & 0x80))
        return v;
      if (shift >= 63)
        throw BinaryError(BinaryErrorKind::Malformed, at);
    }
  }

  std::string string() {
    std::size_t at = offset();
    std::uint64_t len = varint();
    if (len > data_.size() - pos_)
      throw BinaryError(BinaryErrorKind::Truncated, at);
    std::string s(reinterpret_cast<const char*>(data_.data() + pos_), static_cast<std::size_t>(len));
    pos_ += static_cast<std::size_t>(len);
    return s;
  }

private:
  std::span<const std::uint8_t> data_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

} // namespace detail

/// The record stream without the envelope.
inline Bytes pack_payload(const XsDocument& doc) {
  auto records = detail::flatten(doc);
  Bytes out;
  for (std::size_t i = 0; i < records.size(); i += 2) {
    const detail::Record& first = records[i];
    const detail::Record* second = i + 1 < records.size() ? &records[i + 1] : nullptr;
    out.push_back(static_cast<std::uint8_t>((nibble_code(first.kind) << 4) |
                                            (second ? nibble_code(second->kind) : kPadNibble)));
    detail::put_body(out, first);
    if (second)
      detail::put_body(out, *second);
  }
  return out;
}

inline Bytes pack(const XsDocument& doc) {
  Bytes out(kXsbMagic.begin(), kXsbMagic.end());
  out.push_back(kXsbVersion);
  Bytes payload = pack_payload(doc);
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

/// Parses a bare record stream; `base` offsets error positions.
inline XsDocument unpack_payload(std::span<const std::uint8_t> data, std::size_t base = 0) {
  detail::Reader in(data, base);
  XsDocument doc;
  bool padded = false;
  while (!in.done()) {
    if (padded)
      throw BinaryError(BinaryErrorKind::Malformed, in.offset());
    std::size_t at = in.offset();
    std::uint8_t pair = in.byte();
    const std::uint8_t codes[2] = {static_cast<std::uint8_t>(pair >> 4), static_cast<std::uint8_t>(pair & 0xF)};
    if (codes[0] == kPadNibble)
      throw BinaryError(BinaryErrorKind::BadNibble, at);
    for (std::uint8_t code : codes) {
      if (code == kPadNibble) {
        padded = true;
        continue;
      }
      auto kind = kind_from_nibble(code);
      if (!kind)
        throw BinaryError(BinaryErrorKind::BadNibble, at);
      if (*kind == PrefixKind::Depth || *kind == PrefixKind::SubstKey) {
        std::size_t value_at = in.offset();
        std::uint64_t value = in.varint();
        if (doc.tokens.empty())
          throw BinaryError(BinaryErrorKind::Malformed, value_at);
        XsToken& owner = doc.tokens.back();
        if (*kind == PrefixKind::Depth) {
          if (!owner.is_element() || owner.depth)
            throw BinaryError(BinaryErrorKind::Malformed, value_at);
          owner.depth = value;
        } else {
          if (!owner.is_name_bearing() || owner.subst_key)
            throw BinaryError(BinaryErrorKind::Malformed, value_at);
          owner.subst_key = value;
        }
        continue;
      }
      doc.tokens.push_back(make_token(*kind, in.string()));
    }
  }
  return doc;
}

/// Inverse of pack. Never reads past the input; every failure is a
/// BinaryError.
inline XsDocument unpack(std::span<const std::uint8_t> data) {
  if (data.size() < kXsbMagic.size() || !std::equal(kXsbMagic.begin(), kXsbMagic.end(), data.begin()))
    throw BinaryError(BinaryErrorKind::BadMagic, 0);
  if (data.size() < 5)
    throw BinaryError(BinaryErrorKind::Truncated, 4);
  if (data[4] != kXsbVersion)
    throw BinaryError(BinaryErrorKind::BadVersion, 4);
  return unpack_payload(data.subspan(5), 5);
}

} // namespace xstring
