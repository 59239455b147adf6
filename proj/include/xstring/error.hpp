#pragma once

/// \file
/// Typed exceptions raised by the xstring modules. Every exception carries a
/// stable one-line diagnostic (what()) that the CLI prints verbatim.

#include <cstddef>
#include <stdexcept>
#include <string>

namespace xstring {

/// Rule ids for the eight XML well-formedness rules; Syntax covers
/// malformed markup that no rule names.
enum class Rule : int {
  Syntax = 0,
  UniqueRoot = 1,
  MatchedTags = 2,
  DeclarationAtStart = 3,
  NoOverlap = 4,
  AttributesOnOpenTags = 5,
  SingleQuotedValue = 6,
  NamingConventions = 7,
  Entities = 8,
};

class XmlError : public std::runtime_error {
public:
  XmlError(Rule rule, std::size_t offset, std::string message)
      : std::runtime_error(format(rule, offset, message)), rule_(rule),
        offset_(offset), message_(std::move(message)) {}

  Rule rule() const noexcept { return rule_; }
  std::size_t offset() const noexcept { return offset_; }
  const std::string& message() const noexcept { return message_; }

  static std::string format(Rule rule, std::size_t offset,
                            const std::string& message) {
    if (rule == Rule::Syntax)
      return "syntax: " + message + " at offset " + std::to_string(offset);
    return "wellformedness: rule " + std::to_string(static_cast<int>(rule)) +
           " at offset " + std::to_string(offset) + " (" + message + ")";
  }

private:
  Rule rule_;
  std::size_t offset_;
  std::string message_;
};

enum class TokenizeErrorKind {
  DanglingEscape,
  UnterminatedDual,
  EmptyName,
  BadDepth,
  BadKey,
  MalformedEntity,
  UnexpectedCharacter,
};

inline const char* to_string(TokenizeErrorKind kind) {
  switch (kind) {
  case TokenizeErrorKind::DanglingEscape: return "dangling escape";
  case TokenizeErrorKind::UnterminatedDual: return "unterminated dual text";
  case TokenizeErrorKind::EmptyName: return "empty name";
  case TokenizeErrorKind::BadDepth: return "bad depth";
  case TokenizeErrorKind::BadKey: return "bad substitution key";
  case TokenizeErrorKind::MalformedEntity: return "malformed entity";
  case TokenizeErrorKind::UnexpectedCharacter: return "unexpected character";
  }
  return "unknown";
}

class TokenizeError : public std::runtime_error {
public:
  TokenizeError(TokenizeErrorKind kind, std::size_t offset)
      : std::runtime_error(std::string("tokenize: ") + to_string(kind) +
                           " at offset " + std::to_string(offset)),
        kind_(kind), offset_(offset) {}

  TokenizeErrorKind kind() const noexcept { return kind_; }
  std::size_t offset() const noexcept { return offset_; }

private:
  TokenizeErrorKind kind_;
  std::size_t offset_;
};

enum class DecodeErrorKind {
  EmptyStream,
  MissingRoot,
  MultipleRoots,
  ContentOutsideRoot,
  BudgetConflict,
  BudgetOverrun,
  AttrAfterContent,
  AttrWithoutElement,
  ValueWithoutName,
  DuplicateAttribute,
  UnknownKey,
  BadName,
};

inline const char* to_string(DecodeErrorKind kind) {
  switch (kind) {
  case DecodeErrorKind::EmptyStream: return "empty stream";
  case DecodeErrorKind::MissingRoot: return "missing root";
  case DecodeErrorKind::MultipleRoots: return "multiple roots";
  case DecodeErrorKind::ContentOutsideRoot: return "content outside root";
  case DecodeErrorKind::BudgetConflict: return "budget conflict";
  case DecodeErrorKind::BudgetOverrun: return "budget overrun";
  case DecodeErrorKind::AttrAfterContent: return "attribute after content";
  case DecodeErrorKind::AttrWithoutElement: return "attribute without element";
  case DecodeErrorKind::ValueWithoutName: return "attribute value without name";
  case DecodeErrorKind::DuplicateAttribute: return "duplicate attribute";
  case DecodeErrorKind::UnknownKey: return "unknown key";
  case DecodeErrorKind::BadName: return "bad name";
  }
  return "unknown";
}

class DecodeError : public std::runtime_error {
public:
  DecodeError(DecodeErrorKind kind, std::size_t token)
      : std::runtime_error(std::string("decode: ") + to_string(kind) +
                           " at token " + std::to_string(token)),
        kind_(kind), token_(token) {}

  DecodeErrorKind kind() const noexcept { return kind_; }
  std::size_t token() const noexcept { return token_; }

private:
  DecodeErrorKind kind_;
  std::size_t token_;
};

class EncodeError : public std::runtime_error {
public:
  explicit EncodeError(const std::string& what)
      : std::runtime_error("encode: unencodable " + what) {}
};

enum class SubstitutionErrorKind { NumericNameClash, UnknownKey, AlreadySubstituted };

class SubstitutionError : public std::runtime_error {
public:
  SubstitutionError(SubstitutionErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string("subst: ") + name(kind) + " " + detail),
        kind_(kind) {}

  SubstitutionErrorKind kind() const noexcept { return kind_; }

private:
  static const char* name(SubstitutionErrorKind kind) {
    switch (kind) {
    case SubstitutionErrorKind::NumericNameClash: return "numeric name clash";
    case SubstitutionErrorKind::UnknownKey: return "unknown key";
    case SubstitutionErrorKind::AlreadySubstituted: return "already substituted";
    }
    return "unknown";
  }

  SubstitutionErrorKind kind_;
};

enum class BinaryErrorKind { BadMagic, BadVersion, Truncated, BadNibble, Malformed };

inline const char* to_string(BinaryErrorKind kind) {
  switch (kind) {
  case BinaryErrorKind::BadMagic: return "bad magic";
  case BinaryErrorKind::BadVersion: return "bad version";
  case BinaryErrorKind::Truncated: return "truncated";
  case BinaryErrorKind::BadNibble: return "bad nibble";
  case BinaryErrorKind::Malformed: return "malformed";
  }
  return "unknown";
}

class BinaryError : public std::runtime_error {
public:
  BinaryError(BinaryErrorKind kind, std::size_t offset)
      : std::runtime_error(std::string("binary: ") + to_string(kind) +
                           " at byte " + std::to_string(offset)),
        kind_(kind), offset_(offset) {}

  BinaryErrorKind kind() const noexcept { return kind_; }
  std::size_t offset() const noexcept { return offset_; }

private:
  BinaryErrorKind kind_;
  std::size_t offset_;
};

enum class FoldErrorKind { NoSlot, MultipleSlots, MixedSlot, MalformedSlot, IndexOutOfRange, LengthMismatch };

inline const char* to_string(FoldErrorKind kind) {
  switch (kind) {
  case FoldErrorKind::NoSlot: return "no slot";
  case FoldErrorKind::MultipleSlots: return "multiple slots";
  case FoldErrorKind::MixedSlot: return "mixed slot";
  case FoldErrorKind::MalformedSlot: return "malformed slot";
  case FoldErrorKind::IndexOutOfRange: return "index out of range";
  case FoldErrorKind::LengthMismatch: return "length mismatch";
  }
  return "unknown";
}

class FoldError : public std::runtime_error {
public:
  explicit FoldError(FoldErrorKind kind, const std::string& detail = {})
      : std::runtime_error(std::string("fold: ") + to_string(kind) +
                           (detail.empty() ? "" : " (" + detail + ")")),
        kind_(kind) {}

  FoldErrorKind kind() const noexcept { return kind_; }

private:
  FoldErrorKind kind_;
};

class MetricsError : public std::runtime_error {
public:
  explicit MetricsError(const std::string& what)
      : std::runtime_error("metrics: " + what) {}
};

} // namespace xstring
