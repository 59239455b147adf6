#pragma once

/// \file
/// Redundant-name substitution: repeated long element and attribute names
/// are bound to a numeric key at their first occurrence (`NAME#k`) and
/// replaced by the bare key digits afterwards.

#include "xstring/error.hpp"
#include "xstring/grammar.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace xstring {

/// Keys are dense, 0..size()-1, in first-occurrence order.
struct SubstitutionTable {
  std::vector<std::string> entries;

  std::optional<std::string_view> lookup(std::uint64_t key) const {
    if (key >= entries.size())
      return std::nullopt;
    return entries[key];
  }
  bool empty() const noexcept { return entries.empty(); }
  std::size_t size() const noexcept { return entries.size(); }

  friend bool operator==(const SubstitutionTable&, const SubstitutionTable&) = default;
};

/// Substitutes every name at least `threshold` characters long that occurs
/// two or more times, provided the substitution does not lengthen the
/// rendered XString.
inline std::pair<SubstitutionTable, XsDocument> build_substitution(const XsDocument& doc,
                                                                   std::size_t threshold) {
  const bool sentinel = doc.escaping == EscapeMode::Sentinel;
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& t : doc.tokens) {
    if (!t.is_name_bearing())
      continue;
    if (t.subst_key)
      throw SubstitutionError(SubstitutionErrorKind::AlreadySubstituted, "document already carries keys");
    if (text::is_all_digits(t.payload))
      throw SubstitutionError(SubstitutionErrorKind::NumericNameClash, "name '" + t.payload + "'");
    ++counts[t.payload];
  }

  SubstitutionTable table;
  std::unordered_map<std::string, std::optional<std::uint64_t>> decided;
  XsDocument out = doc;
  for (auto& t : out.tokens) {
    if (!t.is_name_bearing())
      continue;
    auto it = decided.find(t.payload);
    if (it == decided.end()) {
      std::optional<std::uint64_t> key;
      std::size_t count = counts[t.payload];
      if (t.payload.size() >= threshold && count >= 2) {
        auto candidate = static_cast<std::uint64_t>(table.size());
        auto digits = static_cast<long long>(detail::digit_count(candidate));
        auto rendered = static_cast<long long>(escape_data(t.payload, doc.escaping).size());
        long long binder_cost = (sentinel ? 2 : 1) + digits;
        long long saved = static_cast<long long>(count - 1) * (rendered - digits);
        if (saved >= binder_cost) {
          key = candidate;
          table.entries.push_back(t.payload);
        }
      }
      decided.emplace(t.payload, key);
      if (key)
        t.subst_key = key;
      continue;
    }
    if (it->second) {
      t.payload.clear();
      t.subst_key = it->second;
    }
  }
  return {std::move(table), std::move(out)};
}

/// Replaces key references with their names using `table` and drops binders.
inline XsDocument expand_substitution(const SubstitutionTable& table, const XsDocument& doc) {
  XsDocument out = doc;
  for (auto& t : out.tokens) {
    if (!t.subst_key)
      continue;
    if (t.is_reference()) {
      auto name = table.lookup(*t.subst_key);
      if (!name)
        throw SubstitutionError(SubstitutionErrorKind::UnknownKey, "#" + std::to_string(*t.subst_key));
      t.payload = std::string(*name);
    }
    t.subst_key.reset();
  }
  return out;
}

/// Rebuilds the table from the `NAME#k` binders carried in the stream.
inline SubstitutionTable table_from_binders(const XsDocument& doc) {
  SubstitutionTable table;
  for (const auto& t : doc.tokens) {
    if (!t.is_binder())
      continue;
    auto key = static_cast<std::size_t>(*t.subst_key);
    if (key > doc.tokens.size())
      throw SubstitutionError(SubstitutionErrorKind::UnknownKey, "#" + std::to_string(key));
    if (table.entries.size() <= key)
      table.entries.resize(key + 1);
    table.entries[key] = t.payload;
  }
  return table;
}

/// Expansion with the implicit table; a reference to a key that no binder
/// before it defines is an UnknownKey.
inline XsDocument expand_substitution(const XsDocument& doc) {
  std::unordered_map<std::uint64_t, std::string> bound;
  XsDocument out = doc;
  for (auto& t : out.tokens) {
    if (!t.subst_key)
      continue;
    if (t.is_binder()) {
      bound[*t.subst_key] = t.payload;
    } else {
      auto it = bound.find(*t.subst_key);
      if (it == bound.end())
        throw SubstitutionError(SubstitutionErrorKind::UnknownKey, "#" + std::to_string(*t.subst_key));
      t.payload = it->second;
    }
    t.subst_key.reset();
  }
  return out;
}

} // namespace xstring
