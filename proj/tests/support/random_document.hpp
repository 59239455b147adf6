#pragma once

// Seeded generator of XmlDocuments for round-trip properties. Generated
// documents serialize to XML that parses back to the same tree.

#include "xstring/xml.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace xstring::gen {

struct GeneratorLimits {
  int max_depth = 6;
  int max_children = 4;
  int max_attributes = 3;
  int name_pool = 8;
};

class DocumentGenerator {
public:
  explicit DocumentGenerator(std::uint64_t seed, GeneratorLimits limits = {}) : rng_(seed), limits_(limits) {}

  XmlDocument document() {
    pool_.clear();
    for (int i = 0; i < limits_.name_pool; ++i)
      pool_.push_back(fresh_name(1 + pick(20)));
    XmlDocument doc;
    if (chance(0.2))
      doc.declaration = XmlNode::pi("xml", " version=\"1.0\"");
    if (chance(0.15))
      doc.before_root.push_back(XmlNode::leaf(NodeKind::DtdElement, "DOCTYPE " + name()));
    while (chance(0.2))
      doc.before_root.push_back(chance(0.5) ? comment() : pi());
    doc.root = element(0);
    while (chance(0.2))
      doc.after_root.push_back(chance(0.5) ? comment() : pi());
    return doc;
  }

  std::string name() { return pool_[pick(pool_.size())]; }

private:
  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

  std::string fresh_name(std::size_t len) {
    static const std::string start = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz_";
    static const std::string rest = start + "0123456789-.";
    std::string s(1, start[pick(start.size())]);
    while (s.size() < len)
      s.push_back(rest[pick(rest.size())]);
    return s;
  }

  // Mixes prefix characters, references, spaces and multi-byte text.
  std::string data(std::size_t max_len) {
    static const std::vector<std::string> atoms = {
        "a",  "b", "Z", "7", "x", "/", "|", "'", "\"", "@", "=", "-", "?", "[", "!", "+", "#",
        " ",  "é", "中", "&amp;", "&#47;", "&#x2F;", "&lt;", ">", ";", ":", "\t", "\n", "%"};
    std::string s;
    std::size_t n = 1 + pick(max_len);
    for (std::size_t i = 0; i < n; ++i)
      s += atoms[pick(atoms.size())];
    if (text::is_all_space(s))
      s = "k" + s + "k";
    return s;
  }

  std::string text_content() { return data(16); }

  std::string attribute_value() {
    std::string v = chance(0.1) ? std::string() : data(10);
    bool dq = v.find('"') != std::string::npos, sq = v.find('\'') != std::string::npos;
    if (dq && sq)
      std::erase(v, '\'');
    std::erase(v, '\n');
    std::erase(v, '\t');
    return v;
  }

  XmlNode comment() {
    std::string c = chance(0.1) ? std::string() : data(12);
    std::erase(c, '-');
    return XmlNode::leaf(NodeKind::Comment, c);
  }

  XmlNode pi() {
    std::string target = name();
    if (target.size() >= 3 && (target[0] | 0x20) == 'x' && (target[1] | 0x20) == 'm' && (target[2] | 0x20) == 'l')
      target = "p" + target;
    std::string content;
    if (chance(0.7)) {
      content = " " + data(10);
      std::erase(content, '?');
    }
    return XmlNode::pi(target, content);
  }

  XmlNode leaf() {
    switch (pick(4)) {
    case 0: return comment();
    case 1: return pi();
    case 2: {
      std::string c = chance(0.1) ? std::string() : data(12) + "<&";
      std::erase(c, ']');
      return XmlNode::leaf(NodeKind::CData, c);
    }
    default: return XmlNode::leaf(NodeKind::DtdElement, "ELEMENT " + name() + " (#PCDATA)");
    }
  }

  XmlNode element(int depth) {
    XmlNode e = XmlNode::element(name());
    int attrs = static_cast<int>(pick(static_cast<std::size_t>(limits_.max_attributes) + 1));
    for (int i = 0; i < attrs; ++i) {
      std::string n = name();
      if (e.find_attribute(n))
        continue;
      if (chance(0.1))
        e.attributes.push_back({n, std::nullopt});
      else
        e.attributes.push_back({n, attribute_value()});
    }
    if (depth >= limits_.max_depth)
      return e;
    int kids = static_cast<int>(pick(static_cast<std::size_t>(limits_.max_children) + 1));
    for (int i = 0; i < kids; ++i) {
      bool after_text = !e.children.empty() && e.children.back().kind == NodeKind::Text;
      double roll = std::uniform_real_distribution<double>(0, 1)(rng_);
      if (roll < 0.45)
        e.children.push_back(element(depth + 1));
      else if (roll < 0.7 && !after_text)
        e.children.push_back(XmlNode::text(text_content()));
      else
        e.children.push_back(leaf());
    }
    return e;
  }

  std::mt19937_64 rng_;
  GeneratorLimits limits_;
  std::vector<std::string> pool_;
};

} // namespace xstring::gen
