#pragma once

#include "xstring/xstring.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace xstring::cli {

struct Config {
  std::string command;
  std::string input;
  std::string output;
  EncodeMode mode = EncodeMode::SafeSibling;
  EscapeMode escape = EscapeMode::Entity;
  std::size_t threshold = 3;
  FoldMode fold_mode = FoldMode::Nested;
  std::size_t index = 0;
  bool whitespace_significant = false;
  std::string host;
  std::string format = "kv";
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& what) : std::runtime_error("io: " + what) {}
};

namespace detail {

inline const std::map<std::string, EscapeMode> kEscapeNames = {{"entity", EscapeMode::Entity},
                                                                {"sentinel", EscapeMode::Sentinel}};

inline std::string slurp_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f)
    throw IoError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

/// XString text files conventionally end in one newline that is not data.
inline std::string_view chomp(std::string_view s) {
  if (!s.empty() && s.back() == '\n')
    s.remove_suffix(1);
  return s;
}

class Session {
public:
  Session(const Config& cfg, std::istream& in, std::ostream& out, std::ostream& err, bool out_is_terminal)
      : cfg_(cfg), in_(in), out_(out), err_(err), out_is_terminal_(out_is_terminal) {}

  int dispatch() {
    const std::string& c = cfg_.command;
    if (c == "encode")
      return encode_cmd();
    if (c == "decode")
      return emit_text(serialize_xml(decode(expand_substitution(read_xs()))) + "\n");
    if (c == "canon")
      return emit_xs(to_child_depth(read_xs()));
    if (c == "subst")
      return emit_xs(build_substitution(read_xs(), cfg_.threshold).second);
    if (c == "expand")
      return emit_xs(expand_substitution(read_xs()));
    if (c == "pack")
      return pack_cmd();
    if (c == "unpack")
      return unpack_cmd();
    if (c == "fold")
      return emit_text(serialize_xml(fold(read_xml(), parse_xml(slurp_file(cfg_.host)), cfg_.fold_mode)) + "\n");
    if (c == "unfold")
      return emit_text(serialize_xml(unfold(read_xml(), cfg_.index)) + "\n");
    if (c == "stats")
      return stats_cmd();
    if (c == "check")
      return check_cmd();
    throw UsageError("a command is required");
  }

private:
  std::string read_input() {
    if (!cfg_.input.empty() && cfg_.input != "-")
      return slurp_file(cfg_.input);
    return {std::istreambuf_iterator<char>(in_), std::istreambuf_iterator<char>()};
  }

  XmlDocument read_xml() { return parse_xml(read_input()); }

  XsDocument read_xs() { return tokenize(chomp(read_input()), cfg_.escape); }

  bool to_terminal() const { return (cfg_.output.empty() || cfg_.output == "-") && out_is_terminal_; }

  int write(const std::string& data) {
    if (cfg_.output.empty() || cfg_.output == "-") {
      out_ << data;
      out_.flush();
      return 0;
    }
    std::ofstream f(cfg_.output, std::ios::binary);
    if (!f || !(f << data))
      throw IoError("cannot write '" + cfg_.output + "'");
    return 0;
  }

  int emit_text(const std::string& text) { return write(text); }

  int emit_xs(const XsDocument& doc) {
    if (doc.escaping == EscapeMode::Sentinel && to_terminal())
      err_ << "warning: sentinel-escaped output contains NUL bytes\n";
    return write(render(doc) + "\n");
  }

  EncodeOptions encode_options() const {
    EncodeOptions o;
    o.mode = cfg_.mode;
    o.escaping = cfg_.escape;
    o.drop_insignificant_whitespace = !cfg_.whitespace_significant;
    return o;
  }

  int encode_cmd() { return emit_xs(encode(read_xml(), encode_options())); }

  int pack_cmd() {
    if (to_terminal())
      throw UsageError("refusing to write binary output to a terminal; use -o or a pipe");
    Bytes b = pack(read_xs());
    return write(std::string(b.begin(), b.end()));
  }

  int unpack_cmd() {
    std::string raw = read_input();
    XsDocument doc = unpack({reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()});
    doc.escaping = cfg_.escape;
    return emit_xs(doc);
  }

  int stats_cmd() {
    std::string xml = read_input();
    SizeReport r = measure(xml, encode(parse_xml(xml), encode_options()));
    return write(cfg_.format == "table" ? format_table(r) : format_kv(r));
  }

  int check_cmd() {
    WellFormednessReport report = check_well_formed(read_input());
    if (report.ok())
      return write("ok\n");
    for (const auto& v : report.violations)
      err_ << XmlError(v.rule, v.offset, v.message).what() << '\n';
    return 1;
  }

  const Config& cfg_;
  std::istream& in_;
  std::ostream& out_;
  std::ostream& err_;
  bool out_is_terminal_;
};

} // namespace detail

/// Runs one invocation. `args` excludes the program name. Returns the exit
/// status: 0 success, 1 typed error, 2 usage error.
inline int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err,
               bool out_is_terminal = false) {
  Config cfg;
  if (const char* env = std::getenv("XSTRING_ESCAPE"); env && *env) {
    auto it = detail::kEscapeNames.find(env);
    if (it == detail::kEscapeNames.end()) {
      err << "usage: XSTRING_ESCAPE must be entity or sentinel\n";
      return 2;
    }
    cfg.escape = it->second;
  }

  CLI::App app{"XML to XString converter", "xstring"};
  app.require_subcommand(1);

  const std::map<std::string, EncodeMode> modes = {{"sibling", EncodeMode::SafeSibling},
                                                   {"canonical", EncodeMode::CanonicalChildDepth}};
  const std::map<std::string, FoldMode> fold_modes = {{"nested", FoldMode::Nested}, {"multi", FoldMode::Multi}};

  auto add = [&](const std::string& name, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("-i,--input", cfg.input, "input file (default stdin)");
    sub->add_option("-o,--output", cfg.output, "output file (default stdout)");
    sub->add_option("--escape", cfg.escape, "entity or sentinel")
        ->transform(CLI::CheckedTransformer(detail::kEscapeNames, CLI::ignore_case));
    sub->add_flag("--whitespace-significant", cfg.whitespace_significant, "keep whitespace-only text");
    sub->callback([&cfg, name] { cfg.command = name; });
    return sub;
  };

  add("encode", "XML to XString")
      ->add_option("--mode", cfg.mode, "sibling or canonical")
      ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
  add("decode", "XString to XML");
  add("canon", "rewrite an XString with children and explicit depths only");
  add("subst", "substitute repeated names with numeric keys")
      ->add_option("--threshold", cfg.threshold, "minimum name length (default 3)")
      ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));
  add("expand", "undo substitution");
  add("pack", "XString to binary");
  add("unpack", "binary to XString");
  CLI::App* fold_cmd = add("fold", "embed the input document in a host's XSTRING element");
  fold_cmd->add_option("--host", cfg.host, "host XML file")->required();
  fold_cmd->add_option("--fold-mode", cfg.fold_mode, "nested or multi")
      ->transform(CLI::CheckedTransformer(fold_modes, CLI::ignore_case));
  add("unfold", "extract an embedded document")->add_option("--index", cfg.index, "payload index (default 0)");
  CLI::App* stats = add("stats", "size report");
  stats->add_option("--mode", cfg.mode, "sibling or canonical")
      ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
  stats->add_option("--format", cfg.format, "kv or table")->check(CLI::IsMember({"kv", "table"}));
  add("check", "report well-formedness violations");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    return detail::Session(cfg, in, out, err, out_is_terminal).dispatch();
  } catch (const UsageError& e) {
    err << "usage: " << e.what() << '\n';
    return 2;
  } catch (const std::logic_error& e) {
    err << "internal: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return 1;
  }
}

} // namespace xstring::cli
