#pragma once

#include <algorithm>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "produkt/error.hpp"

namespace produkt {

struct OptionSpec {
  std::string name;
  std::string fallback;  // used when the option is absent
  std::string help;
};

struct CommandSpec {
  std::string name;
  std::string help;
  std::vector<OptionSpec> options;
  /// needs --seed whenever it runs
  bool randomized = false;
  /// name of a single positional argument, if any
  std::string positional;
};

/// The command grammar shared by the command line and suite config files.
inline const std::vector<CommandSpec>& command_table() {
  static const std::vector<CommandSpec> table = [] {
    const OptionSpec group{"group", "", "group spec: A:n, PSL:2:q or PSL:3:q"};
    const OptionSpec out{"out", "", "report path (stdout when empty)"};
    const OptionSpec format{"format", "json", "report format: json | csv"};
    const OptionSpec cert{"cert", "", "certificate path (derived from the config when empty)"};
    const OptionSpec cert_dir{"cert-dir", "certs", "directory for derived certificate paths"};
    const OptionSpec seed{"seed", "", "top-level random seed"};
    return std::vector<CommandSpec>{
        {"decompose", "greedy decomposition of G into conjugates of a set",
         {group, {"set", "", "subset literal"}, {"pool", "full", "candidate pool: full | sample:<m>"},
          {"cap", "64", "maximum number of conjugates"}, seed, out, format, cert, cert_dir}},
        {"oracle", "exact minimal N by exhaustive search",
         {group, {"set", "", "subset literal"}, {"n-max", "6", "largest N searched"}, out, format, cert, cert_dir}},
        {"cover", "cover G by conjugates of a subgroup",
         {group, {"subgroup", "", "subset literal of a subgroup"}, {"pool", "full", "candidate pool"},
          {"cap", "60", "maximum number of conjugates"}, seed, out, format, cert, cert_dir}},
        {"growth", "tripling iteration X, X^3, X^9, ...",
         {group, {"set", "", "generating set (random symmetric pair when empty)"},
          {"max-steps", "16", "maximum number of cubings"}, seed, out, format, cert, cert_dir},
         true},
        {"np-scan", "success fraction of A^3 = G for random A by density",
         {group, {"densities", "0.3,0.5,0.7,0.9,1.0", "comma-separated densities in (0, 1]"},
          {"trials", "100", "samples per density"}, seed, out, format, cert, cert_dir},
         true},
        {"gen-conj", "conjugates of an element that generate G",
         {group, {"element", "", "nontrivial element"}, {"budget", "10000", "maximum draws"}, seed, out, format,
          cert, cert_dir},
         true},
        {"constructive-an", "explicit decomposition of A_n from {1, x}",
         {{"n", "7", "degree"}, {"set", "", "subset literal; the identity is adjoined"}, out, format, cert,
          cert_dir}},
        {"constructive-psl", "explicit decomposition of PSL from {1, x}",
         {group, {"set", "", "subset literal; the identity is adjoined"},
          {"budget", "100000", "commutator draws per level"}, {"cap", "256", "cap for the greedy stages"}, seed,
          out, format, cert, cert_dir},
         true},
        {"suite", "run a config file or the standard suite",
         {{"config", "", "config file, one experiment per line (standard suite when empty)"},
          {"instances", "50", "subsets per group in the standard suite"}, seed, out, format, cert_dir},
         true},
        {"verify", "replay a certificate file", {}, false, "file"},
    };
  }();
  return table;
}

inline const CommandSpec& command_spec(std::string_view name) {
  for (const auto& c : command_table())
    if (c.name == name) return c;
  fail(ErrorCode::DispatchError, "unknown command '" + std::string(name) + "'");
}

/// One experiment: a command plus the options given explicitly, in the
/// order of the command's option table.
struct ExperimentConfig {
  std::string command;
  std::vector<std::pair<std::string, std::string>> options;

  std::optional<std::string> find(std::string_view key) const {
    for (const auto& [k, v] : options)
      if (k == key) return v;
    return std::nullopt;
  }

  /// Explicit value, else the table fallback.
  std::string get(std::string_view key) const {
    if (auto v = find(key)) return *v;
    if (key == command_spec(command).positional) return {};
    for (const auto& o : command_spec(command).options)
      if (o.name == key) return o.fallback;
    fail(ErrorCode::ParseError, "'" + command + "' has no option --" + std::string(key));
  }

  std::string require(std::string_view key) const {
    auto v = get(key);
    if (v.empty()) fail(ErrorCode::ParseError, "'" + command + "' needs --" + std::string(key));
    return v;
  }

  void set(const std::string& key, std::string value) {
    for (auto& [k, v] : options)
      if (k == key) {
        v = std::move(value);
        return;
      }
    options.emplace_back(key, std::move(value));
    canonicalize();
  }

  /// Needs a seed: always for randomized commands, and for sampled pools.
  bool is_randomized() const {
    if (command_spec(command).randomized) return true;
    if (auto pool = find("pool")) return pool->starts_with("sample:");
    return false;
  }

  void validate() const {
    if (is_randomized() && !find("seed"))
      fail(ErrorCode::ParseError, "'" + command + "' is randomized and needs --seed");
  }

  /// Canonical one-line form in the command grammar.
  std::string serialize() const {
    std::string out = command;
    const auto& spec = command_spec(command);
    for (const auto& [k, v] : options) {
      out += ' ';
      if (k != spec.positional) out += "--" + k + ' ';
      out += quote(v);
    }
    return out;
  }

  /// Whitespace-separated words; double-quoted words may contain spaces.
  static ExperimentConfig parse(std::string_view line) {
    std::istringstream in{std::string(line)};
    std::vector<std::string> words;
    for (std::string w; in >> std::quoted(w);) words.push_back(std::move(w));
    return parse_args(std::move(words));
  }

  /// args[0] is the command name.
  static ExperimentConfig parse_args(std::vector<std::string> args) {
    if (args.empty()) fail(ErrorCode::ParseError, "empty command line");
    const auto& spec = command_spec(args.front());
    std::map<std::string, std::string> values;
    auto app = parser_for(spec, values);
    std::vector<std::string> rest(args.begin() + 1, args.end());
    std::reverse(rest.begin(), rest.end());  // CLI11 consumes from the back
    try {
      app->parse(rest);
    } catch (const CLI::Error& e) {
      fail(ErrorCode::ParseError, std::string(e.get_name()) + ": " + e.what());
    }
    ExperimentConfig config{spec.name, {}};
    for (const auto& [k, v] : values)
      if (app->count(option_flag(spec, k))) config.options.emplace_back(k, v);
    config.canonicalize();
    config.validate();
    return config;
  }

  static std::string help(std::string_view command) {
    std::map<std::string, std::string> values;
    return parser_for(command_spec(command), values)->help();
  }

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;

 private:
  static std::string option_flag(const CommandSpec& spec, const std::string& key) {
    return key == spec.positional ? key : "--" + key;
  }

  static std::unique_ptr<CLI::App> parser_for(const CommandSpec& spec, std::map<std::string, std::string>& values) {
    auto app = std::make_unique<CLI::App>(spec.help, spec.name);
    for (const auto& o : spec.options) {
      std::string help = o.help;
      if (!o.fallback.empty()) help += " [" + o.fallback + "]";
      app->add_option("--" + o.name, values[o.name], help);
    }
    if (!spec.positional.empty()) app->add_option(spec.positional, values[spec.positional])->required();
    return app;
  }

  void canonicalize() {
    const auto& spec = command_spec(command);
    auto rank = [&](const std::string& key) {
      for (std::size_t i = 0; i < spec.options.size(); ++i)
        if (spec.options[i].name == key) return i;
      return spec.options.size();
    };
    std::stable_sort(options.begin(), options.end(),
                     [&](const auto& a, const auto& b) { return rank(a.first) < rank(b.first); });
  }

  static std::string quote(const std::string& v) {
    if (!v.empty() && v.find_first_of(" \t\"\\") == std::string::npos) return v;
    std::ostringstream out;
    out << std::quoted(v);
    return out.str();
  }
};

/// Text before the first '#' outside double quotes.
inline std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\\') ++i;
    else if (line[i] == '"') quoted = !quoted;
    else if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

/// Experiments of a config file: one per line, '#' starts a comment.
inline std::vector<ExperimentConfig> parse_config_lines(std::string_view text) {
  std::vector<ExperimentConfig> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = strip_comment(text.substr(start, end - start));
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\r' || line.back() == '\t')) line.remove_suffix(1);
    if (!line.empty()) out.push_back(ExperimentConfig::parse(line));
    start = end + 1;
  }
  return out;
}

}  // namespace produkt
