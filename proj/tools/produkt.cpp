#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "produkt/produkt.hpp"

namespace {

void usage() {
  std::cout << "usage: produkt <command> [options]\n\ncommands:\n";
  for (const auto& c : produkt::command_table()) std::printf("  %-18s %s\n", c.name.c_str(), c.help.c_str());
  std::cout << "\n`produkt <command> --help` lists the options of a command.\n";
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty() || args[0] == "-h" || args[0] == "--help") {
    usage();
    return args.empty() ? 1 : 0;
  }
  if (args[0] == "--version") {
    std::cout << "produkt " << PRODUKT_VERSION << "\n";
    return 0;
  }
  try {
    for (const auto& a : args)
      if (a == "-h" || a == "--help") {
        std::cout << produkt::ExperimentConfig::help(args[0]);
        return 0;
      }
    const auto config = produkt::ExperimentConfig::parse_args(args);
    if (config.command == "verify") {
      const auto verdict = produkt::verify_file(config.get("file"));
      std::cout << (verdict.ok ? "ok: " : "mismatch: ") << verdict.message << "\n";
      return verdict.ok ? 0 : 1;
    }
    const auto result = produkt::run_experiment(config);
    if (config.get("out").empty()) std::cout << produkt::emit_report(result.report, config.get("format"));
    return result.exit_code;
  } catch (const produkt::Error& e) {
    std::cerr << "produkt: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "produkt: internal error: " << e.what() << "\n";
    return 1;
  }
}
