#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "specslice/specslice.h"

namespace {

struct Key {
  std::string name;
  std::string help;
};

std::vector<Key> config_keys() {
  std::vector<Key> keys;
  std::istringstream in(ss_config_keys());
  std::string line;
  while (std::getline(in, line)) {
    auto tab = line.find('\t');
    if (tab != std::string::npos) keys.push_back({line.substr(0, tab), line.substr(tab + 1)});
  }
  return keys;
}

std::string flag_name(const std::string& key) {
  std::string out = "--";
  for (char c : key) out += c == '_' ? '-' : c;
  return out;
}

struct Command {
  CLI::App* app = nullptr;
  std::string config_file;
  std::vector<std::string> sets;
  std::vector<std::string> positional;
  std::map<std::string, std::string> flags;
};

const char* kDescriptions[][2] = {
    {"restructure", "learn slicer embeddings and rebuild the edge set greedily"},
    {"metrics", "print the homophily report of a labeled graph"},
    {"gen", "write a synthetic er, sbm or grid graph"},
    {"oracle-compare", "compare slicer filtering against exact eigendecomposition"},
    {"expressive", "regress frequency-filtered images on a grid graph"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral slicer graph restructuring"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ss_version()));

  const auto keys = config_keys();
  std::map<std::string, Command> commands;
  for (const auto& [name, description] : kDescriptions) {
    Command& cmd = commands[name];
    cmd.app = app.add_subcommand(name, description);
    cmd.app->add_option("--config", cmd.config_file, "key=value config file")->check(CLI::ExistingFile);
    cmd.app->add_option("--set", cmd.sets, "override as key=value (repeatable)");
    cmd.app->add_option("args", cmd.positional, "key=value overrides; gen also takes the generator name");
    for (const auto& key : keys) cmd.app->add_option(flag_name(key.name), cmd.flags[key.name], key.help);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  for (auto& [name, cmd] : commands) {
    if (!cmd.app->parsed()) continue;
    std::ostringstream text;
    if (!cmd.config_file.empty()) {
      std::ifstream in(cmd.config_file);
      text << in.rdbuf() << '\n';
    }
    auto alias = [&](std::string kv) {
      // For gen, "p" means the edge probability.
      if (name == "gen" && kv.rfind("p=", 0) == 0) kv = "edge_p=" + kv.substr(2);
      return kv;
    };
    for (std::size_t i = 0; i < cmd.positional.size(); ++i) {
      const auto& arg = cmd.positional[i];
      if (arg.find('=') != std::string::npos) {
        text << alias(arg) << '\n';
      } else if (name == "gen" && i == 0) {
        text << "generator=" << arg << '\n';
      } else {
        std::cerr << "error: unexpected argument '" << arg << "'\n";
        return 1;
      }
    }
    for (const auto& kv : cmd.sets) text << alias(kv) << '\n';
    for (const auto& [key, value] : cmd.flags) {
      if (cmd.app->count(flag_name(key)) == 0) continue;
      text << (name == "gen" && key == "p" ? "edge_p" : key) << '=' << value << '\n';
    }

    char* json = nullptr;
    ss_status status = ss_run(name.c_str(), text.str().c_str(), &json);
    if (status != SS_OK) {
      std::string stage = ss_last_stage();
      std::cerr << "error" << (stage.empty() ? "" : " [stage " + stage + "]") << ": " << ss_last_error() << '\n';
      return ss_exit_code(status);
    }
    std::cout << json << '\n';
    ss_string_free(json);
    return 0;
  }
  return 1;
}
