#pragma once

// Loads the golden CLI corpus and replays it through cli::run.

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "transkit/cli.hpp"

namespace tk_test {

struct GoldenCase {
  std::string name;
  std::vector<std::string> args;
  std::string input;
};

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(' ');
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(' ') - b + 1);
}

inline std::vector<GoldenCase> load_golden_cases(const std::string& dir) {
  std::ifstream f(dir + "/cases.txt");
  std::vector<GoldenCase> out;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, '|')) fields.push_back(trim(field));
    GoldenCase c;
    c.name = fields.at(0);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      if (fields[i].rfind("stdin=", 0) == 0)
        c.input = fields[i].substr(6);
      else
        c.args.push_back(fields[i]);
    }
    out.push_back(std::move(c));
  }
  return out;
}

// stdout, then "[stderr]" and stderr, then "[exit N]".
inline std::string run_golden(const GoldenCase& c) {
  std::istringstream in(c.input);
  std::ostringstream out, err;
  int rc = transkit::cli::run(c.args, in, out, err);
  std::string o = out.str();
  if (!o.empty() && o.back() != '\n') o += '\n';
  return o + "[stderr]\n" + err.str() + "[exit " + std::to_string(rc) + "]\n";
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace tk_test
