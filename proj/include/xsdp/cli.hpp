#pragma once

#include "xsdp/model.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace xsdp::cli {

/// Everything the three subcommands read from the command line.
struct RunConfig {
  std::string domain;
  std::size_t iterations = 0;
  bool iterations_set = false;
  bool prune = false;
  std::string discount;  // exact literal, empty = domain's
  std::string dot_dir;
  std::string case_dir;
  std::string stats_path;
  std::string state;
  std::size_t horizon = 0;
  bool horizon_set = false;
  std::vector<std::string> axes;
  std::vector<std::string> fixed;  // "name=value"
  std::size_t resolution = 50;
  std::string out_path;
};

/// "k=0,x1=30,h=false" -> assignment over the model's variables. Throws Error
/// on unknown names or malformed values; does not check completeness.
Assignment parse_state(const Dcmdp& m, const std::string& text);

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_grid(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Full command line ("xsdp solve --domain ..."). Returns the exit status:
/// 0 success, 1 domain/solve error, 2 usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Writes `content` to a temporary sibling and renames it over `path`.
void write_atomically(const std::string& path, const std::string& content);

}  // namespace xsdp::cli
