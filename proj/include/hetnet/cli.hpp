#pragma once

// Command-line front end: key=value configs, subcommands, CSV/JSON tables.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "hetnet/model.hpp"
#include "hetnet/optimizer.hpp"
#include "hetnet/simgeo.hpp"
#include "hetnet/specfun.hpp"

namespace hetnet::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitGateFailed = 1;
inline constexpr int kExitConfig = 2;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  NetworkParams net;
  UserParams users;
  specfun::QuadratureSpec quad;
  sim::SimConfig sim;
  opt::SearchGrid grid = opt::SearchGrid::defaults();
  std::vector<double> taus{1.0, 2.0, 5.0, 10.0};
  std::vector<double> xi_list{0.001, 0.01, 0.1, 0.2, 0.3, 1.0};
  std::optional<double> r0;
  double segment_length = 1000.0;  // m, crossing and handoff checks
  std::size_t top_k = 10;
  std::set<std::string> given;  // keys present in the file
};

/// Parses key=value text. Throws ConfigError on unknown, duplicate or
/// malformed keys and when `beta` is missing. P_macro defaults to the value
/// on the equivalence surface, P_micro to P_ref.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Every key parse_config accepts.
const std::vector<std::string>& known_keys();

/// "lo:step:hi" or a comma list.
std::vector<double> parse_list(const std::string& key, const std::string& value);

using Cell = std::variant<double, std::int64_t, bool, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// Fixed 6 significant digits (%.6g); booleans as true/false.
std::string format_cell(const Cell& c);
void write_csv(const Table& t, std::ostream& os);
void write_json(const Table& t, std::ostream& os);

struct Options {
  bool simulate = false;
  bool exact = false;
  unsigned threads = 0;
  std::optional<std::uint64_t> seed;
};

struct CommandResult {
  Table table;
  int exit_code = kExitOk;
  std::vector<std::string> messages;  // diagnostics for stderr
};

CommandResult cmd_coverage(const RunConfig& cfg, const Options& opt);
CommandResult cmd_sweep(const RunConfig& cfg, const Options& opt);
CommandResult cmd_optimize(const RunConfig& cfg, const Options& opt);
CommandResult cmd_validate(const RunConfig& cfg, const Options& opt);

/// Full CLI entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hetnet::cli
