#pragma once

// Command dispatch for the finsheaf tool. Every command reads JSON inputs,
// produces one JSON report and a short human summary. Reports are
// deterministic: keys are sorted and all searches are ordered scans.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "finsheaf/json_io.hpp"

namespace finsheaf {

enum class Command {
  SpaceCheck,
  PresheafCheck,
  Sheafify,
  Stalks,
  Pullback,
  Grassmann,
  Classify,
  Embed,
  DemoCounterexample,
};

std::string_view to_string(Command c);
std::optional<Command> parse_command(std::string_view name);
const std::vector<std::string>& command_names();

struct RunConfig {
  Command command = Command::SpaceCheck;
  std::optional<std::string> space, ring, presheaf, cocycle, weights, map, algebras;
  std::optional<int> k, n, N;
  std::size_t budget = kDefaultBudget;
  /// Report destination; stdout when empty.
  std::optional<std::string> out;
};

/// Exit codes of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitBudget = 2;

struct RunResult {
  int exit_code = kExitOk;
  /// Absent only for parse errors.
  std::optional<Json> report;
  std::string summary;
};

/// Runs a command without touching the filesystem except to read inputs. Never throws.
RunResult execute(const RunConfig& config);

/// execute() plus output: the report goes to config.out or `out`, the summary to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// The two-algebra counterexample on the Sierpinski space. Without arguments
/// A0 = F_2[t]/(t^2), A1 = F_2 and rho(t) = 0.
Json demo_counterexample(const std::optional<AlgebraPair>& algebras = std::nullopt,
                         std::size_t budget = kDefaultBudget);

}  // namespace finsheaf
