// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <memory>

namespace htkit::llm {
class Backend;
}

namespace htkit::cli {

/// Exit codes shared by every subcommand.
enum Exit : int {
  kOk = 0,
  kFindings = 1,  // analysis-negative: flags raised, divergence, rejected generation
  kUsage = 2,
  kInput = 3,
  kInternal = 4,
};

/// Backend override for tests; null selects HTTP or --mock per the flags.
void set_backend_override(std::shared_ptr<llm::Backend> backend);

/// Runs the `htkit` command line. Human-readable output goes to `out`,
/// diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace htkit::cli
