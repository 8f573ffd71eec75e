#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "kslab/config.hpp"

namespace kslab {

/// Subcommands understood by run_subcommand.
const std::vector<std::string>& subcommands();

/// Executes one subcommand and writes its artifacts below `out_dir`
/// (created if missing). Every CSV starts with a "# " block echoing the
/// config. Progress lines go to `log`. Errors propagate as kslab::Error.
void run_subcommand(const std::string& name, const RunConfig& config,
                    const std::filesystem::path& out_dir, int workers, std::ostream& log);

}  // namespace kslab
