#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qcnn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/**
 * Entry point of the `qcnnwb` experiment driver. `args` excludes the program
 * name. Returns 0 on success, 2 on usage errors and 1 on runtime failures.
 *
 * Subcommands: train, sweep, entropy, baseline, synth, encode-dump, probe.
 * `--config <file>` reads an INI file with one section per subcommand
 * (`[train]`, `[sweep]`, ...); flags given on the command line take
 * precedence over the file.
 */
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace qcnn::cli
