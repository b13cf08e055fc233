#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace greyknn {

/// Entry point behind the `greyknn` binary. `args` excludes the program name.
/// Returns 0 on success, 1 on usage errors, 2 on data errors. Diagnostics go to stderr.
int run_cli(const std::vector<std::string>& args);

std::string sha256_hex(std::string_view bytes);

}  // namespace greyknn
