#pragma once

#include <iosfwd>

namespace edvqe::cli {

/// Entry point of the `edvqe` tool. Returns the process exit code:
/// 0 on success, 1 on runtime failure, 2 on usage or configuration error.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace edvqe::cli
