#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qsphere::cli {

/// Parses and runs one command. Exit codes: 0 success, 1 domain error
/// (qsphere::Error), 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qsphere::cli
