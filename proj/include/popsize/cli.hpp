#ifndef POPSIZE_CLI_HPP
#define POPSIZE_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace popsize::cli {

// Exit codes: 0 success, 2 usage error, 3 data validation error,
// 4 numerical or degeneracy error. Every failure writes one line of the
// form "popsize: error: <category>: <message>" to err.
int run(std::vector<std::string> args, std::ostream &out, std::ostream &err);

} // namespace popsize::cli

#endif
