#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace authorid {

// Entry point behind the authorid binary. Returns 0 on success, 1 on usage
// errors, 2 on data/model errors (with a one-line JSON error on err).
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace authorid
