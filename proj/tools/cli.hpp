#pragma once

#include <string>
#include <vector>

namespace ocm::cli {

// Runs the ocmarket command line (argv[0] excluded). Returns the process exit status;
// failures print a JSON error document to stderr and, when possible, to
// <out-dir>/error.json.
int run(const std::vector<std::string>& args);

}  // namespace ocm::cli
