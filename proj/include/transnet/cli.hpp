#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace transnet::cli {

/// Entry point shared by the `transnet` binary and the tests. Returns the
/// process exit code: 0 on success, 1 on a failed stage, 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace transnet::cli
