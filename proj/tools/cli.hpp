// Command-line front end: test, gof, gen, bench and synth.

#ifndef SCORECI_TOOLS_CLI_HPP_
#define SCORECI_TOOLS_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace scoreci::cli {

// Exit codes. Test decisions never change the code.
inline constexpr int kOk = 0;
inline constexpr int kPipelineError = 1;
inline constexpr int kUsageError = 2;

// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace scoreci::cli

#endif  // SCORECI_TOOLS_CLI_HPP_
