#ifndef EFFIARA_TOOLS_COMMANDS_H_
#define EFFIARA_TOOLS_COMMANDS_H_

#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "CLI11.hpp"

namespace effiara::cli {

// Flag combinations CLI11 cannot express; reported like a parse error.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Command {
  CLI::App* app;
  std::function<void()> run;
};

// Adds every subcommand to `app`. Option storage lives in the returned
// closures, so they must outlive parsing.
std::vector<Command> register_commands(CLI::App& app);

}  // namespace effiara::cli

#endif  // EFFIARA_TOOLS_COMMANDS_H_
