// effiara: plan annotation campaigns, score annotator reliability, build
// soft-labelled datasets and train a reliability-weighted baseline.
//
// Exit status: 0 success, 1 invalid input, 2 bad usage.

#include <exception>
#include <iostream>

#include "CLI11.hpp"
#include "commands.h"
#include "effiara/errors.h"

namespace {

constexpr int kExitInvalidInput = 1;
constexpr int kExitUsage = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Annotation campaign planning and annotator reliability toolkit", "effiara"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "effiara 0.1.0");
  const std::vector<effiara::cli::Command> commands = effiara::cli::register_commands(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    for (const auto& command : commands) {
      if (command.app->parsed()) command.run();
    }
  } catch (const effiara::cli::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\nRun with --help for more information.\n";
    return kExitUsage;
  } catch (const effiara::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  }
  return 0;
}
