#ifndef EFFIARA_TOOLS_FILE_IO_H_
#define EFFIARA_TOOLS_FILE_IO_H_

#include <string>
#include <string_view>

namespace effiara::cli {

// Whole file as bytes. Throws effiara::Error when unreadable.
std::string read_file(const std::string& path);

// Writes to a temporary file next to `path` and renames it into place, so a
// reader never sees a half-written output. An empty path or "-" means stdout.
void write_output(const std::string& path, std::string_view content);

}  // namespace effiara::cli

#endif  // EFFIARA_TOOLS_FILE_IO_H_
