#pragma once

#include "midas/pipeline.hpp"

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace midas::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kBackend = 2,
    kIo = 3,
};

/// Bad flags, bad config file or inconsistent inputs; maps to exit code 1.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// key -> raw value text. Keys use underscores (alpha, priv_seeds, ...).
using Settings = std::map<std::string, std::string>;

/// Every key accepted in a config file.
const std::vector<std::string>& known_keys();

/// Parses "key = value" lines; '#' starts a comment, blank lines are skipped.
/// Unknown keys and malformed lines throw UsageError naming `source:line`.
Settings parse_config(std::istream& in, const std::string& source);
Settings load_config(const std::string& path);

/// Splits a list value on commas and whitespace.
std::vector<std::string> split_list(const std::string& text);

/// Stego settings for `n` secrets: defaults_for(n) overridden by `s`.
StegoConfig stego_config(const Settings& s, std::size_t n);

/// Runs one invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int main(int argc, char** argv);

} // namespace midas::cli
