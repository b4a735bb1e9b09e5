// cli.hpp: the `nvscc` command-line front end.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nvscc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitClaimFailed = 1;
inline constexpr int kExitBadInput = 2;

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Flat `section.key -> text` settings. Config files use `[section]` headers
/// followed by `key = value` lines; `#` starts a comment.
class RunConfig {
public:
    RunConfig();

    void load_file(const std::filesystem::path& path);
    /// Accepts `section.key`, a bare key when unambiguous, or a flag alias
    /// (dashes and underscores are interchangeable).
    void set(const std::string& key, const std::string& value);

    std::string text(const std::string& key) const;
    double number(const std::string& key) const;
    int integer(const std::string& key) const;
    bool boolean(const std::string& key) const;
    std::vector<double> numbers(const std::string& key) const;

    std::string resolve(const std::string& key) const;
    const std::map<std::string, std::string>& values() const { return values_; }

    std::string subcommand;
    std::filesystem::path out_dir = "nvscc_out";
    std::uint64_t seed = 1;

private:
    std::map<std::string, std::string> values_;
};

RunConfig parse_args(const std::vector<std::string>& args);

int cmd_sideband(const RunConfig& cfg, std::ostream& out);
int cmd_contrast(const RunConfig& cfg, std::ostream& out);
int cmd_sigma_sweep(const RunConfig& cfg, std::ostream& out);
int cmd_electrode(const RunConfig& cfg, std::ostream& out);
int cmd_reproduce_all(const RunConfig& cfg, std::ostream& out);

/// Parses, dispatches and maps exceptions to exit codes (2 bad input, 1 runtime failure).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string usage();

}  // namespace nvscc::cli
