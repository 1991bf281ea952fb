#pragma once

#include <string>

#include "json.hpp"
#include "twoway/cli.hpp"

namespace twoway::cli {

/// Output sink for one run: every file starts with the command and config hash.
class Output {
public:
    explicit Output(const RunConfig& config);

    /// CSV with a comment line, then the column header annotated with units.
    void csv(const std::string& name, const std::string& body) const;

    /// JSON object with "command" and "config_hash" prepended.
    void json(const std::string& name, const nlohmann::ordered_json& body) const;

    const std::string& directory() const { return dir_; }

private:
    std::string command_;
    std::string hash_;
    std::string dir_;
};

}  // namespace twoway::cli
