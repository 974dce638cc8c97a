#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "chargeplan/core/types.hpp"

namespace chargeplan {

struct Violation {
    std::string path;
    std::string message;
};

struct ParseResult {
    std::optional<Instance> instance;
    std::vector<Violation> violations;

    bool ok() const { return instance.has_value(); }
};

class InvalidInstanceError : public std::runtime_error {
public:
    explicit InvalidInstanceError(std::vector<Violation> v);
    const std::vector<Violation>& violations() const { return violations_; }

private:
    std::vector<Violation> violations_;
};

// Parses and validates an instance document. Either a fully validated
// Instance comes back or the complete list of invariant violations; a
// partially valid instance never escapes.
ParseResult parse_instance(const nlohmann::json& doc);

nlohmann::json instance_to_json(const Instance& inst);

Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path);

// Solution files.
nlohmann::json configuration_to_json(const StationConfiguration& config, const Instance& inst);
StationConfiguration configuration_from_json(const nlohmann::json& doc, const Instance& inst);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace chargeplan
