#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace mfzoo::cli {

struct Check {
    std::string name;
    double value = 0.0;
    double limit = 0.0;
    bool pass = false;
};

struct SuiteResult {
    std::string instantiation;
    std::string suite;
    std::uint64_t seed = 0;
    std::vector<Check> checks;

    bool pass() const;
    nlohmann::json to_json() const;
};

// Known (instantiation, suite) pairs; the first suite of each is the default.
std::vector<std::string> suites_for(const std::string& instantiation);

// Throws DomainError on an unknown pair.
SuiteResult run_suite(const std::string& instantiation, const std::string& suite, std::uint64_t seed);

} // namespace mfzoo::cli
