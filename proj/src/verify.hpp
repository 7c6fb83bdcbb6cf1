#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

namespace prlab {

/// One property check; module/op say where a failure comes from.
struct Check {
    std::string module, op, name;
    bool passed = false;
    std::string detail;
};

struct Ledger {
    std::string suite;
    std::uint64_t seed = 0;
    std::vector<Check> checks;
    double seconds = 0.0;

    bool passed() const;
    long failures() const;
};

/// Acceptance criteria 1..10; each is a list of checks that must all pass.
struct Criterion {
    int id = 0;
    std::string title;
    std::vector<Check> checks;
    double seconds = 0.0;
    double budget = 0.0;  // runtime budget in seconds, 0 when none

    bool passed() const;
};

constexpr int kCriteria = 10;

Criterion run_criterion(int id, std::uint64_t seed = 20240611, int threads = 1);

/// geometry, operators, solver, regularity, barrier, constants, hausdorff, all.
const std::vector<std::string>& suite_names();
Ledger verify_suite(const std::string& suite, std::uint64_t seed = 20240611, int threads = 1);

nlohmann::json to_json(const Check& c);
nlohmann::json to_json(const Ledger& l);
nlohmann::json to_json(const Criterion& c);

}  // namespace prlab
