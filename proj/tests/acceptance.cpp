// Acceptance runner: one PASS/FAIL line per criterion, check details below it.
#include "verify.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <thread>

int main(int argc, char** argv) {
    int only = 0;
    std::uint64_t seed = 20240611;
    int threads = int(std::max(1u, std::thread::hardware_concurrency()));
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--criterion" && i + 1 < argc) only = std::atoi(argv[++i]);
        else if (a == "--seed" && i + 1 < argc) seed = std::strtoull(argv[++i], nullptr, 10);
        else if (a == "--threads" && i + 1 < argc) threads = std::atoi(argv[++i]);
        else {
            std::fprintf(stderr, "usage: %s [--criterion N] [--seed S] [--threads T]\n", argv[0]);
            return 2;
        }
    }
    int failed = 0;
    for (int id = 1; id <= prlab::kCriteria; ++id) {
        if (only && id != only) continue;
        const prlab::Criterion c = prlab::run_criterion(id, seed, threads);
        std::printf("CRITERION %2d %s  %s (%.1f s)\n", c.id, c.passed() ? "PASS" : "FAIL", c.title.c_str(), c.seconds);
        for (const auto& k : c.checks)
            std::printf("    %s %s/%s: %s -- %s\n", k.passed ? "ok  " : "FAIL", k.module.c_str(), k.op.c_str(),
                        k.name.c_str(), k.detail.c_str());
        std::fflush(stdout);
        failed += !c.passed();
    }
    return failed ? 1 : 0;
}
