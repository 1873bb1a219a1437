#include "parasharp/acceptance.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <exception>

using namespace parasharp;

int main(int argc, char** argv) {
    CLI::App app{"parasharp acceptance runner"};
    int id = 0;
    std::uint64_t seed = kDefaultSeed;
    std::string csv;
    app.add_option("--criterion", id, "criterion id")->required()->check(CLI::Range(1, kCriterionCount));
    app.add_option("--seed", seed, "seed for every random draw");
    app.add_option("--csv", csv, "also write the rows here");
    CLI11_PARSE(app, argc, argv);

    try {
        const auto t0 = std::chrono::steady_clock::now();
        const CriterionOutcome o = run_criterion(id, seed);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (const CriterionCheck& c : o.checks)
            std::printf("criterion %d %-28s %s  %s\n", id, c.name.c_str(), c.pass ? "PASS" : "FAIL", c.detail.c_str());
        if (!csv.empty()) write_csv(o.rows, csv);
        std::printf("criterion %d (%s): %s in %.1f s\n", id, o.title.c_str(), o.pass() ? "PASS" : "FAIL", secs);
        return o.pass() ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "criterion %d: error: %s\n", id, e.what());
        return 2;
    }
}
