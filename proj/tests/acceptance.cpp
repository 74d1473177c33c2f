// Runs every acceptance criterion and prints one line each; exit 0 iff all pass.
#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "amenable/verify.hpp"

int main(int argc, char** argv) {
    CLI::App app{"acceptance suite"};
    amenable::verify::SuiteOptions opt;
    app.add_option("--seed", opt.seed, "random seed")->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    int failed = 0;
    for (const auto& r : amenable::verify::run_all(opt)) {
        std::cout << amenable::verify::format_line(r) << '\n';
        std::fprintf(stderr, "  criterion %d took %.3f s\n", r.id, r.seconds);
        failed += !r.passed;
    }
    std::cout << (failed ? "FAILED " + std::to_string(failed) + " of 10" : std::string("ALL 10 PASSED")) << '\n';
    return failed ? 1 : 0;
}
