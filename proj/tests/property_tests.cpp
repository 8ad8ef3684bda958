// Randomized property checks. Usage: property_tests [seed] [meshes]
#include "properties.hpp"

#include <cstdio>
#include <cstdlib>

int main(int argc, char** argv)
{
    const unsigned seed = argc > 1 ? static_cast<unsigned>(std::strtoul(argv[1], nullptr, 10)) : 20240607u;
    const int meshes = argc > 2 ? std::atoi(argv[2]) : 40;
    std::printf("seed %u, %d random meshes\n", seed, meshes);
    int failed = 0;
    for (const auto& o : mfforge::props::run_all(seed, meshes)) {
        std::printf("%s %-40s worst %.3e (bound %.1e, %d samples) at %s\n", o.pass() ? "ok  " : "FAIL",
                    o.name.c_str(), o.worst, o.bound, o.samples, o.detail.c_str());
        failed += !o.pass();
    }
    return failed == 0 ? 0 : 1;
}
