#pragma once

#include "mosaic/ir.hpp"

#include <string>
#include <vector>

namespace mosaic {

struct BenchmarkEntry {
    std::string id;
    std::string path; // relative to the suite directory
    std::string description;
    int instructions = 0;
    int blocks = 0;
};

struct BenchmarkSuite {
    std::string dir;
    std::vector<BenchmarkEntry> entries;

    const BenchmarkEntry* find(const std::string& id) const {
        for (const auto& e : entries)
            if (e.id == id) return &e;
        return nullptr;
    }
};

// Locates the bundled benchmark directory: explicit override, then the
// MOSAIC_BENCH_DIR environment variable, then the source tree, then ./benchmarks.
std::string resolve_bench_dir(const std::string& override_dir = "");

BenchmarkSuite bundled_suite(const std::string& dir_override = "");

Function load_benchmark(const BenchmarkSuite& suite, const std::string& id, const IsaTable& isa);

Function load_function_file(const std::string& path, const IsaTable& isa);

} // namespace mosaic
