#include "mosaic/bench.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace mosaic {

std::string resolve_bench_dir(const std::string& override_dir) {
    namespace fs = std::filesystem;
    if (!override_dir.empty()) return override_dir;
    if (const char* env = std::getenv("MOSAIC_BENCH_DIR")) return env;
#ifdef MOSAIC_SOURCE_DIR
    if (fs::exists(fs::path(MOSAIC_SOURCE_DIR) / "benchmarks"))
        return (fs::path(MOSAIC_SOURCE_DIR) / "benchmarks").string();
#endif
    return "benchmarks";
}

BenchmarkSuite bundled_suite(const std::string& dir_override) {
    BenchmarkSuite s;
    s.dir = resolve_bench_dir(dir_override);
    s.entries = {
        {"nano", "nano.ir", "smallest bundled function", 2, 1},
        {"chain3", "chain3.ir", "three-instruction dependency chain", 3, 1},
        {"pair2", "pair2.ir", "two independent instructions before the return", 3, 1},
        {"gdpair", "gdpair.ir", "straight line ending in a renameable indirect jump", 6, 1},
        {"press", "press.ir", "overlapping live ranges under precolored input/result", 7, 1},
        {"dual", "dual.ir", "two blocks joined by one cross-block temp", 7, 2},
        {"straddle", "straddle.ir", "two weighted blocks sharing a tight budget", 8, 2},
        {"fact", "fact.ir", "three-block factorial loop", 10, 3},
        {"ulaw22", "ulaw22.ir", "branchy sample conversion, four blocks", 22, 4},
        {"sched24", "sched24.ir", "schedule-heavy three-block chain", 24, 3},
        {"mix31", "mix31.ir", "diamond control flow over a table pointer", 31, 5},
        {"wide42", "wide42.ir", "six blocks of loads, stores, and arithmetic", 42, 6},
        {"deep58", "deep58.ir", "eight blocks, two diamonds, inner loop", 58, 8},
        {"grand120", "grand120.ir", "five staged diamonds, fifteen blocks", 120, 15},
    };
    return s;
}

Function load_function_file(const std::string& path, const IsaTable& isa) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_function(buf.str(), isa);
}

Function load_benchmark(const BenchmarkSuite& suite, const std::string& id, const IsaTable& isa) {
    const BenchmarkEntry* e = suite.find(id);
    if (!e) throw std::runtime_error("unknown benchmark " + id);
    namespace fs = std::filesystem;
    return load_function_file((fs::path(suite.dir) / e->path).string(), isa);
}

} // namespace mosaic
