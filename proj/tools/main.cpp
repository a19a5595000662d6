#include "mosaic/bench.hpp"
#include "mosaic/diversify.hpp"
#include "mosaic/gadgets.hpp"
#include "mosaic/listing.hpp"
#include "mosaic/report.hpp"
#include "mosaic/solver.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace mosaic;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

uint32_t parse_addr(const std::string& s) {
    return static_cast<uint32_t>(std::stoul(s, nullptr, 16));
}

struct CommonFlags {
    std::string algo = "lns";
    std::string distance = "hd";
    int nr = 0;
    int nc = 8;
    double gap = 0.10;
    long long h = 1;
    int k = 200;
    uint64_t seed = 42;
    double relax_rate = 0.6;
    long long fail_limit = 1000;
    double time_limit = 600;
    std::string base_addr = "0";
    int window = 8;
    long long max_attempts = -1;
    bool no_gadgets = false;
    bool no_timing = false;

    void attach(CLI::App* cmd, bool with_algo = true) {
        cmd->set_help_flag("--help", "print this help"); // frees -h for --h
        if (with_algo)
            cmd->add_option("--algo", algo, "diversification algorithm")
                ->check(CLI::IsMember({"lns", "dlns", "rs", "maxdiv"}));
        cmd->add_option("--distance", distance, "distance measure")
            ->check(CLI::IsMember({"hd", "ld", "gd"}));
        cmd->add_option("--nr", nr, "GD register window");
        cmd->add_option("--nc", nc, "GD schedule window");
        cmd->add_option("--gap", gap, "optimality gap p");
        cmd->add_option("--h", h, "minimum pairwise distance");
        cmd->add_option("--k", k, "maximum number of variants");
        cmd->add_option("--seed", seed, "random seed");
        cmd->add_option("--relax-rate", relax_rate, "LNS destroy probability");
        cmd->add_option("--fail-limit", fail_limit, "failures per restart");
        cmd->add_option("--time-limit", time_limit, "seconds per run");
        cmd->add_option("--base-addr", base_addr, "base address (hex)");
        cmd->add_option("--window", window, "gadget scan depth");
        cmd->add_option("--max-attempts", max_attempts, "deterministic attempt budget (-1 = off)");
        cmd->add_flag("--no-gadgets", no_gadgets, "skip gadget evaluation in reports");
        cmd->add_flag("--no-timing", no_timing, "report t as 0 for byte-stable output");
    }

    DiversifyConfig config() const {
        DiversifyConfig cfg;
        cfg.algorithm = algorithm_from(algo);
        cfg.k = k;
        cfg.p = gap;
        cfg.spec.kind = distance_kind_from(distance);
        cfg.spec.n_r = nr;
        cfg.spec.n_c = nc;
        cfg.spec.h = h;
        cfg.search.seed = seed;
        cfg.search.relax_rate = relax_rate;
        cfg.search.fail_limit = fail_limit;
        cfg.search.time_limit = time_limit;
        cfg.max_attempts = max_attempts;
        return cfg;
    }

    RunOptions options() const {
        RunOptions opt;
        opt.base_addr = parse_addr(base_addr);
        opt.window = window;
        opt.eval_gadgets = !no_gadgets;
        opt.stable_timing = no_timing;
        return opt;
    }
};

int cmd_optimize(const std::string& file, uint64_t seed, double time_limit,
                 const std::string& base_addr, const std::string& out) {
    const IsaTable& isa = mini_mips();
    Function fn = load_function_file(file, isa);
    ConstraintModel model = build_model(fn, isa);
    SearchParams params;
    params.branching = Branching::Original;
    params.seed = seed;
    params.time_limit = time_limit;
    OptimizationResult res = optimize(model, params);
    std::cout << "function " << fn.name << "\n"
              << "cost " << res.o << (res.proven ? " (proven optimal)" : " (best found)") << "\n";
    if (!out.empty()) {
        std::ofstream os(out);
        os << print_listing(linearize(fn, res.y_opt, isa, parse_addr(base_addr)));
        std::cout << "wrote " << out << "\n";
    }
    return 0;
}

int cmd_diversify(const std::string& file, const std::string& id_flag, const CommonFlags& flags,
                  const std::string& out_dir) {
    const IsaTable& isa = mini_mips();
    Function fn = load_function_file(file, isa);
    std::string id = id_flag.empty() ? fn.name : id_flag;
    DiversifyConfig cfg = flags.config();
    VariantSet vs = diversify(fn, isa, cfg);
    RunOptions opt = flags.options();
    write_run_dir(out_dir, id, fn, isa, vs, cfg, opt);
    RunReport rep = make_report(id, fn, isa, vs, cfg, opt);
    std::cout << report_csv_header() << report_csv_row(rep);
    std::cout << "wrote " << vs.solutions.size() << " variants to " << out_dir << " (stop: "
              << vs.stop_reason << ")\n";
    return 0;
}

int cmd_gadgets(const std::string& file, int window) {
    const IsaTable& isa = mini_mips();
    AssemblyListing listing = parse_listing(slurp(file));
    GadgetSet gs = scan_gadgets(listing, isa, window);
    std::cout << "start,end,length\n";
    for (const Gadget& g : gs.gadgets) {
        std::cout << std::hex << std::setw(8) << std::setfill('0') << g.start << ','
                  << std::setw(8) << g.end << std::dec << ',' << g.body.size() << '\n';
    }
    std::cerr << gs.gadgets.size() << " gadgets\n";
    return 0;
}

int cmd_srate(const std::string& a, const std::string& b, const std::string& run_dir,
              const std::string& out, int window) {
    const IsaTable& isa = mini_mips();
    if (!run_dir.empty()) {
        LoadedRun run = load_run_dir(run_dir, isa);
        std::vector<AssemblyListing> listings;
        for (const auto& s : run.solutions) listings.push_back(linearize(run.fn, s, isa, 0));
        std::vector<GadgetSet> sets;
        for (const auto& l : listings) sets.push_back(scan_gadgets(l, isa, window));
        std::ostringstream os;
        os << "variant_i,variant_j,srate\n";
        for (size_t i = 0; i < listings.size(); ++i)
            for (size_t j = 0; j < listings.size(); ++j) {
                if (i == j) continue;
                auto r = srate(sets[i], listings[j], isa, window);
                os << i << ',' << j << ',';
                if (r) {
                    char buf[32];
                    std::snprintf(buf, sizeof(buf), "%.6f", r->ratio());
                    os << buf;
                } else {
                    os << "undefined";
                }
                os << '\n';
            }
        if (out.empty()) {
            std::cout << os.str();
        } else {
            std::ofstream f(out);
            f << os.str();
            std::cout << "wrote " << out << "\n";
        }
        return 0;
    }
    AssemblyListing la = parse_listing(slurp(a));
    AssemblyListing lb = parse_listing(slurp(b));
    auto r = srate(scan_gadgets(la, mini_mips(), window), lb, isa, window);
    if (!r) {
        std::cout << "undefined (no gadgets in " << a << ")\n";
        return 0;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", r->ratio());
    std::cout << buf << " (" << r->surviving << "/" << r->total << ")\n";
    return 0;
}

int cmd_bench(const std::string& bench_dir, std::vector<std::string> ids,
              std::vector<std::string> algos, std::vector<uint64_t> seeds,
              std::vector<double> relax_rates, const CommonFlags& flags,
              const std::string& out_dir) {
    const IsaTable& isa = mini_mips();
    BenchmarkSuite suite = bundled_suite(bench_dir);
    if (ids.empty())
        for (const auto& e : suite.entries) ids.push_back(e.id);
    if (algos.empty()) algos = {flags.algo};
    if (seeds.empty()) seeds = {flags.seed};
    fs::create_directories(out_dir);

    if (!relax_rates.empty()) {
        // relax-rate study on the listed benchmarks (LNS vs RS per seed)
        for (const auto& id : ids) {
            Function fn = load_benchmark(suite, id, isa);
            for (uint64_t seed : seeds) {
                DiversifyConfig cfg = flags.config();
                cfg.search.seed = seed;
                auto rows = relax_rate_study(fn, isa, relax_rates, cfg);
                std::string path =
                    (fs::path(out_dir) / (id + "_relax_s" + std::to_string(seed) + ".csv")).string();
                std::ofstream f(path);
                f << relax_table_csv(rows);
                std::cout << "wrote " << path << "\n";
            }
        }
        return 0;
    }

    std::vector<LoadedRun> runs;
    for (const auto& id : ids) {
        Function fn = load_benchmark(suite, id, isa);
        for (const auto& algo : algos) {
            for (uint64_t seed : seeds) {
                DiversifyConfig cfg = flags.config();
                cfg.algorithm = algorithm_from(algo);
                cfg.search.seed = seed;
                std::string cell = id + "_" + algo + "_s" + std::to_string(seed);
                std::string dir = (fs::path(out_dir) / cell).string();
                VariantSet vs = diversify(fn, isa, cfg);
                write_run_dir(dir, id, fn, isa, vs, cfg, flags.options());
                std::cout << report_csv_row(make_report(id, fn, isa, vs, cfg, flags.options()));
                runs.push_back(load_run_dir(dir, isa));
            }
        }
    }
    {
        std::ofstream f(fs::path(out_dir) / "distance_table.csv");
        f << distance_table_csv(runs);
    }
    {
        std::ofstream f(fs::path(out_dir) / "survival_table.csv");
        f << survival_table_csv(runs);
    }
    std::cout << "wrote " << (fs::path(out_dir) / "distance_table.csv").string() << "\n";
    return 0;
}

int cmd_combine(const std::vector<std::string>& run_dirs, const std::string& shuffle, uint64_t seed,
                const std::string& base_addr, const std::string& out, int window) {
    const IsaTable& isa = mini_mips();
    std::vector<LoadedRun> runs;
    for (const auto& d : run_dirs) runs.push_back(load_run_dir(d, isa));
    std::vector<const Function*> fns;
    std::vector<VariantSet> sets(runs.size());
    std::vector<const VariantSet*> set_ptrs;
    for (size_t i = 0; i < runs.size(); ++i) {
        fns.push_back(&runs[i].fn);
        sets[i].solutions = runs[i].solutions;
        set_ptrs.push_back(&sets[i]);
    }
    CombineResult res =
        combine_program(fns, set_ptrs, shuffle == "fs", seed, isa, parse_addr(base_addr));
    std::ofstream f(out);
    f << print_listing(res.program);
    GadgetSet gs = scan_gadgets(res.program, isa, window);
    std::cout << "order";
    for (int i : res.order) std::cout << ' ' << i;
    std::cout << "\npicks";
    for (int p : res.picks) std::cout << ' ' << p;
    std::cout << "\nsearch_space " << res.search_space << "\ngadgets " << gs.gadgets.size()
              << "\nwrote " << out << "\n";
    return 0;
}

int cmd_report(const std::vector<std::string>& run_dirs, const std::string& out_dir) {
    const IsaTable& isa = mini_mips();
    if (run_dirs.empty()) throw std::runtime_error("no run directories given");
    std::vector<LoadedRun> runs;
    for (const auto& d : run_dirs) runs.push_back(load_run_dir(d, isa));
    fs::create_directories(out_dir);
    {
        std::ofstream f(fs::path(out_dir) / "distance_table.csv");
        f << distance_table_csv(runs);
    }
    {
        std::ofstream f(fs::path(out_dir) / "survival_table.csv");
        f << survival_table_csv(runs);
    }
    std::cout << "wrote " << (fs::path(out_dir) / "distance_table.csv").string() << " and "
              << (fs::path(out_dir) / "survival_table.csv").string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"constraint-based assembly diversification toolkit"};
    app.require_subcommand(1);

    // optimize
    auto* opt_cmd = app.add_subcommand("optimize", "find a provably optimal schedule/allocation");
    std::string opt_file, opt_out, opt_base = "0";
    uint64_t opt_seed = 42;
    double opt_time = 600;
    opt_cmd->add_option("file", opt_file, "IR file")->required();
    opt_cmd->add_option("--out", opt_out, "write the optimal assembly here");
    opt_cmd->add_option("--seed", opt_seed, "random seed");
    opt_cmd->add_option("--time-limit", opt_time, "seconds");
    opt_cmd->add_option("--base-addr", opt_base, "base address (hex)");

    // diversify
    auto* div_cmd = app.add_subcommand("diversify", "generate diverse variants of one function");
    std::string div_file, div_out = "run", div_id;
    CommonFlags div_flags;
    div_cmd->add_option("file", div_file, "IR file")->required();
    div_cmd->add_option("--out", div_out, "run directory");
    div_cmd->add_option("--id", div_id, "benchmark id used in reports");
    div_flags.attach(div_cmd);
    div_cmd->set_config("--config", "", "flat key=value config; flags override");

    // gadgets
    auto* gad_cmd = app.add_subcommand("gadgets", "scan an assembly listing for JOP gadgets");
    std::string gad_file;
    int gad_window = 8;
    gad_cmd->add_option("file", gad_file, "assembly listing")->required();
    gad_cmd->add_option("--window", gad_window, "scan depth");

    // srate
    auto* sr_cmd = app.add_subcommand("srate", "gadget survival rate between listings");
    std::string sr_a, sr_b, sr_dir, sr_out;
    int sr_window = 8;
    sr_cmd->add_option("a", sr_a, "first listing");
    sr_cmd->add_option("b", sr_b, "second listing");
    sr_cmd->add_option("--run", sr_dir, "run directory: all ordered pairs");
    sr_cmd->add_option("--out", sr_out, "CSV output path");
    sr_cmd->add_option("--window", sr_window, "scan depth");

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "run the bundled benchmark suite");
    std::string bench_dir_flag, bench_out = "bench_out";
    std::vector<std::string> bench_ids, bench_algos;
    std::vector<uint64_t> bench_seeds;
    std::vector<double> bench_rates;
    CommonFlags bench_flags;
    bench_cmd->add_option("--bench-dir", bench_dir_flag, "benchmark directory");
    bench_cmd->add_option("--benchmarks", bench_ids, "benchmark ids")->delimiter(',');
    bench_cmd->add_option("--algos", bench_algos, "algorithms to run")->delimiter(',');
    bench_cmd->add_option("--seeds", bench_seeds, "seeds")->delimiter(',');
    bench_cmd->add_option("--relax-rates", bench_rates, "relax-rate study mode")->delimiter(',');
    bench_cmd->add_option("--out", bench_out, "output directory");
    bench_flags.attach(bench_cmd);
    bench_cmd->set_config("--config", "", "flat key=value config; flags override");

    // combine
    auto* comb_cmd = app.add_subcommand("combine", "combine function variants into one program");
    std::vector<std::string> comb_dirs;
    std::string comb_shuffle = "nfs", comb_base = "0", comb_out = "program.s";
    uint64_t comb_seed = 42;
    int comb_window = 8;
    comb_cmd->add_option("runs", comb_dirs, "run directories, one per function")->required();
    comb_cmd->add_option("--shuffle", comb_shuffle, "nfs or fs")
        ->check(CLI::IsMember({"nfs", "fs"}));
    comb_cmd->add_option("--seed", comb_seed, "random seed");
    comb_cmd->add_option("--base-addr", comb_base, "base address (hex)");
    comb_cmd->add_option("--out", comb_out, "program listing path");
    comb_cmd->add_option("--window", comb_window, "scan depth for the gadget count");

    // report
    auto* rep_cmd = app.add_subcommand("report", "render CSV tables from run directories");
    std::vector<std::string> rep_dirs;
    std::string rep_out = "report_out";
    rep_cmd->add_option("runs", rep_dirs, "run directories")->required();
    rep_cmd->add_option("--out", rep_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (opt_cmd->parsed()) return cmd_optimize(opt_file, opt_seed, opt_time, opt_base, opt_out);
        if (div_cmd->parsed()) return cmd_diversify(div_file, div_id, div_flags, div_out);
        if (gad_cmd->parsed()) return cmd_gadgets(gad_file, gad_window);
        if (sr_cmd->parsed()) {
            if (sr_dir.empty() && (sr_a.empty() || sr_b.empty()))
                throw std::runtime_error("srate needs two listings or --run DIR");
            return cmd_srate(sr_a, sr_b, sr_dir, sr_out, sr_window);
        }
        if (bench_cmd->parsed())
            return cmd_bench(bench_dir_flag, bench_ids, bench_algos, bench_seeds, bench_rates,
                             bench_flags, bench_out);
        if (comb_cmd->parsed())
            return cmd_combine(comb_dirs, comb_shuffle, comb_seed, comb_base, comb_out, comb_window);
        if (rep_cmd->parsed()) return cmd_report(rep_dirs, rep_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
