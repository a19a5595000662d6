#include "mosaic/report.hpp"

#include "mosaic/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace mosaic {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

std::vector<AssemblyListing> listings_of(const Function& fn, const IsaTable& isa,
                                         const std::vector<SolutionAssignment>& sols,
                                         uint32_t base) {
    std::vector<AssemblyListing> out;
    out.reserve(sols.size());
    for (const auto& s : sols) out.push_back(linearize(fn, s, isa, base));
    return out;
}

} // namespace

RunReport make_report(const std::string& id, const Function& fn, const IsaTable& isa,
                      const VariantSet& vs, const DiversifyConfig& cfg, const RunOptions& opt) {
    RunReport r;
    r.id = id;
    r.algo = algorithm_name(cfg.algorithm);
    r.dist = distance_name(cfg.spec);
    r.gap = cfg.p;
    r.h = cfg.spec.h;
    r.k = cfg.k;
    r.seed = cfg.search.seed;
    r.num = static_cast<int>(vs.solutions.size());
    r.d = vs.solutions.size() >= 2 ? pairwise_distance(vs.solutions, cfg.spec, fn, isa) : 0.0;
    r.t = opt.stable_timing ? 0.0 : vs.wall_time;
    r.stop_reason = vs.stop_reason;
    if (opt.eval_gadgets && vs.solutions.size() >= 2)
        r.hist = survival_histogram(listings_of(fn, isa, vs.solutions, opt.base_addr), isa, opt.window);
    return r;
}

std::string report_csv_header() {
    return "id,algo,distance,gap,h,k,seed,num,d,t,stop,=0,<=10,<=40,<=100,pairs\n";
}

std::string report_csv_row(const RunReport& r) {
    std::ostringstream os;
    os << r.id << ',' << r.algo << ',' << r.dist << ',' << fmt(r.gap, 2) << ',' << r.h << ',' << r.k
       << ',' << r.seed << ',' << r.num << ',' << fmt(r.d, 4) << ',' << fmt(r.t, 3) << ','
       << r.stop_reason << ',' << fmt(r.hist.share(0), 2) << ',' << fmt(r.hist.share(1), 2) << ','
       << fmt(r.hist.share(2), 2) << ',' << fmt(r.hist.share(3), 2) << ',' << r.hist.pairs_evaluated
       << '\n';
    return os.str();
}

void write_run_dir(const std::string& dir, const std::string& id, const Function& fn,
                   const IsaTable& isa, const VariantSet& vs, const DiversifyConfig& cfg,
                   const RunOptions& opt) {
    fs::create_directories(dir);
    {
        std::ofstream out(fs::path(dir) / "function.ir");
        out << serialize_function(fn, isa);
    }
    for (size_t i = 0; i < vs.solutions.size(); ++i) {
        char name[64];
        std::snprintf(name, sizeof(name), "%s.v%03zu.s", id.c_str(), i);
        std::ofstream out(fs::path(dir) / name);
        out << print_listing(linearize(fn, vs.solutions[i], isa, opt.base_addr));
    }
    {
        std::ofstream out(fs::path(dir) / "manifest.jsonl");
        json head;
        head["type"] = "run";
        head["id"] = id;
        head["function"] = fn.name;
        head["algo"] = algorithm_name(cfg.algorithm);
        head["distance"] = distance_name(cfg.spec);
        head["nr"] = cfg.spec.n_r;
        head["nc"] = cfg.spec.n_c;
        head["gap"] = cfg.p;
        head["h"] = cfg.spec.h;
        head["k"] = cfg.k;
        head["seed"] = cfg.search.seed;
        head["relax_rate"] = cfg.search.relax_rate;
        head["fail_limit"] = cfg.search.fail_limit;
        head["time_limit"] = std::isfinite(cfg.search.time_limit) ? cfg.search.time_limit : -1.0;
        head["base_addr"] = opt.base_addr;
        head["window"] = opt.window;
        head["cost_opt"] = vs.cost_opt;
        head["bound"] = vs.bound;
        head["num"] = vs.solutions.size();
        head["wall_time"] = opt.stable_timing ? 0.0 : vs.wall_time;
        head["stop_reason"] = vs.stop_reason;
        out << head.dump() << "\n";
        for (size_t i = 0; i < vs.solutions.size(); ++i) {
            const SolutionAssignment& s = vs.solutions[i];
            json row;
            row["variant"] = i;
            row["cost"] = s.cost;
            row["cycles"] = s.cycles;
            row["impls"] = s.impls;
            row["regs"] = s.regs;
            out << row.dump() << "\n";
        }
    }
    {
        std::ofstream out(fs::path(dir) / "report.csv");
        out << report_csv_header() << report_csv_row(make_report(id, fn, isa, vs, cfg, opt));
    }
}

LoadedRun load_run_dir(const std::string& dir, const IsaTable& isa) {
    std::ifstream mf(fs::path(dir) / "manifest.jsonl");
    if (!mf) throw std::runtime_error("missing manifest in " + dir);
    std::ifstream ir(fs::path(dir) / "function.ir");
    if (!ir) throw std::runtime_error("missing function.ir in " + dir);
    std::stringstream irbuf;
    irbuf << ir.rdbuf();

    LoadedRun run{{}, parse_function(irbuf.str(), isa), {}};
    std::string line;
    if (!std::getline(mf, line)) throw std::runtime_error("empty manifest in " + dir);
    json head = json::parse(line);
    if (head.value("type", "") != "run") throw std::runtime_error("corrupt manifest in " + dir);
    run.report.id = head.value("id", "");
    run.report.algo = head.value("algo", "");
    run.report.dist = head.value("distance", "");
    run.report.gap = head.value("gap", 0.0);
    run.report.h = head.value("h", 1);
    run.report.k = head.value("k", 0);
    run.report.seed = head.value("seed", 0ull);
    run.report.num = head.value("num", 0);
    run.report.t = head.value("wall_time", 0.0);
    run.report.stop_reason = head.value("stop_reason", "");
    while (std::getline(mf, line)) {
        if (line.empty()) continue;
        json row = json::parse(line);
        SolutionAssignment s;
        s.cycles = row.at("cycles").get<std::vector<int>>();
        s.impls = row.at("impls").get<std::vector<int>>();
        s.regs = row.at("regs").get<std::vector<int>>();
        s.cost = row.at("cost").get<long long>();
        run.solutions.push_back(std::move(s));
    }
    if (run.solutions.empty()) throw std::runtime_error("manifest without variants in " + dir);

    DistanceSpec spec;
    spec.h = run.report.h;
    if (run.report.dist.rfind("gd", 0) == 0) {
        spec.kind = DistanceKind::GD;
        spec.n_r = head.value("nr", 0);
        spec.n_c = head.value("nc", 8);
    } else {
        spec.kind = distance_kind_from(run.report.dist);
    }
    if (run.solutions.size() >= 2)
        run.report.d = pairwise_distance(run.solutions, spec, run.fn, isa);
    uint32_t base = head.value("base_addr", 0u);
    int window = head.value("window", 8);
    if (run.solutions.size() >= 2)
        run.report.hist =
            survival_histogram(listings_of(run.fn, isa, run.solutions, base), isa, window);
    return run;
}

std::string distance_table_csv(const std::vector<LoadedRun>& runs) {
    // one column group per algorithm, rows keyed by benchmark id
    std::vector<std::string> algos;
    std::vector<std::string> ids;
    for (const auto& r : runs) {
        if (std::find(algos.begin(), algos.end(), r.report.algo) == algos.end())
            algos.push_back(r.report.algo);
        if (std::find(ids.begin(), ids.end(), r.report.id) == ids.end()) ids.push_back(r.report.id);
    }
    std::map<std::pair<std::string, std::string>, const RunReport*> cell;
    for (const auto& r : runs) cell[{r.report.id, r.report.algo}] = &r.report;

    std::ostringstream os;
    os << "id";
    for (const auto& a : algos) os << ',' << a << "_d," << a << "_t," << a << "_num";
    os << '\n';
    for (const auto& id : ids) {
        os << id;
        for (const auto& a : algos) {
            auto it = cell.find({id, a});
            if (it == cell.end())
                os << ",-,-,-";
            else
                os << ',' << fmt(it->second->d, 4) << ',' << fmt(it->second->t, 3) << ','
                   << it->second->num;
        }
        os << '\n';
    }
    return os.str();
}

std::string survival_table_csv(const std::vector<LoadedRun>& runs) {
    std::ostringstream os;
    os << "id,=0,<=10,<=40,<=100,num\n";
    for (const auto& r : runs) {
        os << r.report.id << ',' << fmt(r.report.hist.share(0), 2) << ','
           << fmt(r.report.hist.share(1), 2) << ',' << fmt(r.report.hist.share(2), 2) << ','
           << fmt(r.report.hist.share(3), 2) << ',' << r.report.num << '\n';
    }
    return os.str();
}

CombineResult combine_program_ordered(const std::vector<const Function*>& fns,
                                      const std::vector<const VariantSet*>& sets,
                                      const std::vector<int>& picks, const std::vector<int>& order,
                                      const IsaTable& isa, uint32_t base) {
    CombineResult out;
    out.picks = picks;
    out.order = order;
    out.program.base = base;
    uint32_t addr = base;
    for (int idx : order) {
        const Function& fn = *fns[static_cast<size_t>(idx)];
        const SolutionAssignment& sol =
            sets[static_cast<size_t>(idx)]->solutions[static_cast<size_t>(picks[static_cast<size_t>(idx)])];
        AssemblyListing part = linearize(fn, sol, isa, addr);
        addr += 4u * static_cast<uint32_t>(part.lines.size());
        out.program.lines.insert(out.program.lines.end(), part.lines.begin(), part.lines.end());
    }
    double space = 1;
    for (const auto* vs : sets) space *= static_cast<double>(vs->solutions.size());
    out.search_space = space;
    return out;
}

CombineResult combine_program(const std::vector<const Function*>& fns,
                              const std::vector<const VariantSet*>& sets, bool function_shuffle,
                              uint64_t seed, const IsaTable& isa, uint32_t base) {
    if (fns.size() != sets.size() || fns.empty())
        throw std::invalid_argument("combine_program: need one variant set per function");
    for (const auto* vs : sets)
        if (vs->solutions.empty()) throw std::invalid_argument("combine_program: empty variant set");
    Rng rng(seed);
    std::vector<int> picks;
    for (const auto* vs : sets) picks.push_back(rng.pick_index(vs->solutions.size()));
    std::vector<int> order;
    for (size_t i = 0; i < fns.size(); ++i) order.push_back(static_cast<int>(i));
    if (function_shuffle) rng.shuffle(order);
    CombineResult out = combine_program_ordered(fns, sets, picks, order, isa, base);
    if (function_shuffle) {
        double fact = 1;
        for (size_t i = 2; i <= fns.size(); ++i) fact *= static_cast<double>(i);
        out.search_space *= fact;
    }
    return out;
}

std::vector<RelaxRateRow> relax_rate_study(const Function& fn, const IsaTable& isa,
                                           const std::vector<double>& rates,
                                           const DiversifyConfig& base_cfg) {
    for (double r : rates)
        if (r < 0 || r > 1) throw std::invalid_argument("relax rates must lie in [0,1]");

    DiversifyConfig rs_cfg = base_cfg;
    rs_cfg.algorithm = Algorithm::RS;
    VariantSet rs = run_rs(fn, isa, rs_cfg);
    double d_rs = rs.solutions.size() >= 2 ? pairwise_distance(rs.solutions, base_cfg.spec, fn, isa) : 0;

    std::vector<RelaxRateRow> rows;
    for (double rate : rates) {
        DiversifyConfig cfg = base_cfg;
        cfg.algorithm = Algorithm::LNS;
        cfg.search.relax_rate = rate;
        VariantSet lns = run_lns(fn, isa, cfg);
        RelaxRateRow row;
        row.rate = rate;
        row.t_lns = lns.wall_time;
        row.t_rs = rs.wall_time;
        if (rs.solutions.size() < 2 || lns.solutions.size() < 2) {
            row.comparable = false;
            rows.push_back(row);
            continue;
        }
        row.comparable = true;
        row.d_lns = pairwise_distance(lns.solutions, base_cfg.spec, fn, isa);
        row.d_rs = d_rs;
        if (row.d_lns == row.d_rs) {
            row.p_delta = 1;
            row.delta_favors = "equal";
        } else if (row.d_lns > row.d_rs) {
            row.p_delta = row.d_lns / row.d_rs;
            row.delta_favors = "lns";
        } else {
            row.p_delta = row.d_rs / row.d_lns;
            row.delta_favors = "rs";
        }
        double t1 = row.t_rs, t2 = row.t_lns;
        if (t1 == t2) {
            row.p_t = 1;
            row.t_favors = "equal";
        } else if (t1 > t2) {
            row.p_t = t2 > 0 ? t1 / t2 : 0;
            row.t_favors = "lns";
        } else {
            row.p_t = t1 > 0 ? t2 / t1 : 0;
            row.t_favors = "rs";
        }
        rows.push_back(row);
    }
    return rows;
}

std::string relax_table_csv(const std::vector<RelaxRateRow>& rows) {
    std::ostringstream os;
    os << "rate,comparable,d_lns,d_rs,p_delta,delta_favors,t_lns,t_rs,p_t,t_favors\n";
    for (const auto& r : rows) {
        os << fmt(r.rate, 2) << ',' << (r.comparable ? 1 : 0) << ',' << fmt(r.d_lns, 4) << ','
           << fmt(r.d_rs, 4) << ',' << fmt(r.p_delta, 4) << ',' << r.delta_favors << ','
           << fmt(r.t_lns, 3) << ',' << fmt(r.t_rs, 3) << ',' << fmt(r.p_t, 4) << ',' << r.t_favors
           << '\n';
    }
    return os.str();
}

} // namespace mosaic
