#include "mosaic/distances.hpp"

#include "mosaic/listing.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace mosaic {

DistanceKind distance_kind_from(const std::string& name) {
    if (name == "hd") return DistanceKind::HD;
    if (name == "ld") return DistanceKind::LD;
    if (name == "gd") return DistanceKind::GD;
    throw std::invalid_argument("unknown distance " + name);
}

std::string distance_name(const DistanceSpec& spec) {
    switch (spec.kind) {
    case DistanceKind::HD: return "hd";
    case DistanceKind::LD: return "ld";
    case DistanceKind::GD:
        return "gd(" + std::to_string(spec.n_r) + "," + std::to_string(spec.n_c) + ")";
    }
    return "?";
}

namespace {

void check_same_shape(const SolutionAssignment& s1, const SolutionAssignment& s2) {
    if (s1.cycles.size() != s2.cycles.size() || s1.regs.size() != s2.regs.size())
        throw std::invalid_argument("solutions belong to different functions");
}

} // namespace

Channel channel(const SolutionAssignment& sol, const Function& fn) {
    if (sol.cycles.size() != fn.instructions.size())
        throw std::invalid_argument("channel: incomplete solution");
    Channel tokens;
    std::vector<int> ms = block_makespans(fn, sol);
    for (size_t bi = 0; bi < fn.blocks.size(); ++bi) {
        std::vector<int> slot(static_cast<size_t>(ms[bi]) + 1, -1);
        for (int id : fn.blocks[bi].instructions)
            slot[static_cast<size_t>(sol.cycles[static_cast<size_t>(id)])] = id;
        tokens.insert(tokens.end(), slot.begin(), slot.end());
    }
    return tokens;
}

long long hamming(const SolutionAssignment& s1, const SolutionAssignment& s2) {
    check_same_shape(s1, s2);
    long long d = 0;
    for (size_t i = 0; i < s1.cycles.size(); ++i) d += s1.cycles[i] != s2.cycles[i];
    return d;
}

long long levenshtein_tokens(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<long long> row(b.size() + 1);
    for (size_t j = 0; j <= b.size(); ++j) row[j] = static_cast<long long>(j);
    for (size_t i = 1; i <= a.size(); ++i) {
        long long corner = row[0];
        row[0] = static_cast<long long>(i);
        for (size_t j = 1; j <= b.size(); ++j) {
            long long up = row[j];
            row[j] = (a[i - 1] == b[j - 1]) ? corner : std::min({corner, up, row[j - 1]}) + 1;
            corner = up;
        }
    }
    return row[b.size()];
}

long long levenshtein(const SolutionAssignment& s1, const SolutionAssignment& s2, const Function& fn) {
    check_same_shape(s1, s2);
    return levenshtein_tokens(channel(s1, fn), channel(s2, fn));
}

namespace {

// f(s, n, i, br) = 1 iff 0 <= s(c_br) - s(c_i) <= n
bool in_window(const SolutionAssignment& s, int n, int inst, int br) {
    int d = s.cycles[static_cast<size_t>(br)] - s.cycles[static_cast<size_t>(inst)];
    return d >= 0 && d <= n;
}

std::vector<int> indirect_branches(const Function& fn, const IsaTable& isa) {
    std::vector<int> out;
    for (const Instruction& ins : fn.instructions)
        if (ins.is_indirect_branch(isa)) out.push_back(ins.id);
    return out;
}

} // namespace

long long gadget_distance(const SolutionAssignment& s1, const SolutionAssignment& s2,
                          const Function& fn, const IsaTable& isa, int n_r, int n_c) {
    check_same_shape(s1, s2);
    long long total = 0;
    for (int br : indirect_branches(fn, isa)) {
        for (const Instruction& ins : fn.instructions) {
            if (in_window(s1, n_c, ins.id, br) &&
                s1.cycles[static_cast<size_t>(ins.id)] != s2.cycles[static_cast<size_t>(ins.id)])
                ++total;
            if (in_window(s1, n_r, ins.id, br)) {
                for (size_t o = 0; o < ins.operands.size(); ++o) {
                    size_t gidx = static_cast<size_t>(fn.operand_base[static_cast<size_t>(ins.id)]) + o;
                    if (s1.regs[gidx] != s2.regs[gidx]) ++total;
                }
            }
        }
    }
    return total;
}

long long distance(const SolutionAssignment& s1, const SolutionAssignment& s2,
                   const DistanceSpec& spec, const Function& fn, const IsaTable& isa) {
    switch (spec.kind) {
    case DistanceKind::HD: return hamming(s1, s2);
    case DistanceKind::LD: return levenshtein(s1, s2, fn);
    case DistanceKind::GD:
        return std::max(gadget_distance(s1, s2, fn, isa, spec.n_r, spec.n_c),
                        gadget_distance(s2, s1, fn, isa, spec.n_r, spec.n_c));
    }
    return 0;
}

long long constraint_distance(const SolutionAssignment& incumbent, const SolutionAssignment& cand,
                              const DistanceSpec& spec, const Function& fn, const IsaTable& isa) {
    if (spec.kind == DistanceKind::GD)
        return gadget_distance(incumbent, cand, fn, isa, spec.n_r, spec.n_c);
    return distance(incumbent, cand, spec, fn, isa);
}

double pairwise_distance(const std::vector<SolutionAssignment>& solutions, const DistanceSpec& spec,
                         const Function& fn, const IsaTable& isa) {
    size_t n = solutions.size();
    if (n < 2) throw std::invalid_argument("pairwise_distance needs at least two solutions");
    long long sum = 0;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) sum += distance(solutions[i], solutions[j], spec, fn, isa);
    double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
    return static_cast<double>(sum) / pairs;
}

void post_distance_constraint(ConstraintModel& model, const SolutionAssignment& sol,
                              const DistanceSpec& spec, const Function& fn, const IsaTable& isa) {
    if (spec.h < 1) throw std::invalid_argument("distance threshold h must be >= 1");
    switch (spec.kind) {
    case DistanceKind::HD: {
        DiffSumCon con;
        con.min_sum = spec.h;
        for (const Instruction& ins : fn.instructions)
            con.terms.push_back({model.cycle_var(ins.id), sol.cycles[static_cast<size_t>(ins.id)], 1});
        model.diff_sums.push_back(std::move(con));
        return;
    }
    case DistanceKind::GD: {
        // one aggregated sum per incumbent solution; weights count how many
        // branch windows cover each term under the incumbent schedule
        std::map<std::pair<int, int>, long long> weights; // (var, value) -> weight
        for (int br : indirect_branches(fn, isa)) {
            for (const Instruction& ins : fn.instructions) {
                if (in_window(sol, spec.n_c, ins.id, br))
                    weights[{model.cycle_var(ins.id), sol.cycles[static_cast<size_t>(ins.id)]}] += 1;
                if (in_window(sol, spec.n_r, ins.id, br)) {
                    for (size_t o = 0; o < ins.operands.size(); ++o) {
                        size_t gidx =
                            static_cast<size_t>(fn.operand_base[static_cast<size_t>(ins.id)]) + o;
                        int cls = model.class_of_operand[gidx];
                        weights[{model.class_var(cls), sol.regs[gidx]}] += 1;
                    }
                }
            }
        }
        DiffSumCon con;
        con.min_sum = spec.h;
        for (auto& [key, w] : weights) con.terms.push_back({key.first, key.second, w});
        model.diff_sums.push_back(std::move(con));
        return;
    }
    case DistanceKind::LD: {
        LdCheckCon con;
        con.incumbent_channel = channel(sol, fn);
        con.h = spec.h;
        model.ld_checks.push_back(std::move(con));
        return;
    }
    }
}

} // namespace mosaic
