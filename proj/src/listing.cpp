#include "mosaic/listing.hpp"

#include <cctype>
#include <iomanip>
#include <sstream>

namespace mosaic {

std::vector<int> block_makespans(const Function& fn, const SolutionAssignment& sol) {
    std::vector<int> ms(fn.blocks.size(), 0);
    for (size_t bi = 0; bi < fn.blocks.size(); ++bi)
        for (int id : fn.blocks[bi].instructions)
            ms[bi] = std::max(ms[bi], sol.cycles[static_cast<size_t>(id)]);
    return ms;
}

namespace {

std::string hex_addr(uint32_t a) {
    std::ostringstream os;
    os << std::hex << std::setw(8) << std::setfill('0') << a;
    return os.str();
}

// Expands an emission template such as "lw {d0}, {i0}({u0})" into the
// mnemonic-less operand token list.
std::vector<std::string> expand_template(const std::string& tmpl, const Function& fn,
                                         const Instruction& ins, const SolutionAssignment& sol,
                                         const std::vector<uint32_t>& block_addr) {
    // first token is the mnemonic; operands separated by ", "
    std::vector<std::string> parts;
    size_t sp = tmpl.find(' ');
    std::string rest = sp == std::string::npos ? "" : tmpl.substr(sp + 1);
    std::string cur;
    for (size_t i = 0; i < rest.size(); ++i) {
        if (rest[i] == ',') {
            parts.push_back(cur);
            cur.clear();
            if (i + 1 < rest.size() && rest[i + 1] == ' ') ++i;
            continue;
        }
        cur += rest[i];
    }
    if (!cur.empty()) parts.push_back(cur);

    std::vector<int> defs, uses;
    for (size_t o = 0; o < ins.operands.size(); ++o) {
        int gidx = fn.operand_base[static_cast<size_t>(ins.id)] + static_cast<int>(o);
        if (ins.operands[o].role == Role::Def)
            defs.push_back(gidx);
        else
            uses.push_back(gidx);
    }

    auto substitute = [&](std::string s) {
        auto replace_all = [&s](const std::string& key, const std::string& val) {
            size_t pos;
            while ((pos = s.find(key)) != std::string::npos) s.replace(pos, key.size(), val);
        };
        for (size_t i = 0; i < defs.size(); ++i)
            replace_all("{d" + std::to_string(i) + "}", reg_name(sol.regs[static_cast<size_t>(defs[i])]));
        for (size_t i = 0; i < uses.size(); ++i)
            replace_all("{u" + std::to_string(i) + "}", reg_name(sol.regs[static_cast<size_t>(uses[i])]));
        for (size_t i = 0; i < ins.imms.size(); ++i)
            replace_all("{i" + std::to_string(i) + "}", std::to_string(ins.imms[i]));
        for (size_t i = 0; i < ins.labels.size(); ++i) {
            int bi = fn.block_index(ins.labels[i]);
            replace_all("{l" + std::to_string(i) + "}", hex_addr(block_addr[static_cast<size_t>(bi)]));
        }
        return s;
    };
    std::vector<std::string> out;
    for (auto& p : parts) out.push_back(substitute(p));
    return out;
}

} // namespace

AssemblyListing linearize(const Function& fn, const SolutionAssignment& sol, const IsaTable& isa,
                          uint32_t base) {
    if (sol.cycles.size() != fn.instructions.size() || sol.impls.size() != fn.instructions.size() ||
        sol.regs.size() != static_cast<size_t>(fn.num_operands))
        throw std::invalid_argument("linearize: incomplete solution");

    std::vector<int> ms = block_makespans(fn, sol);
    std::vector<uint32_t> block_addr(fn.blocks.size());
    uint32_t addr = base;
    for (size_t bi = 0; bi < fn.blocks.size(); ++bi) {
        block_addr[bi] = addr;
        addr += 4u * static_cast<uint32_t>(ms[bi] + 1);
    }

    const Opcode& nop = isa.op(isa.nop_opcode());
    AssemblyListing out;
    out.base = base;
    for (size_t bi = 0; bi < fn.blocks.size(); ++bi) {
        std::vector<int> slot(static_cast<size_t>(ms[bi]) + 1, -1);
        for (int id : fn.blocks[bi].instructions) {
            int c = sol.cycles[static_cast<size_t>(id)];
            if (slot[static_cast<size_t>(c)] != -1)
                throw std::invalid_argument("linearize: two instructions share a cycle");
            slot[static_cast<size_t>(c)] = id;
        }
        for (size_t s = 0; s < slot.size(); ++s) {
            AsmLine line;
            line.address = block_addr[bi] + 4u * static_cast<uint32_t>(s);
            if (slot[s] < 0) {
                line.mnemonic = nop.mnemonic;
            } else {
                const Instruction& ins = fn.instructions[static_cast<size_t>(slot[s])];
                const Opcode& oc = isa.op(ins.opcode_alts[static_cast<size_t>(
                    sol.impls[static_cast<size_t>(slot[s])])]);
                line.mnemonic = oc.mnemonic;
                line.ops = expand_template(oc.emit, fn, ins, sol, block_addr);
            }
            out.lines.push_back(std::move(line));
        }
    }
    return out;
}

std::string print_listing(const AssemblyListing& listing) {
    std::ostringstream os;
    for (const AsmLine& l : listing.lines) {
        os << hex_addr(l.address) << ": " << l.mnemonic;
        for (size_t i = 0; i < l.ops.size(); ++i) os << (i ? ", " : " ") << l.ops[i];
        os << "\n";
    }
    return os.str();
}

AssemblyListing parse_listing(const std::string& text) {
    AssemblyListing out;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    bool first = true;
    while (std::getline(ss, line)) {
        ++lineno;
        // strip leading/trailing space
        size_t a = line.find_first_not_of(" \t\r");
        if (a == std::string::npos) continue;
        size_t colon = line.find(':', a);
        if (colon == std::string::npos) throw ParseError(lineno, 1, "missing address");
        AsmLine al;
        al.address = static_cast<uint32_t>(std::stoul(line.substr(a, colon - a), nullptr, 16));
        std::string rest = line.substr(colon + 1);
        std::stringstream rs(rest);
        if (!(rs >> al.mnemonic)) throw ParseError(lineno, 1, "missing mnemonic");
        std::string ops;
        std::getline(rs, ops);
        std::string cur;
        for (char c : ops) {
            if (c == ',') {
                if (!cur.empty()) al.ops.push_back(cur);
                cur.clear();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                if (!cur.empty()) al.ops.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        if (!cur.empty()) al.ops.push_back(cur);
        if (first) {
            out.base = al.address;
            first = false;
        }
        uint32_t expect = out.base + 4u * static_cast<uint32_t>(out.lines.size());
        if (al.address != expect) throw ParseError(lineno, 1, "addresses must advance by 4");
        out.lines.push_back(std::move(al));
    }
    return out;
}

} // namespace mosaic
