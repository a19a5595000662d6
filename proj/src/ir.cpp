#include "mosaic/ir.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace mosaic {

namespace {

struct Token {
    std::string text;
    int col;
};

std::vector<Token> tokenize(const std::string& line) {
    std::vector<Token> out;
    size_t i = 0;
    while (i < line.size()) {
        char c = line[i];
        if (c == '#') break;
        if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
            ++i;
            continue;
        }
        size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) &&
               line[i] != ',' && line[i] != '#')
            ++i;
        out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
    }
    return out;
}

bool is_integer(const std::string& s) {
    if (s.empty()) return false;
    size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    if (s.size() > i + 1 && s[i] == '0' && (s[i + 1] == 'x' || s[i + 1] == 'X')) {
        for (size_t j = i + 2; j < s.size(); ++j)
            if (!std::isxdigit(static_cast<unsigned char>(s[j]))) return false;
        return s.size() > i + 2;
    }
    for (size_t j = i; j < s.size(); ++j)
        if (!std::isdigit(static_cast<unsigned char>(s[j]))) return false;
    return true;
}

int64_t to_integer(const std::string& s) { return std::stoll(s, nullptr, 0); }

// "$rN" -> register id, or -1
RegId parse_reg_token(const std::string& s) {
    if (s.size() < 3 || s[0] != '$' || s[1] != 'r') return -1;
    for (size_t i = 2; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return -1;
    return std::stoi(s.substr(2));
}

struct Parser {
    const IsaTable& isa;
    Function fn;
    std::map<std::string, int> temp_ids;
    std::vector<std::array<int, 2>> pending_deps;
    int lineno = 0;

    explicit Parser(const IsaTable& table) : isa(table) {}

    [[noreturn]] void fail(int col, const std::string& msg) const { throw ParseError(lineno, col, msg); }

    int intern_temp(const std::string& name, std::optional<RegId> precolor, int col) {
        auto it = temp_ids.find(name);
        if (it == temp_ids.end()) {
            TempInfo t;
            t.id = static_cast<int>(fn.temps.size());
            t.name = name;
            t.precolor = precolor;
            fn.temps.push_back(t);
            it = temp_ids.emplace(name, t.id).first;
        } else if (precolor) {
            TempInfo& t = fn.temps[static_cast<size_t>(it->second)];
            if (t.precolor && *t.precolor != *precolor)
                fail(col, "temp " + name + " precolored to two different registers");
            t.precolor = precolor;
        }
        return it->second;
    }

    Operand parse_operand(const Token& tok, Role role) {
        Operand op;
        op.role = role;
        RegId r = parse_reg_token(tok.text);
        if (r >= 0) {
            if (!isa.is_register(r)) fail(tok.col, "unknown register " + tok.text);
            op.precolor = r;
            op.temp = intern_temp(tok.text, r, tok.col);
            return op;
        }
        std::string name = tok.text;
        std::optional<RegId> pre;
        if (auto colon = name.find(':'); colon != std::string::npos) {
            RegId pr = parse_reg_token(name.substr(colon + 1));
            if (pr < 0 || !isa.is_register(pr)) fail(tok.col, "bad precolor in " + tok.text);
            pre = pr;
            name = name.substr(0, colon);
        }
        if (name.empty() || is_integer(name) || name[0] == '$')
            fail(tok.col, "expected temp name, got " + tok.text);
        op.precolor = pre;
        op.temp = intern_temp(name, pre, tok.col);
        return op;
    }

    std::vector<int> resolve_opcodes(const Token& tok) {
        std::vector<int> alts;
        std::stringstream ss(tok.text);
        std::string part;
        while (std::getline(ss, part, '|')) {
            auto alias = isa.aliases.find(part);
            if (alias != isa.aliases.end()) {
                alts.insert(alts.end(), alias->second.begin(), alias->second.end());
                continue;
            }
            int idx = isa.opcode_index(part);
            if (idx < 0) fail(tok.col, "unknown opcode " + part);
            alts.push_back(idx);
        }
        if (alts.empty()) fail(tok.col, "empty opcode list");
        const OperandShape& s = isa.op(alts[0]).shape;
        for (int a : alts) {
            if (!(isa.op(a).shape == s)) fail(tok.col, "opcode alternatives disagree on operand shape");
            if (isa.op(a).branch() != isa.op(alts[0]).branch())
                fail(tok.col, "opcode alternatives disagree on branch kind");
        }
        return alts;
    }

    void parse_instruction(const std::vector<Token>& toks) {
        if (fn.blocks.empty()) fail(toks[0].col, "instruction outside of a block");
        size_t i = 0;
        std::optional<Token> def_tok;
        if (toks.size() >= 2 && toks[1].text == "<-") {
            def_tok = toks[0];
            i = 2;
        }
        if (i >= toks.size()) fail(toks.back().col, "missing opcode");
        Instruction ins;
        ins.opcode_alts = resolve_opcodes(toks[i]);
        const OperandShape& shape = isa.op(ins.opcode_alts[0]).shape;
        ++i;

        if (shape.defs == 1 && !def_tok) fail(toks[0].col, "opcode requires a def ('t <- op ...')");
        if (shape.defs == 0 && def_tok) fail(def_tok->col, "opcode takes no def");
        if (def_tok) ins.operands.push_back(parse_operand(*def_tok, Role::Def));

        for (int u = 0; u < shape.uses; ++u) {
            if (i >= toks.size()) fail(toks.back().col, "missing use operand");
            ins.operands.push_back(parse_operand(toks[i++], Role::Use));
        }
        for (int m = 0; m < shape.imms; ++m) {
            if (i >= toks.size()) fail(toks.back().col, "missing immediate");
            if (!is_integer(toks[i].text)) fail(toks[i].col, "expected immediate, got " + toks[i].text);
            ins.imms.push_back(to_integer(toks[i++].text));
        }
        for (int l = 0; l < shape.labels; ++l) {
            if (i >= toks.size()) fail(toks.back().col, "missing branch target");
            if (!is_integer(toks[i].text)) fail(toks[i].col, "expected block id, got " + toks[i].text);
            ins.labels.push_back(static_cast<int>(to_integer(toks[i++].text)));
        }
        if (i < toks.size()) fail(toks[i].col, "unexpected token " + toks[i].text);

        ins.id = static_cast<int>(fn.instructions.size());
        ins.block = fn.blocks.back().id;
        fn.blocks.back().instructions.push_back(ins.id);
        fn.instructions.push_back(std::move(ins));
    }

    void parse_line(const std::string& raw) {
        auto toks = tokenize(raw);
        if (toks.empty()) return;
        const std::string& head = toks[0].text;
        if (head == "func") {
            if (!fn.name.empty()) fail(toks[0].col, "duplicate func header");
            if (toks.size() != 2) fail(toks[0].col, "expected: func NAME");
            fn.name = toks[1].text;
            return;
        }
        if (fn.name.empty()) fail(toks[0].col, "expected func header first");
        if (head == "block") {
            Block b;
            if (toks.size() < 3 || !is_integer(toks[1].text)) fail(toks[0].col, "expected: block ID freq=N [-> S,..]");
            b.id = static_cast<int>(to_integer(toks[1].text));
            if (toks[2].text.rfind("freq=", 0) != 0 || !is_integer(toks[2].text.substr(5)))
                fail(toks[2].col, "expected freq=N");
            b.freq = static_cast<int>(to_integer(toks[2].text.substr(5)));
            size_t i = 3;
            if (i < toks.size()) {
                if (toks[i].text != "->") fail(toks[i].col, "expected '->' or end of line");
                ++i;
                for (; i < toks.size(); ++i) {
                    if (!is_integer(toks[i].text)) fail(toks[i].col, "expected block id");
                    b.successors.push_back(static_cast<int>(to_integer(toks[i].text)));
                }
                if (b.successors.empty()) fail(toks.back().col, "'->' without successors");
            }
            for (const Block& other : fn.blocks)
                if (other.id == b.id) fail(toks[1].col, "duplicate block id");
            fn.blocks.push_back(std::move(b));
            return;
        }
        if (head == "dep") {
            if (toks.size() != 3 || !is_integer(toks[1].text) || !is_integer(toks[2].text))
                fail(toks[0].col, "expected: dep PRODUCER CONSUMER");
            pending_deps.push_back({static_cast<int>(to_integer(toks[1].text)),
                                    static_cast<int>(to_integer(toks[2].text))});
            return;
        }
        parse_instruction(toks);
    }
};

} // namespace

Function parse_function(const std::string& text, const IsaTable& isa) {
    Parser p(isa);
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        ++p.lineno;
        p.parse_line(line);
    }
    if (p.fn.name.empty()) throw SemanticError("no function in input");
    for (auto [i, j] : p.pending_deps) {
        int n = static_cast<int>(p.fn.instructions.size());
        if (i < 0 || j < 0 || i >= n || j >= n)
            throw SemanticError("dep references unknown instruction");
        p.fn.dependencies.push_back({i, j, -1, DepKind::Explicit});
    }
    analyze(p.fn, isa);
    return p.fn;
}

namespace {

void check_structure(const Function& fn, const IsaTable& isa) {
    if (fn.blocks.empty()) throw SemanticError(fn.name + ": function has no blocks");
    for (const Block& b : fn.blocks) {
        if (b.freq < 1) throw SemanticError(fn.name + ": block frequency must be >= 1");
        if (b.instructions.empty())
            throw SemanticError(fn.name + ": block " + std::to_string(b.id) + " is empty");
        bool seen_branch = false;
        for (int id : b.instructions) {
            bool br = fn.instructions[static_cast<size_t>(id)].is_branch(isa);
            if (seen_branch && !br)
                throw SemanticError(fn.name + ": non-branch after branch in block " + std::to_string(b.id));
            seen_branch = seen_branch || br;
        }
        if (!fn.instructions[static_cast<size_t>(b.instructions.back())].is_branch(isa))
            throw SemanticError(fn.name + ": block " + std::to_string(b.id) + " does not end with a branch");
        for (int s : b.successors)
            if (fn.block_index(s) < 0)
                throw SemanticError(fn.name + ": unknown successor block " + std::to_string(s));
    }
    for (const Instruction& ins : fn.instructions) {
        for (int l : ins.labels)
            if (fn.block_index(l) < 0)
                throw SemanticError(fn.name + ": branch to unknown block " + std::to_string(l));
        int defs = 0;
        for (const Operand& op : ins.operands) {
            if (op.role == Role::Def) ++defs;
            if (op.precolor && !isa.is_register(*op.precolor))
                throw SemanticError(fn.name + ": precolor outside register file");
        }
        if (defs > 1) throw SemanticError(fn.name + ": instruction with more than one def");
    }
    for (const Dependency& d : fn.dependencies) {
        if (d.kind != DepKind::Explicit) continue;
        const Instruction& a = fn.instructions[static_cast<size_t>(d.producer)];
        const Instruction& c = fn.instructions[static_cast<size_t>(d.consumer)];
        if (a.block != c.block) throw SemanticError(fn.name + ": explicit dep crosses blocks");
        if (d.producer == d.consumer) throw SemanticError(fn.name + ": self dependency");
    }
}

void derive_dependencies(Function& fn) {
    std::vector<Dependency> kept;
    for (const Dependency& d : fn.dependencies)
        if (d.kind == DepKind::Explicit) kept.push_back(d);
    std::sort(kept.begin(), kept.end(), [](const Dependency& x, const Dependency& y) {
        return std::tie(x.producer, x.consumer) < std::tie(y.producer, y.consumer);
    });
    kept.erase(std::unique(kept.begin(), kept.end(),
                           [](const Dependency& x, const Dependency& y) {
                               return x.producer == y.producer && x.consumer == y.consumer;
                           }),
               kept.end());
    fn.dependencies.clear();

    for (const Block& b : fn.blocks) {
        // last def and uses since that def, per temp
        std::map<int, int> last_def;
        std::map<int, std::vector<int>> live_uses;
        for (int id : b.instructions) {
            const Instruction& ins = fn.instructions[static_cast<size_t>(id)];
            for (const Operand& op : ins.operands) {
                if (op.role != Role::Use) continue;
                auto it = last_def.find(op.temp);
                if (it != last_def.end() && it->second != id)
                    fn.dependencies.push_back({it->second, id, op.temp, DepKind::Flow});
                live_uses[op.temp].push_back(id);
            }
            for (const Operand& op : ins.operands) {
                if (op.role != Role::Def) continue;
                auto it = last_def.find(op.temp);
                if (it != last_def.end() && it->second != id)
                    fn.dependencies.push_back({it->second, id, op.temp, DepKind::Output});
                for (int use : live_uses[op.temp])
                    if (use != id)
                        fn.dependencies.push_back({use, id, op.temp, DepKind::Anti});
                live_uses[op.temp].clear();
                last_def[op.temp] = id;
            }
        }
    }
    // dedup (a flow edge makes an anti edge between the same pair redundant
    // only if directions match; keep exact duplicates out)
    std::sort(fn.dependencies.begin(), fn.dependencies.end(), [](const Dependency& x, const Dependency& y) {
        return std::tie(x.producer, x.consumer, x.kind, x.temp) < std::tie(y.producer, y.consumer, y.kind, y.temp);
    });
    fn.dependencies.erase(std::unique(fn.dependencies.begin(), fn.dependencies.end(),
                                      [](const Dependency& x, const Dependency& y) {
                                          return x.producer == y.producer && x.consumer == y.consumer &&
                                                 x.kind == y.kind && x.temp == y.temp;
                                      }),
                          fn.dependencies.end());
    fn.dependencies.insert(fn.dependencies.end(), kept.begin(), kept.end());
}

void compute_liveness(Function& fn) {
    size_t nb = fn.blocks.size();
    std::vector<std::set<int>> gen(nb), kill(nb);
    for (size_t bi = 0; bi < nb; ++bi) {
        for (int id : fn.blocks[bi].instructions) {
            const Instruction& ins = fn.instructions[static_cast<size_t>(id)];
            for (const Operand& op : ins.operands)
                if (op.role == Role::Use && !kill[bi].count(op.temp)) gen[bi].insert(op.temp);
            for (const Operand& op : ins.operands)
                if (op.role == Role::Def) kill[bi].insert(op.temp);
        }
        fn.blocks[bi].live_in.clear();
        fn.blocks[bi].live_out.clear();
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t bi = nb; bi-- > 0;) {
            Block& b = fn.blocks[bi];
            std::set<int> out;
            for (int s : b.successors) {
                const Block& succ = fn.blocks[static_cast<size_t>(fn.block_index(s))];
                out.insert(succ.live_in.begin(), succ.live_in.end());
            }
            std::set<int> in = gen[bi];
            for (int t : out)
                if (!kill[bi].count(t)) in.insert(t);
            if (out != b.live_out || in != b.live_in) {
                b.live_out = std::move(out);
                b.live_in = std::move(in);
                changed = true;
            }
        }
    }

    // A precolored temp that is defined but never used carries a function
    // result: keep it live on every path from its definition onward.
    for (const TempInfo& t : fn.temps) {
        if (!t.precolor || !t.use_instructions.empty() || t.def_instructions.empty()) continue;
        std::set<int> reached;
        std::vector<int> work;
        for (int def : t.def_instructions)
            work.push_back(fn.block_index(fn.instructions[static_cast<size_t>(def)].block));
        std::set<int> def_blocks(work.begin(), work.end());
        while (!work.empty()) {
            int bi = work.back();
            work.pop_back();
            Block& b = fn.blocks[static_cast<size_t>(bi)];
            if (!b.live_out.insert(t.id).second) continue;
            for (int s : b.successors) {
                int si = fn.block_index(s);
                fn.blocks[static_cast<size_t>(si)].live_in.insert(t.id);
                work.push_back(si);
            }
        }
    }

    const Block& entry = fn.blocks[0];
    for (int t : entry.live_in)
        if (!fn.temps[static_cast<size_t>(t)].precolor)
            throw SemanticError(fn.name + ": temp " + fn.temps[static_cast<size_t>(t)].name +
                                " may be used before definition");
}

} // namespace

void analyze(Function& fn, const IsaTable& isa) {
    fn.operand_base.assign(fn.instructions.size(), 0);
    int base = 0;
    for (size_t i = 0; i < fn.instructions.size(); ++i) {
        if (fn.instructions[i].id != static_cast<int>(i))
            throw SemanticError(fn.name + ": instruction ids must be dense and ordered");
        fn.operand_base[i] = base;
        base += static_cast<int>(fn.instructions[i].operands.size());
    }
    fn.num_operands = base;

    for (TempInfo& t : fn.temps) {
        t.def_instructions.clear();
        t.use_instructions.clear();
    }
    for (const Instruction& ins : fn.instructions) {
        for (const Operand& op : ins.operands) {
            TempInfo& t = fn.temps[static_cast<size_t>(op.temp)];
            if (op.precolor) {
                if (t.precolor && *t.precolor != *op.precolor)
                    throw SemanticError(fn.name + ": temp " + t.name + " precolored twice differently");
                t.precolor = op.precolor;
            }
            if (op.role == Role::Def)
                t.def_instructions.push_back(ins.id);
            else
                t.use_instructions.push_back(ins.id);
        }
    }
    for (TempInfo& t : fn.temps) {
        std::set<int> touched;
        for (int i : t.def_instructions) touched.insert(fn.instructions[static_cast<size_t>(i)].block);
        for (int i : t.use_instructions) touched.insert(fn.instructions[static_cast<size_t>(i)].block);
        t.global = touched.size() > 1;
    }

    check_structure(fn, isa);
    derive_dependencies(fn);
    compute_liveness(fn);
}

std::string serialize_function(const Function& fn, const IsaTable& isa) {
    std::ostringstream out;
    out << "func " << fn.name << "\n";
    for (const Block& b : fn.blocks) {
        out << "block " << b.id << " freq=" << b.freq;
        if (!b.successors.empty()) {
            out << " ->";
            for (size_t i = 0; i < b.successors.size(); ++i)
                out << (i ? "," : " ") << b.successors[i];
        }
        out << "\n";
        for (int id : b.instructions) {
            const Instruction& ins = fn.instructions[static_cast<size_t>(id)];
            out << "  ";
            auto temp_token = [&fn](const Operand& op) {
                const TempInfo& t = fn.temps[static_cast<size_t>(op.temp)];
                if (!t.name.empty() && t.name[0] == '$') return t.name;
                if (op.precolor) return t.name + ":$r" + std::to_string(*op.precolor);
                return t.name;
            };
            size_t oi = 0;
            if (!ins.operands.empty() && ins.operands[0].role == Role::Def) {
                out << temp_token(ins.operands[0]) << " <- ";
                oi = 1;
            }
            // opcode spelling: alias if the alternatives match one exactly
            std::string opname;
            for (const auto& [alias, alts] : isa.aliases)
                if (alts == ins.opcode_alts) opname = alias;
            if (opname.empty()) {
                for (size_t a = 0; a < ins.opcode_alts.size(); ++a)
                    opname += (a ? "|" : "") + isa.op(ins.opcode_alts[a]).name;
            }
            out << opname;
            bool first = true;
            for (; oi < ins.operands.size(); ++oi) {
                out << (first ? " " : ", ") << temp_token(ins.operands[oi]);
                first = false;
            }
            for (int64_t imm : ins.imms) {
                out << (first ? " " : ", ") << imm;
                first = false;
            }
            for (int l : ins.labels) {
                out << (first ? " " : ", ") << l;
                first = false;
            }
            out << "\n";
        }
        for (const Dependency& d : fn.dependencies)
            if (d.kind == DepKind::Explicit &&
                fn.instructions[static_cast<size_t>(d.producer)].block == b.id)
                out << "  dep " << d.producer << " " << d.consumer << "\n";
    }
    return out.str();
}

bool functions_equal(const Function& a, const Function& b) {
    if (a.name != b.name || a.blocks.size() != b.blocks.size() ||
        a.instructions.size() != b.instructions.size() || a.temps.size() != b.temps.size() ||
        a.dependencies.size() != b.dependencies.size())
        return false;
    for (size_t i = 0; i < a.blocks.size(); ++i) {
        const Block &x = a.blocks[i], &y = b.blocks[i];
        if (std::tie(x.id, x.freq, x.successors, x.instructions, x.live_in, x.live_out) !=
            std::tie(y.id, y.freq, y.successors, y.instructions, y.live_in, y.live_out))
            return false;
    }
    for (size_t i = 0; i < a.instructions.size(); ++i) {
        const Instruction &x = a.instructions[i], &y = b.instructions[i];
        if (std::tie(x.id, x.opcode_alts, x.imms, x.labels, x.block) !=
            std::tie(y.id, y.opcode_alts, y.imms, y.labels, y.block))
            return false;
        if (x.operands.size() != y.operands.size()) return false;
        for (size_t o = 0; o < x.operands.size(); ++o)
            if (std::tie(x.operands[o].role, x.operands[o].temp, x.operands[o].precolor) !=
                std::tie(y.operands[o].role, y.operands[o].temp, y.operands[o].precolor))
                return false;
    }
    for (size_t i = 0; i < a.temps.size(); ++i) {
        const TempInfo &x = a.temps[i], &y = b.temps[i];
        if (std::tie(x.id, x.name, x.def_instructions, x.use_instructions, x.global, x.precolor) !=
            std::tie(y.id, y.name, y.def_instructions, y.use_instructions, y.global, y.precolor))
            return false;
    }
    for (size_t i = 0; i < a.dependencies.size(); ++i) {
        const Dependency &x = a.dependencies[i], &y = b.dependencies[i];
        if (std::tie(x.producer, x.consumer, x.temp, x.kind) !=
            std::tie(y.producer, y.consumer, y.temp, y.kind))
            return false;
    }
    return true;
}

} // namespace mosaic
