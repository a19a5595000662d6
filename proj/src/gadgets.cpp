#include "mosaic/gadgets.hpp"

#include <map>
#include <unordered_map>

namespace mosaic {

namespace {

struct MnemonicFlags {
    bool branch = false;
    bool indirect = false;
    bool nop = false;
};

std::unordered_map<std::string, MnemonicFlags> flag_table(const IsaTable& isa) {
    std::unordered_map<std::string, MnemonicFlags> t;
    for (const Opcode& oc : isa.opcodes) {
        MnemonicFlags& f = t[oc.mnemonic];
        f.branch |= oc.branch();
        f.indirect |= oc.indirect_branch;
        f.nop |= oc.is_nop;
    }
    return t;
}

} // namespace

GadgetSet scan_gadgets(const AssemblyListing& listing, const IsaTable& isa, int window) {
    if (window < 1) throw std::invalid_argument("gadget window must be >= 1");
    auto flags = flag_table(isa);
    auto flag_of = [&flags](const AsmLine& l) {
        auto it = flags.find(l.mnemonic);
        return it == flags.end() ? MnemonicFlags{} : it->second;
    };

    GadgetSet out;
    for (size_t e = 0; e < listing.lines.size(); ++e) {
        if (!flag_of(listing.lines[e]).indirect) continue;
        for (int len = 1; len <= window; ++len) {
            long long start = static_cast<long long>(e) - len + 1;
            if (start < 0) break;
            if (len > 1 && flag_of(listing.lines[static_cast<size_t>(start)]).branch)
                break; // a branch strictly inside; longer bodies contain it too
            Gadget g;
            g.start = listing.lines[static_cast<size_t>(start)].address;
            g.end = listing.lines[e].address;
            for (size_t i = static_cast<size_t>(start); i <= e; ++i)
                if (!flag_of(listing.lines[i]).nop) g.body.push_back(listing.lines[i]);
            out.gadgets.push_back(std::move(g));
        }
    }
    return out;
}

std::optional<SurvivalRate> srate(const GadgetSet& gadgets_i, const AssemblyListing& listing_j,
                                  const IsaTable& isa, int window) {
    if (gadgets_i.gadgets.empty()) return std::nullopt;
    GadgetSet gj = scan_gadgets(listing_j, isa, window);
    std::map<std::pair<uint32_t, uint32_t>, const Gadget*> at;
    for (const Gadget& g : gj.gadgets) at[{g.start, g.end}] = &g;
    SurvivalRate r;
    r.total = static_cast<long long>(gadgets_i.gadgets.size());
    for (const Gadget& g : gadgets_i.gadgets) {
        auto it = at.find({g.start, g.end});
        if (it != at.end() && it->second->body == g.body) ++r.surviving;
    }
    return r;
}

SurvivalHistogram survival_histogram(const std::vector<AssemblyListing>& listings,
                                     const IsaTable& isa, int window) {
    if (listings.size() < 2) throw std::invalid_argument("survival_histogram needs >= 2 variants");
    SurvivalHistogram h;
    h.num = static_cast<int>(listings.size());
    std::vector<GadgetSet> sets;
    sets.reserve(listings.size());
    for (const auto& l : listings) sets.push_back(scan_gadgets(l, isa, window));
    for (size_t i = 0; i < listings.size(); ++i) {
        for (size_t j = 0; j < listings.size(); ++j) {
            if (i == j) continue;
            auto r = srate(sets[i], listings[j], isa, window);
            if (!r) continue;
            ++h.pairs_evaluated;
            // exact bucket arithmetic on the fraction surviving/total
            if (r->surviving == 0)
                ++h.buckets[0];
            else if (r->surviving * 10 <= r->total)
                ++h.buckets[1];
            else if (r->surviving * 10 <= r->total * 4)
                ++h.buckets[2];
            else
                ++h.buckets[3];
        }
    }
    return h;
}

double mean_srate(const std::vector<AssemblyListing>& listings, const IsaTable& isa, int window) {
    std::vector<GadgetSet> sets;
    sets.reserve(listings.size());
    for (const auto& l : listings) sets.push_back(scan_gadgets(l, isa, window));
    double sum = 0;
    long long count = 0;
    for (size_t i = 0; i < listings.size(); ++i) {
        for (size_t j = 0; j < listings.size(); ++j) {
            if (i == j) continue;
            auto r = srate(sets[i], listings[j], isa, window);
            if (!r) continue;
            sum += r->ratio();
            ++count;
        }
    }
    return count ? sum / static_cast<double>(count) : 0.0;
}

} // namespace mosaic
