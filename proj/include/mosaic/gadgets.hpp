#pragma once

#include "mosaic/listing.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mosaic {

// A JOP gadget: a short suffix of straight-line code ending in an indirect
// branch. The body is stored nop-free; identity is (start, end, body).
struct Gadget {
    uint32_t start = 0;
    uint32_t end = 0; // address of the terminating indirect branch
    std::vector<AsmLine> body;
};

struct GadgetSet {
    std::vector<Gadget> gadgets;
};

// Suffix enumeration: one gadget per start offset 1..window ending at each
// indirect branch, never spanning another branch-flagged line.
GadgetSet scan_gadgets(const AssemblyListing& listing, const IsaTable& isa, int window = 8);

struct SurvivalRate {
    long long surviving = 0;
    long long total = 0;
    double ratio() const { return static_cast<double>(surviving) / static_cast<double>(total); }
};

// Fraction of gadgets of one variant found byte-identical (after nop
// removal) at the same addresses in another variant. Undefined when the
// first variant has no gadgets.
std::optional<SurvivalRate> srate(const GadgetSet& gadgets_i, const AssemblyListing& listing_j,
                                  const IsaTable& isa, int window = 8);

// Buckets over srate percentages: =0, (0,10], (10,40], (40,100].
struct SurvivalHistogram {
    long long buckets[4] = {0, 0, 0, 0};
    long long pairs_evaluated = 0;
    int num = 0; // variants counted

    double share(int b) const {
        return pairs_evaluated ? 100.0 * static_cast<double>(buckets[b]) /
                                     static_cast<double>(pairs_evaluated)
                               : 0.0;
    }
};

// srate over all ordered pairs of listings; pairs whose first member has no
// gadgets are excluded.
SurvivalHistogram survival_histogram(const std::vector<AssemblyListing>& listings,
                                     const IsaTable& isa, int window = 8);

double mean_srate(const std::vector<AssemblyListing>& listings, const IsaTable& isa, int window = 8);

} // namespace mosaic
