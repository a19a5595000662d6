#include "mosaic/gadgets.hpp"

#include <doctest.h>

using namespace mosaic;

namespace {
const IsaTable& isa() { return mini_mips(); }

AssemblyListing listing(const std::string& text) { return parse_listing(text); }

const char* kPlain = "00000000: li r1, 1\n"
                     "00000004: add r2, r1, r1\n"
                     "00000008: jr r5\n";

} // namespace

TEST_CASE("listings without indirect branches have no gadgets") {
    AssemblyListing l = listing("00000000: li r1, 1\n00000004: b 00000000\n");
    CHECK(scan_gadgets(l, isa(), 8).gadgets.empty());
}

TEST_CASE("suffix enumeration is bounded by the available prefix") {
    GadgetSet g = scan_gadgets(listing(kPlain), isa(), 8);
    CHECK(g.gadgets.size() == 3); // lengths 1, 2, 3 including the branch
    for (const Gadget& gad : g.gadgets) CHECK(gad.end == 8);
}

TEST_CASE("gadgets never span another branch") {
    AssemblyListing l = listing("00000000: li r1, 1\n"
                                "00000004: b 00000000\n"
                                "00000008: add r2, r1, r1\n"
                                "0000000c: jr r5\n");
    GadgetSet g = scan_gadgets(l, isa(), 8);
    CHECK(g.gadgets.size() == 2); // {jr} and {add, jr}; the b blocks longer bodies
}

TEST_CASE("window limits gadget length") {
    GadgetSet g = scan_gadgets(listing(kPlain), isa(), 2);
    CHECK(g.gadgets.size() == 2);
}

TEST_CASE("nop lines are inside the raw window but not the body") {
    AssemblyListing l = listing("00000000: li r1, 1\n"
                                "00000004: nop\n"
                                "00000008: jr r5\n");
    GadgetSet g = scan_gadgets(l, isa(), 8);
    REQUIRE(g.gadgets.size() == 3);
    for (const Gadget& gad : g.gadgets)
        for (const AsmLine& line : gad.body) CHECK(line.mnemonic != "nop");
}

TEST_CASE("srate fixtures") {
    SUBCASE("identical listings survive fully") {
        AssemblyListing a = listing(kPlain);
        auto r = srate(scan_gadgets(a, isa(), 8), a, isa(), 8);
        REQUIRE(r.has_value());
        CHECK(r->ratio() == doctest::Approx(1.0));
    }
    SUBCASE("disjoint branch addresses share nothing") {
        AssemblyListing a = listing(kPlain);
        AssemblyListing b = listing("00000000: li r1, 1\n"
                                    "00000004: add r2, r1, r1\n"
                                    "00000008: sub r3, r1, r1\n"
                                    "0000000c: jr r5\n");
        auto r = srate(scan_gadgets(a, isa(), 8), b, isa(), 8);
        REQUIRE(r.has_value());
        CHECK(r->ratio() == doctest::Approx(0.0));
    }
    SUBCASE("a renamed register kills exactly the gadgets containing it") {
        AssemblyListing a = listing("00000000: add r2, r1, r1\n"
                                    "00000004: jr r5\n");
        AssemblyListing b = listing("00000000: add r3, r1, r1\n"
                                    "00000004: jr r5\n");
        // gadgets of a: {jr} and {add r2.., jr}; only the bare jr survives
        auto r = srate(scan_gadgets(a, isa(), 8), b, isa(), 8);
        REQUIRE(r.has_value());
        CHECK(r->surviving == 1);
        CHECK(r->total == 2);
        CHECK(r->ratio() == doctest::Approx(0.5));
    }
    SUBCASE("no gadgets means undefined") {
        AssemblyListing empty = listing("00000000: li r1, 1\n00000004: b 00000000\n");
        CHECK_FALSE(srate(scan_gadgets(empty, isa(), 8), empty, isa(), 8).has_value());
    }
}

TEST_CASE("a leading nop shifts addresses and breaks survival") {
    AssemblyListing a = listing(kPlain);
    AssemblyListing b = listing("00000000: nop\n"
                                "00000004: li r1, 1\n"
                                "00000008: add r2, r1, r1\n"
                                "0000000c: jr r5\n");
    auto r = srate(scan_gadgets(a, isa(), 8), b, isa(), 8);
    REQUIRE(r.has_value());
    CHECK(r->ratio() == doctest::Approx(0.0));
}

TEST_CASE("an inserted interior nop preserves the normalized body at fixed anchors") {
    // same (start, end) window, same non-nop content
    AssemblyListing a = listing("00000000: add r2, r1, r1\n"
                                "00000004: nop\n"
                                "00000008: jr r5\n");
    AssemblyListing b = listing("00000000: nop\n"
                                "00000004: add r2, r1, r1\n"
                                "00000008: jr r5\n");
    GadgetSet ga = scan_gadgets(a, isa(), 8);
    auto r = srate(ga, b, isa(), 8);
    REQUIRE(r.has_value());
    CHECK(r->surviving >= 1);
}

TEST_CASE("survival histograms bucket ordered pairs") {
    SUBCASE("identical copies all land in the top bucket") {
        std::vector<AssemblyListing> s = {listing(kPlain), listing(kPlain), listing(kPlain)};
        SurvivalHistogram h = survival_histogram(s, isa(), 8);
        CHECK(h.num == 3);
        CHECK(h.pairs_evaluated == 6);
        CHECK(h.buckets[3] == 6);
        CHECK(h.share(3) == doctest::Approx(100.0));
    }
    SUBCASE("fully disjoint variants all land in the zero bucket") {
        std::vector<AssemblyListing> s = {
            listing("00000000: li r1, 1\n00000004: jr r5\n"),
            listing("00000000: li r1, 1\n00000004: li r2, 2\n00000008: jr r5\n"),
            listing("00000000: li r1, 1\n00000004: li r2, 2\n00000008: li r3, 3\n0000000c: jr r5\n"),
        };
        SurvivalHistogram h = survival_histogram(s, isa(), 8);
        CHECK(h.pairs_evaluated == 6);
        CHECK(h.buckets[0] == 6);
    }
    SUBCASE("counts agree with a naive recomputation on a mixed set") {
        std::string a, b;
        int n = 0;
        auto addl = [&n](std::string& out, const std::string& body) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%08x: %s\n", 4 * n, body.c_str());
            out += buf;
        };
        // ten isolated jr-anchored sites; nine bodies renamed in b
        for (int i = 0; i < 10; ++i) {
            addl(a, i == 0 ? "add r2, r1, r1" : "add r2, r1, r1");
            addl(b, i == 0 ? "add r2, r1, r1" : "add r3, r1, r1");
            ++n;
            addl(a, "jr r5");
            addl(b, "jr r5");
            ++n;
            addl(a, "b 00000000");
            addl(b, "b 00000000");
            ++n;
        }
        // each jr yields 2 gadgets ({jr}, {add, jr}); bare jrs always survive
        SurvivalRate r = *srate(scan_gadgets(parse_listing(a), isa(), 8), parse_listing(b), isa(), 8);
        CHECK(r.total == 20);
        CHECK(r.surviving == 11);
    }
}
