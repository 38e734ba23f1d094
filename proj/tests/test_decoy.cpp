#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "tmcm/decoy.hpp"

using namespace tmcm;

static DecoyPlan example_plan(uint64_t seed = 7, bool pinned = true) {
    ConstantSet cs = constant_set_new({13, 23}, 8);
    PlanOptions opts;
    opts.seed = seed;
    if (pinned) opts.pinned_positions = example_13_23_positions();
    return assign_decoys(cs, 4, opts);
}

TEST_CASE("worked example decoy sets") {
    DecoyPlan plan = example_plan();
    CHECK(plan.decoys[0] == std::vector<int64_t>{12, 15, 9});
    CHECK(plan.decoys[1] == std::vector<int64_t>{22, 21, 19});
    CHECK(plan.key_bits == std::vector<int>{2, 2});
    CHECK(plan.r == 6);
    CHECK(plan.p == 4);
}

TEST_CASE("worked example key encoding") {
    DecoyPlan plan = example_plan();
    CHECK(plan.correct_key.to_string() == "1011");
    CHECK(plan.correct_key.group_value(0) == 2); // slot of 13 in {15,12,13,9}
    CHECK(plan.correct_key.group_value(1) == 3); // slot of 23 in {19,22,21,23}

    KeyAssignment wrong = plan.correct_key;
    wrong.bits = {1, 0, 0, 0};
    CHECK(plan.constant_for(wrong, 0) == 13);
    CHECK(plan.constant_for(wrong, 1) == 19);
}

TEST_CASE("hamming-lsb candidate order") {
    // Closest unused constant in 6-bit two's complement, ties broken toward
    // flips of lower bit positions.
    std::set<int64_t> used{13, 23};
    int64_t d1 = next_decoy_hamming(13, used, 5);
    CHECK(d1 == 12); // flip bit 0
    used.insert(d1);
    int64_t d2 = next_decoy_hamming(13, used, 5);
    CHECK(d2 == 15); // flip bit 1
    used.insert(d2);
    CHECK(next_decoy_hamming(13, used, 5) == 9); // flip bit 2

    // distance-1 neighbours exhausted -> distance 2, lowest bit pair first
    std::set<int64_t> u2{5};
    for (int b = 0; b < 6; ++b) {
        int64_t v = 5 ^ (int64_t{1} << b);
        if (v >= 32) v -= 64; // back to 6-bit two's complement
        u2.insert(v);
    }
    int64_t d = next_decoy_hamming(5, u2, 5);
    CHECK(hamming(5, d, 6) == 2);
    CHECK(d == 6); // flips bits {0,1}
}

TEST_CASE("every decoy is distinct and in range") {
    for (uint64_t seed : {1u, 2u, 3u, 4u}) {
        ConstantSet cs = constant_set_new({7, -3, 44, 5}, 8);
        for (int p : {4, 6, 9}) {
            PlanOptions opts;
            opts.seed = seed;
            for (DecoyPolicy pol : {DecoyPolicy::HammingLsb, DecoyPolicy::Random}) {
                opts.policy = pol;
                DecoyPlan plan = assign_decoys(cs, p, opts);
                std::set<int64_t> seen(cs.targets.begin(), cs.targets.end());
                int64_t total = 0;
                for (const auto& group : plan.decoys)
                    for (int64_t v : group) {
                        CHECK(seen.insert(v).second); // never reuses a constant
                        CHECK(v != 0);
                        CHECK(v >= -(int64_t{1} << cs.mbw));
                        CHECK(v < (int64_t{1} << cs.mbw));
                        ++total;
                    }
                CHECK(total == plan.r);
                int64_t key_total = 0;
                for (size_t j = 0; j < plan.decoys.size(); ++j) {
                    CHECK(int64_t(plan.decoys[j].size()) ==
                          (int64_t{1} << plan.key_bits[j]) - 1);
                    key_total += plan.key_bits[j];
                }
                CHECK(key_total == p);
            }
        }
    }
}

TEST_CASE("positions are a permutation of target plus decoys") {
    DecoyPlan plan = example_plan(3, false); // seeded placement
    for (size_t j = 0; j < plan.positions.size(); ++j) {
        std::multiset<int64_t> expect(plan.decoys[j].begin(), plan.decoys[j].end());
        expect.insert(plan.base.targets[j]);
        std::multiset<int64_t> got(plan.positions[j].begin(), plan.positions[j].end());
        CHECK(expect == got);
        CHECK(plan.positions[j][size_t(plan.target_slot[j])] == plan.base.targets[j]);
    }
}

TEST_CASE("seeded determinism") {
    DecoyPlan a = example_plan(42, false);
    DecoyPlan b = example_plan(42, false);
    DecoyPlan c = example_plan(43, false);
    CHECK(a.to_json() == b.to_json());
    CHECK((a.positions != c.positions || a.correct_key.bits != c.correct_key.bits ||
           a.to_json() != c.to_json()));
}

TEST_CASE("json round trip") {
    DecoyPlan plan = example_plan();
    DecoyPlan back = DecoyPlan::from_json(plan.to_json());
    CHECK(back.to_json() == plan.to_json());
    CHECK(back.correct_key.bits == plan.correct_key.bits);

    // tampered key string is rejected
    std::string text = plan.to_json();
    auto pos = text.find("\"1011\"");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 6, "\"0011\"");
    CHECK_THROWS(DecoyPlan::from_json(text));
}

TEST_CASE("decoy space exhaustion fails cleanly") {
    ConstantSet cs = constant_set_new({1, 2}, 8); // mbw = 1 -> 4 constants total
    PlanOptions opts;
    CHECK_THROWS(assign_decoys(cs, 6, opts));
}

TEST_CASE("random policy differs from hamming on a larger field") {
    ConstantSet cs = constant_set_new({100, 200}, 8);
    PlanOptions h, r;
    r.policy = DecoyPolicy::Random;
    r.seed = h.seed = 9;
    DecoyPlan ph = assign_decoys(cs, 8, h);
    DecoyPlan pr = assign_decoys(cs, 8, r);
    CHECK(ph.decoys != pr.decoys);
}
