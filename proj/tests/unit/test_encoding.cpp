#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "sane/encoding.hpp"
#include "sane/fitness.hpp"
#include "support/support.hpp"

using namespace sane;

namespace {

CellGene unit(int key, std::vector<int> attrs) { return CellGene{key, "unit", 0, 0, std::move(attrs), {}}; }

Genotype with_units(std::vector<std::vector<int>> attrs) {
    Genotype g;
    g.id = 1;
    g.strands = {Strand{"body", {}}};
    int key = 1;
    for (auto& a : attrs) {
        g.strands[0].cells.push_back(unit(key++, std::move(a)));
    }
    g.next_key = key;
    relink(g.strands[0]);
    return g;
}

}  // namespace

TEST(IndexBits, SmallDomains) {
    EXPECT_EQ(index_bits(1), 0);
    EXPECT_EQ(index_bits(2), 1);
    EXPECT_EQ(index_bits(3), 2);
    EXPECT_EQ(index_bits(4), 2);
    EXPECT_EQ(index_bits(5), 3);
    EXPECT_EQ(index_bits(1017), 10);
}

TEST(StateSchema, SubsetSumLayout) {
    const auto schema = StateSchema::from_space(fixtures::subset_sum_space(2));
    ASSERT_EQ(schema.cells.size(), 1u);
    EXPECT_EQ(schema.cells[0].bits(), 4);
    EXPECT_EQ(schema.cells[0].capacity, 2);
    EXPECT_EQ(schema.total_bits(), 8u);
}

TEST(StateSchema, CnnTotalBits) {
    // conv: 1017 channel values (10 bits), 11 kernels (4), 4 strides (2), 6 paddings (3), 3 affiliated.
    // linear: 4081 widths (12 bits), 1 affiliated.
    const auto schema = StateSchema::from_space(builtin_space(BuiltinSpace::cnn));
    EXPECT_EQ(schema.find("conv")->bits(), 10 + 4 + 2 + 3 + 3);
    EXPECT_EQ(schema.find("linear")->bits(), 12 + 1);
    EXPECT_EQ(schema.total_bits(), static_cast<std::size_t>(32 * 22 + 32 * 13));
    EXPECT_EQ(schema.find("missing"), nullptr);
}

TEST(EncodeBinary, IndexFiveInFourBits) {
    // Index 5 = 0b0101: attribute 0 and attribute 2 at their upper value.
    const auto schema = StateSchema::from_space(fixtures::subset_sum_space(2));
    const auto g = with_units({{2, 1, 2, 0}});
    EXPECT_EQ(cell_state_index(g.strands[0].cells[0], schema.cells[0]), 5u);
    EXPECT_EQ(encode_binary(g, schema), "01010000");
}

TEST(EncodeBinary, EmptySlotsAreZero) {
    const auto schema = StateSchema::from_space(fixtures::subset_sum_space(3));
    const auto g = with_units({});
    EXPECT_EQ(encode_binary(g, schema), std::string(12, '0'));
}

TEST(EncodeBinary, SlotsFollowStrandOrder) {
    const auto schema = StateSchema::from_space(fixtures::subset_sum_space(3));
    const auto g = with_units({{2, 2, 2, 1}, {2, 1, 1, 0}});
    EXPECT_EQ(encode_binary(g, schema), "1111" "0001" "0000");
}

TEST(EncodeBinary, AffiliatedPresenceBitsSitAboveAttributes) {
    const auto space = builtin_space(BuiltinSpace::cnn);
    const auto schema = StateSchema::from_space(space);
    CellGene cell{1, "linear", 0, 0, {16}, {"relu"}};
    EXPECT_EQ(cell_state_index(cell, *schema.find("linear")), std::uint64_t{1} << 12);
    cell.affiliated.clear();
    cell.core_attrs = {18};
    EXPECT_EQ(cell_state_index(cell, *schema.find("linear")), 2u);
}

TEST(EncodeBinary, OutOfDomainAttributeThrows) {
    const auto schema = StateSchema::from_space(fixtures::subset_sum_space(2));
    EXPECT_THROW(encode_binary(with_units({{3, 1, 1, 0}}), schema), EncodingError);
    EXPECT_THROW(encode_binary(with_units({{0, 1, 1, 0}}), schema), EncodingError);
}

TEST(EncodeBinary, OverCapacityThrows) {
    const auto schema = StateSchema::from_space(fixtures::subset_sum_space(1));
    EXPECT_THROW(encode_binary(with_units({{1, 1, 1, 0}, {1, 1, 1, 0}}), schema), EncodingError);
}

TEST(EncodeBinary, StructurallyEqualGenotypesEncodeEqually) {
    const auto space = builtin_space(BuiltinSpace::cnn);
    const auto schema = StateSchema::from_space(space);
    Rng rng_a(11), rng_b(11);
    IdAllocator ids_a, ids_b(100);
    const auto a = fixtures::random_genotype(space, rng_a, 40, ids_a);
    const auto b = fixtures::random_genotype(space, rng_b, 40, ids_b);
    ASSERT_TRUE(structurally_equal(a, b));
    ASSERT_NE(a.id, b.id);
    EXPECT_EQ(encode_binary(a, schema), encode_binary(b, schema));
}

TEST(EncodeBinary, OccupiedSlotsMatchCellCounts) {
    const auto space = builtin_space(BuiltinSpace::cnn);
    const auto schema = StateSchema::from_space(space);
    Rng rng(3);
    IdAllocator ids;
    for (int trial = 0; trial < 50; ++trial) {
        const auto g = fixtures::random_genotype(space, rng, 30, ids);
        const auto bits = encode_binary(g, schema);
        ASSERT_EQ(bits.size(), schema.total_bits());
        std::size_t offset = 0;
        for (const auto& layout : schema.cells) {
            int nonzero = 0;
            for (int slot = 0; slot < layout.capacity; ++slot) {
                const auto piece = bits.substr(offset, static_cast<std::size_t>(layout.bits()));
                nonzero += piece.find('1') != std::string::npos ? 1 : 0;
                offset += static_cast<std::size_t>(layout.bits());
            }
            // Every built-in cell carries a core attribute above its minimum or an affiliated module,
            // except the all-minimum state, which this walk may reach; occupancy bounds the count.
            EXPECT_LE(nonzero, g.count_type(layout.cell_type));
        }
    }
}

TEST(EncodeBinary, ExhaustiveSmallSpaceHasUniqueOptimum) {
    // Z = 12: every genotype of up to three binary cells, all 16 states each.
    const auto space = fixtures::subset_sum_space(3);
    const auto problem = SubsetSumProblem::all_ones(StateSchema::from_space(space));
    ASSERT_EQ(problem.target, std::string(12, '1'));

    auto attrs_of = [](int state) {
        return std::vector<int>{1 + (state & 1), 1 + ((state >> 1) & 1), 1 + ((state >> 2) & 1), (state >> 3) & 1};
    };
    std::set<std::string> encodings;
    int optimum_hits = 0;
    double best = -1;
    for (int n = 0; n <= 3; ++n) {
        int combos = 1;
        for (int i = 0; i < n; ++i) {
            combos *= 16;
        }
        for (int c = 0; c < combos; ++c) {
            std::vector<std::vector<int>> cells;
            int rest = c;
            for (int i = 0; i < n; ++i) {
                cells.push_back(attrs_of(rest % 16));
                rest /= 16;
            }
            const auto g = with_units(cells);
            const double f = subset_sum_fitness(g, problem);
            const auto bits = encode_binary(g, problem.schema);
            EXPECT_DOUBLE_EQ(f, static_cast<double>(std::count(bits.begin(), bits.end(), '1')));
            encodings.insert(bits);
            if (f > best) {
                best = f;
                optimum_hits = 0;
            }
            if (f == best) {
                ++optimum_hits;
            }
        }
    }
    EXPECT_DOUBLE_EQ(best, 12.0);
    EXPECT_EQ(optimum_hits, 1);
    EXPECT_EQ(encodings.size(), 4096u);
}
